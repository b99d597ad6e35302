#pragma once

#include <string>

#include <json.hpp>

#include "domsplit/cocycle.hpp"

namespace domsplit {

// {"window":[lo,hi],"bound_M":x,"entries":[{"j":j,"m":[[re,im] x4]}]}, entries row-major.
nlohmann::json sequence_to_json(const MatrixSequence& seq);
// Throws InvalidSequence on malformed documents.
MatrixSequence sequence_from_json(const nlohmann::json& doc);

MatrixSequence read_sequence_file(const std::string& path);

// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace domsplit
