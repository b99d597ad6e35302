#include "domsplit/sequence_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "domsplit/error.hpp"

namespace domsplit {

using nlohmann::json;

namespace {

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error(ErrorCode::InvalidSequence, "complex entries must be [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

json sequence_to_json(const MatrixSequence& seq) {
  json entries = json::array();
  for (int j = seq.window().lo; j <= seq.window().hi; ++j) {
    const Mat2C& B = seq[j];
    entries.push_back({{"j", j}, {"m", json::array({cplx_json(B.a), cplx_json(B.b), cplx_json(B.c), cplx_json(B.d)})}});
  }
  json doc = {{"window", json::array({seq.window().lo, seq.window().hi})},
              {"bound_M", seq.bound_M()},
              {"entries", std::move(entries)}};
  if (!seq.source().is_null()) doc["source"] = seq.source();
  return doc;
}

MatrixSequence sequence_from_json(const json& doc) {
  try {
    const json& w = doc.at("window");
    if (!w.is_array() || w.size() != 2) throw Error(ErrorCode::InvalidSequence, "window must be [lo, hi]");
    const Window window{w[0].get<int>(), w[1].get<int>()};
    if (window.hi < window.lo) throw Error(ErrorCode::InvalidSequence, "window is empty");
    const double bound = doc.at("bound_M").get<double>();
    std::vector<Mat2C> entries(static_cast<std::size_t>(window.size()));
    std::vector<bool> seen(entries.size(), false);
    for (const json& e : doc.at("entries")) {
      const int j = e.at("j").get<int>();
      if (!window.contains(j)) throw Error(ErrorCode::InvalidSequence, "entry j=" + std::to_string(j) + " outside window");
      const std::size_t idx = static_cast<std::size_t>(j - window.lo);
      if (seen[idx]) throw Error(ErrorCode::InvalidSequence, "duplicate entry j=" + std::to_string(j));
      const json& m = e.at("m");
      if (!m.is_array() || m.size() != 4) throw Error(ErrorCode::InvalidSequence, "m must hold four entries");
      entries[idx] = {cplx_from(m[0]), cplx_from(m[1]), cplx_from(m[2]), cplx_from(m[3])};
      seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw Error(ErrorCode::InvalidSequence, "missing entry j=" + std::to_string(window.lo + static_cast<int>(i)));
    return MatrixSequence(window, bound, std::move(entries), doc.value("source", json(nullptr)));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSequence, ex.what());
  }
}

MatrixSequence read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSequence, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSequence, path + ": " + ex.what());
  }
  return sequence_from_json(doc);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace domsplit
