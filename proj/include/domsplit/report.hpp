#pragma once

#include <string>

#include <json.hpp>

#include "domsplit/avalanche.hpp"
#include "domsplit/conditions.hpp"

namespace domsplit {

// Non-finite values become the strings "inf", "-inf" and "nan".
nlohmann::json number_json(double v);
// Affine coordinate [re, im], or "inf" for the point at infinity.
nlohmann::json point_json(const ProjPoint& p);

nlohmann::json rate_fit_json(const RateFit& r, bool with_table);
nlohmann::json fi_fit_json(const FiFit& r, bool with_table);
nlohmann::json splitting_json(const SplittingEstimate& e);
nlohmann::json params_json(const ConditionParams& p);
nlohmann::json domination_json(const DominationReport& r, bool with_table);
nlohmann::json ap_json(const ApReport& r, bool with_table);

// Shortest decimal that reads back to the same double.
std::string format_number(double v);

std::string rate_fit_csv(const RateFit& r, bool with_table);
std::string fields_csv(const std::vector<FieldSample>& fields);
std::string ap_csv(const ApReport& r);

std::string svg_text(const RateFit& r);
std::string fi_text(const FiFit& r);
std::string domination_text(const DominationReport& r);
std::string ap_text(const ApReport& r);

}  // namespace domsplit
