#include "domsplit/report.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace domsplit {

using nlohmann::json;

json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json point_json(const ProjPoint& p) {
  const auto z = p.affine();
  if (!z) return "inf";
  return json::array({z->real(), z->imag()});
}

namespace {

json series_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_json(x));
  return out;
}

double log2_of(double natural_log) { return natural_log / std::numbers::ln2; }

}  // namespace

json rate_fit_json(const RateFit& r, bool with_table) {
  json d = {{"series", series_json(r.series)},
            {"extremal_j", r.extremal_j},
            {"n_range", json::array({r.n_lo, r.n_hi})},
            {"rate", number_json(r.rate)},
            {"intercept", number_json(r.intercept)},
            {"tail_rate", number_json(r.tail_rate)},
            {"residual_max", number_json(r.residual_max)},
            {"log_C", number_json(r.log_C)},
            {"pass", r.pass}};
  if (with_table) {
    json t = json::array();
    for (const RatioEntry& e : r.table) t.push_back({{"j", e.j}, {"n", e.n}, {"ratio_log", number_json(e.log_ratio)}});
    d["table"] = std::move(t);
  }
  return d;
}

json fi_fit_json(const FiFit& r, bool with_table) {
  json d = rate_fit_json(r, with_table);
  d["log_mu_svg"] = number_json(r.log_mu_svg);
  d["log_C_required"] = number_json(r.log_C_required);
  d["horizon"] = number_json(r.horizon);
  return d;
}

json splitting_json(const SplittingEstimate& e) {
  return {{"j", e.j},
          {"Es", point_json(e.es)},
          {"Eu", point_json(e.eu)},
          {"converged_s", e.converged_s},
          {"converged_u", e.converged_u},
          {"n_star_s", e.n_star_s},
          {"n_star_u", e.n_star_u},
          {"steps_s", series_json(e.step_s)},
          {"steps_u", series_json(e.step_u)},
          {"rate_s", number_json(e.rate_s)},
          {"rate_u", number_json(e.rate_u)}};
}

json params_json(const ConditionParams& p) {
  return {{"n_max", p.n_max},     {"epsilon", p.epsilon},     {"mu_min", p.mu_min},
          {"sep_min", p.sep_min}, {"N_max", p.N_max},         {"tol", p.tol},
          {"fit_n_min", p.fit_n_min}, {"stability", p.stability}};
}

json domination_json(const DominationReport& r, bool with_table) {
  json fields = json::array();
  for (const FieldSample& f : r.fields) {
    fields.push_back({{"j", f.j},
                      {"Es", point_json(f.es)},
                      {"Eu", point_json(f.eu)},
                      {"converged", f.converged},
                      {"n_star_s", f.n_star_s},
                      {"n_star_u", f.n_star_u},
                      {"separation", number_json(f.separation)}});
  }
  json d = {{"window", json::array({r.window.lo, r.window.hi})},
            {"interior", json::array({r.interior.lo, r.interior.hi})},
            {"params", params_json(r.params)},
            {"svg", r.svg ? rate_fit_json(*r.svg, with_table) : json(nullptr)},
            {"fi", r.fi ? fi_fit_json(*r.fi, with_table) : json(nullptr)},
            {"fields", std::move(fields)},
            {"unresolved", r.unresolved},
            {"min_separation", number_json(r.min_separation)},
            {"min_separation_j", r.min_separation_j},
            {"N_dom", r.N_dom ? json(*r.N_dom) : json(nullptr)},
            {"lambda_dom", number_json(r.lambda_dom)},
            {"invariance_max_residual", number_json(r.invariance_max_residual)},
            {"norm_floor", {{"log_floor", series_json(r.floor.log_floor)}, {"argmin_j", r.floor.argmin_j}}},
            {"verdict", verdict_name(r.verdict)},
            {"violations", r.violations},
            {"notes", r.notes}};
  return d;
}

json ap_json(const ApReport& r, bool with_table) {
  const ApConditions& c = r.conditions;
  json d = {{"mu", r.mu},
            {"n_max", r.n_max},
            {"conditions",
             {{"gap_worst", number_json(c.gap_worst)},
              {"gap_j", c.gap_j},
              {"gap_required", 1.0 / r.mu},
              {"gap_pass", c.gap_pass},
              {"pair_worst", number_json(c.pair_worst)},
              {"pair_j", c.pair_j},
              {"pair_required", std::pow(r.mu, 0.25)},
              {"pair_pass", c.pair_pass}}},
            {"telescoping_max", number_json(r.telescoping_max)},
            {"max_residual_by_n", series_json(r.max_residual_by_n)},
            {"C_fit", number_json(r.C_fit)},
            {"C_envelope", kApEnvelope},
            {"residual_slope", number_json(r.residual_slope)},
            {"envelope_holds", r.envelope_holds},
            {"pass", r.pass()}};
  if (with_table) {
    json t = json::array();
    for (const ResidualCell& e : r.cells)
      t.push_back({{"j", e.j}, {"n", e.n}, {"residual", number_json(e.residual)}, {"bound", number_json(e.bound)}});
    d["cells"] = std::move(t);
  }
  return d;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string rate_fit_csv(const RateFit& r, bool with_table) {
  std::ostringstream out;
  if (with_table) {
    out << "j,n,ratio_log\n";
    for (const RatioEntry& e : r.table) out << e.j << ',' << e.n << ',' << format_number(e.log_ratio) << '\n';
    return out.str();
  }
  out << "n,log_value,extremal_j\n";
  for (std::size_t n = 0; n < r.series.size(); ++n)
    out << n << ',' << format_number(r.series[n]) << ',' << r.extremal_j[n] << '\n';
  return out.str();
}

std::string fields_csv(const std::vector<FieldSample>& fields) {
  std::ostringstream out;
  out << "j,es_re,es_im,eu_re,eu_im,converged,separation\n";
  auto coords = [&](const ProjPoint& p) {
    const auto z = p.affine();
    if (!z) return std::string("inf,inf");
    return format_number(z->real()) + ',' + format_number(z->imag());
  };
  for (const FieldSample& f : fields)
    out << f.j << ',' << coords(f.es) << ',' << coords(f.eu) << ',' << (f.converged ? 1 : 0) << ','
        << format_number(f.separation) << '\n';
  return out.str();
}

std::string ap_csv(const ApReport& r) {
  std::ostringstream out;
  out << "j,n,residual,bound\n";
  for (const ResidualCell& c : r.cells)
    out << c.j << ',' << c.n << ',' << format_number(c.residual) << ',' << format_number(c.bound) << '\n';
  return out.str();
}

std::string svg_text(const RateFit& r) {
  std::ostringstream out;
  out.precision(6);
  out << "singular value gap: log2 mu = " << log2_of(-r.rate) << " (upper half " << log2_of(-r.tail_rate)
      << "), log2 C = " << log2_of(r.log_C) << ", n in [" << r.n_lo << ", " << r.n_hi << "]: "
      << (r.pass ? "pass" : "fail") << '\n';
  return out.str();
}

std::string fi_text(const FiFit& r) {
  std::ostringstream out;
  out.precision(6);
  out << "fast invertibility: log2 growth = " << log2_of(r.rate) << " per step against log2 mu = "
      << log2_of(r.log_mu_svg) << ", log2 C = " << log2_of(r.log_C_required) << ", horizon " << r.horizon
      << " steps: " << (r.pass ? "pass" : "fail") << '\n';
  return out.str();
}

std::string domination_text(const DominationReport& r) {
  std::ostringstream out;
  out.precision(6);
  if (r.svg) out << svg_text(*r.svg);
  if (r.fi) out << fi_text(*r.fi);
  out << "interior [" << r.interior.lo << ", " << r.interior.hi << "], unresolved " << r.unresolved << '\n';
  out << "min separation " << r.min_separation << " at j = " << r.min_separation_j << '\n';
  if (r.N_dom) {
    out << "N = " << *r.N_dom << ", log2 lambda = " << log2_of(std::log(r.lambda_dom)) << '\n';
  } else {
    out << "N not found\n";
  }
  out << "invariance residual " << r.invariance_max_residual << '\n';
  for (const std::string& v : r.violations) out << "violation: " << v << '\n';
  for (const std::string& n : r.notes) out << "note: " << n << '\n';
  out << "verdict: " << verdict_name(r.verdict) << '\n';
  return out.str();
}

std::string ap_text(const ApReport& r) {
  std::ostringstream out;
  out.precision(6);
  const ApConditions& c = r.conditions;
  out << "log2 mu = " << std::log2(r.mu) << '\n';
  out << "gap condition: log2 worst = " << std::log2(c.gap_worst) << " at j = " << c.gap_j << ", need <= "
      << -std::log2(r.mu) << ": " << (c.gap_pass ? "pass" : "fail") << '\n';
  out << "pair condition: log2 worst = " << std::log2(c.pair_worst) << " at j = " << c.pair_j << ", need <= "
      << 0.25 * std::log2(r.mu) << ": " << (c.pair_pass ? "pass" : "fail") << '\n';
  out << "telescoping residual max " << r.telescoping_max << '\n';
  out << "residual envelope C = " << r.C_fit << " (limit " << kApEnvelope << "): "
      << (r.envelope_holds ? "holds" : "exceeded") << '\n';
  out << (r.pass() ? "pass" : "fail") << '\n';
  return out.str();
}

}  // namespace domsplit
