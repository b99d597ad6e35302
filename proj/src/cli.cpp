#include "domsplit/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "domsplit/avalanche.hpp"
#include "domsplit/conditions.hpp"
#include "domsplit/error.hpp"
#include "domsplit/generators.hpp"
#include "domsplit/report.hpp"
#include "domsplit/sequence_io.hpp"

namespace domsplit::cli {

using nlohmann::json;

namespace {

struct Options {
  std::string command;
  std::string input;
  std::string spec_file;
  std::string family;
  std::string out;
  std::string format = "json";
  std::vector<int> window;
  int n_max = 40;
  int N_max = 64;
  double epsilon = 0.1;
  double mu = 0;
  double tol = 1e-10;
  double sep_min = 1e-4;
  bool table = false;

  std::uint64_t seed = 0;
  double lplus = 2.0;
  double lminus = 1.0;
  std::vector<double> lplus_range;
  std::vector<double> lminus_range;
  double gap = 0;
  double theta = 0;
  double det_floor = 0.3;
  bool real_phases = false;
  double energy = 0;
  std::string potential = "zeros";
  double amplitude = 1.0;
  double scale = 1.0;
  double family_mu = 1e4;
  double bound_M = 0;
  std::vector<int> singular_at;
  bool misaligned = false;

  // Which optional flags were given.
  std::set<std::string> given;
};

bool has(const Options& o, const std::string& flag) { return o.given.count(flag) > 0; }

void add_common(CLI::App* sub, Options& o, bool with_conditions) {
  sub->add_option("--input", o.input, "Sequence file (JSON)");
  sub->add_option("--spec", o.spec_file, "Generator spec file (JSON)");
  sub->add_option("--family", o.family,
                  "Generator family: example1, diagonal, conjugated_dominated, schrodinger, random_bounded, "
                  "random_singular, unitary, avalanche");
  sub->add_option("--window", o.window, "Window LO HI")->expected(2)->allow_extra_args(false);
  sub->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  sub->add_option("--out", o.out, "Output path (written atomically)");
  sub->add_flag("--table", o.table, "Include pointwise tables");

  sub->add_option("--seed", o.seed);
  sub->add_option("--lplus", o.lplus, "Diagonal entry, or fixed expanding modulus");
  sub->add_option("--lminus", o.lminus, "Diagonal entry, or fixed contracting modulus");
  sub->add_option("--lplus-range", o.lplus_range)->expected(2);
  sub->add_option("--lminus-range", o.lminus_range)->expected(2);
  sub->add_option("--gap", o.gap, "Fixed ratio of expanding to contracting modulus");
  sub->add_option("--theta", o.theta, "Constant rotation angle for the frame or unitary family");
  sub->add_option("--det-floor", o.det_floor);
  sub->add_flag("--real", o.real_phases, "Real eigenvalues in the conjugated families");
  sub->add_option("--energy", o.energy);
  sub->add_option("--potential", o.potential)->check(CLI::IsMember({"zeros", "random"}));
  sub->add_option("--amplitude", o.amplitude);
  sub->add_option("--scale", o.scale);
  sub->add_option("--family-mu", o.family_mu, "mu of the avalanche family");
  sub->add_option("--bound", o.bound_M, "Declared norm bound");
  sub->add_option("--singular-at", o.singular_at)->allow_extra_args(false);
  sub->add_flag("--misaligned", o.misaligned);

  if (with_conditions) {
    sub->add_option("--nmax", o.n_max, "Largest product length");
    sub->add_option("--Nmax", o.N_max, "Largest N searched for the expansion gap");
    sub->add_option("--epsilon", o.epsilon);
    sub->add_option("--mu", o.mu, "Gap threshold (svg, fi, dom) or AP parameter (ap)");
    sub->add_option("--tol", o.tol, "Convergence tolerance of direction estimates");
    sub->add_option("--sep-min", o.sep_min);
  }
}

void record_given(CLI::App* sub, Options& o) {
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() > 0) o.given.insert(opt->get_name());
  }
}

GeneratorSpec spec_from_flags(const Options& o) {
  GeneratorSpec s;
  if (!o.spec_file.empty()) {
    std::ifstream in(o.spec_file);
    if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open " + o.spec_file);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::InvalidSpec, ex.what());
    }
    s = spec_from_json(doc);
  } else {
    s.family = family_from_name(o.family);
  }
  if (o.window.size() == 2) s.window = {o.window[0], o.window[1]};
  if (has(o, "--seed")) s.seed = o.seed;
  if (s.family == Family::Diagonal) {
    if (has(o, "--lplus")) s.lplus = o.lplus;
    if (has(o, "--lminus")) s.lminus = o.lminus;
  } else {
    if (has(o, "--lplus")) s.lplus_min = s.lplus_max = o.lplus;
    if (has(o, "--lminus")) s.lminus_min = s.lminus_max = o.lminus;
  }
  if (o.lplus_range.size() == 2) {
    s.lplus_min = o.lplus_range[0];
    s.lplus_max = o.lplus_range[1];
  }
  if (o.lminus_range.size() == 2) {
    s.lminus_min = o.lminus_range[0];
    s.lminus_max = o.lminus_range[1];
  }
  if (has(o, "--gap")) s.gap = o.gap;
  if (has(o, "--theta")) s.theta = o.theta;
  if (has(o, "--det-floor")) s.det_floor = o.det_floor;
  if (o.real_phases) s.random_phases = false;
  if (has(o, "--energy")) s.energy = o.energy;
  if (has(o, "--potential")) s.potential = o.potential;
  if (has(o, "--amplitude")) s.amplitude = o.amplitude;
  if (has(o, "--scale")) s.scale = o.scale;
  if (has(o, "--family-mu")) s.mu = o.family_mu;
  if (has(o, "--bound")) s.bound_M = o.bound_M;
  if (has(o, "--singular-at")) s.singular_at = o.singular_at;
  if (o.misaligned) s.misaligned = true;
  return s;
}

struct Source {
  MatrixSequence seq;
  json description;
};

Source load(const Options& o) {
  const int sources = !o.input.empty() + !o.spec_file.empty() + !o.family.empty();
  if (sources != 1) throw Error(ErrorCode::Precondition, "give exactly one of --input, --spec, --family");
  if (!o.input.empty()) {
    MatrixSequence seq = read_sequence_file(o.input);
    if (o.window.size() == 2) seq = seq.restricted({o.window[0], o.window[1]});
    return {seq, {{"input", o.input}}};
  }
  const GeneratorSpec s = spec_from_flags(o);
  return {generate(s), {{"generator", spec_to_json(s)}}};
}

ConditionParams params_from(const Options& o) {
  ConditionParams p;
  p.n_max = o.n_max;
  p.N_max = o.N_max;
  p.epsilon = o.epsilon;
  p.tol = o.tol;
  p.sep_min = o.sep_min;
  if (has(o, "--mu")) p.mu_min = o.mu;
  if (p.n_max < 1) throw Error(ErrorCode::Precondition, "--nmax must be positive");
  if (!(p.epsilon > 0 && p.epsilon < 1)) throw Error(ErrorCode::Precondition, "--epsilon must lie in (0, 1)");
  if (!(p.mu_min > 1)) throw Error(ErrorCode::Precondition, "--mu must exceed 1");
  return p;
}

json run_config(const Options& o, const json& source) {
  json c = {{"tool", kToolVersion},
            {"command", o.command},
            {"source", source},
            {"format", o.format},
            {"table", o.table}};
  if (o.command != "gen") {
    c["n_max"] = o.n_max;
    c["N_max"] = o.N_max;
    c["epsilon"] = o.epsilon;
    c["tol"] = o.tol;
    c["sep_min"] = o.sep_min;
    if (has(o, "--mu")) c["mu"] = o.mu;
  }
  if (o.window.size() == 2) c["window"] = o.window;
  if (!o.out.empty()) c["out"] = o.out;
  return c;
}

void emit(const Options& o, const std::string& body, std::ostream& out) {
  if (o.out.empty()) {
    out << body;
  } else {
    write_file_atomic(o.out, body);
  }
}

std::string dump(const json& d) { return d.dump(2) + "\n"; }

int cmd_gen(const Options& o, std::ostream& out) {
  if (!o.input.empty()) throw Error(ErrorCode::Precondition, "gen takes a generator, not --input");
  const Source src = load(o);
  json doc = sequence_to_json(src.seq);
  doc["config"] = run_config(o, src.description);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "j,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im\n";
    for (int j = src.seq.window().lo; j <= src.seq.window().hi; ++j) {
      const Mat2C& B = src.seq[j];
      csv << j;
      for (cplx z : {B.a, B.b, B.c, B.d}) csv << ',' << format_number(z.real()) << ',' << format_number(z.imag());
      csv << '\n';
    }
    emit(o, csv.str(), out);
  } else {
    emit(o, dump(doc), out);
  }
  return kPass;
}

int profile_exit(const RateFit& r) {
  if (std::isnan(r.rate)) return kInconclusive;
  return r.pass ? kPass : kFail;
}

int cmd_svg(const Options& o, std::ostream& out) {
  const Source src = load(o);
  const ConditionParams p = params_from(o);
  const RateFit r = svg_profile(src.seq, p);
  if (o.format == "text") {
    emit(o, svg_text(r), out);
  } else if (o.format == "csv") {
    emit(o, rate_fit_csv(r, o.table), out);
  } else {
    emit(o, dump({{"config", run_config(o, src.description)}, {"svg", rate_fit_json(r, o.table)}}), out);
  }
  return profile_exit(r);
}

int cmd_fi(const Options& o, std::ostream& out) {
  const Source src = load(o);
  const ConditionParams p = params_from(o);
  const RateFit svg = svg_profile(src.seq, p);
  const FiFit r = fi_profile(src.seq, p, svg);
  if (o.format == "text") {
    emit(o, svg_text(svg) + fi_text(r), out);
  } else if (o.format == "csv") {
    emit(o, rate_fit_csv(r, o.table), out);
  } else {
    emit(o, dump({{"config", run_config(o, src.description)},
                  {"svg", rate_fit_json(svg, o.table)},
                  {"fi", fi_fit_json(r, o.table)}}),
         out);
  }
  if (std::isnan(r.rate) || std::isnan(svg.rate)) return kInconclusive;
  return r.pass ? kPass : kFail;
}

int cmd_split(const Options& o, std::ostream& out) {
  const Source src = load(o);
  const ConditionParams p = params_from(o);
  const Window w = src.seq.window();
  const int margin = interior_margin(w, p.n_max);
  std::vector<FieldSample> fields;
  std::vector<SplittingEstimate> estimates;
  LineField es, eu;
  bool all = true;
  double min_sep = std::numeric_limits<double>::infinity();
  for (int j = w.lo + margin; j <= w.hi - margin; ++j) {
    SplittingEstimate e = try_estimate_splitting(src.seq, j, p.n_max, p.tol);
    FieldSample f{j, e.es, e.eu, e.converged(), e.n_star_s, e.n_star_u, dist(e.eu, e.es)};
    all = all && f.converged;
    if (f.converged) {
      es[j] = e.es;
      eu[j] = e.eu;
      min_sep = std::min(min_sep, f.separation);
    }
    fields.push_back(f);
    estimates.push_back(std::move(e));
  }
  json residuals = json::array();
  for (const auto& [j, s] : es) {
    if (!es.count(j + 1)) continue;
    const InvarianceResidual r = invariance_residual(src.seq, j, es, eu);
    residuals.push_back({{"j", j}, {"res_s", r.res_s}, {"res_u", r.res_u}, {"singular_step", r.singular_step}});
  }
  if (o.format == "text") {
    std::ostringstream t;
    t.precision(6);
    for (const FieldSample& f : fields) {
      auto show = [](const ProjPoint& q) {
        const auto z = q.affine();
        std::ostringstream s;
        s.precision(10);
        if (z) {
          s << z->real() << (z->imag() < 0 ? " - " : " + ") << std::abs(z->imag()) << "i";
        } else {
          s << "inf";
        }
        return s.str();
      };
      t << "j = " << f.j << ": Es " << show(f.es) << ", Eu " << show(f.eu) << ", separation " << f.separation
        << (f.converged ? "" : " (not converged)") << '\n';
    }
    t << "min separation " << min_sep << '\n';
    emit(o, t.str(), out);
  } else if (o.format == "csv") {
    emit(o, fields_csv(fields), out);
  } else {
    json e = json::array();
    for (const SplittingEstimate& s : estimates) e.push_back(splitting_json(s));
    emit(o, dump({{"config", run_config(o, src.description)},
                  {"interior", json::array({w.lo + margin, w.hi - margin})},
                  {"estimates", std::move(e)},
                  {"invariance", std::move(residuals)},
                  {"min_separation", number_json(min_sep)},
                  {"converged", all}}),
         out);
  }
  return all && !fields.empty() ? kPass : kInconclusive;
}

int cmd_dom(const Options& o, std::ostream& out) {
  const Source src = load(o);
  const ConditionParams p = params_from(o);
  const DominationReport r = check_domination(src.seq, p);
  if (o.format == "text") {
    emit(o, domination_text(r), out);
  } else if (o.format == "csv") {
    emit(o, fields_csv(r.fields), out);
  } else {
    emit(o, dump({{"config", run_config(o, src.description)}, {"report", domination_json(r, o.table)}}), out);
  }
  switch (r.verdict) {
    case Verdict::Dominated: return kPass;
    case Verdict::NotDominated: return kFail;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_ap(const Options& o, std::ostream& out) {
  if (!has(o, "--mu")) throw Error(ErrorCode::Precondition, "ap needs --mu");
  if (o.n_max < 3) throw Error(ErrorCode::Precondition, "ap needs --nmax >= 3");
  const Source src = load(o);
  const ApReport r = run_avalanche(src.seq, o.mu, o.n_max);
  if (o.format == "text") {
    emit(o, ap_text(r), out);
  } else if (o.format == "csv") {
    emit(o, ap_csv(r), out);
  } else {
    emit(o, dump({{"config", run_config(o, src.description)}, {"ap", ap_json(r, o.table)}}), out);
  }
  return r.pass() ? kPass : kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dominated splitting diagnostics for 2x2 complex matrix sequences"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;
  struct Verb {
    const char* name;
    const char* help;
    int (*fn)(const Options&, std::ostream&);
  };
  const Verb verbs[] = {
      {"gen", "Write a generated sequence file", cmd_gen},
      {"svg", "Singular value gap profile", cmd_svg},
      {"fi", "Fast invertibility profile", cmd_fi},
      {"split", "Estimate the contracted and expanded directions", cmd_split},
      {"dom", "Full domination check", cmd_dom},
      {"ap", "Avalanche principle conditions and residuals", cmd_ap},
  };
  std::vector<CLI::App*> subs;
  for (const Verb& v : verbs) subs.push_back(app.add_subcommand(v.name, v.help));
  for (std::size_t i = 0; i < subs.size(); ++i) add_common(subs[i], o, std::string(verbs[i].name) != "gen");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kMalformed;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    o.command = verbs[i].name;
    record_given(subs[i], o);
    try {
      return verbs[i].fn(o, out);
    } catch (const Error& e) {
      err << e.what() << '\n';
      return kMalformed;
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return kMalformed;
    }
  }
  return kMalformed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace domsplit::cli
