#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "domsplit/cli.hpp"
#include "domsplit/generators.hpp"
#include "domsplit/sequence_io.hpp"

using namespace domsplit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(const std::vector<std::string>& args, int expected_code) {
  const Result r = run(args);
  CHECK_MESSAGE(r.code == expected_code, r.err);
  return json::parse(r.out);
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("domsplit_cli_" + name); }

}  // namespace

TEST_CASE("gen writes the non-dominated example") {
  const MatrixSequence s = sequence_from_json(run_json({"gen", "--family", "example1", "--window", "-10", "10"}, 0));
  CHECK(s.window().size() == 21);
  CHECK(max_abs_diff(s[0], {4.0, -3.0, 0.0, 0.5}) == 0.0);
}

TEST_CASE("gen writes constant families") {
  const MatrixSequence d = sequence_from_json(
      run_json({"gen", "--family", "diagonal", "--lplus", "2", "--lminus", "1", "--window", "-3", "3"}, 0));
  for (const Mat2C& B : d.entries()) CHECK(max_abs_diff(B, Mat2C::diag(2, 1)) == 0.0);
  const MatrixSequence h = sequence_from_json(run_json(
      {"gen", "--family", "schrodinger", "--energy", "3", "--window", "0", "99", "--potential", "zeros"}, 0));
  CHECK(h.entries().size() == 100);
  for (const Mat2C& B : h.entries()) CHECK(max_abs_diff(B, {3.0, -1.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("generated files round-trip bit for bit") {
  const fs::path p = temp_path("roundtrip.json");
  const Result g = run({"gen", "--family", "conjugated_dominated", "--seed", "17", "--window", "-25", "25", "--out",
                        p.string()});
  CHECK(g.code == 0);
  CHECK(g.out.empty());
  GeneratorSpec spec;
  spec.family = Family::ConjugatedDominated;
  spec.seed = 17;
  spec.window = {-25, 25};
  const MatrixSequence want = generate(spec);
  const MatrixSequence got = read_sequence_file(p.string());
  for (int j = -25; j <= 25; ++j) CHECK(max_abs_diff(got[j], want[j]) == 0.0);
  CHECK(got.bound_M() == want.bound_M());

  // Any command reading the file agrees with the in-memory generator.
  const json from_file = run_json({"svg", "--input", p.string(), "--nmax", "15"}, 0);
  const json from_flags =
      run_json({"svg", "--family", "conjugated_dominated", "--seed", "17", "--window", "-25", "25", "--nmax", "15"}, 0);
  CHECK(from_file["svg"] == from_flags["svg"]);
  fs::remove(p);
}

TEST_CASE("generator files drive the generator") {
  const fs::path p = temp_path("spec.json");
  {
    std::ofstream f(p);
    f << R"({"family": "schrodinger", "window": [0, 9], "energy": 1.5, "potential": "table",
             "potential_table": [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]})";
  }
  const MatrixSequence s = sequence_from_json(run_json({"gen", "--spec", p.string()}, 0));
  CHECK(s[1].a == cplx(0.5));
  CHECK(s[2].a == cplx(1.5));
  fs::remove(p);
}

TEST_CASE("reports are reproducible and carry their configuration") {
  const std::vector<std::string> args = {"dom", "--family", "conjugated_dominated", "--gap", "4", "--seed", "3",
                                         "--window", "-40", "40", "--nmax", "20"};
  const Result a = run(args);
  const Result b = run(args);
  CHECK(a.out == b.out);
  const json doc = json::parse(a.out);
  CHECK(doc["config"]["tool"] == cli::kToolVersion);
  CHECK(doc["config"]["command"] == "dom");
  CHECK(doc["config"]["n_max"] == 20);
  CHECK(doc["config"]["source"]["generator"]["gap"] == 4.0);
}

TEST_CASE("profile verbs") {
  const std::vector<std::string> ex1 = {"--family", "example1", "--window", "-20", "20", "--nmax", "20"};
  auto with = [](std::string verb, std::vector<std::string> rest) {
    rest.insert(rest.begin(), std::move(verb));
    return rest;
  };
  const json svg = run_json(with("svg", ex1), 0);
  CHECK(svg["svg"]["pass"] == true);
  CHECK(-svg["svg"]["rate"].get<double>() >= std::log(4.0) - 1e-9);
  const json fi = run_json(with("fi", ex1), 1);
  CHECK(fi["fi"]["pass"] == false);

  const std::vector<std::string> diag = {"--family", "diagonal", "--window", "-30", "30", "--nmax", "20"};
  CHECK(run(with("svg", diag)).code == 0);
  CHECK(run(with("fi", diag)).code == 0);
  CHECK(run({"svg", "--family", "unitary", "--theta", "0.4", "--window", "-30", "30", "--nmax", "20"}).code == 1);
}

TEST_CASE("split reports fields as affine coordinates") {
  const json r = run_json({"split", "--family", "example1", "--window", "-40", "40", "--nmax", "30"}, 0);
  CHECK(r["converged"] == true);
  for (const json& e : r["estimates"]) {
    const int j = e["j"];
    CHECK(std::abs(e["Eu"][0].get<double>()) < 1e-10);
    CHECK(std::abs(e["Es"][0].get<double>() - std::ldexp(1.0, -std::abs(j))) < 1e-10);
  }
  const double t = 0.3;
  const json c = run_json({"split", "--family", "conjugated_dominated", "--theta", "0.3", "--real", "--window", "-40",
                           "40", "--nmax", "30"},
                          0);
  for (const json& e : c["estimates"]) {
    CHECK(e["Eu"][0].get<double>() == doctest::Approx(std::tan(t)).epsilon(1e-9));
    CHECK(e["Es"][0].get<double>() == doctest::Approx(-1.0 / std::tan(t)).epsilon(1e-9));
  }
  const Result u = run({"split", "--family", "unitary", "--window", "-30", "30", "--nmax", "20"});
  CHECK(u.code == 3);
  CHECK(json::parse(u.out)["converged"] == false);
}

TEST_CASE("dom verdicts and exit codes") {
  const json ex1 = run_json({"dom", "--family", "example1", "--window", "-40", "40", "--nmax", "20"}, 1);
  const std::string violation = ex1["report"]["violations"][0];
  CHECK(violation.rfind("separation_collapse", 0) == 0);

  const json dom = run_json(
      {"dom", "--family", "conjugated_dominated", "--gap", "4", "--window", "-60", "60", "--nmax", "30"}, 0);
  CHECK(dom["report"]["verdict"] == "dominated");
  CHECK(dom["report"]["N_dom"] == 1);

  const json half = run_json({"dom", "--family", "example1", "--window", "0", "20", "--nmax", "20"}, 3);
  bool one_sided = false;
  for (const json& n : half["report"]["notes"])
    if (n.get<std::string>().find("one-sided") != std::string::npos) one_sided = true;
  CHECK(one_sided);

  CHECK(run({"dom", "--family", "unitary", "--window", "-40", "40", "--nmax", "20"}).code == 3);
}

TEST_CASE("ap verb") {
  const Result ok = run({"ap", "--family", "avalanche", "--family-mu", "1e4", "--mu", "1e4", "--window", "-30", "30",
                         "--nmax", "30", "--format", "csv"});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("j,n,residual,bound\n", 0) == 0);
  const json rot = run_json({"ap", "--family", "unitary", "--theta", "0.3", "--mu", "10", "--window", "-10", "10",
                             "--nmax", "5"},
                            1);
  CHECK(rot["ap"]["conditions"]["gap_worst"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(run({"ap", "--family", "diagonal", "--mu", "1.5", "--nmax", "2"}).code == 2);
  CHECK(run({"ap", "--family", "diagonal", "--nmax", "5"}).code == 2);
}

TEST_CASE("output formats") {
  const std::vector<std::string> base = {"svg", "--family", "example1", "--window", "-10", "10", "--nmax", "8"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  const Result text = with({"--format", "text"});
  CHECK(text.out.find("log2 mu") != std::string::npos);
  const Result csv = with({"--format", "csv"});
  CHECK(csv.out.rfind("n,log_value,extremal_j\n", 0) == 0);
  const Result grid = with({"--format", "csv", "--table"});
  CHECK(grid.out.rfind("j,n,ratio_log\n", 0) == 0);
  const json table = json::parse(with({"--table"}).out);
  CHECK(table["svg"]["table"].size() > 0);
  CHECK(run({"split", "--family", "diagonal", "--window", "-5", "5", "--nmax", "4", "--format", "csv"})
            .out.rfind("j,es_re,es_im,eu_re,eu_im,converged,separation\n", 0) == 0);
}

TEST_CASE("numbers round-trip through the JSON output") {
  const json doc = run_json({"gen", "--family", "random_bounded", "--seed", "5", "--window", "0", "30"}, 0);
  const MatrixSequence s = sequence_from_json(doc);
  GeneratorSpec spec;
  spec.family = Family::RandomBounded;
  spec.seed = 5;
  spec.window = {0, 30};
  const MatrixSequence want = generate(spec);
  for (int j = 0; j <= 30; ++j) CHECK(max_abs_diff(s[j], want[j]) == 0.0);
}

TEST_CASE("malformed input exits 2") {
  const fs::path bad = temp_path("bad.json");
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  const Result r = run({"svg", "--input", bad.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  fs::remove(bad);
  CHECK(run({"svg", "--input", "/nonexistent/file.json"}).code == 2);
  CHECK(run({"svg"}).code == 2);
  CHECK(run({"svg", "--family", "example1", "--input", "x.json"}).code == 2);
  CHECK(run({"svg", "--family", "henon"}).code == 2);
  CHECK(run({"svg", "--family", "example1", "--format", "xml"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"svg", "--family", "example1", "--window", "-3", "3", "--nmax", "40"}).code == 2);
  const Result spec =
      run({"gen", "--family", "conjugated_dominated", "--lplus-range", "2", "3", "--lminus-range", "0.5", "2.5"});
  CHECK(spec.code == 2);
  CHECK(spec.err.find("lminus_max < lplus_min") != std::string::npos);
}

TEST_CASE("version flag") {
  const Result v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("domsplit 0.1.0") != std::string::npos);
}
