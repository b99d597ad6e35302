#include "domsplit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "domsplit/error.hpp"

namespace domsplit {

using nlohmann::json;

namespace {

constexpr std::pair<Family, const char*> kFamilies[] = {
    {Family::Example1, "example1"},
    {Family::Diagonal, "diagonal"},
    {Family::ConjugatedDominated, "conjugated_dominated"},
    {Family::Schrodinger, "schrodinger"},
    {Family::RandomBounded, "random_bounded"},
    {Family::RandomSingular, "random_singular"},
    {Family::Unitary, "unitary"},
    {Family::Avalanche, "avalanche"},
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Random streams used by the families; distinct so draws never collide.
enum Stream : std::uint64_t {
  kFrame = 1,
  kEigen = 2,
  kPotential = 3,
  kEntries = 4,
  kUnitary = 5,
  kAvalancheImage = 11,
  kAvalancheKernel = 12,
  kAvalancheNorm = 13,
};

void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

void validate(const GeneratorSpec& s) {
  if (s.window.hi < s.window.lo) invalid("window is empty");
  switch (s.family) {
    case Family::Diagonal:
      if (std::abs(s.lplus) <= tol::kEntryZero && std::abs(s.lminus) <= tol::kEntryZero) invalid("diagonal is zero");
      break;
    case Family::ConjugatedDominated:
    case Family::RandomSingular:
      if (!(0 < s.lplus_min && s.lplus_min <= s.lplus_max)) invalid("need 0 < lplus_min <= lplus_max");
      if (s.gap) {
        if (!(*s.gap > 1)) invalid("gap must exceed 1");
      } else {
        if (!(0 < s.lminus_min && s.lminus_min <= s.lminus_max)) invalid("need 0 < lminus_min <= lminus_max");
        if (!(s.lminus_max < s.lplus_min)) invalid("need lminus_max < lplus_min");
      }
      if (!s.theta && !(0 < s.det_floor && s.det_floor <= 0.99)) invalid("det_floor must lie in (0, 0.99]");
      for (int j : s.singular_at)
        if (!s.window.contains(j)) invalid("singular position " + std::to_string(j) + " outside window");
      if (s.family == Family::ConjugatedDominated && !s.singular_at.empty())
        invalid("singular positions need the random_singular family");
      break;
    case Family::Schrodinger:
      if (s.potential == "table") {
        if (s.potential_table.size() != static_cast<std::size_t>(s.window.size()))
          invalid("potential table must have one value per window index");
      } else if (s.potential != "zeros" && s.potential != "random") {
        invalid("unknown potential '" + s.potential + "'");
      }
      break;
    case Family::RandomBounded:
      if (!(s.scale > 0)) invalid("scale must be positive");
      break;
    case Family::Avalanche:
      if (!(s.mu > 1)) invalid("mu must exceed 1");
      if (!(s.gap_factor >= 1)) invalid("gap_factor must be at least 1");
      if (!(0 < s.overlap_min && s.overlap_min <= s.overlap_max)) invalid("need 0 < overlap_min <= overlap_max");
      break;
    default:
      break;
  }
  if (s.bound_M && !(*s.bound_M > 0)) invalid("bound_M must be positive");
}

Mat2C rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

Vec2 unit(const Vec2& v) { return (1.0 / v.norm()) * v; }

Mat2C conjugated_entry(const GeneratorSpec& s, int j) {
  const Frame here = frame_at(s, j);
  const Frame next = frame_at(s, j + 1);
  const bool singular = std::find(s.singular_at.begin(), s.singular_at.end(), j) != s.singular_at.end();
  if (singular && s.misaligned) {
    // Kernel along s(j), image along s(j+1).
    return std::abs(here.lplus) * Mat2C::outer(next.s, unit(orth(here.s)));
  }
  const Mat2C D = Mat2C::from_columns(here.u, here.s);
  const Mat2C Dn = Mat2C::from_columns(next.u, next.s);
  const cplx lminus = singular ? cplx(0.0) : here.lminus;
  return Dn * Mat2C::diag(here.lplus, lminus) * inverse(D);
}

double potential_at(const GeneratorSpec& s, int j) {
  if (s.potential == "table") return s.potential_table[static_cast<std::size_t>(j - s.window.lo)];
  if (s.potential == "random") return CounterRng(s.seed, j, kPotential).uniform(-s.amplitude, s.amplitude);
  return 0.0;
}

// Image direction u(B(j)) of the avalanche family.
Vec2 avalanche_image(const GeneratorSpec& s, int j) { return CounterRng(s.seed, j, kAvalancheImage).unit_vector(); }

Mat2C avalanche_entry(const GeneratorSpec& s, int j) {
  const Vec2 u = avalanche_image(s, j);
  const Vec2 u_prev = avalanche_image(s, j - 1);
  CounterRng rng(s.seed, j, kAvalancheKernel);
  const double t = std::min(1.0, rng.uniform(s.overlap_min, s.overlap_max) * std::pow(s.mu, -0.25));
  const cplx p1 = rng.unit_phase();
  const cplx p2 = rng.unit_phase();
  // Contracted direction with |det(s, u_prev)| = t.
  const Vec2 sdir = unit(std::sqrt(1.0 - t * t) * p1 * u_prev + t * p2 * unit(orth(u_prev)));
  const double sigma = CounterRng(s.seed, j, kAvalancheNorm).uniform(1.0, 2.0);
  const Mat2C top = Mat2C::outer(u, unit(orth(sdir)));
  const Mat2C bottom = Mat2C::outer(unit(orth(u)), sdir);
  return sigma * (top + (1.0 / (s.gap_factor * s.mu)) * bottom);
}

Mat2C entry(const GeneratorSpec& s, int j) {
  switch (s.family) {
    case Family::Example1:
      return example1(j);
    case Family::Diagonal:
      return Mat2C::diag(s.lplus, s.lminus);
    case Family::ConjugatedDominated:
    case Family::RandomSingular:
      return conjugated_entry(s, j);
    case Family::Schrodinger:
      return {s.energy - potential_at(s, j), -1.0, 1.0, 0.0};
    case Family::RandomBounded: {
      CounterRng rng(s.seed, j, kEntries);
      auto draw = [&] { return s.scale * std::sqrt(rng.uniform()) * rng.unit_phase(); };
      const cplx a = draw(), b = draw(), c = draw(), d = draw();
      return {a, b, c, d};
    }
    case Family::Unitary: {
      if (s.theta) return rotation(*s.theta);
      CounterRng rng(s.seed, j, kUnitary);
      const Vec2 u = rng.unit_vector();
      return Mat2C::from_columns(u, rng.unit_phase() * orth(u));
    }
    case Family::Avalanche:
      return avalanche_entry(s, j);
  }
  invalid("unknown family");
  return {};
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::int64_t j, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(j) * 0x2545f4914f6cdd1dULL) ^
                         splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

double CounterRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

cplx CounterRng::unit_phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

Vec2 CounterRng::unit_vector() {
  // |x|^2 uniform in [0, 1] gives the uniform distribution on the unit sphere of C^2 up to phase.
  const double t = uniform();
  return {std::sqrt(t), std::sqrt(1.0 - t) * unit_phase()};
}

const char* family_name(Family f) {
  for (const auto& [fam, name] : kFamilies)
    if (fam == f) return name;
  return "unknown";
}

Family family_from_name(const std::string& name) {
  for (const auto& [fam, n] : kFamilies)
    if (name == n) return fam;
  throw Error(ErrorCode::InvalidSpec, "unknown family '" + name + "'");
}

Mat2C example1(int j) {
  return {std::ldexp(1.0, 2 - std::abs(j)), -3.0, 0.0, std::ldexp(1.0, -std::abs(j + 1))};
}

DyadicProduct example1_closed_product(int j, int n) {
  if (n < 1) throw Error(ErrorCode::Precondition, "closed form needs n >= 1");
  DyadicProduct p;
  for (int k = 1; k <= n - 1; ++k) p.log2_scale -= std::abs(j + k);
  p.core = {std::ldexp(1.0, 2 * n - std::abs(j)), 1.0 - std::ldexp(1.0, 2 * n), 0.0,
            std::ldexp(1.0, -std::abs(j + n))};
  return p;
}

Frame frame_at(const GeneratorSpec& s, int j) {
  Frame f;
  if (s.theta) {
    f.u = {std::cos(*s.theta), std::sin(*s.theta)};
    f.s = {-std::sin(*s.theta), std::cos(*s.theta)};
  } else {
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 10000 && !found; ++attempt) {
      CounterRng rng(s.seed ^ splitmix64(attempt), j, kFrame);
      f.u = rng.unit_vector();
      f.s = rng.unit_vector();
      found = std::abs(det(f.u, f.s)) >= s.det_floor;
    }
    if (!found) invalid("could not draw a frame above det_floor");
  }
  CounterRng rng(s.seed, j, kEigen);
  const double mp = rng.uniform(s.lplus_min, s.lplus_max);
  const double mm = s.gap ? mp / *s.gap : rng.uniform(s.lminus_min, s.lminus_max);
  const cplx pp = rng.unit_phase();
  const cplx pm = rng.unit_phase();
  f.lplus = s.random_phases ? mp * pp : cplx(mp);
  f.lminus = s.random_phases ? mm * pm : cplx(mm);
  return f;
}

DominationTruth domination_truth(const GeneratorSpec& s) {
  DominationTruth t;
  t.lambda = std::numeric_limits<double>::infinity();
  t.delta = 2.0;
  for (int j = s.window.lo; j <= s.window.hi; ++j) {
    const Frame f = frame_at(s, j);
    t.lambda = std::min(t.lambda, std::abs(f.lplus) / std::abs(f.lminus));
    t.delta = std::min(t.delta, dist_from_vectors(f.u, f.s));
  }
  return t;
}

MatrixSequence generate(const GeneratorSpec& spec) {
  validate(spec);
  std::vector<Mat2C> entries;
  entries.reserve(static_cast<std::size_t>(spec.window.size()));
  double top = 0;
  for (int j = spec.window.lo; j <= spec.window.hi; ++j) {
    const Mat2C B = entry(spec, j);
    if (!B.is_finite() || B.max_abs() <= tol::kEntryZero)
      invalid("generated entry at j=" + std::to_string(j) + " is zero or non-finite");
    top = std::max(top, op_norm(B));
    entries.push_back(B);
  }
  double bound = top * 1.25;
  if (spec.bound_M) {
    if (!(top < *spec.bound_M)) invalid("entries reach the declared bound_M");
    bound = *spec.bound_M;
  }
  return MatrixSequence(spec.window, bound, std::move(entries), spec_to_json(spec));
}

namespace {

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw Error(ErrorCode::InvalidSpec, "expected a number or [re, im]");
}

}  // namespace

json spec_to_json(const GeneratorSpec& s) {
  json d = {{"family", family_name(s.family)}, {"window", json::array({s.window.lo, s.window.hi})}};
  if (s.bound_M) d["bound_M"] = *s.bound_M;
  switch (s.family) {
    case Family::Example1:
      break;
    case Family::Diagonal:
      d["lplus"] = cplx_json(s.lplus);
      d["lminus"] = cplx_json(s.lminus);
      break;
    case Family::ConjugatedDominated:
    case Family::RandomSingular:
      d["seed"] = s.seed;
      d["lplus_range"] = json::array({s.lplus_min, s.lplus_max});
      if (s.gap) {
        d["gap"] = *s.gap;
      } else {
        d["lminus_range"] = json::array({s.lminus_min, s.lminus_max});
      }
      d["random_phases"] = s.random_phases;
      if (s.theta) {
        d["theta"] = *s.theta;
      } else {
        d["det_floor"] = s.det_floor;
      }
      if (s.family == Family::RandomSingular) {
        d["singular_at"] = s.singular_at;
        d["misaligned"] = s.misaligned;
      }
      break;
    case Family::Schrodinger:
      d["energy"] = s.energy;
      d["potential"] = s.potential;
      if (s.potential == "table") d["potential_table"] = s.potential_table;
      if (s.potential == "random") {
        d["seed"] = s.seed;
        d["amplitude"] = s.amplitude;
      }
      break;
    case Family::RandomBounded:
      d["seed"] = s.seed;
      d["scale"] = s.scale;
      break;
    case Family::Unitary:
      if (s.theta) {
        d["theta"] = *s.theta;
      } else {
        d["seed"] = s.seed;
      }
      break;
    case Family::Avalanche:
      d["seed"] = s.seed;
      d["mu"] = s.mu;
      d["gap_factor"] = s.gap_factor;
      d["overlap_range"] = json::array({s.overlap_min, s.overlap_max});
      break;
  }
  return d;
}

GeneratorSpec spec_from_json(const json& d) {
  try {
    GeneratorSpec s;
    s.family = family_from_name(d.at("family").get<std::string>());
    if (d.contains("window")) s.window = {d["window"].at(0).get<int>(), d["window"].at(1).get<int>()};
    if (d.contains("bound_M")) s.bound_M = d["bound_M"].get<double>();
    s.seed = d.value("seed", std::uint64_t{0});
    if (d.contains("lplus")) s.lplus = cplx_value(d["lplus"]);
    if (d.contains("lminus")) s.lminus = cplx_value(d["lminus"]);
    if (d.contains("lplus_range")) {
      s.lplus_min = d["lplus_range"].at(0).get<double>();
      s.lplus_max = d["lplus_range"].at(1).get<double>();
    }
    if (d.contains("lminus_range")) {
      s.lminus_min = d["lminus_range"].at(0).get<double>();
      s.lminus_max = d["lminus_range"].at(1).get<double>();
    }
    if (d.contains("gap")) s.gap = d["gap"].get<double>();
    s.random_phases = d.value("random_phases", s.random_phases);
    if (d.contains("theta")) s.theta = d["theta"].get<double>();
    s.det_floor = d.value("det_floor", s.det_floor);
    if (d.contains("singular_at")) s.singular_at = d["singular_at"].get<std::vector<int>>();
    s.misaligned = d.value("misaligned", s.misaligned);
    s.energy = d.value("energy", s.energy);
    s.potential = d.value("potential", s.potential);
    if (d.contains("potential_table")) s.potential_table = d["potential_table"].get<std::vector<double>>();
    s.amplitude = d.value("amplitude", s.amplitude);
    s.scale = d.value("scale", s.scale);
    s.mu = d.value("mu", s.mu);
    s.gap_factor = d.value("gap_factor", s.gap_factor);
    if (d.contains("overlap_range")) {
      s.overlap_min = d["overlap_range"].at(0).get<double>();
      s.overlap_max = d["overlap_range"].at(1).get<double>();
    }
    validate(s);
    return s;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSpec, ex.what());
  }
}

}  // namespace domsplit
