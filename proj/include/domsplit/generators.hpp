#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "domsplit/cocycle.hpp"

namespace domsplit {

enum class Family {
  Example1,
  Diagonal,
  ConjugatedDominated,
  Schrodinger,
  RandomBounded,
  RandomSingular,
  Unitary,
  Avalanche,
};

const char* family_name(Family f);
// Throws InvalidSpec.
Family family_from_name(const std::string& name);

struct GeneratorSpec {
  Family family = Family::Example1;
  Window window{-50, 50};
  // Declared norm bound; derived from the generated entries when absent.
  std::optional<double> bound_M;
  std::uint64_t seed = 0;

  // Diagonal: constant diag(lplus, lminus).
  cplx lplus = 2.0;
  cplx lminus = 1.0;

  // Conjugated and singular families: B(j) = D(j+1) diag(l+(j), l-(j)) D(j)^{-1}.
  double lplus_min = 2.0;
  double lplus_max = 3.0;
  double lminus_min = 0.5;
  double lminus_max = 1.0;
  // When set, |l+(j)| / |l-(j)| equals gap at every j.
  std::optional<double> gap;
  bool random_phases = true;
  // When set, D(j) is the constant real rotation by theta (also the constant unitary).
  std::optional<double> theta;
  // Random frames satisfy |det D(j)| >= det_floor with unit columns.
  double det_floor = 0.3;

  // Singular family: rank-one entries at these positions.
  std::vector<int> singular_at;
  // Image along the old contracted line instead of the expanded one.
  bool misaligned = false;

  // Schrodinger: [[E - v(j), -1], [1, 0]] with v from zeros | table | random.
  double energy = 0.0;
  std::string potential = "zeros";
  std::vector<double> potential_table;
  double amplitude = 1.0;

  // Random bounded: entries uniform in the disc of this radius.
  double scale = 1.0;

  // Avalanche: sigma2/sigma1 = 1/(gap_factor mu) and |det(s(B(j+1)), u(B(j)))|
  // drawn from [overlap_min, overlap_max] * mu^(-1/4).
  double mu = 1e4;
  double gap_factor = 2.0;
  double overlap_min = 1.5;
  double overlap_max = 3.0;
};

nlohmann::json spec_to_json(const GeneratorSpec& spec);
// Throws InvalidSpec.
GeneratorSpec spec_from_json(const nlohmann::json& doc);

// Throws InvalidSpec. Entries depend only on (spec, j), never on the window.
MatrixSequence generate(const GeneratorSpec& spec);

Mat2C example1(int j);

// 2^log2_scale * core, exact up to rounding of the core entries.
struct DyadicProduct {
  int log2_scale = 0;
  Mat2C core;
};
DyadicProduct example1_closed_product(int j, int n);

// Conjugating frame of the dominated families: D(j) has columns u (expanded) and s (contracted).
struct Frame {
  Vec2 u;
  Vec2 s;
  cplx lplus;
  cplx lminus;
};
Frame frame_at(const GeneratorSpec& spec, int j);

struct DominationTruth {
  double lambda = 0;  // min_j |l+(j)| / |l-(j)|, with N = 1
  int N = 1;
  double delta = 0;  // min_j d(E^u(j), E^s(j))
};
DominationTruth domination_truth(const GeneratorSpec& spec);

// Deterministic stream keyed by (seed, j, stream), independent of any window.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::int64_t j, std::uint64_t stream);
  double uniform();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  cplx unit_phase();
  Vec2 unit_vector();

 private:
  std::mt19937_64 engine_;
};

}  // namespace domsplit
