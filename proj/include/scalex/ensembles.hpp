#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalex/bounds.hpp"
#include "scalex/matrix.hpp"
#include "scalex/rng.hpp"

namespace scalex {

// All generators are pure functions of their seed: entries are drawn in row-major
// order (sign vectors u then v for the Rademacher kind), one SplitMix64 draw per
// value, so outputs are bit-identical across runs and platforms.

// Entries i.i.d. uniform on [low, high).
inline PositiveMatrix gen_population(std::size_t rows, std::size_t cols, double low, double high,
                                     std::uint64_t seed) {
  if (!(low > 0.0) || !(high > low))
    throw std::invalid_argument("gen_population: need 0 < low < high");
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.next_uniform(low, high);
  return PositiveMatrix(std::move(m));
}

// Observation of base: entries i.i.d. uniform on [base_ij - h, base_ij + h).
// Requires min entry of base > h so the observation stays positive.
inline PositiveMatrix gen_observation(const PositiveMatrix& base, double half_width,
                                      std::uint64_t seed) {
  if (!(half_width > 0.0)) throw std::invalid_argument("gen_observation: half_width must be > 0");
  if (base.min_entry() <= half_width)
    throw std::invalid_argument(
        "gen_observation: half_width must be smaller than the smallest base entry");
  SplitMix64 rng(seed);
  Matrix m(base.rows(), base.cols());
  for (std::size_t i = 0; i < base.rows(); ++i)
    for (std::size_t j = 0; j < base.cols(); ++j)
      m(i, j) = (base(i, j) - half_width) + rng.next_unit() * (2.0 * half_width);
  return PositiveMatrix(std::move(m));
}

// Row/column-dependent ensemble: entry (i,j) = b_ij if u_i v_j = +1, else a_ij,
// with u, v independent Rademacher sign vectors. Each row and each column sees
// independent signs, but rows are +-copies of one sign pattern.
inline PositiveMatrix gen_rademacher_dependent(const EnsembleBounds& env, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<int> u(env.rows()), v(env.cols());
  for (auto& s : u) s = rng.next_sign();
  for (auto& s : v) s = rng.next_sign();
  Matrix m(env.rows(), env.cols());
  for (std::size_t i = 0; i < env.rows(); ++i)
    for (std::size_t j = 0; j < env.cols(); ++j)
      m(i, j) = (u[i] * v[j] > 0) ? env.upper()(i, j) : env.lower()(i, j);
  return PositiveMatrix(std::move(m));
}

enum class EnsembleKind { uniform_population, uniform_observation, rademacher_dependent };

inline std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::uniform_population: return "uniform_population";
    case EnsembleKind::uniform_observation: return "uniform_observation";
    case EnsembleKind::rademacher_dependent: return "rademacher_dependent";
  }
  throw std::invalid_argument("unknown EnsembleKind");
}

inline EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "uniform_population") return EnsembleKind::uniform_population;
  if (s == "uniform_observation") return EnsembleKind::uniform_observation;
  if (s == "rademacher_dependent") return EnsembleKind::rademacher_dependent;
  throw std::invalid_argument("unknown ensemble kind: " + s);
}

// Serializable description of a generator call. The observation kind first draws
// its population base from a sub-seed, then perturbs it.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::uniform_population;
  std::size_t M = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double low = 0.0;          // population kinds
  double high = 0.0;
  double half_width = 0.0;   // uniform_observation
  std::vector<double> envelope_lower;  // rademacher_dependent, row-major
  std::vector<double> envelope_upper;
};

inline PositiveMatrix generate(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::uniform_population:
      return gen_population(spec.M, spec.N, spec.low, spec.high, spec.seed);
    case EnsembleKind::uniform_observation: {
      PositiveMatrix base =
          gen_population(spec.M, spec.N, spec.low, spec.high, derive_seed(spec.seed, {0}));
      return gen_observation(base, spec.half_width, derive_seed(spec.seed, {1}));
    }
    case EnsembleKind::rademacher_dependent: {
      EnsembleBounds env(Matrix(spec.M, spec.N, spec.envelope_lower),
                         Matrix(spec.M, spec.N, spec.envelope_upper));
      return gen_rademacher_dependent(env, spec.seed);
    }
  }
  throw std::invalid_argument("generate: unknown ensemble kind");
}

}  // namespace scalex
