#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scalex/bounds.hpp"
#include "scalex/ensembles.hpp"
#include "scalex/marginals.hpp"
#include "scalex/matrix.hpp"
#include "scalex/rng.hpp"
#include "scalex/sinkhorn.hpp"
#include "scalex/spectral.hpp"

namespace scalex {

// The three marginal scenarios of the random-matrix experiments:
//   a: M = N, unit targets (doubly stochastic)
//   b: M = 3N, targets resampled uniform [0.1, 1] per trial, normalized to sum 1
//   c: M = round(10 sqrt(N)), r_i = N, c_j = M
enum class Scenario { doubly_stochastic, rect_random_sums, rect_sqrt };

inline char scenario_letter(Scenario s) {
  switch (s) {
    case Scenario::doubly_stochastic: return 'a';
    case Scenario::rect_random_sums: return 'b';
    case Scenario::rect_sqrt: return 'c';
  }
  throw std::invalid_argument("unknown Scenario");
}

inline Scenario scenario_from_letter(char c) {
  switch (c) {
    case 'a': return Scenario::doubly_stochastic;
    case 'b': return Scenario::rect_random_sums;
    case 'c': return Scenario::rect_sqrt;
  }
  throw std::invalid_argument(std::string("unknown scenario letter: ") + c);
}

inline std::uint64_t scenario_id(Scenario s) { return static_cast<std::uint64_t>(s); }

struct ScenarioConfig {
  Scenario scenario = Scenario::doubly_stochastic;
  std::vector<std::size_t> n_values = {64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  // Solver tolerance on the margin deviation. Internally scaled by the largest
  // target sum when that exceeds 1: scenario (c) targets grow like N, and an
  // absolute 1e-12 on sums of size 4096 sits below the double-precision ulp.
  double solver_tol = kDefaultSolverTol;
  std::size_t max_iters = kDefaultMaxIters;
  double population_low = 1.5;
  double population_high = 2.5;
  double half_width = 0.5;
};

struct TrialResult {
  double e_n = 0.0;
  double op_err = 0.0;
  double p_norm = 0.0;   // ||P||_2 of the population scaled matrix
  double rho12 = 0.0;    // rho1 * rho2 of this trial's marginals
  bool converged = false;
};

// Per-N averaged measurements plus the predicted-rate reference curves.
struct ErrorCurve {
  Scenario scenario = Scenario::doubly_stochastic;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> m_values;
  std::vector<double> mean_en, std_en;
  std::vector<double> mean_operr, std_operr;
  std::vector<double> bound_en;     // rho1 rho2 sqrt(log max{M,N})
  std::vector<double> bound_operr;  // sqrt(log max{M,N} / min{M,N})
  std::vector<std::size_t> trials;    // attempted per N
  std::vector<std::size_t> failures;  // non-converged per N (excluded from means)
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Raised when a scenario exceeds the tolerated trial-failure rate.
struct ScenarioAbortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Marginals for one scenario instance. Scenario (b) draws from the given seed;
// (a) and (c) are deterministic in N.
inline std::pair<std::size_t, Marginals> make_marginals(Scenario scenario, std::size_t n,
                                                        std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("make_marginals: N must be >= 2");
  switch (scenario) {
    case Scenario::doubly_stochastic:
      return {n, Marginals::uniform(n, n)};
    case Scenario::rect_random_sums: {
      std::size_t m = 3 * n;
      SplitMix64 rng(seed);
      std::vector<double> r(m), c(n);
      for (double& v : r) v = rng.next_uniform(0.1, 1.0);
      for (double& v : c) v = rng.next_uniform(0.1, 1.0);
      double sr = compensated_sum(r), sc = compensated_sum(c);
      for (double& v : r) v /= sr;
      for (double& v : c) v /= sc;
      return {m, Marginals(std::move(r), std::move(c))};
    }
    case Scenario::rect_sqrt: {
      auto m = static_cast<std::size_t>(std::llround(10.0 * std::sqrt(static_cast<double>(n))));
      return {m, Marginals::uniform(m, n, static_cast<double>(n), static_cast<double>(m))};
    }
  }
  throw std::invalid_argument("make_marginals: unknown scenario");
}

// One randomized trial: draw A and its observation, scale both to the scenario
// marginals, and measure the factor discrepancy E_N and the relative operator-
// norm error of the scaled matrices. Non-convergence yields NaN measurements
// with converged = false; the caller decides severity.
inline TrialResult run_trial(Scenario scenario, std::size_t n, std::uint64_t trial_seed,
                             const ScenarioConfig& cfg) {
  auto [m_rows, marg] = make_marginals(scenario, n, derive_seed(trial_seed, {0}));
  double tol = cfg.solver_tol * std::max({1.0, marg.max_r(), marg.max_c()});

  TrialResult res;
  {
    MarginalProfile prof = rho_profile(marg);
    res.rho12 = prof.rho1 * prof.rho2;
  }

  std::optional<PositiveMatrix> population =
      gen_population(m_rows, n, cfg.population_low, cfg.population_high, derive_seed(trial_seed, {1}));
  std::optional<PositiveMatrix> observed =
      cfg.half_width > 0.0
          ? gen_observation(*population, cfg.half_width, derive_seed(trial_seed, {2}))
          : *population;

  SinkhornFactors base = sinkhorn_factors(*population, marg, tol, cfg.max_iters);
  SinkhornFactors obs = sinkhorn_factors(*observed, marg, tol, cfg.max_iters);
  res.converged = base.converged && obs.converged;
  if (!res.converged) {
    res.e_n = std::numeric_limits<double>::quiet_NaN();
    res.op_err = std::numeric_limits<double>::quiet_NaN();
    res.p_norm = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  res.e_n = error_measure(obs.x, obs.y, base.x, base.y);

  Matrix scaled = scaled_copy(*population, base.x, base.y);
  population.reset();
  Matrix delta = scaled_copy(*observed, obs.x, obs.y);
  observed.reset();
  for (std::size_t i = 0; i < delta.rows(); ++i) {
    auto d = delta.row(i);
    auto p = scaled.row(i);
    for (std::size_t j = 0; j < delta.cols(); ++j) d[j] -= p[j];
  }

  res.p_norm = operator_norm(scaled, 1e-10);
  res.op_err = largest_singular_value(delta, 1e-9) / res.p_norm;
  return res;
}

// Trial parallelism cap: SCALEX_THREADS if set, else hardware concurrency.
inline std::size_t trial_thread_cap() {
  if (const char* env = std::getenv("SCALEX_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

using TrialObserver = std::function<void(std::size_t n_index, std::size_t trial_index,
                                         const TrialResult&)>;

// Runs cfg.trials trials for every N in the grid and averages. Trials execute
// concurrently (capped by SCALEX_THREADS) but results are reduced in (N, trial)
// order, so the curve is bit-identical regardless of the parallelism degree.
// Aborts with ScenarioAbortError when any N cell loses more than 5% of its
// trials to non-convergence.
inline ErrorCurve run_scenario(const ScenarioConfig& cfg, const TrialObserver& observer = {}) {
  if (cfg.trials < 1) throw std::invalid_argument("run_scenario: trials must be >= 1");
  if (cfg.n_values.empty()) throw std::invalid_argument("run_scenario: empty N grid");
  for (std::size_t k = 0; k + 1 < cfg.n_values.size(); ++k)
    if (cfg.n_values[k] >= cfg.n_values[k + 1])
      throw std::invalid_argument("run_scenario: N grid must be strictly increasing");

  const std::size_t cells = cfg.n_values.size();
  const std::size_t total = cells * cfg.trials;
  std::vector<TrialResult> results(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      std::size_t n_idx = task / cfg.trials;
      std::size_t trial = task % cfg.trials;
      try {
        std::uint64_t seed = derive_seed(
            cfg.base_seed, {scenario_id(cfg.scenario), cfg.n_values[n_idx], trial});
        results[task] = run_trial(cfg.scenario, cfg.n_values[n_idx], seed, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  std::size_t thread_count = std::min(trial_thread_cap(), total);
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ErrorCurve curve;
  curve.scenario = cfg.scenario;
  curve.n_values = cfg.n_values;
  for (std::size_t n_idx = 0; n_idx < cells; ++n_idx) {
    const std::size_t n = cfg.n_values[n_idx];
    std::size_t m_rows = make_marginals(cfg.scenario, n, 0).first;
    std::vector<double> ens, ops;
    double rho12_sum = 0.0;
    std::size_t failures = 0;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const TrialResult& r = results[n_idx * cfg.trials + trial];
      if (observer) observer(n_idx, trial, r);
      rho12_sum += r.rho12;
      if (!r.converged) {
        ++failures;
        continue;
      }
      ens.push_back(r.e_n);
      ops.push_back(r.op_err);
    }
    if (static_cast<double>(failures) > 0.05 * static_cast<double>(cfg.trials))
      throw ScenarioAbortError("scenario " + std::string(1, scenario_letter(cfg.scenario)) +
                               " at N=" + std::to_string(n) + ": " + std::to_string(failures) +
                               " of " + std::to_string(cfg.trials) + " trials failed to converge");

    auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
      if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() < 2) return {mean, 0.0};
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
    };
    auto [me, se] = mean_std(ens);
    auto [mo, so] = mean_std(ops);

    double log_max = std::log(static_cast<double>(std::max(m_rows, n)));
    double min_mn = static_cast<double>(std::min(m_rows, n));
    curve.m_values.push_back(m_rows);
    curve.mean_en.push_back(me);
    curve.std_en.push_back(se);
    curve.mean_operr.push_back(mo);
    curve.std_operr.push_back(so);
    curve.bound_en.push_back(rho12_sum / static_cast<double>(cfg.trials) * std::sqrt(log_max));
    curve.bound_operr.push_back(std::sqrt(log_max / min_mn));
    curve.trials.push_back(cfg.trials);
    curve.failures.push_back(failures);
  }
  return curve;
}

// Ordinary least squares of log(y) against log(N). Quantifies the log-log rate
// comparisons; needs at least 3 positive points.
inline SlopeFit fit_loglog_slope(std::span<const std::size_t> n_values,
                                 std::span<const double> means) {
  if (n_values.size() != means.size())
    throw std::invalid_argument("fit_loglog_slope: length mismatch");
  if (n_values.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
  const std::size_t n = n_values.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (n_values[k] == 0 || !(means[k] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: points must be positive");
    lx[k] = std::log(static_cast<double>(n_values[k]));
    ly[k] = std::log(means[k]);
  }
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += lx[k];
    sy += ly[k];
  }
  double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate N grid");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double pred = fit.intercept + fit.slope * lx[k];
    ss_res += (ly[k] - pred) * (ly[k] - pred);
    ss_tot += (ly[k] - my) * (ly[k] - my);
  }
  fit.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

struct TailCheckResult {
  double violation_rate = 0.0;
  double bound = 0.0;
  std::size_t violations = 0;
  std::size_t trials = 0;
};

// Monte-Carlo check of the row-sum tail bound: the population matrix is the
// envelope midpoint, its true factors (x, y) are held fixed, and per trial only
// row 0 of the observation is redrawn (uniform on its envelope interval) —
// nothing else enters the row-0 sum. Contract: violation_rate stays below the
// lemma2_tail bound plus a binomial margin whenever the bound is informative.
inline TailCheckResult empirical_tail_check(const EnsembleBounds& env, const Marginals& m,
                                            double eps, std::size_t trials, std::uint64_t seed) {
  if (env.rows() != m.rows() || env.cols() != m.cols())
    throw std::invalid_argument("empirical_tail_check: envelope/marginal dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("empirical_tail_check: eps must be positive");
  if (trials < 1) throw std::invalid_argument("empirical_tail_check: trials must be >= 1");

  Matrix mid(env.rows(), env.cols());
  for (std::size_t i = 0; i < env.rows(); ++i)
    for (std::size_t j = 0; j < env.cols(); ++j)
      mid(i, j) = 0.5 * (env.lower()(i, j) + env.upper()(i, j));
  PositiveMatrix population(std::move(mid));
  double tol = kDefaultSolverTol * std::max({1.0, m.max_r(), m.max_c()});
  SinkhornFactors f = sinkhorn_factors(population, m, tol, kDefaultMaxIters);

  const std::size_t row = 0;
  TailCheckResult out;
  out.trials = trials;
  out.bound = lemma2_tail(env, m, eps, Axis::row, row);
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, {t}));
    NeumaierSum sum;
    for (std::size_t j = 0; j < env.cols(); ++j) {
      double lo = env.lower()(row, j);
      double entry = lo + rng.next_unit() * (env.upper()(row, j) - lo);
      sum.add(f.x[row] * entry * f.y[j]);
    }
    if (std::abs(sum.value() / m.r()[row] - 1.0) > eps) ++out.violations;
  }
  out.violation_rate = static_cast<double>(out.violations) / static_cast<double>(trials);
  return out;
}

}  // namespace scalex
