#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoisim/engine.hpp"
#include "aoisim/rng.hpp"

namespace aoisim::analysis {

// (2 - p) / (2p): the long-run average-age floor for bounded online policies.
double lower_bound(double p);

// P(first success at attempt j) = (1-p)^{j-1} p.
double geometric_pmf(long j, double p);

// E[Y^2] for geometric(p): (2 - p) / p^2.
double geometric_second_moment(double p);

// gamma(a) = e^{-a} - (1 - a), its derivative, and the hitting-time bound
// e^{-a} / gamma'(a) from the exponential-martingale argument.
double martingale_gamma(double alpha);
double martingale_gamma_prime(double alpha);
double martingale_bound(double alpha);

struct HittingSample {
  std::uint64_t steps = 0;
  bool censored = false;
};

// First zero-hitting time of the walk W_0 = 1, W_{n+1} = W_n + (A_{n+1} - 1),
// A i.i.d. Poisson(1). The walk is null-recurrent, so a step cap returns a
// censored sample. UnitPoisson is any callable returning a long draw.
template <class UnitPoisson>
HittingSample walk_hitting_time_with(UnitPoisson&& draw, std::uint64_t cap) {
  long level = 1;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    level += draw() - 1;
    if (level == 0) return {n, false};
  }
  return {cap, true};
}

HittingSample walk_hitting_time(rng::Stream& stream,
                                std::uint64_t cap = 100'000'000);

std::vector<HittingSample> sample_hitting_times(std::uint64_t seed,
                                                std::size_t count,
                                                std::uint64_t cap);

struct BoundCheckRow {
  double alpha = 0.0;
  double bound = 0.0;
  double censored_mean = 0.0;
  bool satisfied = false;
};

// Checks E[min(kappa, cap)] >= e^{-alpha}/gamma'(alpha) per alpha. Valid
// whenever the bound sits well below the censoring cap.
std::vector<BoundCheckRow> martingale_bound_check(
    std::span<const double> alphas, std::span<const HittingSample> samples);

struct GofReport {
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double sample_mean = 0.0;
  double expected_mean = 0.0;
  double mean_z = 0.0;  // standardized distance of the sample mean
  bool gof_ok = false;  // not rejected at the 0.1% level
  bool mean_ok = false; // within 3 standard errors
};

// Stage-2 duration law: geometric(1 - q) with q = 2/e.
GofReport t2_distribution_check(std::span<const double> t2_samples);

struct TailTrendReport {
  std::vector<double> t0_grid;
  std::vector<double> mean_tail;
  std::vector<double> second_moment;
  double mean_ratio = 0.0;  // max/min of mean_tail
  double m2_ratio = 0.0;
  bool bounded = false;
};

TailTrendReport renewal_tail_check(
    std::span<const double> t0_grid,
    std::span<const std::vector<double>> tail_samples_per_t0);

struct ConvergenceReport {
  std::vector<double> t0_grid;
  std::vector<double> mean_aoi;
  std::vector<double> stderr_aoi;
  std::vector<double> rel_gap;  // (mean - bound) / bound
  double bound = 0.0;
  bool decreasing = false;  // monotone trend within 2-sigma slack
};

// Runs BU-ER at each T0 in the grid (base supplies p, T, paths, seed) and
// checks the long-run age trends down toward the bound.
ConvergenceReport theorem1_convergence(const ExperimentConfig& base,
                                       std::span<const double> t0_grid);

// Survival function of the chi-squared distribution (regularized upper
// incomplete gamma Q(k/2, x/2)).
double chi_squared_survival(double x, double dof);

}  // namespace aoisim::analysis
