#include "aoisim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim::analysis {

double lower_bound(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must be in (0, 1]");
  return (2.0 - p) / (2.0 * p);
}

double geometric_pmf(long j, double p) {
  if (j < 1) throw std::domain_error("j must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must be in (0, 1]");
  return std::pow(1.0 - p, static_cast<double>(j - 1)) * p;
}

double geometric_second_moment(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must be in (0, 1]");
  return (2.0 - p) / (p * p);
}

double martingale_gamma(double alpha) {
  return std::exp(-alpha) - (1.0 - alpha);
}

double martingale_gamma_prime(double alpha) {
  return 1.0 - std::exp(-alpha);
}

double martingale_bound(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("alpha must be > 0");
  return std::exp(-alpha) / martingale_gamma_prime(alpha);
}

HittingSample walk_hitting_time(rng::Stream& stream, std::uint64_t cap) {
  return walk_hitting_time_with([&stream] { return stream.poisson_unit(); },
                                cap);
}

std::vector<HittingSample> sample_hitting_times(std::uint64_t seed,
                                                std::size_t count,
                                                std::uint64_t cap) {
  std::vector<HittingSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    rng::Stream stream(rng::derive_stream(seed, i, rng::StreamTag::kWalk));
    out.push_back(walk_hitting_time(stream, cap));
  }
  return out;
}

std::vector<BoundCheckRow> martingale_bound_check(
    std::span<const double> alphas, std::span<const HittingSample> samples) {
  if (samples.empty()) throw std::invalid_argument("no hitting-time samples");
  double sum = 0.0;
  for (const auto& s : samples) sum += static_cast<double>(s.steps);
  double censored_mean = sum / static_cast<double>(samples.size());

  std::vector<BoundCheckRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    BoundCheckRow row;
    row.alpha = alpha;
    row.bound = martingale_bound(alpha);
    row.censored_mean = censored_mean;
    row.satisfied = censored_mean >= row.bound;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Regularized incomplete gamma: series for x < a+1, continued fraction above.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("bad incomplete gamma args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

}  // namespace

double chi_squared_survival(double x, double dof) {
  return regularized_gamma_q(dof / 2.0, x / 2.0);
}

GofReport t2_distribution_check(std::span<const double> t2_samples) {
  if (t2_samples.size() < 1000) {
    throw std::invalid_argument("need at least 1e3 stage-2 samples");
  }
  const double q = 2.0 * std::exp(-1.0);   // slot keeps the battery empty
  const double succ = 1.0 - q;             // slot ends the stage
  const double n = static_cast<double>(t2_samples.size());

  GofReport report;
  report.expected_mean = 1.0 / succ;

  // Individual bins while the expected count stays >= 5, then one tail bin.
  std::size_t max_j = 1;
  while (n * geometric_pmf(static_cast<long>(max_j + 1), succ) >= 5.0) ++max_j;

  std::vector<double> observed(max_j + 1, 0.0);
  double sum = 0.0, sumsq = 0.0;
  for (double v : t2_samples) {
    long j = std::lround(v);
    sum += v;
    sumsq += v * v;
    if (j < 1) throw std::invalid_argument("stage-2 duration below one slot");
    std::size_t bin = std::min<std::size_t>(static_cast<std::size_t>(j), max_j + 1);
    observed[bin - 1] += 1.0;
  }

  double chi2 = 0.0;
  for (std::size_t b = 0; b < max_j; ++b) {
    double expct = n * geometric_pmf(static_cast<long>(b + 1), succ);
    double d = observed[b] - expct;
    chi2 += d * d / expct;
  }
  double tail_expct = n * std::pow(q, static_cast<double>(max_j));
  double d = observed[max_j] - tail_expct;
  chi2 += d * d / tail_expct;

  report.chi2 = chi2;
  report.dof = max_j;  // (max_j + 1) bins, no fitted parameters
  report.p_value = chi_squared_survival(chi2, static_cast<double>(report.dof));
  report.gof_ok = report.p_value > 0.001;

  report.sample_mean = sum / n;
  double var = (sumsq - n * report.sample_mean * report.sample_mean) / (n - 1.0);
  double se = std::sqrt(var / n);
  report.mean_z = (report.sample_mean - report.expected_mean) / se;
  report.mean_ok = std::fabs(report.mean_z) <= 3.0;
  return report;
}

TailTrendReport renewal_tail_check(
    std::span<const double> t0_grid,
    std::span<const std::vector<double>> tail_samples_per_t0) {
  if (t0_grid.size() != tail_samples_per_t0.size() || t0_grid.empty()) {
    throw std::invalid_argument("grid/sample mismatch");
  }
  TailTrendReport report;
  for (std::size_t i = 0; i < t0_grid.size(); ++i) {
    const auto& samples = tail_samples_per_t0[i];
    if (samples.empty()) throw std::invalid_argument("empty tail sample set");
    double s1 = 0.0, s2 = 0.0;
    for (double v : samples) {
      s1 += v;
      s2 += v * v;
    }
    report.t0_grid.push_back(t0_grid[i]);
    report.mean_tail.push_back(s1 / samples.size());
    report.second_moment.push_back(s2 / samples.size());
  }
  auto ratio = [](const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  report.mean_ratio = ratio(report.mean_tail);
  report.m2_ratio = ratio(report.second_moment);
  report.bounded = report.mean_ratio < 2.0 && report.m2_ratio < 2.0;
  return report;
}

ConvergenceReport theorem1_convergence(const ExperimentConfig& base,
                                       std::span<const double> t0_grid) {
  if (t0_grid.size() < 2) throw std::invalid_argument("need at least two T0 values");
  ConvergenceReport report;
  report.bound = lower_bound(base.p);
  for (double t0 : t0_grid) {
    ExperimentConfig config = base;
    config.policy = "bu-er";
    config.t0 = t0;
    config.initial_energy = 2;
    config.sample_grid.clear();
    Aggregate agg = run_experiment(config);
    report.t0_grid.push_back(t0);
    report.mean_aoi.push_back(agg.mean_aoi.back());
    report.stderr_aoi.push_back(agg.stderr_aoi.back());
    report.rel_gap.push_back((agg.mean_aoi.back() - report.bound) / report.bound);
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < report.mean_aoi.size(); ++i) {
    double slack = 2.0 * std::hypot(report.stderr_aoi[i], report.stderr_aoi[i + 1]);
    if (report.mean_aoi[i + 1] > report.mean_aoi[i] + slack) ok = false;
  }
  double end_slack =
      2.0 * std::hypot(report.stderr_aoi.front(), report.stderr_aoi.back());
  if (!(report.mean_aoi.back() < report.mean_aoi.front() - end_slack)) ok = false;
  report.decreasing = ok;
  return report;
}

}  // namespace aoisim::analysis
