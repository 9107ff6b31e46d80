#ifndef AGHQ_SIMULATE_HPP
#define AGHQ_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace aghq {

/// Theorem rate exponent floor((k+2)/3).
inline int rate_exponent(int k) { return (k + 2) / 3; }

struct SimOptions {
  double lambda = 5.0;
  int n_max = 100;        // sample sizes 1..n_max
  int reps = 100;         // replications per sample size
  std::vector<int> ks = {3, 5, 7};
  std::uint64_t seed = 1;
  /// 1 = serial reference loop; 0 or >1 = OpenMP sweep over (n, rep) cells.
  /// Output is bit-identical either way.
  int threads = 1;
};

struct SimRow {
  int n = 0;
  int rep = 0;  // 1-based replicate index
  int k = 0;
  double log_rel_error = 0.0;
  double detrended = 0.0;  // log_rel_error + rate_exponent(k) * log n
};

struct SimulationResult {
  SimOptions meta;
  std::vector<SimRow> rows;  // sorted by (n, rep, k)
};

/// The de-trended error simulation on the conjugate Poisson model: for each
/// (n, rep) draws Y ~ iid Poisson(lambda) from the (n, rep) substream of
/// `seed`, fits AGHQ per k on the log-scale target, and records the relative
/// error of the normalizing constant against the closed form. The dataset of a
/// cell is shared across every k. Optimizer failures flag the row with NaN
/// rather than aborting the run.
SimulationResult simulate_rates(const SimOptions& opts);

/// CSV with header n,rep,k,log_rel_error,detrended; floats at 17 significant
/// digits.
std::string simulation_to_csv(const SimulationResult& result);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;  // distinct sample sizes used
};

/// OLS of per-n medians of log relative error (or of the de-trended error)
/// against log n, over sample sizes in [n_min, n_max]. Requires at least 5
/// distinct sample sizes with at least 10 finite replicates each.
RateFit rate_slope(const SimulationResult& result, int k, int n_min, int n_max,
                   bool detrended = false);

}  // namespace aghq

#endif
