#include "aghq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aghq/adapt.hpp"
#include "aghq/errors.hpp"
#include "aghq/models.hpp"
#include "aghq/rng.hpp"

namespace aghq {

namespace {

// One (n, rep) cell: draw the dataset, fit every k, fill the row block.
void run_cell(const SimOptions& opts, int n, int rep, SimRow* rows) {
  RngStream stream(opts.seed, static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(rep));
  const std::vector<long> y = poisson_sample(opts.lambda, static_cast<std::size_t>(n), stream);
  const ConjugateModelInstance model = ConjugateModelInstance::from_counts(y);
  const LogTarget target = model.make_target();

  for (std::size_t ki = 0; ki < opts.ks.size(); ++ki) {
    const int k = opts.ks[ki];
    SimRow& row = rows[ki];
    row.n = n;
    row.rep = rep;
    row.k = k;
    try {
      const AdaptedPosterior ap = fit(target, k);
      const double e_rel = relative_error(model.log_z_exact, ap.log_norm_const);
      row.log_rel_error = std::log(e_rel);  // -inf when roundoff makes e_rel 0
    } catch (const Error&) {
      row.log_rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    row.detrended = row.log_rel_error + rate_exponent(k) * std::log(static_cast<double>(n));
  }
}

}  // namespace

SimulationResult simulate_rates(const SimOptions& opts) {
  if (opts.lambda <= 0.0) throw InvalidArgumentError("simulate_rates: lambda must be positive");
  if (opts.n_max < 2) throw InvalidArgumentError("simulate_rates: need n_max >= 2");
  if (opts.reps < 1) throw InvalidArgumentError("simulate_rates: need reps >= 1");
  if (opts.ks.empty()) throw InvalidArgumentError("simulate_rates: need at least one k");

  SimulationResult result;
  result.meta = opts;
  const long n_cells = static_cast<long>(opts.n_max) * opts.reps;
  const long ks = static_cast<long>(opts.ks.size());
  result.rows.resize(n_cells * ks);

  // Cell c = (n-1)*reps + (rep-1) writes rows [c*ks, (c+1)*ks): the layout is
  // fixed up front, so the sweep order cannot change the output.
  auto run_index = [&](long c) {
    const int n = static_cast<int>(c / opts.reps) + 1;
    const int rep = static_cast<int>(c % opts.reps) + 1;
    run_cell(opts, n, rep, result.rows.data() + c * ks);
  };

  if (opts.threads == 1) {
    for (long c = 0; c < n_cells; ++c) run_index(c);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) num_threads(opts.threads > 0 ? opts.threads : omp_get_max_threads())
    for (long c = 0; c < n_cells; ++c) run_index(c);
#else
    for (long c = 0; c < n_cells; ++c) run_index(c);
#endif
  }
  return result;
}

std::string simulation_to_csv(const SimulationResult& result) {
  std::string out = "n,rep,k,log_rel_error,detrended\n";
  char buf[160];
  for (const SimRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g\n", row.n, row.rep, row.k,
                  row.log_rel_error, row.detrended);
    out += buf;
  }
  return out;
}

namespace {

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RateFit rate_slope(const SimulationResult& result, int k, int n_min, int n_max,
                   bool detrended) {
  std::map<int, std::vector<double>> by_n;
  for (const SimRow& row : result.rows) {
    if (row.k != k || row.n < n_min || row.n > n_max) continue;
    const double v = detrended ? row.detrended : row.log_rel_error;
    if (!std::isnan(v)) by_n[row.n].push_back(v);
  }
  std::vector<double> xs, ys;
  for (auto& [n, vals] : by_n) {
    if (vals.size() < 10) continue;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(median_inplace(vals));
  }
  if (xs.size() < 5)
    throw EstimationError(
        "rate_slope: need at least 5 sample sizes with at least 10 replicates each");

  // Ordinary least squares of y on (1, x).
  const double nn = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  RateFit fit;
  fit.n_points = static_cast<int>(xs.size());
  fit.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / nn;
  return fit;
}

}  // namespace aghq
