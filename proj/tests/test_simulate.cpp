#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "aghq/errors.hpp"
#include "aghq/rng.hpp"
#include "aghq/simulate.hpp"

using namespace aghq;

TEST_CASE("rate exponent floor") {
  CHECK(rate_exponent(1) == 1);
  CHECK(rate_exponent(3) == 1);
  CHECK(rate_exponent(5) == 2);
  CHECK(rate_exponent(7) == 3);
  CHECK(rate_exponent(11) == 4);
}

TEST_CASE("poisson sampler") {
  SUBCASE("vanishing rate gives zeros") {
    RngStream stream(1);
    for (long v : poisson_sample(1e-12, 1000, stream)) CHECK(v == 0);
  }
  SUBCASE("inversion regime moments, lambda = 5") {
    RngStream stream(2);
    const std::size_t n = 1000000;
    const std::vector<long> draws = poisson_sample(5.0, n, stream);
    double mean = 0.0;
    for (long v : draws) mean += v;
    mean /= n;
    CHECK(std::abs(mean - 5.0) < 5.0 * std::sqrt(5.0 / n));  // 5 standard errors
    double var = 0.0;
    for (long v : draws) var += (v - mean) * (v - mean);
    var /= n - 1;
    // Var of the sample variance for Poisson(5): (mu4 - sigma^4)/n with
    // mu4 = lambda(1 + 3 lambda) = 80.
    CHECK(std::abs(var - 5.0) < 5.0 * std::sqrt((80.0 - 25.0) / n));
  }
  SUBCASE("rejection regime moments, lambda = 80") {
    RngStream stream(3);
    const std::size_t n = 1000000;
    const std::vector<long> draws = poisson_sample(80.0, n, stream);
    double mean = 0.0;
    for (long v : draws) mean += v;
    mean /= n;
    CHECK(std::abs(mean - 80.0) < 5.0 * std::sqrt(80.0 / n));
  }
  SUBCASE("fixed stream reproduces") {
    RngStream a(7), b(7);
    const std::vector<long> da = poisson_sample(5.0, 100, a);
    const std::vector<long> db = poisson_sample(5.0, 100, b);
    CHECK(da == db);
  }
}

TEST_CASE("substreams are insensitive to consumption order") {
  RngStream a(9, 1, 2);
  const double first = a.next_uniform();
  RngStream b(9, 3, 4);
  (void)b.next_uniform();
  RngStream a2(9, 1, 2);
  CHECK(a2.next_uniform() == first);
}

TEST_CASE("simulate_rates basics") {
  SimOptions opts;
  opts.lambda = 5.0;
  opts.n_max = 12;
  opts.reps = 5;
  opts.ks = {3, 5};
  opts.seed = 42;

  const SimulationResult r1 = simulate_rates(opts);
  CHECK(r1.rows.size() == 12u * 5u * 2u);

  SUBCASE("rows are sorted and complete") {
    std::size_t idx = 0;
    for (int n = 1; n <= 12; ++n)
      for (int rep = 1; rep <= 5; ++rep)
        for (int k : {3, 5}) {
          CHECK(r1.rows[idx].n == n);
          CHECK(r1.rows[idx].rep == rep);
          CHECK(r1.rows[idx].k == k);
          ++idx;
        }
  }
  SUBCASE("bit-identical rerun") {
    const SimulationResult r2 = simulate_rates(opts);
    CHECK(simulation_to_csv(r1) == simulation_to_csv(r2));
  }
  SUBCASE("detrending recomputes exactly from the stored columns") {
    for (const SimRow& row : r1.rows) {
      const double again =
          row.log_rel_error + rate_exponent(row.k) * std::log(double(row.n));
      const bool matches =
          (std::isnan(again) && std::isnan(row.detrended)) || again == row.detrended;
      CHECK(matches);
    }
  }
  SUBCASE("csv header and row count") {
    const std::string csv = simulation_to_csv(r1);
    CHECK(csv.rfind("n,rep,k,log_rel_error,detrended\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
      if (c == '\n') ++lines;
    CHECK(lines == 1u + r1.rows.size());
  }
  SUBCASE("argument validation") {
    SimOptions bad = opts;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(simulate_rates(bad), InvalidArgumentError);
    bad = opts;
    bad.ks = {};
    CHECK_THROWS_AS(simulate_rates(bad), InvalidArgumentError);
  }
}

TEST_CASE("rate_slope on noiseless synthetic rows") {
  SimulationResult result;
  for (int n = 10; n <= 30; ++n)
    for (int rep = 1; rep <= 12; ++rep) {
      SimRow row;
      row.n = n;
      row.rep = rep;
      row.k = 3;
      row.log_rel_error = 2.0 - 3.0 * std::log(double(n));
      row.detrended = row.log_rel_error + rate_exponent(3) * std::log(double(n));
      result.rows.push_back(row);
    }
  const RateFit fit = rate_slope(result, 3, 10, 30);
  CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.n_points == 21);

  // de-trended slope differs by exactly the rate exponent
  const RateFit flat = rate_slope(result, 3, 10, 30, true);
  CHECK(flat.slope == doctest::Approx(-2.0).epsilon(1e-10));

  CHECK_THROWS_AS(rate_slope(result, 5, 10, 30), EstimationError);
  CHECK_THROWS_AS(rate_slope(result, 3, 10, 13), EstimationError);
}

TEST_CASE("k=7 medians dominate k=3 medians at every sample size") {
  SimOptions opts;
  opts.lambda = 5.0;
  opts.n_max = 100;
  opts.reps = 50;
  opts.ks = {3, 7};
  opts.seed = 606;
  opts.threads = 0;
  const SimulationResult result = simulate_rates(opts);

  std::vector<std::vector<double>> k3(opts.n_max + 1), k7(opts.n_max + 1);
  for (const SimRow& row : result.rows)
    (row.k == 3 ? k3 : k7)[row.n].push_back(row.log_rel_error);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2]
                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  for (int n = 10; n <= 100; ++n) {
    INFO("n=", n);
    CHECK(median(k7[n]) <= median(k3[n]));
  }
}

TEST_CASE("small-scale slope sanity for k=3") {
  SimOptions opts;
  opts.lambda = 5.0;
  opts.n_max = 40;
  opts.reps = 40;
  opts.ks = {3};
  opts.seed = 7;
  const SimulationResult result = simulate_rates(opts);
  const RateFit fit = rate_slope(result, 3, 10, 40);
  CHECK(fit.slope > -1.5);
  CHECK(fit.slope < -0.5);
}
