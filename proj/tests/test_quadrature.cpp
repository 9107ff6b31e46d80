#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "aghq/errors.hpp"
#include "aghq/quadrature.hpp"
#include "aghq/special.hpp"

using namespace aghq;

namespace {
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);
}

TEST_CASE("hermite polynomial recurrence values") {
  CHECK(hermite_eval(0, 1.7) == 1.0);
  // H_3(x) = x^3 - 3x, expanded by hand from the recurrence.
  CHECK(hermite_eval(3, 1.0) == doctest::Approx(-2.0).epsilon(1e-15));
  // H_2(x) = x^2 - 1.
  CHECK(hermite_eval(2, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(hermite_eval(1, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(hermite_eval(-1, 0.0), InvalidArgumentError);
}

TEST_CASE("univariate rule k=1 is the Laplace point") {
  const UnivariateRule r = univariate_rule(1);
  REQUIRE(r.nodes.size() == 1);
  CHECK(r.nodes[0] == 0.0);
  CHECK(r.weights[0] == doctest::Approx(kSqrt2Pi).epsilon(1e-14));
}

TEST_CASE("univariate rule k=2 closed-form weights") {
  const UnivariateRule r = univariate_rule(2);
  REQUIRE(r.nodes.size() == 2);
  CHECK(r.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  // omega = 2! / (H_3(1)^2 phi(1)) = sqrt(2 pi) e^{1/2} / 2.
  const double expected = kSqrt2Pi * std::exp(0.5) / 2.0;
  CHECK(r.weights[0] == doctest::Approx(expected).epsilon(1e-13));
  CHECK(r.weights[1] == doctest::Approx(expected).epsilon(1e-13));

  double mass = 0.0, second = 0.0;
  for (int j = 0; j < 2; ++j) {
    mass += r.weights[j] * normal_pdf(r.nodes[j]);
    second += r.weights[j] * normal_pdf(r.nodes[j]) * r.nodes[j] * r.nodes[j];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(second == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("univariate rule k=3 matches the hand-derived rule") {
  const UnivariateRule r = univariate_rule(3);
  REQUIRE(r.nodes.size() == 3);
  CHECK(r.nodes[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r.nodes[1] == 0.0);  // exactly, by construction
  CHECK(r.nodes[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r.weights[0] == doctest::Approx(kSqrt2Pi * std::exp(1.5) / 6.0).epsilon(1e-13));
  CHECK(r.weights[1] == doctest::Approx(2.0 * kSqrt2Pi / 3.0).epsilon(1e-13));
  // Fourth Gaussian moment is exact at k=3.
  double fourth = 0.0;
  for (int j = 0; j < 3; ++j)
    fourth += r.weights[j] * normal_pdf(r.nodes[j]) * std::pow(r.nodes[j], 4);
  CHECK(fourth == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("univariate rule rejects out-of-range orders") {
  CHECK_THROWS_AS(univariate_rule(0), InvalidArgumentError);
  CHECK_THROWS_AS(univariate_rule(51), InvalidArgumentError);
  CHECK_THROWS_AS(univariate_rule(-3), InvalidArgumentError);
}

TEST_CASE("nodes and weights are symmetric bit-for-bit and normalize, k <= 50") {
  for (int k = 1; k <= 50; ++k) {
    const UnivariateRule r = univariate_rule(k);
    double mass = 0.0;
    for (int j = 0; j < k; ++j) {
      CHECK(r.nodes[j] == -r.nodes[k - 1 - j]);
      CHECK(r.weights[j] == r.weights[k - 1 - j]);
      CHECK(r.weights[j] > 0.0);
      if (j > 0) CHECK(r.nodes[j] > r.nodes[j - 1]);
      mass += r.weights[j] * normal_pdf(r.nodes[j]);
    }
    CHECK(std::abs(mass - 1.0) <= 1e-12);
    CHECK((k % 2 == 1) == (r.nodes[k / 2] == 0.0));
  }
}

TEST_CASE("product rule shapes and the k=1 multivariate point") {
  const ProductRule r52 = product_rule(5, 2);
  CHECK(r52.size() == 25);
  CHECK(r52.dim == 2);

  const ProductRule r17 = product_rule(1, 7);
  REQUIRE(r17.size() == 1);
  CHECK(r17.points.col(0).norm() == 0.0);
  CHECK(r17.weight_of(0) == doctest::Approx(std::pow(2.0 * std::numbers::pi, 3.5))
                                .epsilon(1e-12));
  CHECK(r17.max_norm == 0.0);

  CHECK_THROWS_AS(product_rule(3, 21, 1000000), DimensionalBlowupError);
  CHECK_THROWS_AS(product_rule(0, 2), InvalidArgumentError);
}

TEST_CASE("product rule is symmetric with product weights") {
  const ProductRule r = product_rule(4, 3);
  REQUIRE(r.size() == 64);
  // Index the points for negation lookup.
  std::map<std::vector<double>, double> weight_of_point;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    std::vector<double> key(r.points.col(i).begin(), r.points.col(i).end());
    weight_of_point[key] = r.log_weights[i];
  }
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    std::vector<double> neg;
    double lw = 0.0;
    for (int d = 0; d < 3; ++d) {
      neg.push_back(-r.points(d, i));
      // product weights: match against the univariate factor
      for (int j = 0; j < 4; ++j)
        if (r.points(d, i) == r.base.nodes[j]) lw += std::log(r.base.weights[j]);
    }
    REQUIRE(weight_of_point.count(neg) == 1);
    CHECK(weight_of_point[neg] == r.log_weights[i]);
    CHECK(r.log_weights[i] == doctest::Approx(lw).epsilon(1e-14));
    max_norm = std::max(max_norm, r.points.col(i).norm());
  }
  CHECK(r.max_norm == doctest::Approx(max_norm).epsilon(1e-15));
}

TEST_CASE("verify_pkp spot values") {
  const ProductRule r31 = product_rule(3, 1);
  const PkpReport rep31 = verify_pkp(r31, 1e-8, 1e-10);
  CHECK(rep31.all_pass());
  for (const PkpEntry& e : rep31.entries) {
    if (e.alpha == std::vector<int>{2}) {
      CHECK(e.quadrature == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(e.exact == 1.0);
    }
  }

  const ProductRule r32 = product_rule(3, 2);
  const PkpReport rep32 = verify_pkp(r32, 1e-8, 1e-10);
  CHECK(rep32.all_pass());
  for (const PkpEntry& e : rep32.entries) {
    if (e.alpha == std::vector<int>{3, 1}) {
      CHECK(e.exact == 0.0);
      CHECK(std::abs(e.quadrature) <= 1e-10);
    }
  }
}

TEST_CASE("k=5 integrates the eighth moment exactly but not the tenth") {
  const ProductRule r = product_rule(5, 1);
  // Independent brute-force sum over the 5 nodes.
  auto quad_moment = [&](int a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
      s += normal_pdf(r.points(0, i)) * std::pow(r.points(0, i), a) * r.weight_of(i);
    return s;
  };
  // E[Z^8] = 7!! = 105: total order 8 <= 2k-1 = 9.
  CHECK(quad_moment(8) == doctest::Approx(105.0).epsilon(1e-10));
  CHECK(gaussian_moment(8) == 105.0);
  // Order 10 exceeds 2k-1 and must not be exact.
  CHECK(std::abs(quad_moment(10) / 945.0 - 1.0) > 1e-3);

  const PkpReport rep = verify_pkp(r, 1e-8, 1e-10);
  for (const PkpEntry& e : rep.entries)
    if (e.alpha == std::vector<int>{8}) CHECK(e.pass);
}

TEST_CASE("exactness property holds across small orders and dimensions") {
  for (int k : {1, 2, 4, 7, 10}) {
    for (int p : {1, 2, 3}) {
      const PkpReport rep = verify_pkp(product_rule(k, p), 1e-8, 1e-10);
      INFO("k=", k, " p=", p, " failures=", rep.failures);
      CHECK(rep.all_pass());
    }
  }
}

TEST_CASE("rule JSON carries k, p, nodes, weights") {
  const ProductRule r = product_rule(3, 2);
  const nlohmann::json j = nlohmann::json::parse(rule_to_json(r));
  CHECK(j["k"] == 3);
  CHECK(j["p"] == 2);
  REQUIRE(j["nodes"].size() == 3);
  REQUIRE(j["weights"].size() == 3);
  CHECK(j["nodes"][1].get<double>() == 0.0);
  CHECK(j["weights"][0].get<double>() == doctest::Approx(r.base.weights[0]));
}
