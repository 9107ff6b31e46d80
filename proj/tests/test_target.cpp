#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "aghq/adapt.hpp"
#include "aghq/errors.hpp"
#include "aghq/models.hpp"
#include "aghq/rng.hpp"
#include "aghq/target.hpp"

using namespace aghq;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("fd_gradient on elementary functions") {
  auto square = [](const Eigen::VectorXd& t) { return t[0] * t[0]; };
  CHECK(fd_gradient(square, vec1(3.0))[0] == doctest::Approx(6.0).epsilon(1e-7));

  auto constant = [](const Eigen::VectorXd&) { return 4.2; };
  Eigen::VectorXd g = fd_gradient(constant, Eigen::VectorXd::Zero(3));
  CHECK(g.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));

  auto mixed = [](const Eigen::VectorXd& t) { return std::sin(t[0]) + t[1] * t[1] * t[1]; };
  Eigen::VectorXd theta(2);
  theta << 0.0, 2.0;
  g = fd_gradient(mixed, theta);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("custom step rules are honored") {
  // A coarse forced step makes the central-difference truncation error
  // visible on a cubic; the default step keeps it tiny.
  auto cubic = [](const Eigen::VectorXd& t) { return t[0] * t[0] * t[0]; };
  StepRule coarse = StepRule::defaults();
  coarse.gradient_step = [](double) { return 1e-2; };
  const double coarse_err =
      std::abs(fd_gradient(cubic, vec1(1.0), coarse)[0] - 3.0);
  const double default_err = std::abs(fd_gradient(cubic, vec1(1.0))[0] - 3.0);
  CHECK(coarse_err == doctest::Approx(1e-4).epsilon(1e-3));  // h^2 f''' / 6
  CHECK(default_err < 1e-9);
}

TEST_CASE("fd_gradient reports the offending coordinate") {
  auto partial = [](const Eigen::VectorXd& t) {
    return t[1] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : t.sum();
  };
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS_WITH_AS(fd_gradient(partial, theta),
                       doctest::Contains("coordinate 1"), EvaluationError);
}

TEST_CASE("fd_hessian on elementary functions") {
  auto neg_quad = [](const Eigen::VectorXd& t) { return -0.5 * t.squaredNorm(); };
  Eigen::MatrixXd h = fd_hessian(neg_quad, Eigen::VectorXd::Zero(2));
  CHECK((h + Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-5);

  auto bilinear = [](const Eigen::VectorXd& t) { return t[0] * t[1]; };
  h = fd_hessian(bilinear, Eigen::VectorXd::Ones(2));
  CHECK(h(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(h(1, 0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(h(0, 0)) < 1e-5);
  CHECK(std::abs(h(1, 1)) < 1e-5);
  CHECK(h == h.transpose());  // symmetrized exactly

  auto gumbel_like = [](const Eigen::VectorXd& t) { return -std::exp(t[0]) + t[0]; };
  h = fd_hessian(gumbel_like, vec1(0.0));
  CHECK(h(0, 0) == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("identity transform changes nothing") {
  const Transform t = identity_transform();
  Eigen::VectorXd x(2);
  x << 0.4, -1.7;
  CHECK(t.log_jacobian(x) == 0.0);
  CHECK(t.forward(x) == x);

  LogTarget base;
  base.dim = 2;
  base.logdensity = [](const Eigen::VectorXd& th) { return -th.squaredNorm(); };
  base.starting_point = x;
  const LogTarget wrapped = wrap_transformed(base, t);
  CHECK(wrapped.logdensity(x) == base.logdensity(x));
}

TEST_CASE("log transform realizes the exponential-prior change of variables") {
  // Exponential(1) log-density on lambda > 0, mapped to theta = log lambda:
  // the wrapped density is -e^theta + theta.
  LogTarget base;
  base.dim = 1;
  base.logdensity = [](const Eigen::VectorXd& lam) { return -lam[0]; };
  base.starting_point = vec1(1.0);
  const LogTarget wrapped = wrap_transformed(base, log_transform());
  for (double th : {-2.0, -0.3, 0.0, 1.1}) {
    CHECK(wrapped.logdensity(vec1(th)) ==
          doctest::Approx(-std::exp(th) + th).epsilon(1e-14));
  }
  CHECK(wrapped.starting_point[0] == doctest::Approx(0.0));

  // The density integrates to 1 over theta; trapezoid oracle on a wide grid.
  double integral = 0.0;
  const double lo = -40.0, hi = 6.0;
  const int n = 400000;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double th = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * std::exp(wrapped.logdensity(vec1(th))) * h;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("double-log-interval transform round trips") {
  Eigen::VectorXd a = vec1(0.3), b = vec1(0.7);
  const Transform t = double_log_interval_transform(a, b);
  const Eigen::VectorXd xi = vec1(0.5);
  CHECK(t.inverse(t.forward(xi))[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("transform round trips on random points") {
  RngStream stream(2024);
  SUBCASE("log") {
    const Transform t = log_transform();
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd xi(3);
      for (int d = 0; d < 3; ++d) xi[d] = std::exp(2.0 * stream.next_normal());
      const Eigen::VectorXd back = t.inverse(t.forward(xi));
      for (int d = 0; d < 3; ++d)
        CHECK(back[d] == doctest::Approx(xi[d]).epsilon(1e-12));
    }
  }
  SUBCASE("double-log-interval") {
    Eigen::VectorXd a(2), b(2);
    a << -1.0, 0.3;
    b << 2.0, 0.7;
    const Transform t = double_log_interval_transform(a, b);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd xi(2);
      for (int d = 0; d < 2; ++d)
        xi[d] = a[d] + (b[d] - a[d]) * (0.02 + 0.96 * stream.next_uniform());
      const Eigen::VectorXd back = t.inverse(t.forward(xi));
      for (int d = 0; d < 2; ++d)
        CHECK(back[d] == doctest::Approx(xi[d]).epsilon(1e-12));
    }
  }
}

TEST_CASE("wrapped analytic derivatives agree with finite differences") {
  // Gamma(3, 2) shaped density on lambda with analytic derivatives, pushed
  // through the log transform; chain-rule output must track FD at random
  // points.
  LogTarget base;
  base.dim = 1;
  base.logdensity = [](const Eigen::VectorXd& lam) {
    return 2.0 * std::log(lam[0]) - 2.0 * lam[0];
  };
  base.gradient = [](const Eigen::VectorXd& lam) {
    return vec1(2.0 / lam[0] - 2.0);
  };
  base.hessian = [](const Eigen::VectorXd& lam) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -2.0 / (lam[0] * lam[0]);
    return h;
  };
  base.starting_point = vec1(1.0);
  const LogTarget wrapped = wrap_transformed(base, log_transform());
  REQUIRE(wrapped.has_gradient());
  REQUIRE(wrapped.has_hessian());

  RngStream stream(7);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd th = vec1(0.5 * stream.next_normal());
    const double ga = wrapped.gradient(th)[0];
    const double gf = fd_gradient(wrapped.logdensity, th)[0];
    CHECK(std::abs(ga - gf) <= 1e-3 * std::max(1.0, std::abs(gf)));
    const double ha = wrapped.hessian(th)(0, 0);
    const double hf = fd_hessian(wrapped.logdensity, th)(0, 0);
    CHECK(std::abs(ha - hf) <= 1e-3 * std::max(1.0, std::abs(hf)));
  }
}

TEST_CASE("wrapped target reproduces the conjugate normalizing constant") {
  // Base target on the lambda scale; the log transform must leave the
  // normalizing constant unchanged, and the conjugate model knows it exactly.
  RngStream stream(11);
  const std::vector<long> y = poisson_sample(4.0, 25, stream);
  const ConjugateModelInstance model = ConjugateModelInstance::from_counts(y);

  LogTarget base;
  base.dim = 1;
  const double a = model.posterior_shape();
  const double rate = model.posterior_rate();
  const double c = -model.sum_lgamma_y1;
  base.logdensity = [a, rate, c](const Eigen::VectorXd& lam) {
    if (lam[0] <= 0.0) return -std::numeric_limits<double>::infinity();
    return -rate * lam[0] + (a - 1.0) * std::log(lam[0]) + c;
  };
  base.starting_point = vec1(4.0);

  const LogTarget wrapped = wrap_transformed(base, log_transform());
  const AdaptedPosterior ap = fit(wrapped, 15);
  CHECK(relative_error(model.log_z_exact, ap.log_norm_const) < 1e-8);
}
