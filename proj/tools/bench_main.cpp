// Times the serial reference implementation of each parallel kernel against
// its OpenMP counterpart and checks that the outputs agree bit-for-bit.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aghq/adapt.hpp"
#include "aghq/marglaplace.hpp"
#include "aghq/models.hpp"
#include "aghq/rng.hpp"
#include "aghq/simulate.hpp"

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_call(F&& f) {
  const double t0 = now_seconds();
  f();
  return now_seconds() - t0;
}

void report(const char* kernel, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n", kernel,
              serial, parallel, serial / parallel,
              identical ? "bit-identical" : "OUTPUTS DIFFER");
}

aghq::RandomInterceptModel make_random_intercept(int groups, int per_group,
                                                 std::uint64_t seed) {
  aghq::RandomInterceptModel model;
  model.sd_obs = 0.8;
  model.sd_group = 1.3;
  model.sd_mean = 5.0;
  model.n_groups = groups;
  aghq::RngStream stream(seed, 7);
  std::vector<double> y;
  for (int g = 0; g < groups; ++g) {
    const double wg = 1.3 * stream.next_normal();
    for (int i = 0; i < per_group; ++i) {
      model.group.push_back(g);
      y.push_back(0.4 + wg + 0.8 * stream.next_normal());
    }
  }
  model.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return model;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;  // all cores
  if (argc > 1) threads = std::atoi(argv[1]);
#ifdef _OPENMP
  const int used = threads > 0 ? threads : omp_get_max_threads();
#else
  const int used = 1;
#endif
  std::printf("comparing serial reference vs OpenMP kernels (%d threads)\n\n", used);

  // Rate simulation sweep: one (n, rep) cell per task.
  {
    aghq::SimOptions opts;
    opts.lambda = 5.0;
    opts.n_max = 60;
    opts.reps = 120;
    opts.ks = {7};
    opts.seed = 99;
    aghq::SimulationResult serial_result, parallel_result;
    opts.threads = 1;
    const double ts = time_call([&] { serial_result = aghq::simulate_rates(opts); });
    opts.threads = threads;
    const double tp = time_call([&] { parallel_result = aghq::simulate_rates(opts); });
    report("simulate_rates", ts, tp,
           aghq::simulation_to_csv(serial_result) == aghq::simulation_to_csv(parallel_result));
  }

  // Inner Laplace profiles across theta nodes (warm starting disabled).
  {
    const aghq::RandomInterceptModel model = make_random_intercept(60, 5, 3);
    const aghq::JointTarget jt = model.make_joint();
    aghq::MarglaplaceOptions opts;
    opts.warm_start = false;
    aghq::MarginalLaplaceFit serial_fit, parallel_fit;
    opts.threads = 1;
    const double ts = time_call([&] { serial_fit = aghq::fit_marginal_laplace(jt, 7, opts); });
    opts.threads = threads;
    const double tp = time_call([&] { parallel_fit = aghq::fit_marginal_laplace(jt, 7, opts); });
    bool same = serial_fit.theta_posterior.log_norm_const ==
                parallel_fit.theta_posterior.log_norm_const;
    for (std::size_t j = 0; same && j < serial_fit.mixture.components.size(); ++j)
      same = serial_fit.mixture.components[j].mean_w ==
             parallel_fit.mixture.components[j].mean_w;
    report("marginal Laplace profiles", ts, tp, same);

    // Mixture sampling with per-draw substreams.
    Eigen::MatrixXd s1, s2;
    const double ss = time_call(
        [&] { s1 = aghq::sample_mixture(serial_fit.mixture, 200000, 42, 1); });
    const double sp = time_call(
        [&] { s2 = aghq::sample_mixture(serial_fit.mixture, 200000, 42, threads); });
    report("sample_mixture", ss, sp, s1 == s2);
  }

  // Raw node sweep on a cheap target: measures the sweep overhead floor.
  {
    aghq::GaussianModel g;
    g.mu = Eigen::VectorXd::Zero(3);
    g.sigma = Eigen::MatrixXd::Identity(3, 3);
    const aghq::LogTarget target = g.make_target();
    const aghq::ProductRule rule = aghq::product_rule(31, 3);
    Eigen::MatrixXd nodes = rule.points;
    Eigen::VectorXd e1, e2;
    const double ts =
        time_call([&] { e1 = aghq::detail::eval_columns(target, nodes, 1); });
    const double tp =
        time_call([&] { e2 = aghq::detail::eval_columns(target, nodes, threads); });
    report("node sweep (cheap target)", ts, tp, e1 == e2);
  }
  return 0;
}
