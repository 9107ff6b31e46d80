#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aghq/adapt.hpp"
#include "aghq/errors.hpp"
#include "aghq/marglaplace.hpp"
#include "aghq/models.hpp"
#include "aghq/quadrature.hpp"
#include "aghq/simulate.hpp"
#include "aghq/summaries.hpp"

namespace {

using nlohmann::json;

int default_threads() {
  if (const char* env = std::getenv("AGHQ_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 0) return v;
  }
  return 1;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw aghq::InvalidArgumentError("cannot open output file: " + path);
  out << text;
}

[[noreturn]] void unknown_model(const std::string& name) {
  std::string msg = "unknown model \"" + name + "\"; registered models:";
  for (const std::string& m : aghq::registry_names()) msg += " " + m;
  throw aghq::InvalidArgumentError(msg);
}

std::string format_level(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

struct LoadedModel {
  aghq::LogTarget target;
  std::optional<aghq::ConjugateModelInstance> conjugate;
  std::optional<aghq::GaussianModel> gaussian;
};

LoadedModel load_target_model(const std::string& name, const std::string& data) {
  LoadedModel m;
  if (name == "poisson-gamma") {
    m.conjugate = aghq::load_conjugate_csv(data);
    m.target = m.conjugate->make_target();
  } else if (name == "gaussian") {
    m.gaussian = aghq::load_gaussian_json(data);
    m.target = m.gaussian->make_target();
  } else if (name == "normal-normal") {
    throw aghq::InvalidArgumentError(
        "model \"normal-normal\" is fit with the marglaplace subcommand");
  } else {
    unknown_model(name);
  }
  return m;
}

json dims_to_json(const std::vector<aghq::DimSummary>& dims, const LoadedModel& model) {
  json out = json::array();
  for (const aghq::DimSummary& d : dims) {
    json jd;
    jd["dim"] = d.dim + 1;
    jd["mean"] = d.mean;
    jd["sd"] = d.sd;
    json q;
    for (const auto& [alpha, value] : d.quantiles) q[format_level(alpha)] = value;
    jd["quantiles"] = q;
    if (model.conjugate) {
      const aghq::ConjugateModelInstance& c = *model.conjugate;
      jd["ks_vs_oracle"] = aghq::ks_distance(
          [&](double x) { return aghq::cdf_lookup(d.marginal, x); },
          [&](double x) { return c.cdf_theta(x); }, d.marginal.grid);
    } else if (model.gaussian) {
      const aghq::GaussianModel& g = *model.gaussian;
      const int t = d.dim;
      jd["ks_vs_oracle"] = aghq::ks_distance(
          [&](double x) { return aghq::cdf_lookup(d.marginal, x); },
          [&](double x) { return g.marginal_cdf(t, x); }, d.marginal.grid);
    }
    out.push_back(std::move(jd));
  }
  return out;
}

std::string marginal_csv(const aghq::MarginalSummary& ms) {
  std::string out = "grid,density,cdf\n";
  char buf[128];
  for (Eigen::Index l = 0; l < ms.grid.size(); ++l) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", ms.grid[l], ms.density[l],
                  ms.cdf[l]);
    out += buf;
  }
  return out;
}

std::string samples_csv(const Eigen::MatrixXd& samples) {
  std::string out;
  char buf[64];
  for (int d = 0; d < samples.rows(); ++d) {
    out += (d ? ",w" : "w") + std::to_string(d + 1);
  }
  out += "\n";
  for (Eigen::Index i = 0; i < samples.cols(); ++i) {
    for (Eigen::Index d = 0; d < samples.rows(); ++d) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", d ? "," : "", samples(d, i));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Adaptive Gauss-Hermite quadrature for Bayesian posterior summaries"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags like --threads after the subcommand
  int threads = default_threads();
  app.add_option("--threads", threads, "worker threads (1 = serial; 0 = all cores)")
      ->capture_default_str();

  // --- normalize ---------------------------------------------------------
  auto* normalize = app.add_subcommand("normalize", "fit and report the AGHQ object");
  std::string model_name, data_path, out_path;
  int k = 7;
  normalize->add_option("--model", model_name, "model name")->required();
  normalize->add_option("--data", data_path, "data file")->required();
  normalize->add_option("--k", k, "quadrature points per dimension")->required();
  normalize->add_option("--out", out_path, "output file (default stdout)");

  // --- summarize ----------------------------------------------------------
  auto* summarize = app.add_subcommand("summarize", "posterior moments, quantiles, marginals");
  std::string s_model, s_data, s_out, s_csv_prefix;
  int s_k = 7, s_grid = 1000;
  std::vector<double> alphas = {0.025, 0.5, 0.975};
  summarize->add_option("--model", s_model, "model name")->required();
  summarize->add_option("--data", s_data, "data file")->required();
  summarize->add_option("--k", s_k, "quadrature points per dimension (>= 2)")->required();
  summarize->add_option("--alphas", alphas, "quantile levels")->delimiter(',');
  summarize->add_option("--grid-size", s_grid, "fine-grid size for CDFs");
  summarize->add_option("--csv-prefix", s_csv_prefix,
                        "write per-dimension (grid,density,cdf) CSVs with this prefix");
  summarize->add_option("--out", s_out, "output file (default stdout)");

  // --- simulate -----------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "de-trended convergence-rate simulation");
  aghq::SimOptions sim;
  std::string sim_out;
  simulate->add_option("--lambda", sim.lambda, "Poisson mean")->capture_default_str();
  simulate->add_option("--nmax", sim.n_max, "largest sample size")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "replications per sample size")
      ->capture_default_str();
  simulate->add_option("--k", sim.ks, "quadrature point counts")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "stream seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "output CSV")->required();

  // --- marglaplace --------------------------------------------------------
  auto* marg = app.add_subcommand("marglaplace",
                                  "marginal Laplace + AGHQ mixture over a latent block");
  std::string m_model, m_data, m_out, m_samples_out;
  int m_k = 3;
  long m_samples = 0;
  std::uint64_t m_seed = 1;
  bool m_no_warm = false;
  marg->add_option("--model", m_model, "model name")->required();
  marg->add_option("--data", m_data, "data file")->required();
  marg->add_option("--k", m_k, "quadrature points per dimension")->capture_default_str();
  marg->add_option("--samples", m_samples, "number of mixture samples of W");
  marg->add_option("--seed", m_seed, "sampling seed")->capture_default_str();
  marg->add_flag("--no-warm-start", m_no_warm,
                 "disable warm starting (enables parallel node profiles)");
  marg->add_option("--out", m_out, "JSON output file (default stdout)");
  marg->add_option("--samples-out", m_samples_out, "CSV output for W samples");

  // --- verify-rules -------------------------------------------------------
  auto* verify = app.add_subcommand("verify-rules", "polynomial exactness report");
  int v_k = 5, v_p = 2;
  double v_tol = 1e-8, v_tol_abs = 1e-10;
  long v_cap = aghq::kDefaultPointCap;
  bool v_quiet = false;
  verify->add_option("--k", v_k, "quadrature points per dimension")->required();
  verify->add_option("--p", v_p, "dimension")->required();
  verify->add_option("--tolerance", v_tol, "relative tolerance")->capture_default_str();
  verify->add_option("--abs-tolerance", v_tol_abs, "absolute tolerance for zero moments")
      ->capture_default_str();
  verify->add_option("--point-cap", v_cap, "maximum number of points")
      ->capture_default_str();
  verify->add_flag("--quiet", v_quiet, "print the summary line only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage errors always exit 1
  }

  if (normalize->parsed()) {
    const LoadedModel model = load_target_model(model_name, data_path);
    aghq::FitOptions opts;
    opts.threads = threads;
    const aghq::AdaptedPosterior ap = aghq::fit(model.target, k, opts);
    json j = json::parse(aghq::adapted_to_json(ap));
    j["model"] = model_name;
    if (model.conjugate) {
      j["oracle_log_z"] = model.conjugate->log_z_exact;
      j["oracle_rel_error"] =
          aghq::relative_error(model.conjugate->log_z_exact, ap.log_norm_const);
    } else if (model.gaussian) {
      j["oracle_log_z"] = model.gaussian->log_z_exact();
      j["oracle_rel_error"] =
          aghq::relative_error(model.gaussian->log_z_exact(), ap.log_norm_const);
    }
    write_output(j.dump(2), out_path);
    return 0;
  }

  if (summarize->parsed()) {
    if (s_k < 2)
      throw aghq::InvalidArgumentError(
          "summarize needs --k >= 2 (k = 1 is the Laplace approximation, which "
          "has no polynomial marginal interpolant)");
    const LoadedModel model = load_target_model(s_model, s_data);
    aghq::FitOptions fit_opts;
    fit_opts.threads = threads;
    const aghq::AdaptedPosterior ap = aghq::fit(model.target, s_k, fit_opts);
    aghq::SummaryOptions sopts;
    sopts.grid_size = s_grid;
    sopts.threads = threads;
    const std::vector<aghq::DimSummary> dims = aghq::summarize_all(ap, alphas, sopts);
    json j;
    j["model"] = s_model;
    j["k"] = s_k;
    j["p"] = ap.dim();
    j["log_norm_const"] = ap.log_norm_const;
    j["mode"] = std::vector<double>(ap.mode.begin(), ap.mode.end());
    j["dims"] = dims_to_json(dims, model);
    write_output(j.dump(2), s_out);
    if (!s_csv_prefix.empty()) {
      for (const aghq::DimSummary& d : dims) {
        const std::string path =
            s_csv_prefix + "_dim" + std::to_string(d.dim + 1) + ".csv";
        write_output(marginal_csv(d.marginal), path);
      }
    }
    return 0;
  }

  if (simulate->parsed()) {
    sim.threads = threads;
    const aghq::SimulationResult result = aghq::simulate_rates(sim);
    write_output(aghq::simulation_to_csv(result), sim_out);
    std::cout << "wrote " << result.rows.size() << " rows to " << sim_out << "\n";
    return 0;
  }

  if (marg->parsed()) {
    if (m_model != "normal-normal") {
      if (!aghq::is_registered(m_model)) unknown_model(m_model);
      throw aghq::InvalidArgumentError("marglaplace supports the \"normal-normal\" model");
    }
    const aghq::RandomInterceptModel model = aghq::load_random_intercept_json(m_data);
    const aghq::JointTarget jt = model.make_joint();
    aghq::MarglaplaceOptions opts;
    opts.warm_start = !m_no_warm;
    opts.threads = threads;
    const aghq::MarginalLaplaceFit mlfit = aghq::fit_marginal_laplace(jt, m_k, opts);
    const aghq::AdaptedPosterior& ap = mlfit.theta_posterior;

    json j;
    j["model"] = m_model;
    j["k"] = m_k;
    j["p"] = ap.dim();
    j["dim_w"] = jt.dim_w;
    j["log_norm_const"] = ap.log_norm_const;
    j["theta_mode"] = std::vector<double>(ap.mode.begin(), ap.mode.end());
    j["components"] = mlfit.mixture.components.size();
    const Eigen::VectorXd wmean = aghq::mixture_mean(mlfit.mixture);
    j["mixture_mean_w"] = std::vector<double>(wmean.begin(), wmean.end());
    if (m_k >= 2) {
      LoadedModel no_oracle;
      j["theta"] = dims_to_json(aghq::summarize_all(ap, alphas, {}), no_oracle);
    }
    j["oracle_log_z"] = model.log_marginal_likelihood();
    j["oracle_rel_error"] =
        aghq::relative_error(model.log_marginal_likelihood(), ap.log_norm_const);

    if (m_samples > 0) {
      const Eigen::MatrixXd samples =
          aghq::sample_mixture(mlfit.mixture, m_samples, m_seed, threads);
      Eigen::VectorXd emp = samples.rowwise().mean();
      j["sample_mean_w"] = std::vector<double>(emp.begin(), emp.end());
      if (!m_samples_out.empty()) write_output(samples_csv(samples), m_samples_out);
    }
    write_output(j.dump(2), m_out);
    return 0;
  }

  if (verify->parsed()) {
    const aghq::ProductRule rule = aghq::product_rule(v_k, v_p, v_cap);
    const aghq::PkpReport report = aghq::verify_pkp(rule, v_tol, v_tol_abs);
    if (!v_quiet) {
      std::printf("%-16s %-22s %-22s %-10s %s\n", "monomial", "quadrature", "exact",
                  "error", "status");
      for (const aghq::PkpEntry& e : report.entries) {
        std::string mono = "(";
        for (std::size_t d = 0; d < e.alpha.size(); ++d)
          mono += (d ? "," : "") + std::to_string(e.alpha[d]);
        mono += ")";
        std::printf("%-16s %-22.15g %-22.15g %-10.3g %s\n", mono.c_str(), e.quadrature,
                    e.exact, e.error, e.pass ? "pass" : "FAIL");
      }
    }
    std::printf("P(k=%d, p=%d): %zu monomials of total order <= %d, %d failures\n",
                report.k, report.p, report.entries.size(), 2 * report.k - 1,
                report.failures);
    return report.all_pass() ? 0 : 2;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const aghq::InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const aghq::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
