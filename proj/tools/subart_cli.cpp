// Command-line front end for the cost-effectiveness pipeline: `fit` runs the
// guided observational analysis end to end, `simulate` runs the
// misspecification experiment. All quantitative outputs are CSV/JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "subart/bart.hpp"
#include "subart/cea.hpp"
#include "subart/dataset.hpp"
#include "subart/rng.hpp"
#include "subart/simulation.hpp"
#include "subart/subart.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace subart;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Tracks files written by one command so a failed stage leaves no partial
// artifacts behind.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    written_.push_back(p);
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  void remove_all() {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct FitOptions {
  std::string data_path;
  std::string out_dir = ".";
  std::string treatment = "t";
  std::string cost = "c";
  std::string health = "q";
  std::string covariates = "age,sex,education";
  std::string factors = "education";
  std::string na_codes;
  int n_tree = 100;
  int n_mcmc = 5000;
  int n_burn = 1000;
  std::uint64_t seed = 42;
  double lambda_min = 0.0;
  double lambda_max = 50000.0;
  int lambda_points = 1000;
  double ps_clip = 0.0;  // 0 disables clipping
  bool svg = false;
};

void write_svg_scatter(std::ofstream& out, const AteDraws& draws,
                       const CeaSummary& s) {
  const int w = 480, h = 360;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n";
  double qlo = s.mean_delta_q, qhi = s.mean_delta_q;
  double clo = s.mean_delta_c, chi = s.mean_delta_c;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    qlo = std::min(qlo, draws.delta_q[i]);
    qhi = std::max(qhi, draws.delta_q[i]);
    clo = std::min(clo, draws.delta_c[i]);
    chi = std::max(chi, draws.delta_c[i]);
  }
  qlo = std::min(qlo, 0.0); qhi = std::max(qhi, 1e-12);
  clo = std::min(clo, 0.0); chi = std::max(chi, 1e-12);
  auto px = [&](double q) { return 40.0 + (q - qlo) / (qhi - qlo) * (w - 60); };
  auto py = [&](double c) { return h - 30.0 - (c - clo) / (chi - clo) * (h - 50); };
  out << "<line x1='" << fmt(px(0)) << "' y1='20' x2='" << fmt(px(0))
      << "' y2='" << h - 30 << "' stroke='grey' stroke-dasharray='4'/>\n";
  out << "<line x1='40' y1='" << fmt(py(0)) << "' x2='" << w - 20 << "' y2='"
      << fmt(py(0)) << "' stroke='grey' stroke-dasharray='4'/>\n";
  for (std::size_t i = 0; i < draws.size(); ++i)
    out << "<circle cx='" << fmt(px(draws.delta_q[i])) << "' cy='"
        << fmt(py(draws.delta_c[i])) << "' r='1.5' fill='black' opacity='0.3'/>\n";
  out << "<circle cx='" << fmt(px(s.mean_delta_q)) << "' cy='"
      << fmt(py(s.mean_delta_c)) << "' r='4' fill='red'/>\n";
  out << "</svg>\n";
}

void write_svg_curve(std::ofstream& out, const CeacCurve& curve) {
  const int w = 480, h = 360;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n<polyline fill='none' stroke='black' points='";
  const double lmax = curve.lambda.back() > 0 ? curve.lambda.back() : 1.0;
  for (std::size_t k = 0; k < curve.lambda.size(); ++k) {
    const double x = 40.0 + curve.lambda[k] / lmax * (w - 60);
    const double y = h - 30.0 - curve.p[k] * (h - 50);
    out << fmt(x) << "," << fmt(y) << " ";
  }
  out << "'/>\n</svg>\n";
}

int cmd_fit(const FitOptions& opt) {
  OutputSet outputs{fs::path(opt.out_dir)};
  std::string stage = "configuration";
  try {
    Schema schema;
    schema.treatment = opt.treatment;
    schema.cost = opt.cost;
    schema.health = opt.health;
    schema.covariates = split_list(opt.covariates);
    schema.factors = split_list(opt.factors);
    if (opt.lambda_min > opt.lambda_max)
      throw std::runtime_error("lambda-min must be <= lambda-max");

    stage = "load";
    const Dataset data = load_csv(opt.data_path, schema, split_list(opt.na_codes));
    const Eigen::Index n = data.n();

    stage = "propensity-score";
    // Confounders only: the treatment column is the probit outcome here.
    DesignMatrix conf = encode(data);
    const Eigen::Index t_col = conf.column_index("t");
    Eigen::MatrixXd X_conf(n, conf.values.cols() - 1);
    Eigen::Index out_j = 0;
    for (Eigen::Index j = 0; j < conf.values.cols(); ++j)
      if (j != t_col) X_conf.col(out_j++) = conf.values.col(j);

    BartConfig ps_cfg;
    ps_cfg.n_tree = opt.n_tree;
    ps_cfg.n_mcmc = opt.n_mcmc;
    ps_cfg.n_burn = opt.n_burn;
    ps_cfg.seed = derive_seed(opt.seed, 1);
    const BartPosterior ps_fit = fit_probit_bart(X_conf, data.treatment, ps_cfg);
    std::vector<double> ps = estimate_ps(ps_fit);
    if (opt.ps_clip > 0.0)
      for (double& p : ps)
        p = std::clamp(p, opt.ps_clip, 1.0 - opt.ps_clip);

    stage = "outcome-model";
    const DesignMatrix X_ps = encode(data, {{"ps", ps}});
    const DesignMatrix X_test = build_counterfactual_design(X_ps);

    SubartConfig su_cfg;
    su_cfg.base = ps_cfg;
    su_cfg.base.seed = derive_seed(opt.seed, 2);
    const SubartPosterior posterior = fit_subart(
        X_ps.values, data.outcomes, data.missing, X_test.values, su_cfg);

    stage = "g-computation";
    const AteDraws draws = compute_ate_draws(posterior, n);
    const CeacCurve ceac = compute_ceac(
        draws, lambda_grid(opt.lambda_min, opt.lambda_max, opt.lambda_points));
    const CeaSummary summary = summarize(draws);

    stage = "output";
    {
      auto f = outputs.open("ps.csv");
      f << "row,ps\n";
      for (Eigen::Index i = 0; i < n; ++i)
        f << (i + 1) << "," << fmt(ps[static_cast<std::size_t>(i)]) << "\n";
    }
    {
      auto f = outputs.open("ate_draws.csv");
      f << "delta_c,delta_q,inb_20000,inb_50000\n";
      const auto inb20 = compute_inb(draws, 20000.0);
      const auto inb50 = compute_inb(draws, 50000.0);
      for (std::size_t d = 0; d < draws.size(); ++d)
        f << fmt(draws.delta_c[d]) << "," << fmt(draws.delta_q[d]) << ","
          << fmt(inb20[d]) << "," << fmt(inb50[d]) << "\n";
    }
    {
      auto f = outputs.open("ceac.csv");
      f << "lambda,probability\n";
      for (std::size_t k = 0; k < ceac.lambda.size(); ++k)
        f << fmt(ceac.lambda[k]) << "," << fmt(ceac.p[k]) << "\n";
    }
    {
      json j;
      j["command"] = "fit";
      j["seed"] = opt.seed;
      j["config"] = {{"data", opt.data_path},
                     {"treatment", opt.treatment},
                     {"cost", opt.cost},
                     {"health", opt.health},
                     {"covariates", split_list(opt.covariates)},
                     {"factors", split_list(opt.factors)},
                     {"na_codes", split_list(opt.na_codes)},
                     {"n_tree", opt.n_tree},
                     {"n_mcmc", opt.n_mcmc},
                     {"n_burn", opt.n_burn},
                     {"lambda_min", opt.lambda_min},
                     {"lambda_max", opt.lambda_max},
                     {"lambda_points", opt.lambda_points},
                     {"ps_clip", opt.ps_clip}};
      j["n_patients"] = n;
      j["n_draws"] = draws.size();
      j["delta_c"] = {{"mean", summary.mean_delta_c},
                      {"sd", summary.sd_delta_c},
                      {"ci90", {summary.ci90_delta_c.lower, summary.ci90_delta_c.upper}},
                      {"ci95", {summary.ci95_delta_c.lower, summary.ci95_delta_c.upper}}};
      j["delta_q"] = {{"mean", summary.mean_delta_q},
                      {"sd", summary.sd_delta_q},
                      {"ci90", {summary.ci90_delta_q.lower, summary.ci90_delta_q.upper}},
                      {"ci95", {summary.ci95_delta_q.lower, summary.ci95_delta_q.upper}}};
      j["correlation"] = summary.correlation;
      j["p_cost_effective"] = {{"lambda_20000", summary.p_ce_20000},
                               {"lambda_50000", summary.p_ce_50000}};
      auto f = outputs.open("summary.json");
      f << j.dump(2) << "\n";
    }
    if (opt.svg) {
      auto f1 = outputs.open("ce_plane.svg");
      write_svg_scatter(f1, draws, summary);
      auto f2 = outputs.open("ceac.svg");
      write_svg_curve(f2, ceac);
    }
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return 1;
  }
}

struct SimulateOptions {
  std::string out_dir = ".";
  std::string scenario = "both";  // randomized | confounded | both
  std::string estimators = "ols,bart";
  int n = 200;
  int n_sim = 100;
  std::uint64_t seed = 1;
  bool per_replication_x = false;
};

int cmd_simulate(const SimulateOptions& opt) {
  OutputSet outputs{fs::path(opt.out_dir)};
  std::string stage = "configuration";
  try {
    std::vector<Assignment> scenarios;
    if (opt.scenario == "randomized" || opt.scenario == "both")
      scenarios.push_back(Assignment::Randomized);
    if (opt.scenario == "confounded" || opt.scenario == "both")
      scenarios.push_back(Assignment::Confounded);
    if (scenarios.empty())
      throw std::runtime_error("unknown scenario '" + opt.scenario + "'");
    bool with_ols = false, with_bart = false;
    for (const auto& e : split_list(opt.estimators)) {
      if (e == "ols") with_ols = true;
      else if (e == "bart") with_bart = true;
      else throw std::runtime_error("unknown estimator '" + e + "'");
    }

    stage = "experiment";
    struct Run {
      std::string name;
      SimResult result;
    };
    std::vector<Run> runs;
    for (Assignment a : scenarios) {
      SimScenario sc;
      sc.assignment = a;
      sc.n = opt.n;
      sc.n_sim = opt.n_sim;
      sc.seed = derive_seed(opt.seed, a == Assignment::Randomized ? 1 : 2);
      sc.shared_x = !opt.per_replication_x;
      runs.push_back({a == Assignment::Randomized ? "randomized" : "confounded",
                      run_experiment(sc, with_ols, with_bart)});
    }

    stage = "output";
    {
      auto f = outputs.open("estimates.csv");
      f << "replication,scenario,estimator,ate_estimate\n";
      for (const auto& run : runs) {
        auto emit = [&](const char* est, const EstimatorSummary& s) {
          for (std::size_t i = 0; i < s.estimates.size(); ++i)
            f << (i + 1) << "," << run.name << "," << est << ","
              << fmt(s.estimates[i]) << "\n";
        };
        if (run.result.ols) emit("ols", *run.result.ols);
        if (run.result.bart) emit("bart", *run.result.bart);
      }
    }
    {
      // Histogram bins matching the reference plots' x-range.
      const double lo = -1.0, hi = 3.0;
      const int n_bins = 30;
      auto f = outputs.open("histogram.csv");
      f << "scenario,estimator,bin_lower,bin_upper,count\n";
      for (const auto& run : runs) {
        auto emit = [&](const char* est, const EstimatorSummary& s) {
          std::vector<int> counts(n_bins, 0);
          for (double v : s.estimates) {
            if (v < lo || v >= hi) continue;
            ++counts[static_cast<std::size_t>((v - lo) / (hi - lo) * n_bins)];
          }
          for (int b = 0; b < n_bins; ++b) {
            const double bl = lo + (hi - lo) * b / n_bins;
            const double bu = lo + (hi - lo) * (b + 1) / n_bins;
            f << run.name << "," << est << "," << fmt(bl) << "," << fmt(bu)
              << "," << counts[static_cast<std::size_t>(b)] << "\n";
          }
        };
        if (run.result.ols) emit("ols", *run.result.ols);
        if (run.result.bart) emit("bart", *run.result.bart);
      }
    }
    {
      json j;
      j["command"] = "simulate";
      j["seed"] = opt.seed;
      j["config"] = {{"scenario", opt.scenario},
                     {"estimators", split_list(opt.estimators)},
                     {"n", opt.n},
                     {"n_sim", opt.n_sim},
                     {"per_replication_x", opt.per_replication_x}};
      j["true_ate"] = 1.0;
      json res = json::object();
      for (const auto& run : runs) {
        json r = json::object();
        auto emit = [&](const char* est, const EstimatorSummary& s) {
          json e = {{"mean", s.mean}, {"bias", s.bias}};
          if (s.sd) e["sd"] = *s.sd;
          r[est] = e;
        };
        if (run.result.ols) emit("ols", *run.result.ols);
        if (run.result.bart) emit("bart", *run.result.bart);
        res[run.name] = r;
      }
      j["results"] = res;
      auto f = outputs.open("summary.json");
      f << j.dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian tree-ensemble cost-effectiveness analysis"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Run the observational CEA pipeline on a CSV dataset");
  fit_cmd->add_option("--data", fit.data_path, "Input CSV file")->required();
  fit_cmd->add_option("--out", fit.out_dir, "Output directory");
  fit_cmd->add_option("--treatment", fit.treatment, "Treatment column (0/1)");
  fit_cmd->add_option("--cost", fit.cost, "Cost outcome column");
  fit_cmd->add_option("--health", fit.health, "Health outcome column");
  fit_cmd->add_option("--covariates", fit.covariates,
                      "Comma-separated covariate columns");
  fit_cmd->add_option("--factors", fit.factors,
                      "Covariates to treat as unordered factors");
  fit_cmd->add_option("--na-codes", fit.na_codes,
                      "Extra sentinel values treated as missing (outcomes only)");
  fit_cmd->add_option("--n-tree", fit.n_tree, "Trees per ensemble");
  fit_cmd->add_option("--n-mcmc", fit.n_mcmc, "Total MCMC sweeps");
  fit_cmd->add_option("--n-burn", fit.n_burn, "Burn-in sweeps discarded");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--lambda-min", fit.lambda_min, "CEAC grid lower bound");
  fit_cmd->add_option("--lambda-max", fit.lambda_max, "CEAC grid upper bound");
  fit_cmd->add_option("--lambda-points", fit.lambda_points, "CEAC grid size");
  fit_cmd->add_option("--ps-clip", fit.ps_clip,
                      "Clip propensity scores to [eps, 1-eps] (default off)");
  fit_cmd->add_flag("--svg", fit.svg, "Also write CE-plane and CEAC SVGs");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Run the misspecification experiment (OLS vs BART)");
  sim_cmd->add_option("--out", sim.out_dir, "Output directory");
  sim_cmd->add_option("--scenario", sim.scenario,
                      "randomized, confounded, or both");
  sim_cmd->add_option("--estimators", sim.estimators, "ols,bart subset");
  sim_cmd->add_option("--n", sim.n, "Patients per replication");
  sim_cmd->add_option("--n-sim", sim.n_sim, "Replications");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_flag("--per-replication-x", sim.per_replication_x,
                    "Redraw the covariate each replication instead of sharing one draw");

  CLI11_PARSE(app, argc, argv);
  if (fit_cmd->parsed()) return cmd_fit(fit);
  return cmd_simulate(sim);
}
