#include "mdro/experiments.hpp"
#include "mdro/hypotest.hpp"
#include "mdro/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mdro;

constexpr std::uint64_t kDefaultSeed = 20240817ULL;

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty())
    std::cout << contents;
  else
    atomic_write(out_path, contents);
}

json solution_to_json(const WorstCaseSolution& sol) {
  json trace = json::array();
  for (const FWTraceEntry& t : sol.trace)
    trace.push_back({{"objective", t.objective}, {"gap", t.gap}, {"step", t.step}});
  std::vector<double> flat;
  for (int i = 0; i < sol.P_star.entries.rows(); ++i)
    for (int j = 0; j < sol.P_star.entries.cols(); ++j) flat.push_back(sol.P_star.entries(i, j));
  return json{{"value", sol.value},         {"gap", sol.final_gap},
              {"iterations", sol.iterations}, {"converged", sol.converged},
              {"P_star", flat},             {"trace", trace}};
}

DivergenceKind parse_kind(const std::string& kind) {
  if (kind == "cre") return DivergenceKind::ConditionalRelativeEntropy;
  if (kind == "kl") return DivergenceKind::KLStationary;
  if (kind == "wass") return DivergenceKind::WassersteinRows;
  throw InvalidInput("unknown ambiguity kind: " + kind);
}

int run(int argc, char** argv) {
  CLI::App app{"Distributionally robust optimization for ergodic Markov-chain data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--seed", seed, "global RNG seed")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample a trajectory from a transition matrix");
  std::string sim_P, sim_out;
  int sim_T = 100, sim_xi0 = 1;
  sim->add_option("--P", sim_P, "transition matrix CSV")->required();
  sim->add_option("--T", sim_T, "number of steps")->required();
  sim->add_option("--xi0", sim_xi0, "initial state (1-based)")->capture_default_str();
  sim->add_option("--out", sim_out, "output trajectory file (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "empirical doublet matrix of a trajectory");
  std::string est_traj, est_out;
  int est_d = 0;
  bool est_ghost = false;
  est->add_option("--traj", est_traj, "trajectory file")->required();
  est->add_option("--d", est_d, "number of states")->required();
  est->add_flag("--ghost", est_ghost, "balance marginals with a ghost transition");
  est->add_option("--out", est_out, "output doublet CSV (default stdout)");

  // worst-case
  auto* wc = app.add_subcommand("worst-case", "robust predictor value over an ambiguity set");
  std::string wc_loss, wc_doublet, wc_kind = "cre", wc_out;
  double wc_r = 0.0, wc_gap_tol = 1e-4;
  wc->add_option("--loss", wc_loss, "loss vector CSV (one row or one column)")->required();
  wc->add_option("--doublet", wc_doublet, "doublet matrix CSV")->required();
  wc->add_option("--radius", wc_r, "ambiguity radius (> 0)")->required();
  wc->add_option("--kind", wc_kind, "cre|kl|wass")->capture_default_str();
  wc->add_option("--gap-tol", wc_gap_tol, "Frank-Wolfe gap tolerance")->capture_default_str();
  wc->add_option("--out", wc_out, "output JSON (default stdout)");

  // prescribe
  auto* pre = app.add_subcommand("prescribe", "robust decision for a revenue problem");
  std::string pre_problem, pre_kind = "cre", pre_out;
  double pre_r = 0.0;
  pre->add_option("--problem", pre_problem, "problem JSON")->required();
  pre->add_option("--radius", pre_r, "ambiguity radius")->required();
  pre->add_option("--kind", pre_kind, "cre|kl|wass|saa")->capture_default_str();
  pre->add_option("--out", pre_out, "output JSON (default stdout)");

  // hypotest
  auto* hyp = app.add_subcommand("hypotest", "two-chain hypothesis test error rates");
  std::string hyp_pair, hyp_out;
  int hyp_T = 100, hyp_trials = 100;
  hyp->add_option("--pair", hyp_pair, "pair JSON path or coin:EPS")->required();
  hyp->add_option("--T", hyp_T, "trajectory length")->required();
  hyp->add_option("--trials", hyp_trials, "Monte Carlo trials")->required();
  hyp->add_option("--out", hyp_out, "output CSV (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "synthetic-study harness");
  std::string exp_which, exp_config, exp_out_dir = ".";
  exp->add_option("which", exp_which, "risk|disappointment|bench")->required();
  exp->add_option("--config", exp_config, "config JSON (optional; defaults used otherwise)");
  exp->add_option("--out", exp_out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;  // --help / --version
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  if (sim->parsed()) {
    TransitionMatrix P{read_matrix_csv(sim_P)};
    P.validate(1e-9);
    if (sim_xi0 < 1 || sim_xi0 > P.d()) throw InvalidInput("--xi0 out of range");
    std::mt19937_64 rng = make_stream(seed, 0);
    const Trajectory traj = simulate(P, sim_xi0 - 1, sim_T, rng);
    std::ostringstream out;
    out << traj.initial_state + 1 << '\n';
    for (int s : traj.states) out << s + 1 << '\n';
    emit(sim_out, out.str());
    return 0;
  }

  if (est->parsed()) {
    const Trajectory traj = read_trajectory(est_traj, est_d);
    DoubletMatrix theta = estimate_doublet(traj);
    if (est_ghost) theta = ghost_balance(theta, traj);
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < theta.d(); ++i) {
      for (int j = 0; j < theta.d(); ++j) out << (j ? "," : "") << theta.entries(i, j);
      out << '\n';
    }
    emit(est_out, out.str());
    return 0;
  }

  if (wc->parsed()) {
    if (wc_r <= 0.0) throw InvalidInput("--radius must be > 0");
    Matrix loss_raw = read_matrix_csv(wc_loss);
    if (loss_raw.rows() > 1 && loss_raw.cols() > 1)
      throw InvalidInput("--loss must be a vector");
    LossVector loss = loss_raw.rows() == 1 ? LossVector(loss_raw.row(0)) : LossVector(loss_raw.col(0));
    DoubletMatrix theta{read_matrix_csv(wc_doublet)};
    theta.validate(1e-9);
    if (loss.size() != theta.d()) throw InvalidInput("loss length must equal d");
    FWConfig cfg;
    cfg.gap_tol = wc_gap_tol;
    const WorstCaseSolution sol =
        worst_case_dispatch(loss, theta, {wc_r, parse_kind(wc_kind)}, cfg);
    emit(wc_out, solution_to_json(sol).dump(2) + "\n");
    return sol.converged ? 0 : 1;
  }

  if (pre->parsed()) {
    if (pre_r <= 0.0 && pre_kind != "saa") throw InvalidInput("--radius must be > 0");
    std::ifstream in(pre_problem);
    if (!in) throw InvalidInput("cannot open problem JSON: " + pre_problem);
    json spec = json::parse(in);
    RevenueProblem problem;
    const auto w = spec.at("weights").get<std::vector<double>>();
    const auto a = spec.at("prices").get<std::vector<double>>();
    problem.weights = Eigen::Map<const Vector>(w.data(), static_cast<int>(w.size()));
    problem.prices = Eigen::Map<const Vector>(a.data(), static_cast<int>(a.size()));
    problem.C = matrix_from_json(spec.at("constraint").at("C"));
    const auto b = spec.at("constraint").at("b").get<std::vector<double>>();
    problem.b = Eigen::Map<const Vector>(b.data(), static_cast<int>(b.size()));
    std::vector<DoubletMatrix> estimates;
    for (const auto& path : spec.at("doublets").get<std::vector<std::string>>()) {
      DoubletMatrix theta{read_matrix_csv(path)};
      theta.validate(1e-9);
      estimates.push_back(std::move(theta));
    }
    if (static_cast<int>(estimates.size()) != problem.n())
      throw InvalidInput("one doublet path per group required");
    BinaryPolytope space{problem.C, problem.b, problem.d()};
    FWConfig fw;
    Objective objective = [&](const Vector& x) {
      const LossVector loss = revenue_loss(problem, x);
      double value = 0.0;
      for (int k = 0; k < problem.n(); ++k)
        value += problem.weights(k) * method_value(pre_kind, loss, estimates[k], pre_r, fw);
      return value;
    };
    const SearchResult sol = minimize_over(objective, space);
    json out{{"value", sol.value},
             {"x", std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size())},
             {"evaluations", sol.evaluations}};
    emit(pre_out, out.dump(2) + "\n");
    return 0;
  }

  if (hyp->parsed()) {
    HypothesisPair pair;
    if (hyp_pair.rfind("coin:", 0) == 0) {
      pair = coin_pair(std::stod(hyp_pair.substr(5)));
    } else {
      std::ifstream in(hyp_pair);
      if (!in) throw InvalidInput("cannot open pair JSON: " + hyp_pair);
      json spec = json::parse(in);
      pair.theta1.entries = matrix_from_json(spec.at("theta1"));
      pair.theta2.entries = matrix_from_json(spec.at("theta2"));
    }
    const ErrorRates rates = error_rates_mc(pair, hyp_T, hyp_trials, seed);
    // continuity correction keeps the rate finite when no error was observed
    const double alpha_floor = std::max(rates.alpha_hat, 1.0 / (2.0 * hyp_trials));
    const double rate_estimate = -std::log(alpha_floor) / hyp_T;
    std::ostringstream out;
    out << "T,alpha_hat,beta_hat,rate_estimate\n"
        << rates.T << ',' << rates.alpha_hat << ',' << rates.beta_hat << ',' << rate_estimate
        << '\n';
    emit(hyp_out, out.str());
    return 0;
  }

  // experiment
  json cfg_json = json::object();
  if (!exp_config.empty()) {
    std::ifstream in(exp_config);
    if (!in) throw InvalidInput("cannot open config JSON: " + exp_config);
    cfg_json = json::parse(in);
  }
  ExperimentConfig cfg;
  cfg.seed = cfg_json.value("seed", seed);
  cfg.trials = cfg_json.value("trials", 20);
  if (cfg_json.contains("T_grid")) cfg.T_grid = cfg_json.at("T_grid").get<std::vector<int>>();
  if (cfg_json.contains("r_grid"))
    cfg.r_grid = cfg_json.at("r_grid").get<std::vector<double>>();
  if (cfg_json.contains("methods"))
    cfg.methods = cfg_json.at("methods").get<std::vector<std::string>>();
  const int n = cfg_json.value("n", 5);
  const int d = cfg_json.value("d", 10);
  std::filesystem::create_directories(exp_out_dir);
  json meta{{"seed", cfg.seed},
            {"n", n},
            {"d", d},
            {"assumptions",
             "budget constraint sum x_j <= ceil(d/2); losses are negative revenue; "
             "robust methods use ghost-balanced estimates smoothed toward uniform "
             "with weight delta = 1/(T*d)"}};
  if (exp_which == "risk" || exp_which == "disappointment") {
    std::mt19937_64 rng = make_stream(cfg.seed, 0xfeedULL);
    const RevenueProblem problem = synth_problem(n, d, rng);
    if (exp_which == "risk")
      atomic_write(exp_out_dir + "/risk.csv", risk_csv(run_risk_experiment(problem, cfg)));
    else
      atomic_write(exp_out_dir + "/disappointment.csv",
                   disappointment_csv(run_disappointment_experiment(problem, cfg)));
  } else if (exp_which == "bench") {
    std::vector<int> d_list{10, 50, 100, 200};
    if (cfg_json.contains("d_list")) d_list = cfg_json.at("d_list").get<std::vector<int>>();
    const int T = cfg_json.value("T", 5000);
    const double r = cfg_json.value("r", 1.0);
    const int trials = cfg_json.value("bench_trials", 10);
    atomic_write(exp_out_dir + "/bench.csv",
                 bench_csv(run_scalability_bench(d_list, T, r, trials, cfg.seed)));
    meta["T"] = T;
    meta["r"] = r;
  } else {
    throw InvalidInput("experiment kind must be risk|disappointment|bench");
  }
  atomic_write(exp_out_dir + "/metadata.json", meta.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
