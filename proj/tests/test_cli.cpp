#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int exit_code;
  std::string out;
};

Run cli(const std::string& args) {
  const fs::path dir = fs::temp_directory_path() / "mdro_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const std::string cmd =
      std::string(MDRO_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
      (dir / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return Run{WEXITSTATUS(raw), slurp(out)};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "mdro_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate is deterministic and estimate round-trips") {
  const fs::path dir = scratch();
  {
    std::ofstream p(dir / "P.csv");
    p << "0.7,0.3\n0.1,0.9\n";
  }
  const std::string base = "simulate --P " + (dir / "P.csv").string() + " --T 100 --seed 7";
  const Run a = cli(base + " --out " + (dir / "t1.txt").string());
  const Run b = cli(base + " --out " + (dir / "t2.txt").string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir / "t1.txt") == slurp(dir / "t2.txt"));

  const Run est = cli("estimate --traj " + (dir / "t1.txt").string() + " --d 2 --out " +
                      (dir / "theta.csv").string());
  CHECK(est.exit_code == 0);
  std::istringstream theta(slurp(dir / "theta.csv"));
  double total = 0.0;
  std::string line, cell;
  while (std::getline(theta, line)) {
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) total += std::stod(cell);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("worst-case validates the radius and writes structured JSON") {
  const fs::path dir = scratch();
  {
    std::ofstream p(dir / "theta.csv");
    p << "0.35,0.15\n0.15,0.35\n";
    std::ofstream l(dir / "loss.csv");
    l << "1,0\n";
  }
  const std::string files =
      " --loss " + (dir / "loss.csv").string() + " --doublet " + (dir / "theta.csv").string();
  const Run bad = cli("worst-case" + files + " --radius -0.5");
  CHECK(bad.exit_code == 2);

  const Run good = cli("worst-case" + files + " --radius 0.05 --out " +
                       (dir / "wc.json").string());
  CHECK(good.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "wc.json"));
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("value").get<double>() > 0.5);  // robust value exceeds nominal 0.5
  CHECK(j.at("P_star").size() == 4);
  CHECK(j.at("trace").size() >= 1);
}

TEST_CASE("hypotest coin smoke produces one CSV row") {
  const Run run = cli("hypotest --pair coin:0.25 --T 1 --trials 1");
  CHECK(run.exit_code == 0);
  CHECK(run.out.rfind("T,alpha_hat,beta_hat,rate_estimate\n", 0) == 0);
  CHECK(std::count(run.out.begin(), run.out.end(), '\n') == 2);
}

TEST_CASE("prescribe solves a small problem end to end") {
  const fs::path dir = scratch();
  {
    std::ofstream t(dir / "g1.csv");
    t << "0.35,0.15\n0.15,0.35\n";
    std::ofstream t2(dir / "g2.csv");
    t2 << "0.25,0.25\n0.25,0.25\n";
    nlohmann::json problem{
        {"weights", {0.6, 0.4}},
        {"prices", {3.0, 5.0}},
        {"constraint",
         {{"C", {{"d", 1}, {"entries", {{1.0, 1.0}}}}}, {"b", {1.0}}}},
        {"doublets", {(dir / "g1.csv").string(), (dir / "g2.csv").string()}}};
    std::ofstream p(dir / "problem.json");
    p << problem.dump();
  }
  const Run run = cli("prescribe --problem " + (dir / "problem.json").string() +
                      " --radius 0.1 --kind cre --out " + (dir / "sol.json").string());
  CHECK(run.exit_code == 0);
  const nlohmann::json sol = nlohmann::json::parse(slurp(dir / "sol.json"));
  CHECK(sol.at("x").size() == 2);
  // budget 1 and negative-revenue losses: offering the pricier brand is optimal
  CHECK(sol.at("x")[0].get<double>() + sol.at("x")[1].get<double>() <= 1.0);
  CHECK(sol.at("value").get<double>() < 0.0);
}

TEST_CASE("experiment bench emits csv and metadata") {
  const fs::path dir = scratch() / "bench_out";
  fs::remove_all(dir);
  {
    nlohmann::json cfg{{"d_list", {3, 4}}, {"T", 200}, {"bench_trials", 1}};
    std::ofstream c(scratch() / "bench_cfg.json");
    c << cfg.dump();
  }
  const Run run = cli("experiment bench --config " + (scratch() / "bench_cfg.json").string() +
                      " --out " + dir.string());
  CHECK(run.exit_code == 0);
  CHECK(fs::exists(dir / "bench.csv"));
  CHECK(fs::exists(dir / "metadata.json"));
  CHECK(slurp(dir / "bench.csv").rfind("d,trial,wall_seconds,iterations\n", 0) == 0);
}

TEST_CASE("--help enumerates every subcommand") {
  const Run run = cli("--help");
  CHECK(run.exit_code == 0);
  for (const std::string sub :
       {"simulate", "estimate", "worst-case", "prescribe", "hypotest", "experiment", "--seed"})
    CHECK(run.out.find(sub) != std::string::npos);
}

TEST_CASE("unknown subcommand and bad files exit 2 with JSON on stderr") {
  CHECK(cli("frobnicate").exit_code == 2);
  CHECK(cli("estimate --traj /nonexistent --d 2").exit_code == 2);
  const fs::path err = scratch() / "stderr.txt";
  const nlohmann::json j = nlohmann::json::parse(slurp(err));
  CHECK(j.contains("error"));
  CHECK(j.contains("message"));
}

TEST_CASE("failed runs leave no partial output file") {
  const fs::path dir = scratch();
  const fs::path target = dir / "never.json";
  fs::remove(target);
  const Run run = cli("worst-case --loss /nonexistent --doublet /nonexistent --radius 1 --out " +
                      target.string());
  CHECK(run.exit_code == 2);
  CHECK_FALSE(fs::exists(target));
}
