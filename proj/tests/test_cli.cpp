#include "levilab/cli.hpp"
#include "levilab/parallel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace levilab;

namespace {

RunConfig config(const std::string& command, const std::string& domain) {
  RunConfig c;
  c.command = command;
  c.domain = domain;
  c.samples = 300;
  c.dirs = 16;
  return c;
}

}  // namespace

TEST_CASE("analyze ball3: every sample has full rank") {
  const RunResult r = run_command(config("analyze", "ball3"));
  CHECK(r.exit_code == 0);
  const Json& counts = r.bundle["stratification"]["counts"];
  CHECK(counts["0"] == 0);
  CHECK(counts["1"] == 0);
  CHECK(counts["2"] == r.bundle["stratification"]["samples"]);
  CHECK(r.bundle["status"] == "pass");
}

TEST_CASE("correct ball2 yields a trivial ledger; eps is required") {
  RunConfig c = config("correct", "ball2");
  c.eps = 0.1;
  const RunResult r = run_command(c);
  CHECK(r.exit_code == 0);
  for (const auto& st : r.bundle["ledger"]["stages"]) CHECK(st["trivial"] == true);
  CHECK(r.bundle["ledger"]["r1"] == "|z|^2 - 1");

  c.eps.reset();
  CHECK_THROWS_AS(run_command(c), std::invalid_argument);
}

TEST_CASE("verify egg2-broken reports a failed psh check") {
  const RunResult r = run_command(config("verify", "egg2-broken"));
  CHECK(r.exit_code == 2);
  CHECK(r.bundle["reports"]["psh_on_boundary"]["pass"] == false);
  CHECK(r.bundle["status"] == "fail");
}

TEST_CASE("verify raw skewed egg at eps 0.01 fails main1 near (1,0)") {
  RunConfig c = config("verify", "skewed-egg2");
  c.eps = 0.01;
  const RunResult r = run_command(c);
  CHECK(r.exit_code == 2);
  const Json& m = r.bundle["reports"]["main1"];
  CHECK(m["pass"] == false);
  const double x = m["witness"]["point"][0][0].get<double>();
  const double y = m["witness"]["point"][0][1].get<double>();
  CHECK(std::abs(std::hypot(x, y) - 1.0) < 0.1);
}

TEST_CASE("dfsearch ball2 passes up to 0.99") {
  RunConfig c = config("dfsearch", "ball2");
  c.etas = {0.5, 0.9, 0.99};
  const RunResult r = run_command(c);
  CHECK(r.exit_code == 0);
  CHECK(r.bundle["df"]["largest_pass"].get<double>() == 0.99);
}

TEST_CASE("user expressions run like catalog domains") {
  RunConfig c = config("analyze", "");
  c.expr = "abs2(z1)+abs2(z2)^2-1";
  const RunResult r = run_command(c);
  CHECK(r.exit_code == 0);
  CHECK(r.bundle["domain"]["id"] == "expr");
}

TEST_CASE("bundles are byte-identical across reruns and thread counts") {
  RunConfig c = config("verify", "skewed-egg2");
  c.use = "corrected";
  c.eps = 0.05;
  const std::string a = dump_json(run_command(c).bundle);
  const std::string b = dump_json(run_command(c).bundle);
  set_thread_count(1);
  const std::string single = dump_json(run_command(c).bundle);
  set_thread_count(0);
  CHECK(a == b);
  CHECK(a == single);

  // The echoed configuration reproduces the bundle.
  const RunConfig echoed = config_from_json(Json::parse(a)["config"]);
  CHECK(dump_json(run_command(echoed).bundle) == a);
}

TEST_CASE("emit writes JSON and CSV files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "levilab_cli_test";
  fs::remove_all(dir);
  RunConfig c = config("verify", "ball2");
  c.out = (dir / "run").string();
  c.format = "both";
  const RunResult r = run_command(c);
  emit(c, r);
  CHECK(fs::exists(dir / "run.json"));
  bool csv = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") {
      csv = true;
      std::ifstream f(e.path());
      std::string header;
      std::getline(f, header);
      CHECK(header == "point,direction,slack,stratum");
    }
  }
  CHECK(csv);
  fs::remove_all(dir);
}
