#include "levilab/cli.hpp"
#include "levilab/correction.hpp"
#include "levilab/expression.hpp"

#include <CLI11.hpp>

#include <cstring>
#include <fstream>
#include <iostream>

using namespace levilab;

namespace {

void add_run_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--domain", cfg.domain, "catalog domain id");
  sub->add_option("--expr", cfg.expr, "defining function over z1..zn, e.g. \"abs2(z1)+abs2(z2)^2-1\"");
  sub->add_option("--eps", cfg.eps, "epsilon of the main inequality");
  sub->add_option("--etas", cfg.etas, "exponent grid, comma separated")->delimiter(',');
  sub->add_option("--collar", cfg.collar, "collar width");
  sub->add_option("--samples", cfg.samples, "boundary samples");
  sub->add_option("--collar-depths", cfg.collar_depths, "collar depths per boundary sample");
  sub->add_option("--dirs", cfg.dirs, "probe directions per point");
  sub->add_option("--seed", cfg.seed, "sampling seed");
  sub->add_option("--tol-scale", cfg.tol_scale, "Levi rank tolerance relative to |d rho|");
  sub->add_option("--out", cfg.out, "output path prefix");
  sub->add_option("--format", cfg.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  sub->add_option("--use", cfg.use, "raw, corrected or exterior")
      ->check(CLI::IsMember({"raw", "corrected", "exterior"}));
  sub->add_flag("--timings", cfg.timings, "include wall-clock timings (breaks byte identity)");
}

Json error_json(const std::exception& e) {
  Json err = {{"message", e.what()}};
  if (auto* p = dynamic_cast<const ParseError*>(&e)) {
    err["type"] = "parse_error";
    err["column"] = p->column();
  } else if (auto* p = dynamic_cast<const PartialSampleError*>(&e)) {
    err["type"] = "partial_sample";
    err["deficit"] = p->deficit();
  } else if (auto* p = dynamic_cast<const EvaluationError*>(&e)) {
    err["type"] = "evaluation_error";
    err["index"] = p->index();
  } else if (dynamic_cast<const StageError*>(&e)) {
    err["type"] = "stage_error";
  } else if (dynamic_cast<const InfeasibleCutoffError*>(&e) || dynamic_cast<const CutoffConstructionError*>(&e)) {
    err["type"] = "cutoff_error";
  } else if (dynamic_cast<const DegenerateBoundaryError*>(&e) || dynamic_cast<const CollarTooWideError*>(&e) ||
             dynamic_cast<const AmbiguousProjectionError*>(&e)) {
    err["type"] = "domain_error";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    err["type"] = "usage";
  } else {
    err["type"] = "error";
  }
  return {{"error", err}};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // A previous bundle seeds the configuration; explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--replay") == 0) {
      std::ifstream f(argv[i + 1]);
      if (!f) {
        std::cerr << dump_json(Json{{"error", {{"type", "usage"}, {"message", "cannot read replay bundle"}}}});
        return 1;
      }
      try {
        cfg = config_from_json(Json::parse(f).at("config"));
      } catch (const std::exception& e) {
        std::cerr << dump_json(error_json(e));
        return 1;
      }
    }
  }

  CLI::App app{"Levi-form analysis and defining-function correction for pseudoconvex domains"};
  app.set_config("--config", "", "TOML/INI file; keys under a [command] section, flags win");
  std::string replay;
  app.add_option("--replay", replay, "re-run the configuration echoed in a JSON bundle");
  app.require_subcommand(1);
  const char* commands[][2] = {
      {"analyze", "sample, stratify and scan the obstruction term"},
      {"correct", "build the corrected defining functions and their ledger"},
      {"verify", "run the inequality checks on raw or corrected functions"},
      {"dfsearch", "Diederich-Fornaess exponent search on the collar"}};
  for (const auto& c : commands) add_run_options(app.add_subcommand(c[0], c[1]), cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const RunResult res = run_command(cfg);
    emit(cfg, res);
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << dump_json(error_json(e));
    return 1;
  }
}
