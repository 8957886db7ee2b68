// dampc: run single flocking executions, SMC batches and controller
// comparisons from a JSON configuration.
//
// Exit status: 0 success (goal reached for `run`), 2 `run` did not reach the
// goal, 1 configuration or usage error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dampc/config.hpp"
#include "dampc/smc.hpp"
#include "dampc/trace_io.hpp"

namespace fs = std::filesystem;
using namespace dampc;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNoConvergence = 2;
constexpr int kRuntimeError = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> controller;
  std::optional<std::size_t> runs;
  std::optional<unsigned> threads;
  std::vector<std::size_t> birds;
};

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DAMPC_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string text(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("DAMPC_SEED: expected a non-negative integer, got '" + text + "'");
  return v;
}

// Config file, then environment, then flags.
AppConfig resolve(const Options& opt) {
  AppConfig cfg = opt.config.empty() ? AppConfig{} : load_config(opt.config);
  if (auto s = env_seed()) cfg.experiment.base_seed = *s;
  if (opt.seed) cfg.experiment.base_seed = *opt.seed;
  if (opt.out) cfg.output.dir = *opt.out;
  if (opt.controller) {
    try {
      cfg.experiment.kind = parse_controller_kind(*opt.controller);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--controller: ") + e.what());
    }
    cfg.controllers = {cfg.experiment.kind};
  }
  if (opt.runs) {
    if (*opt.runs == 0) throw ConfigError("--runs: must be at least 1");
    cfg.experiment.runs = *opt.runs;
  }
  if (opt.threads) cfg.experiment.threads = *opt.threads;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const AppConfig& cfg, const std::string& name) {
  const fs::path path = cfg.output.resolve(name);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

int cmd_run(const AppConfig& cfg) {
  ExperimentConfig x = cfg.experiment;
  x.post_goal_steps = 0;
  x.keep_traces = true;
  if (x.disturbance && x.disturbance->schedule.empty()) x.disturbance.reset();
  x.runs = 1;

  const RunRecord rec = execute_run(x, 0);
  const RunResult& result = *rec.result;

  {
    auto out = open_output(cfg, cfg.output.trace);
    write_trace_csv(out, 0, result.trace);
  }
  {
    auto out = open_output(cfg, cfg.output.summary);
    out << run_summary_json(result, x.kind, x.base_seed, x.controller.phi) << '\n';
  }
  {
    auto out = open_output(cfg, cfg.output.plot);
    out << plot_header() << '\n';
    write_plot_csv(out, x.kind, 0, result.trace);
  }

  std::cout << to_string(x.kind) << " seed " << x.base_seed << ": "
            << (result.success ? "reached the goal" : "did not reach the goal") << " after " << result.steps
            << " steps, J = " << format_double(result.trace.back().cost.total) << '\n';
  return result.success ? kOk : kNoConvergence;
}

struct Batch {
  std::vector<TableColumn> columns;
  std::vector<std::pair<ControllerKind, Estimate>> estimates;
};

Batch run_batch(const AppConfig& cfg, const std::vector<std::size_t>& bird_counts) {
  Batch batch;
  for (std::size_t birds : bird_counts) {
    for (ControllerKind kind : cfg.controllers) {
      ExperimentConfig x = cfg.experiment;
      x.birds = birds;
      x.kind = kind;
      x.keep_traces = true;
      std::cerr << to_string(kind) << " B=" << birds << ": " << x.run_count() << " runs\n";
      Estimate est = estimate(x);
      batch.columns.push_back({kind, birds, est.stats});
      batch.estimates.emplace_back(kind, std::move(est));
    }
  }
  return batch;
}

void write_batch(const AppConfig& cfg, const Batch& batch) {
  {
    auto out = open_output(cfg, cfg.output.runs);
    out << runs_header() << '\n';
    for (const auto& [kind, est] : batch.estimates) write_runs_csv(out, kind, est.records);
  }
  {
    auto out = open_output(cfg, cfg.output.stats);
    out << statistics_json(batch.columns) << '\n';
  }
  {
    auto out = open_output(cfg, cfg.output.plot);
    out << plot_header() << '\n';
    for (const auto& [kind, est] : batch.estimates)
      for (const RunRecord& r : est.records) write_plot_csv(out, kind, r.index, r.result->trace);
  }
  const std::string table = format_table(batch.columns);
  {
    auto out = open_output(cfg, cfg.output.table);
    out << table;
  }
  std::cout << table;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "JSON configuration file (defaults apply when omitted)");
  sub->add_option("--seed", opt.seed, "Seed; overrides DAMPC_SEED and the config file");
  sub->add_option("--out", opt.out, "Output directory");
  sub->add_option("--controller", opt.controller, "Controller: dampc or ampc");
  sub->add_option("--runs", opt.runs, "Number of runs L (overrides epsilon/delta)");
  sub->add_option("--threads", opt.threads, "Runs executed concurrently");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed adaptive-neighborhood MPC for V-formation flocking"};
  app.require_subcommand(1);
  Options opt;

  auto* run = app.add_subcommand("run", "Execute one controlled run and write its trace");
  add_common(run, opt);
  auto* smc = app.add_subcommand("smc", "Estimate the success probability over L seeded runs");
  add_common(smc, opt);
  auto* compare = app.add_subcommand("compare", "Tabulate controllers over one or more flock sizes");
  add_common(compare, opt);
  compare->add_option("--birds", opt.birds, "Flock sizes to compare (default: config value)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  AppConfig cfg;
  try {
    cfg = resolve(opt);
    if (compare->parsed())
      for (std::size_t b : opt.birds)
        if (b == 0) throw ConfigError("--birds: flock sizes must be positive");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(cfg);
    std::vector<std::size_t> birds{cfg.experiment.birds};
    if (compare->parsed() && !opt.birds.empty()) birds = opt.birds;
    write_batch(cfg, run_batch(cfg, birds));
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
