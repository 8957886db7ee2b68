#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>

#include "dampc/config.hpp"
#include "dampc/dampc.hpp"
#include "dampc/trace_io.hpp"
#include "support/oracles.hpp"

namespace dampc {
namespace {

TEST(Config, EmptyDocumentGivesDefaults) {
  const AppConfig c = parse_config("{}");
  const ExperimentConfig& x = c.experiment;
  EXPECT_EQ(x.birds, 5u);
  EXPECT_EQ(x.controller.phi, 0.1);
  EXPECT_EQ(x.controller.h_max, 3u);
  EXPECT_EQ(x.controller.m, 60u);
  EXPECT_EQ(x.controller.beta, 100.0);
  EXPECT_EQ(x.controller.k_min, 3u);
  EXPECT_EQ(x.init.pos_hi, (Vec2{3, 3}));
  EXPECT_EQ(x.init.vel_lo, (Vec2{0.25, 0.25}));
  EXPECT_EQ(x.epsilon, 0.01);
  EXPECT_EQ(x.delta, 0.05);
  EXPECT_FALSE(x.runs);
  EXPECT_FALSE(x.disturbance);
  EXPECT_EQ(c.controllers.size(), 2u);
}

TEST(Config, DumpParsesBackToTheSameDocument) {
  AppConfig c;
  c.experiment.birds = 7;
  c.experiment.runs = 33;
  c.experiment.controller.cost.wing.w = 1.25;
  c.experiment.controller.cost.upwash.sigma1 = Sym2{2.0, 0.5, 1.5};
  c.experiment.controller.swarm.inertia = 0.1 + 0.2;
  DisturbanceSpec d;
  d.kind = DisturbanceSpec::Kind::crash;
  d.schedule = {3, 9};
  d.target = 2;
  c.experiment.disturbance = d;
  c.controllers = {ControllerKind::ampc};
  const std::string text = dump_config(c);
  const AppConfig back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.experiment.controller.swarm.inertia, 0.1 + 0.2);
  EXPECT_EQ(back.experiment.disturbance->schedule, (std::vector<std::size_t>{3, 9}));
}

TEST(Config, UpwashPeakFollowsWingSpanUnlessGiven) {
  const AppConfig c = parse_config(R"({"cost": {"w": 2.0}})");
  EXPECT_NEAR(c.experiment.controller.cost.upwash.mu1.x, (12 + std::numbers::pi) * 2.0 / 16, 1e-15);
  const AppConfig d = parse_config(R"({"cost": {"w": 2.0, "upwash": {"mu1": [1, 2]}}})");
  EXPECT_EQ(d.experiment.controller.cost.upwash.mu1, (Vec2{1, 2}));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const char* bad[] = {
      R"({"bogus": 1})",
      R"({"control": {"phi": 0.1, "typo": 2}})",
      R"({"cost": {"upwash": {"mu3": [0, 0]}}})",
      R"({"birds": -1})",
      R"({"birds": 0})",
      R"({"birds": "five"})",
      R"({"epsilon": 1.5})",
      R"({"controller": "pid"})",
      R"({"controllers": []})",
      R"({"controllers": ["dampc", "dampc"]})",
      R"({"sample_size": "huge"})",
      R"({"limits": {"rho": 1.0}})",
      R"({"init": {"position_min": [0]}})",
      R"({"cost": {"upwash": {"sigma1": [[1, 2], [3, 1]]}}})",
      R"({"disturbance": {"kind": "explode"}})",
      R"({"disturbance": {"target": 9}})",
      R"({"runs": 0})",
      R"([1, 2])",
      R"({"birds": 5,)",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config("/nonexistent/dir/config.json"), ConfigError);
}

TEST(FormatDouble, RoundTripsExactly) {
  Rng rng(31);
  for (int n = 0; n < 20000; ++n) {
    std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    ASSERT_EQ(parse_double(format_double(v)), v);
  }
  for (double v : {0.0, -0.0, 1e-310, 0.1, 1.0 / 3.0, 6.02214076e23}) ASSERT_EQ(parse_double(format_double(v)), v);
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(TraceCsv, RoundTripsEveryValue) {
  ControllerConfig cfg;
  cfg.beta = 10;
  cfg.swarm.iterations = 8;
  cfg.m = 4;
  Rng rng(8);
  DampcController ctrl(cfg, sample_initial(rng, 4, InitBox{}), 8);
  const RunResult r = run_to_goal(ctrl, cfg.m);

  std::stringstream buf;
  write_trace_csv(buf, 7, r.trace);
  const std::vector<TraceRow> rows = read_trace_csv(buf);
  ASSERT_EQ(rows.size(), r.trace.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    EXPECT_EQ(rows[t], to_row(7, r.trace[t]));
    EXPECT_EQ(rows[t].birds, r.trace[t].state.birds);
    EXPECT_EQ(rows[t].j, r.trace[t].cost.total);
  }
}

TEST(TraceCsv, RejectsMalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(read_trace_csv(empty), std::runtime_error);
  std::stringstream wrong_header("a,b,c\n");
  EXPECT_THROW(read_trace_csv(wrong_header), std::runtime_error);
  std::stringstream short_row(trace_header(1) + "\n0,0,1\n");
  EXPECT_THROW(read_trace_csv(short_row), std::runtime_error);
  std::stringstream bad_cell(trace_header(0) + "\n0,0,x,0,0,0,0,0,0,0,0,0,0\n");
  EXPECT_THROW(read_trace_csv(bad_cell), std::runtime_error);
}

TEST(PlotCsv, OneRowPerStepWithCostLevelAndK) {
  ControllerConfig cfg;
  cfg.beta = 10;
  cfg.swarm.iterations = 8;
  cfg.m = 3;
  const RunResult r = dampc_run(cfg, 4, InitBox{}, 2);
  std::stringstream buf;
  write_plot_csv(buf, ControllerKind::dampc, 0, r.trace);
  std::string line;
  std::size_t n = 0;
  while (std::getline(buf, line)) {
    std::stringstream cells(line);
    std::string c;
    std::vector<std::string> parts;
    while (std::getline(cells, c, ',')) parts.push_back(c);
    ASSERT_EQ(parts.size(), 6u);
    EXPECT_EQ(parts[0], "dampc");
    EXPECT_EQ(parse_double(parts[3]), r.trace[n].cost.total);
    EXPECT_EQ(parse_double(parts[4]), r.trace[n].level);
    EXPECT_EQ(std::stoul(parts[5]), r.trace[n].k);
    ++n;
  }
  EXPECT_EQ(n, r.trace.size());
}

TEST(Table, HasOneColumnPerControllerAndTheUsualRows) {
  RunStatistics s;
  s.runs = 10;
  s.successes = 9;
  s.success_rate = 0.9;
  s.avg_convergence_steps = 7.4;
  s.avg_horizon = 1.17;
  s.avg_k_until_convergence = 3.69;
  s.avg_k_over_m = 3.35;
  s.avg_k_after_convergence = 4.06;
  s.avg_k_bad_runs = std::numeric_limits<double>::quiet_NaN();
  RunStatistics a = s;
  a.avg_k_until_convergence = a.avg_k_over_m = a.avg_k_after_convergence = 5.0;
  const std::vector<TableColumn> cols{{ControllerKind::dampc, 5, s}, {ControllerKind::ampc, 5, a}};
  const std::string table = format_table(cols);
  for (const char* label : {"DAMPC", "AMPC", "Number of birds", "Success rate", "Avg. convergence duration",
                            "Avg. horizon", "Avg. execution time", "Avg. neighborhood size",
                            "for good runs until convergence", "for good runs over m steps",
                            "for good runs after convergence", "for bad runs"})
    EXPECT_NE(table.find(label), std::string::npos) << label;
  EXPECT_NE(table.find("3.69"), std::string::npos);
  EXPECT_NE(table.find("n/a"), std::string::npos);
  EXPECT_NE(statistics_json(cols).find("\"avg_k_bad_runs\": null"), std::string::npos);
}

}  // namespace
}  // namespace dampc
