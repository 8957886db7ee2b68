#include "dampc/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dampc {

namespace {

constexpr std::size_t kFixedColumns = 13;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return v;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string cell(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return v;
}

TraceRow to_row(std::size_t run, const StepRecord& rec) {
  TraceRow row;
  row.run = run;
  row.t = rec.t;
  row.j = rec.cost.total;
  row.cv = rec.cost.cv;
  row.vm = rec.cost.vm;
  row.ub = rec.cost.ub;
  row.level_index = rec.level_index;
  row.level = rec.level;
  row.lookahead = rec.lookahead_cost;
  row.k = rec.k;
  row.k_next = rec.k_next;
  row.horizon = rec.max_horizon();
  row.rounds = rec.rounds;
  row.birds = rec.state.birds;
  return row;
}

std::string trace_header(std::size_t birds) {
  std::string h = "run,t,J,CV,VM,UB,level_index,level,lookahead,k,k_next,horizon,rounds";
  for (std::size_t i = 0; i < birds; ++i) {
    const std::string n = std::to_string(i);
    h += ",x" + n + ",y" + n + ",vx" + n + ",vy" + n;
  }
  return h;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  for (const TraceRow& r : rows) {
    out << r.run << ',' << r.t << ',' << format_double(r.j) << ',' << format_double(r.cv) << ','
        << format_double(r.vm) << ',' << format_double(r.ub) << ',' << r.level_index << ','
        << format_double(r.level) << ',' << format_double(r.lookahead) << ',' << r.k << ',' << r.k_next << ','
        << r.horizon << ',' << r.rounds;
    for (const BirdState& b : r.birds)
      out << ',' << format_double(b.position.x) << ',' << format_double(b.position.y) << ','
          << format_double(b.velocity.x) << ',' << format_double(b.velocity.y);
    out << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::size_t run, std::span<const StepRecord> trace, bool header) {
  if (header) out << trace_header(trace.empty() ? 0 : trace.front().state.size()) << '\n';
  std::vector<TraceRow> rows;
  rows.reserve(trace.size());
  for (const StepRecord& rec : trace) rows.push_back(to_row(run, rec));
  write_trace_csv(out, rows);
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace CSV: missing header");
  const std::size_t columns = split(line).size();
  if (columns < kFixedColumns || (columns - kFixedColumns) % 4 != 0)
    throw std::runtime_error("trace CSV: unexpected column count in header");
  const std::size_t birds = (columns - kFixedColumns) / 4;
  if (line != trace_header(birds)) throw std::runtime_error("trace CSV: unexpected header");

  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != columns)
      throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " cells");
    try {
      TraceRow r;
      r.run = parse_count(c[0]);
      r.t = parse_count(c[1]);
      r.j = parse_double(c[2]);
      r.cv = parse_double(c[3]);
      r.vm = parse_double(c[4]);
      r.ub = parse_double(c[5]);
      r.level_index = parse_count(c[6]);
      r.level = parse_double(c[7]);
      r.lookahead = parse_double(c[8]);
      r.k = parse_count(c[9]);
      r.k_next = parse_count(c[10]);
      r.horizon = parse_count(c[11]);
      r.rounds = parse_count(c[12]);
      r.birds.resize(birds);
      for (std::size_t i = 0; i < birds; ++i) {
        const std::size_t base = kFixedColumns + 4 * i;
        r.birds[i] = {{parse_double(c[base]), parse_double(c[base + 1])},
                      {parse_double(c[base + 2]), parse_double(c[base + 3])}};
      }
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::string plot_header() { return "controller,run,t,J,level,k"; }

void write_plot_csv(std::ostream& out, ControllerKind kind, std::size_t run, std::span<const StepRecord> trace) {
  const std::string name = to_string(kind);
  for (const StepRecord& r : trace)
    out << name << ',' << run << ',' << r.t << ',' << format_double(r.cost.total) << ','
        << format_double(r.level) << ',' << r.k << '\n';
}

std::string runs_header() {
  return "controller,run,seed,success,steps,initial_J,final_J,avg_horizon,avg_k_until,avg_k_over_m,"
         "avg_k_after,recovered,recovery_steps,max_rounds,wall_seconds";
}

void write_runs_csv(std::ostream& out, ControllerKind kind, std::span<const RunRecord> records) {
  const std::string name = to_string(kind);
  for (const RunRecord& r : records) {
    out << name << ',' << r.index << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.steps << ','
        << format_double(r.initial_cost) << ',' << format_double(r.final_cost) << ','
        << format_double(r.avg_horizon) << ',' << format_double(r.avg_k_until) << ','
        << format_double(r.avg_k_over_m) << ',' << (r.avg_k_after ? format_double(*r.avg_k_after) : "") << ','
        << (r.recovered ? (*r.recovered ? "1" : "0") : "") << ',' << r.recovery_steps << ',' << r.max_rounds
        << ',' << format_double(r.wall_seconds) << '\n';
  }
}

std::string run_summary_json(const RunResult& result, ControllerKind kind, std::uint64_t seed, double phi) {
  double k_sum = 0.0;
  double h_sum = 0.0;
  for (std::size_t t = 1; t < result.trace.size(); ++t) {
    k_sum += static_cast<double>(result.trace[t].k);
    h_sum += static_cast<double>(result.trace[t].max_horizon());
  }
  const double steps = static_cast<double>(result.steps);
  const StepRecord& last = result.trace.back();
  nlohmann::json j = {
      {"controller", to_string(kind)},
      {"seed", seed},
      {"birds", result.s0.size()},
      {"phi", phi},
      {"success", result.success},
      {"steps", result.steps},
      {"initial_cost", result.trace.front().cost.total},
      {"final_cost", {{"J", last.cost.total}, {"CV", last.cost.cv}, {"VM", last.cost.vm}, {"UB", last.cost.ub}}},
      {"levels", result.ledger.levels()},
      {"thresholds", result.ledger.thresholds()},
      {"avg_neighborhood", number_or_null(result.steps ? k_sum / steps : NAN)},
      {"avg_horizon", number_or_null(result.steps ? h_sum / steps : NAN)},
  };
  return j.dump(2);
}

std::string statistics_json(std::span<const TableColumn> columns) {
  nlohmann::json out = nlohmann::json::array();
  for (const TableColumn& c : columns) {
    const RunStatistics& s = c.stats;
    out.push_back({
        {"controller", to_string(c.kind)},
        {"birds", c.birds},
        {"runs", s.runs},
        {"successes", s.successes},
        {"success_rate", s.success_rate},
        {"avg_convergence_steps", number_or_null(s.avg_convergence_steps)},
        {"avg_horizon", number_or_null(s.avg_horizon)},
        {"avg_k_until_convergence", number_or_null(s.avg_k_until_convergence)},
        {"avg_k_over_m", number_or_null(s.avg_k_over_m)},
        {"avg_k_after_convergence", number_or_null(s.avg_k_after_convergence)},
        {"avg_k_bad_runs", number_or_null(s.avg_k_bad_runs)},
        {"recovery_rate", s.recovery_rate ? nlohmann::json(*s.recovery_rate) : nlohmann::json(nullptr)},
        {"wall_seconds_total", s.wall_seconds_total},
        {"wall_seconds_mean", s.wall_seconds_mean},
    });
  }
  return out.dump(2);
}

std::string format_table(std::span<const TableColumn> columns) {
  constexpr int label_width = 36;
  constexpr int cell_width = 10;
  std::ostringstream out;
  const auto row = [&](const std::string& label, auto&& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", label_width, label.c_str());
    out << buf;
    for (const TableColumn& c : columns) {
      std::snprintf(buf, sizeof buf, "%*s", cell_width, value(c).c_str());
      out << buf;
    }
    out << '\n';
  };
  const std::string rule(label_width + cell_width * columns.size(), '-');

  std::size_t runs = 0;
  for (const TableColumn& c : columns) runs = std::max(runs, c.stats.runs);
  out << "Comparison of controllers on " << runs << " runs\n" << rule << '\n';
  row("", [](const TableColumn& c) {
    std::string name = to_string(c.kind);
    for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return name;
  });
  row("Number of birds", [](const TableColumn& c) { return std::to_string(c.birds); });
  out << rule << '\n';
  row("Success rate", [](const TableColumn& c) { return cell(c.stats.success_rate); });
  row("Avg. convergence duration, m", [](const TableColumn& c) { return cell(c.stats.avg_convergence_steps); });
  row("Avg. horizon, h", [](const TableColumn& c) { return cell(c.stats.avg_horizon); });
  row("Avg. execution time in sec.", [](const TableColumn& c) { return cell(c.stats.wall_seconds_mean); });
  out << rule << '\n' << "Avg. neighborhood size, k\n" << rule << '\n';
  row("for good runs until convergence", [](const TableColumn& c) { return cell(c.stats.avg_k_until_convergence); });
  row("for good runs over m steps", [](const TableColumn& c) { return cell(c.stats.avg_k_over_m); });
  row("for good runs after convergence", [](const TableColumn& c) { return cell(c.stats.avg_k_after_convergence); });
  row("for bad runs", [](const TableColumn& c) { return cell(c.stats.avg_k_bad_runs); });
  out << rule << '\n';
  return out.str();
}

}  // namespace dampc
