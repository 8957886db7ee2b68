#pragma once

#include <charconv>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dampc/controller.hpp"
#include "dampc/smc.hpp"

namespace dampc {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
// Throws std::invalid_argument unless the whole of `text` is a number.
double parse_double(std::string_view text);

// One trace CSV row: run id, step, metrics, bookkeeping, then x,y,vx,vy per bird.
struct TraceRow {
  std::size_t run = 0;
  std::size_t t = 0;
  double j = 0.0;
  double cv = 0.0;
  double vm = 0.0;
  double ub = 0.0;
  std::size_t level_index = 0;
  double level = 0.0;
  double lookahead = 0.0;
  std::size_t k = 0;
  std::size_t k_next = 0;
  std::size_t horizon = 0;
  std::size_t rounds = 0;
  std::vector<BirdState> birds;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

TraceRow to_row(std::size_t run, const StepRecord& rec);

// Header for a flock of `birds` birds.
std::string trace_header(std::size_t birds);
void write_trace_csv(std::ostream& out, std::size_t run, std::span<const StepRecord> trace, bool header = true);
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);
// Parses what write_trace_csv produced. Throws std::runtime_error on
// malformed input.
std::vector<TraceRow> read_trace_csv(std::istream& in);

// Tidy plot data: controller, run, t, J, level, k.
std::string plot_header();
void write_plot_csv(std::ostream& out, ControllerKind kind, std::size_t run, std::span<const StepRecord> trace);

std::string runs_header();
void write_runs_csv(std::ostream& out, ControllerKind kind, std::span<const RunRecord> records);

// JSON summary of a single run.
std::string run_summary_json(const RunResult& result, ControllerKind kind, std::uint64_t seed, double phi);

struct TableColumn {
  ControllerKind kind;
  std::size_t birds;
  RunStatistics stats;
};

// JSON object with one entry per column.
std::string statistics_json(std::span<const TableColumn> columns);

// Text table: one column per (controller, birds), rows as in the usual
// DAMPC/AMPC comparison (success rate, convergence duration, horizon,
// execution time, four neighborhood averages).
std::string format_table(std::span<const TableColumn> columns);

}  // namespace dampc
