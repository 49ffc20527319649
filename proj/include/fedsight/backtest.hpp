#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsight/core.hpp"
#include "fedsight/deliberate.hpp"
#include "fedsight/evaluate.hpp"
#include "fedsight/gateway.hpp"

namespace fedsight::backtest {

enum class BackendKind { live, scripted };

const char* backend_kind_name(BackendKind kind);
BackendKind backend_kind_from(const std::string& name);

// Experiment configuration; normally parsed from a JSON config file (see
// docs/config.md for the schema and defaults).
struct BacktestConfig {
  std::filesystem::path data_root = "data";
  std::filesystem::path calendar;            // default: data_root/calendar.csv
  std::filesystem::path personas = "personas.json";
  Strategy strategy = Strategy::baseline;
  int runs_per_meeting = 5;
  std::uint64_t seed = 0;
  BackendKind backend = BackendKind::scripted;
  std::optional<std::filesystem::path> fixture;  // required for scripted
  std::vector<std::string> warmup_meetings;      // icl only
  // Calendar holding the warm-up meetings' actual decisions (they precede
  // the backtest window, so the main calendar cannot cover them).
  std::optional<std::filesystem::path> warmup_calendar;
  int concurrency_limit = 4;
  std::filesystem::path output_dir = "out";

  static BacktestConfig load(const std::filesystem::path& file);
  void validate() const;  // throws ValidationError
};

// One meeting's outcome across all runs.
struct MeetingOutcome {
  std::string meeting_id;
  RateDecision actual;
  std::vector<RunRecord> runs;     // run_index order, failed runs included
  bool unevaluable = false;        // more than half the runs failed
  RateDecision headline;           // modal decision over successful runs
  std::string predicted_statement; // statement backing the headline
  std::string actual_statement;    // from the data tree; may be empty

  int successful_runs() const;
};

struct BacktestReport {
  BacktestConfig config;
  std::vector<MeetingOutcome> meetings;  // every calendar entry, in order
  evaluate::MetricsReport metrics;       // over evaluable meetings only
  int evaluated_meetings = 0;
  int failed_runs = 0;
  int warmup_memories = 0;  // reflections stored during icl warm-up
};

// Published reference values for the 2023-24 window, embedded for the
// report's comparison columns. These are quoted, never recomputed.
struct ReferenceMetricsRow {
  const char* metric;
  double baseline;  // FedSight AI
  double icl;       // FedSight ICL
  double cod;       // FedSight CoD
};
extern const ReferenceMetricsRow kReferenceMetrics[6];
extern const double kReferenceOrdinalRfAccuracyPct;      // 62.5
extern const double kReferenceLrDirectionalAccuracyPct;  // 31.25
extern const double kReferenceMiniFed2018AccuracyPct;    // 75.0

// Runs the full experiment: loads personas, calendar, and snapshots; runs the
// icl warm-up sequentially when configured; then schedules (meeting, run)
// tasks onto a bounded worker pool and aggregates. Deterministic under the
// scripted backend with a fixed seed. A meeting with more than half its runs
// failed is marked unevaluable and drops out of the metric denominators, with
// a prominent warning.
BacktestReport run_backtest(const BacktestConfig& config);

// Same, but against a caller-supplied gateway (tests inject observers here);
// `memory_out`, when non-null, receives the warm-up memory store.
BacktestReport run_backtest_with_gateway(const BacktestConfig& config,
                                         gateway::Gateway& gw,
                                         deliberate::MemoryStore* memory_out = nullptr);

// Rebuilds the metrics input exactly as the metrics were computed (evaluable
// meetings only, failed runs dropped): `score` on this bundle reproduces
// report.metrics.
evaluate::MetricsInput predictions_input(const BacktestReport& report);

// Renders report.json (schema-versioned, machine-readable) and report.md
// (metric table with published reference columns plus a per-meeting table).
// Byte-stable: identical reports produce identical files.
std::string render_report_json(const BacktestReport& report);
std::string render_report_md(const BacktestReport& report);

// Writes report.json, report.md, and predictions.json into `dir`.
void emit_report(const BacktestReport& report, const std::filesystem::path& dir);

// Writes per-run transcripts under dir/runs/{meeting}/{strategy}/run{j}.json.
void write_run_records(const BacktestReport& report,
                       const std::filesystem::path& dir);

}  // namespace fedsight::backtest
