#include "fedsight/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"
#include "fedsight/ingest.hpp"
#include "fedsight/log.hpp"
#include "fedsight/personas.hpp"

namespace fedsight::backtest {

namespace {

using nlohmann::json;

std::string format_number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

const ReferenceMetricsRow kReferenceMetrics[6] = {
    {"Total Accuracy (%)", 87.50, 87.50, 93.75},
    {"Agent Accuracy (%)", 78.13, 80.63, 90.22},
    {"Votes Stability (%)", 86.67, 88.54, 93.33},
    {"Similarity (%)", 74.58, 72.72, 73.82},
    {"Average Tokens", 75724.0, 81303.0, 60464.0},
    {"MAE", 0.0313, 0.0313, 0.0156},
};
const double kReferenceOrdinalRfAccuracyPct = 62.5;
const double kReferenceLrDirectionalAccuracyPct = 31.25;
const double kReferenceMiniFed2018AccuracyPct = 75.0;

const char* backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::live:
      return "live";
    case BackendKind::scripted:
      return "scripted";
  }
  return "scripted";
}

BackendKind backend_kind_from(const std::string& name) {
  if (name == "live") return BackendKind::live;
  if (name == "scripted") return BackendKind::scripted;
  throw ValidationError("unknown backend '" + name +
                        "' (expected 'live' or 'scripted')");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

BacktestConfig BacktestConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(file.filename().string() + ": config must be a JSON object");
  }

  BacktestConfig config;
  if (doc.contains("data_root")) {
    config.data_root = doc["data_root"].get<std::string>();
  }
  if (doc.contains("calendar")) {
    config.calendar = doc["calendar"].get<std::string>();
  } else {
    config.calendar = config.data_root / "calendar.csv";
  }
  if (doc.contains("personas")) {
    config.personas = doc["personas"].get<std::string>();
  }
  if (doc.contains("strategy")) {
    const std::string name = doc["strategy"].get<std::string>();
    auto strategy = strategy_from(name);
    if (!strategy.has_value()) {
      throw ValidationError("unknown strategy '" + name +
                            "' (expected baseline, icl, or cod)");
    }
    config.strategy = *strategy;
  }
  if (doc.contains("runs_per_meeting")) {
    config.runs_per_meeting = doc["runs_per_meeting"].get<int>();
  }
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("backend")) {
    config.backend = backend_kind_from(doc["backend"].get<std::string>());
  }
  if (doc.contains("fixture")) {
    config.fixture = std::filesystem::path(doc["fixture"].get<std::string>());
  }
  if (doc.contains("warmup_meetings")) {
    config.warmup_meetings =
        doc["warmup_meetings"].get<std::vector<std::string>>();
  } else if (config.strategy == Strategy::icl) {
    config.warmup_meetings.assign(std::begin(deliberate::kDefaultWarmupMeetings),
                                  std::end(deliberate::kDefaultWarmupMeetings));
  }
  if (doc.contains("warmup_calendar")) {
    config.warmup_calendar =
        std::filesystem::path(doc["warmup_calendar"].get<std::string>());
  }
  if (doc.contains("concurrency_limit")) {
    config.concurrency_limit = doc["concurrency_limit"].get<int>();
  }
  if (doc.contains("output_dir")) {
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  config.validate();
  return config;
}

void BacktestConfig::validate() const {
  if (runs_per_meeting < 1) {
    throw ValidationError("runs_per_meeting must be a positive integer");
  }
  if (concurrency_limit < 1) {
    throw ValidationError("concurrency_limit must be a positive integer");
  }
  if (backend == BackendKind::scripted && !fixture.has_value()) {
    throw ValidationError("scripted backend requires a fixture path");
  }
  if (strategy == Strategy::icl && !warmup_meetings.empty() &&
      !warmup_calendar.has_value()) {
    throw ValidationError(
        "icl warm-up needs a warmup_calendar covering the warm-up meetings");
  }
  if (strategy != Strategy::icl && !warmup_meetings.empty()) {
    log_warn("warmup_meetings are ignored under the " +
             std::string(strategy_name(strategy)) + " strategy");
  }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

int MeetingOutcome::successful_runs() const {
  int count = 0;
  for (const auto& record : runs) {
    if (!record.failed) ++count;
  }
  return count;
}

namespace {

std::unique_ptr<gateway::Backend> make_backend(const BacktestConfig& config) {
  if (config.backend == BackendKind::scripted) {
    return std::make_unique<gateway::ScriptedBackend>(
        gateway::load_fixture(*config.fixture));
  }
  gateway::LiveConfig live = gateway::LiveConfig::from_env();
  live.concurrency_limit = config.concurrency_limit;
  return std::make_unique<gateway::HttpBackend>(live);
}

// Picks the statement backing the headline prediction: the first successful
// run that decided the headline, else the first successful run.
std::string headline_statement(const MeetingOutcome& outcome) {
  for (const auto& record : outcome.runs) {
    if (!record.failed && record.decision == outcome.headline) {
      return record.statement;
    }
  }
  for (const auto& record : outcome.runs) {
    if (!record.failed) return record.statement;
  }
  return "";
}

}  // namespace

BacktestReport run_backtest_with_gateway(const BacktestConfig& config,
                                         gateway::Gateway& gw,
                                         deliberate::MemoryStore* memory_out) {
  config.validate();

  ingest::MeetingCalendar calendar = ingest::load_calendar(config.calendar);
  ingest::SeriesSet series =
      ingest::load_series_dir(config.data_root / "indicators");
  std::vector<Persona> personas = personas::load_personas_json(config.personas);

  deliberate::EngineConfig engine_config;
  engine_config.root_seed = config.seed;
  deliberate::DeliberationEngine engine(gw, std::move(personas), engine_config);

  // ICL warm-up runs strictly sequentially before the backtest window; the
  // memory store is frozen afterwards so concurrent runs only read it.
  deliberate::MemoryStore local_memory;
  deliberate::MemoryStore& memory =
      memory_out != nullptr ? *memory_out : local_memory;
  int warmup_memories = 0;
  if (config.strategy == Strategy::icl && !config.warmup_meetings.empty()) {
    ingest::MeetingCalendar warmup_calendar =
        ingest::load_calendar(*config.warmup_calendar);
    const std::string& earliest = calendar.entries.front().first;
    std::vector<MeetingSnapshot> history;
    history.reserve(config.warmup_meetings.size());
    for (const std::string& meeting_id : config.warmup_meetings) {
      if (meeting_id >= earliest) {
        throw ValidationError("warm-up meeting " + meeting_id +
                              " does not precede the earliest backtest meeting " +
                              earliest);
      }
      history.push_back(ingest::load_snapshot_from_root(
          config.data_root, meeting_id, warmup_calendar, series));
    }
    warmup_memories = engine.icl_warmup(history, memory);
    log_info("icl warm-up stored " + std::to_string(warmup_memories) +
             " reflections across " +
             std::to_string(config.warmup_meetings.size()) + " meetings");
  }

  std::vector<MeetingSnapshot> snapshots;
  snapshots.reserve(calendar.size());
  for (const auto& [meeting_id, actual] : calendar.entries) {
    (void)actual;
    snapshots.push_back(ingest::load_snapshot_from_root(config.data_root,
                                                        meeting_id, calendar,
                                                        series));
  }

  // Schedule (meeting, run) tasks onto a bounded pool. Each task writes its
  // own slot, so aggregation order never depends on scheduling.
  const std::size_t runs = static_cast<std::size_t>(config.runs_per_meeting);
  const std::size_t task_count = snapshots.size() * runs;
  std::vector<RunRecord> records(task_count);
  const deliberate::MemoryStore* memory_view =
      config.strategy == Strategy::icl ? &memory : nullptr;

  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    while (true) {
      std::size_t task = next_task.fetch_add(1);
      if (task >= task_count) break;
      std::size_t meeting = task / runs;
      int run_index = static_cast<int>(task % runs);
      try {
        records[task] = engine.run_meeting(snapshots[meeting], config.strategy,
                                           run_index, memory_view);
      } catch (const std::exception& e) {
        RunRecord& record = records[task];
        record.meeting_id = snapshots[meeting].meeting_id;
        record.run_index = run_index;
        record.strategy = config.strategy;
        record.failed = true;
        record.error = e.what();
        log_error("run crashed at " + record.meeting_id + " run " +
                  std::to_string(run_index) + ": " + record.error);
      }
    }
  };

  const std::size_t pool_size = std::min(
      static_cast<std::size_t>(config.concurrency_limit), task_count);
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  // Aggregate per meeting, in calendar order.
  BacktestReport report;
  report.config = config;
  report.warmup_memories = warmup_memories;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    MeetingOutcome outcome;
    outcome.meeting_id = snapshots[i].meeting_id;
    outcome.actual = snapshots[i].actual;
    for (std::size_t j = 0; j < runs; ++j) {
      outcome.runs.push_back(records[i * runs + j]);
    }
    const int failed =
        static_cast<int>(runs) - outcome.successful_runs();
    report.failed_runs += failed;
    outcome.unevaluable = 2 * failed > static_cast<int>(runs);
    if (outcome.unevaluable) {
      log_warn("WARNING: meeting " + outcome.meeting_id + " is unevaluable (" +
               std::to_string(failed) + " of " + std::to_string(runs) +
               " runs failed); excluding it from all metric denominators");
    } else {
      std::vector<RateDecision> decisions;
      for (const auto& record : outcome.runs) {
        if (!record.failed) decisions.push_back(record.decision);
      }
      outcome.headline = evaluate::modal_decision(decisions);
      outcome.predicted_statement = headline_statement(outcome);
      ++report.evaluated_meetings;
    }
    outcome.actual_statement =
        ingest::load_actual_statement(config.data_root, outcome.meeting_id);
    report.meetings.push_back(std::move(outcome));
  }

  if (report.evaluated_meetings == 0) {
    throw ValidationError("no evaluable meetings: every meeting lost more than "
                          "half of its runs");
  }
  report.metrics = evaluate::compute_metrics(predictions_input(report));
  return report;
}

BacktestReport run_backtest(const BacktestConfig& config) {
  gateway::Gateway gw(make_backend(config));
  return run_backtest_with_gateway(config, gw);
}

evaluate::MetricsInput predictions_input(const BacktestReport& report) {
  evaluate::MetricsInput input;
  bool any_actual_statement = false;
  for (const MeetingOutcome& outcome : report.meetings) {
    if (outcome.unevaluable) continue;
    input.meeting_ids.push_back(outcome.meeting_id);
    input.actuals.push_back(outcome.actual);

    std::vector<std::vector<RateDecision>> votes;
    std::vector<RateDecision> decisions;
    std::vector<long long> tokens;
    for (const RunRecord& record : outcome.runs) {
      if (record.failed) continue;
      std::vector<RateDecision> row;
      row.reserve(record.votes.size());
      for (const Vote& vote : record.votes) row.push_back(vote.delta_bps);
      votes.push_back(std::move(row));
      decisions.push_back(record.decision);
      tokens.push_back(record.tokens_used);
    }
    input.votes.push_back(std::move(votes));
    input.decisions.push_back(std::move(decisions));
    input.tokens.push_back(std::move(tokens));
    input.predicted_statements.push_back(outcome.predicted_statement);
    input.actual_statements.push_back(outcome.actual_statement);
    any_actual_statement =
        any_actual_statement || !outcome.actual_statement.empty();
  }
  // Similarity is only meaningful when the data tree carries real statements.
  if (!any_actual_statement) {
    input.predicted_statements.clear();
    input.actual_statements.clear();
  }
  return input;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

json config_to_json(const BacktestConfig& config) {
  json doc;
  doc["data_root"] = config.data_root.generic_string();
  doc["calendar"] = config.calendar.generic_string();
  doc["personas"] = config.personas.generic_string();
  doc["strategy"] = strategy_name(config.strategy);
  doc["runs_per_meeting"] = config.runs_per_meeting;
  doc["seed"] = config.seed;
  doc["backend"] = backend_kind_name(config.backend);
  if (config.fixture.has_value()) doc["fixture"] = config.fixture->generic_string();
  doc["warmup_meetings"] = config.warmup_meetings;
  if (config.warmup_calendar.has_value()) {
    doc["warmup_calendar"] = config.warmup_calendar->generic_string();
  }
  doc["concurrency_limit"] = config.concurrency_limit;
  doc["output_dir"] = config.output_dir.generic_string();
  return doc;
}

json metrics_to_json_value(const evaluate::MetricsReport& metrics) {
  json doc;
  doc["n_meetings"] = metrics.n_meetings;
  doc["total_accuracy"] = metrics.total_accuracy;
  doc["agent_accuracy"] = metrics.agent_accuracy;
  doc["voting_stability"] = metrics.voting_stability;
  doc["mae"] = metrics.mae;
  doc["directional_accuracy"] = metrics.directional_accuracy;
  if (metrics.similarity.has_value()) doc["similarity"] = *metrics.similarity;
  if (metrics.avg_tokens.has_value()) doc["avg_tokens"] = *metrics.avg_tokens;
  return doc;
}

json run_to_json(const RunRecord& record) {
  json doc;
  doc["run_index"] = record.run_index;
  doc["failed"] = record.failed;
  if (record.failed) {
    doc["error"] = record.error;
    return doc;
  }
  doc["decision_bps"] = record.decision.bps();
  json votes = json::array();
  for (const Vote& vote : record.votes) {
    json v;
    v["agent_id"] = vote.agent_id;
    v["label"] = option_label_name(vote.option_label);
    v["delta_bps"] = vote.delta_bps.bps();
    votes.push_back(v);
  }
  doc["votes"] = votes;
  doc["tokens"] = record.tokens_used;
  return doc;
}

}  // namespace

std::string render_report_json(const BacktestReport& report) {
  json doc;
  doc["schema_version"] = 1;
  doc["config"] = config_to_json(report.config);

  json meetings = json::array();
  for (const MeetingOutcome& outcome : report.meetings) {
    json m;
    m["meeting_id"] = outcome.meeting_id;
    m["actual_bps"] = outcome.actual.bps();
    m["unevaluable"] = outcome.unevaluable;
    if (!outcome.unevaluable) {
      m["headline_bps"] = outcome.headline.bps();
      m["hit"] = outcome.headline == outcome.actual;
    }
    json runs = json::array();
    for (const RunRecord& record : outcome.runs) runs.push_back(run_to_json(record));
    m["runs"] = runs;
    meetings.push_back(m);
  }
  doc["meetings"] = meetings;
  doc["metrics"] = metrics_to_json_value(report.metrics);
  doc["evaluated_meetings"] = report.evaluated_meetings;
  doc["failed_runs"] = report.failed_runs;
  doc["warmup_memories"] = report.warmup_memories;

  json reference;
  json table1 = json::array();
  for (const ReferenceMetricsRow& row : kReferenceMetrics) {
    json r;
    r["metric"] = row.metric;
    r["fedsight_ai"] = row.baseline;
    r["fedsight_icl"] = row.icl;
    r["fedsight_cod"] = row.cod;
    table1.push_back(r);
  }
  reference["table1"] = table1;
  reference["ordinal_rf_accuracy_pct"] = kReferenceOrdinalRfAccuracyPct;
  reference["lr_directional_accuracy_pct"] = kReferenceLrDirectionalAccuracyPct;
  reference["minifed_2018_accuracy_pct"] = kReferenceMiniFed2018AccuracyPct;
  reference["note"] = "published reference values, not recomputed";
  doc["reference"] = reference;

  return doc.dump(2) + "\n";
}

std::string render_report_md(const BacktestReport& report) {
  const evaluate::MetricsReport& metrics = report.metrics;
  std::string md;
  md += "# Backtest report\n\n";

  md += "## Configuration\n\n";
  md += "- data root: `" + report.config.data_root.generic_string() + "`\n";
  md += "- calendar: `" + report.config.calendar.generic_string() + "` (" +
        std::to_string(report.meetings.size()) + " meetings)\n";
  md += "- strategy: " + std::string(strategy_name(report.config.strategy)) + "\n";
  md += "- backend: " + std::string(backend_kind_name(report.config.backend)) + "\n";
  md += "- runs per meeting: " + std::to_string(report.config.runs_per_meeting) + "\n";
  md += "- seed: " + std::to_string(report.config.seed) + "\n";
  if (!report.config.warmup_meetings.empty()) {
    md += "- warm-up meetings:";
    for (const auto& id : report.config.warmup_meetings) md += " " + id;
    md += " (" + std::to_string(report.warmup_memories) + " reflections stored)\n";
  }
  md += "\n";

  md += "## Metrics\n\n";
  md += "| Metric | This run | FedSight AI (reported) | "
        "FedSight ICL (reported) | FedSight CoD (reported) |\n";
  md += "|---|---|---|---|---|\n";
  const std::string ours[6] = {
      format_number(100.0 * metrics.total_accuracy, "%.2f"),
      format_number(100.0 * metrics.agent_accuracy, "%.2f"),
      format_number(100.0 * metrics.voting_stability, "%.2f"),
      metrics.similarity.has_value()
          ? format_number(100.0 * *metrics.similarity, "%.2f")
          : std::string("n/a"),
      metrics.avg_tokens.has_value()
          ? format_number(*metrics.avg_tokens, "%.0f")
          : std::string("n/a"),
      format_number(metrics.mae, "%.4f"),
  };
  for (std::size_t i = 0; i < 6; ++i) {
    const ReferenceMetricsRow& row = kReferenceMetrics[i];
    const char* fmt = i == 4 ? "%.0f" : i == 5 ? "%.4f" : "%.2f";
    md += "| " + std::string(row.metric) + " | " + ours[i] + " | " +
          format_number(row.baseline, fmt) + " | " + format_number(row.icl, fmt) +
          " | " + format_number(row.cod, fmt) + " |\n";
  }
  md += "\nReported columns are published reference values, not recomputed.\n\n";
  md += "Directional accuracy: " +
        format_number(100.0 * metrics.directional_accuracy, "%.2f") +
        "% (reported references: Ordinal RF " +
        format_number(kReferenceOrdinalRfAccuracyPct, "%.1f") + "%, LR " +
        format_number(kReferenceLrDirectionalAccuracyPct, "%.2f") +
        "% — published values, not recomputed).\n\n";

  md += "## Per-meeting results\n\n";
  md += "| Meeting | Actual | Predicted | Hit | Runs succeeded |\n";
  md += "|---|---|---|---|---|\n";
  for (const MeetingOutcome& outcome : report.meetings) {
    md += "| " + outcome.meeting_id + " | " + outcome.actual.percent_label() +
          " | ";
    if (outcome.unevaluable) {
      md += "unevaluable | — | ";
    } else {
      md += outcome.headline.percent_label() + " | " +
            (outcome.headline == outcome.actual ? "yes" : "no") + " | ";
    }
    md += std::to_string(outcome.successful_runs()) + "/" +
          std::to_string(outcome.runs.size()) + " |\n";
  }
  md += "\n";

  bool any_unevaluable = false;
  for (const MeetingOutcome& outcome : report.meetings) {
    any_unevaluable = any_unevaluable || outcome.unevaluable;
  }
  if (any_unevaluable) {
    md += "## WARNING: unevaluable meetings\n\n";
    md += "The following meetings lost more than half of their runs and are "
          "excluded from every metric denominator:\n\n";
    for (const MeetingOutcome& outcome : report.meetings) {
      if (outcome.unevaluable) {
        md += "- " + outcome.meeting_id + " (" +
              std::to_string(outcome.successful_runs()) + "/" +
              std::to_string(outcome.runs.size()) + " runs succeeded)\n";
      }
    }
    md += "\n";
  }

  md += "## Failed runs\n\n";
  if (report.failed_runs == 0) {
    md += "(none)\n";
  } else {
    for (const MeetingOutcome& outcome : report.meetings) {
      for (const RunRecord& record : outcome.runs) {
        if (record.failed) {
          md += "- " + outcome.meeting_id + " run " +
                std::to_string(record.run_index) + ": " + record.error + "\n";
        }
      }
    }
  }
  return md;
}

void emit_report(const BacktestReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());

  auto write_file = [&](const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
  };
  write_file(dir / "report.json", render_report_json(report));
  write_file(dir / "report.md", render_report_md(report));
  evaluate::save_predictions(dir / "predictions.json", predictions_input(report));
}

void write_run_records(const BacktestReport& report,
                       const std::filesystem::path& dir) {
  for (const MeetingOutcome& outcome : report.meetings) {
    for (const RunRecord& record : outcome.runs) {
      std::filesystem::path run_dir =
          dir / "runs" / outcome.meeting_id / strategy_name(record.strategy);
      std::error_code ec;
      std::filesystem::create_directories(run_dir, ec);
      if (ec) throw IoError("cannot create run directory " + run_dir.string());

      json doc;
      doc["meeting_id"] = record.meeting_id;
      doc["run_index"] = record.run_index;
      doc["strategy"] = strategy_name(record.strategy);
      doc["failed"] = record.failed;
      if (record.failed) {
        doc["error"] = record.error;
      } else {
        doc["decision_bps"] = record.decision.bps();
        doc["statement"] = record.statement;
        json votes = json::array();
        for (const Vote& vote : record.votes) {
          json v;
          v["agent_id"] = vote.agent_id;
          v["label"] = option_label_name(vote.option_label);
          v["delta_bps"] = vote.delta_bps.bps();
          v["justification"] = vote.justification;
          votes.push_back(v);
        }
        doc["votes"] = votes;
      }
      doc["tokens"] = record.tokens_used;
      json transcript = json::array();
      for (const TranscriptEntry& entry : record.transcript) {
        json t;
        t["stage"] = stage_name(entry.stage);
        t["agent_id"] = entry.agent_id;
        t["text"] = entry.text;
        transcript.push_back(t);
      }
      doc["transcript"] = transcript;

      std::filesystem::path file =
          run_dir / ("run" + std::to_string(record.run_index) + ".json");
      std::ofstream out(file, std::ios::binary);
      if (!out) throw IoError("cannot write " + file.string());
      out << doc.dump(2) << '\n';
    }
  }
}

}  // namespace fedsight::backtest
