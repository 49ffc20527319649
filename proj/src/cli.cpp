#include "fedsight/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedsight/backtest.hpp"
#include "fedsight/deliberate.hpp"
#include "fedsight/errors.hpp"
#include "fedsight/evaluate.hpp"
#include "fedsight/fixturegen.hpp"
#include "fedsight/gateway.hpp"
#include "fedsight/ingest.hpp"
#include "fedsight/log.hpp"
#include "fedsight/personas.hpp"

namespace fedsight::cli {

namespace {

namespace fs = std::filesystem;

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * fraction);
  return buf;
}

Strategy parse_strategy(const std::string& name) {
  auto strategy = strategy_from(name);
  if (!strategy.has_value()) {
    throw ValidationError("unknown strategy '" + name +
                          "' (expected baseline, icl, or cod)");
  }
  return *strategy;
}

// --- ingest -----------------------------------------------------------------

int cmd_ingest(const fs::path& data_root, fs::path calendar_path) {
  if (calendar_path.empty()) calendar_path = data_root / "calendar.csv";
  ingest::MeetingCalendar calendar = ingest::load_calendar(calendar_path);
  ingest::SeriesSet series = ingest::load_series_dir(data_root / "indicators");

  auto dist = calendar.distribution();
  std::cout << "calendar: " << calendar.size() << " meetings (hikes "
            << pct(dist.hikes_pct / 100.0) << ", cuts " << pct(dist.cuts_pct / 100.0)
            << ", holds " << pct(dist.holds_pct / 100.0) << ")\n";
  std::cout << "indicators: " << series.numeric.size() << " numeric, "
            << series.categorical.size() << " categorical series\n";

  int ok = 0;
  for (const auto& [meeting_id, actual] : calendar.entries) {
    (void)actual;
    ingest::load_snapshot_from_root(data_root, meeting_id, calendar, series);
    ++ok;
  }
  std::cout << "snapshots: " << ok << "/" << calendar.size() << " loaded\n";
  std::cout << "data tree OK\n";
  return 0;
}

// --- cluster ----------------------------------------------------------------

int cmd_cluster(const fs::path& members_path, const fs::path& out_path,
                std::uint64_t seed) {
  std::vector<MemberProfile> members = personas::load_members_csv(members_path);
  personas::ClusteringResult result;
  std::vector<Persona> built = personas::build_personas(members, seed, &result);

  personas::FeatureSchema schema = personas::FeatureSchema::build(members);
  personas::save_personas_json(out_path, built, schema.feature_names());

  std::cout << "clustered " << members.size() << " members into " << built.size()
            << " personas (inertia " << result.inertia << ", "
            << result.iterations << " iterations)\n";
  for (const Persona& persona : built) {
    std::cout << "- " << archetype_display_name(persona.archetype) << "\n";
  }
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

// --- simulate ---------------------------------------------------------------

std::unique_ptr<gateway::Backend> make_backend(backtest::BackendKind kind,
                                               const std::optional<fs::path>& fixture,
                                               int concurrency) {
  if (kind == backtest::BackendKind::scripted) {
    if (!fixture.has_value()) {
      throw ValidationError("scripted backend requires a fixture path");
    }
    return std::make_unique<gateway::ScriptedBackend>(
        gateway::load_fixture(*fixture));
  }
  gateway::LiveConfig live = gateway::LiveConfig::from_env();
  live.concurrency_limit = concurrency;
  return std::make_unique<gateway::HttpBackend>(live);
}

int cmd_simulate(const fs::path& data_root, fs::path calendar_path,
                 const fs::path& personas_path, const std::string& meeting_id,
                 Strategy strategy, int runs, std::uint64_t seed,
                 backtest::BackendKind backend,
                 const std::optional<fs::path>& fixture,
                 const std::optional<fs::path>& memory_path,
                 const std::optional<fs::path>& out_dir) {
  if (runs < 1) throw ValidationError("--runs must be a positive integer");
  if (calendar_path.empty()) calendar_path = data_root / "calendar.csv";

  ingest::MeetingCalendar calendar = ingest::load_calendar(calendar_path);
  ingest::SeriesSet series = ingest::load_series_dir(data_root / "indicators");
  MeetingSnapshot snapshot =
      ingest::load_snapshot_from_root(data_root, meeting_id, calendar, series);
  std::vector<Persona> personas = personas::load_personas_json(personas_path);

  gateway::Gateway gw(make_backend(backend, fixture, /*concurrency=*/1));
  deliberate::EngineConfig engine_config;
  engine_config.root_seed = seed;
  deliberate::DeliberationEngine engine(gw, std::move(personas), engine_config);

  deliberate::MemoryStore memory;
  if (memory_path.has_value()) {
    memory = deliberate::MemoryStore::load(*memory_path);
  }
  const deliberate::MemoryStore* memory_view =
      strategy == Strategy::icl ? &memory : nullptr;

  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(runs));
  for (int j = 0; j < runs; ++j) {
    RunRecord record = engine.run_meeting(snapshot, strategy, j, memory_view);
    if (record.failed) {
      std::cout << "run " << j << ": FAILED: " << record.error << "\n";
    } else {
      std::cout << "run " << j << ": decision " << record.decision.label()
                << "; votes:";
      for (const Vote& vote : record.votes) {
        std::cout << " " << vote.agent_id << "="
                  << option_label_name(vote.option_label) << " ("
                  << vote.delta_bps.label() << ")";
      }
      std::cout << "; tokens " << record.tokens_used << "\n";
    }
    records.push_back(std::move(record));
  }

  if (out_dir.has_value()) {
    backtest::BacktestReport shell;
    backtest::MeetingOutcome outcome;
    outcome.meeting_id = snapshot.meeting_id;
    outcome.actual = snapshot.actual;
    outcome.runs = std::move(records);
    shell.meetings.push_back(std::move(outcome));
    backtest::write_run_records(shell, *out_dir);
    std::cout << "wrote transcripts under " << (*out_dir / "runs").string()
              << "\n";
  }
  return 0;
}

// --- backtest ---------------------------------------------------------------

int cmd_backtest(const fs::path& config_path) {
  backtest::BacktestConfig config = backtest::BacktestConfig::load(config_path);

  gateway::Gateway gw(make_backend(config.backend, config.fixture,
                                   config.concurrency_limit));
  deliberate::MemoryStore memory;
  backtest::BacktestReport report =
      backtest::run_backtest_with_gateway(config, gw, &memory);

  backtest::emit_report(report, config.output_dir);
  backtest::write_run_records(report, config.output_dir);
  if (config.strategy == Strategy::icl) {
    memory.save(config.output_dir / "memory.json");
  }

  const evaluate::MetricsReport& metrics = report.metrics;
  std::cout << "backtest: " << report.meetings.size() << " meetings, "
            << config.runs_per_meeting << " runs each ("
            << strategy_name(config.strategy) << ", "
            << backtest::backend_kind_name(config.backend) << ")\n";
  std::cout << "total_accuracy " << pct(metrics.total_accuracy)
            << "; agent_accuracy " << pct(metrics.agent_accuracy)
            << "; voting_stability " << pct(metrics.voting_stability) << "\n";
  char mae_buf[32];
  std::snprintf(mae_buf, sizeof(mae_buf), "%.4f", metrics.mae);
  std::cout << "mae " << mae_buf << "; directional_accuracy "
            << pct(metrics.directional_accuracy);
  if (metrics.similarity.has_value()) {
    std::cout << "; similarity " << pct(*metrics.similarity);
  }
  if (metrics.avg_tokens.has_value()) {
    char tok_buf[32];
    std::snprintf(tok_buf, sizeof(tok_buf), "%.1f", *metrics.avg_tokens);
    std::cout << "; avg_tokens " << tok_buf;
  }
  std::cout << "\n";
  if (report.failed_runs > 0) {
    std::cout << "failed runs: " << report.failed_runs << " (see report.md)\n";
  }
  std::cout << "wrote " << (config.output_dir / "report.json").string() << ", "
            << (config.output_dir / "report.md").string() << ", "
            << (config.output_dir / "predictions.json").string() << "\n";
  return 0;
}

// --- score ------------------------------------------------------------------

int cmd_score(const fs::path& predictions_path) {
  evaluate::MetricsInput input = evaluate::load_predictions(predictions_path);
  evaluate::MetricsReport metrics = evaluate::compute_metrics(input);
  std::cout << evaluate::metrics_to_json(metrics) << "\n";
  return 0;
}

// --- baseline (linear regression on structured indicators) ------------------

int cmd_baseline(const fs::path& data_root, const fs::path& train_calendar_path,
                 fs::path test_calendar_path) {
  if (test_calendar_path.empty()) test_calendar_path = data_root / "calendar.csv";
  ingest::MeetingCalendar train = ingest::load_calendar(train_calendar_path);
  ingest::MeetingCalendar test = ingest::load_calendar(test_calendar_path);
  ingest::SeriesSet series = ingest::load_series_dir(data_root / "indicators");

  std::vector<StructuredIndicators> train_rows;
  std::vector<double> train_y;
  for (const auto& [meeting_id, actual] : train.entries) {
    train_rows.push_back(ingest::build_indicators(IsoDate::parse(meeting_id),
                                                  series, meeting_id));
    train_y.push_back(actual.percentage_points());
  }

  evaluate::LrFeatureBuilder builder = evaluate::LrFeatureBuilder::fit(train_rows);
  std::vector<std::vector<double>> design;
  design.reserve(train_rows.size());
  for (const auto& ind : train_rows) design.push_back(builder.encode(ind));
  std::vector<double> beta = evaluate::fit_linear_baseline(design, train_y);

  std::vector<RateDecision> preds;
  std::vector<RateDecision> actuals;
  std::cout << "| Meeting | Actual | LR predicted |\n|---|---|---|\n";
  for (const auto& [meeting_id, actual] : test.entries) {
    StructuredIndicators ind = ingest::build_indicators(IsoDate::parse(meeting_id),
                                                        series, meeting_id);
    RateDecision pred = evaluate::lr_predict(beta, builder.encode(ind));
    preds.push_back(pred);
    actuals.push_back(actual);
    std::cout << "| " << meeting_id << " | " << actual.percent_label() << " | "
              << pred.percent_label() << " |\n";
  }

  double directional = evaluate::directional_accuracy(preds, actuals);
  double total = evaluate::total_accuracy(preds, actuals);
  double error = evaluate::mae(preds, actuals);
  char mae_buf[32];
  std::snprintf(mae_buf, sizeof(mae_buf), "%.4f", error);
  std::cout << "LR baseline: total_accuracy " << pct(total)
            << "; directional_accuracy " << pct(directional) << "; mae "
            << mae_buf << "\n";
  std::cout << "reported LR directional accuracy: 31.25% (reference, not "
               "recomputed)\n";
  return 0;
}

// --- make-fixture -----------------------------------------------------------

std::vector<std::string> warmup_ids_or_default(std::vector<std::string> ids) {
  if (ids.empty()) {
    ids.assign(std::begin(deliberate::kDefaultWarmupMeetings),
               std::end(deliberate::kDefaultWarmupMeetings));
  }
  return ids;
}

int cmd_make_fixture(const std::string& kind, const fs::path& calendar_path,
                     const fs::path& out_path,
                     const std::vector<std::string>& warmup_ids,
                     const fs::path& warmup_calendar_path) {
  ingest::MeetingCalendar calendar = ingest::load_calendar(calendar_path);
  if (kind == "unanimous") {
    gateway::save_fixture(out_path, fixturegen::script_backtest(
                                        fixturegen::unanimous_plans(calendar)));
  } else if (kind == "dissent") {
    gateway::save_fixture(
        out_path,
        fixturegen::script_backtest(fixturegen::dissent_pattern_plans(calendar)));
  } else if (kind == "warmup") {
    gateway::save_fixture(
        out_path, fixturegen::script_backtest(fixturegen::warmup_plans(
                      calendar, warmup_ids_or_default(warmup_ids))));
  } else if (kind == "icl") {
    // Warm-up responses and backtest responses live in one fixture so a
    // single scripted gateway can serve the whole icl run.
    if (warmup_calendar_path.empty()) {
      throw ValidationError("kind=icl requires --warmup-calendar");
    }
    ingest::MeetingCalendar history = ingest::load_calendar(warmup_calendar_path);
    std::vector<fixturegen::ScriptPlan> plans =
        fixturegen::warmup_plans(history, warmup_ids_or_default(warmup_ids));
    std::vector<fixturegen::ScriptPlan> test_plans =
        fixturegen::dissent_pattern_plans(calendar);
    plans.insert(plans.end(), test_plans.begin(), test_plans.end());
    gateway::save_fixture(out_path, fixturegen::script_backtest(plans));
  } else if (kind == "minifed") {
    evaluate::save_predictions(out_path, fixturegen::minifed_bundle(calendar));
  } else {
    throw ValidationError("unknown fixture kind '" + kind +
                          "' (expected unanimous, dissent, warmup, icl, or minifed)");
  }
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"FOMC committee simulator and backtesting harness"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate the data tree");
  fs::path ingest_data_root = "data";
  fs::path ingest_calendar;
  ingest_cmd->add_option("--data-root", ingest_data_root, "Data tree root");
  ingest_cmd->add_option("--calendar", ingest_calendar,
                         "Calendar CSV (default: <data-root>/calendar.csv)");
  ingest_cmd->callback(
      [&] { exit_code = cmd_ingest(ingest_data_root, ingest_calendar); });

  // cluster
  auto* cluster_cmd =
      app.add_subcommand("cluster", "Build member personas from members.csv");
  fs::path cluster_members = "data/members.csv";
  fs::path cluster_out = "personas.json";
  std::uint64_t cluster_seed = 0;
  cluster_cmd->add_option("--members", cluster_members, "Member roster CSV");
  cluster_cmd->add_option("--out", cluster_out, "Output personas.json path");
  cluster_cmd->add_option("--seed", cluster_seed, "Clustering seed");
  cluster_cmd->callback(
      [&] { exit_code = cmd_cluster(cluster_members, cluster_out, cluster_seed); });

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a single meeting");
  fs::path sim_data_root = "data";
  fs::path sim_calendar;
  fs::path sim_personas = "personas.json";
  std::string sim_meeting;
  std::string sim_strategy = "baseline";
  int sim_runs = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_backend = "scripted";
  std::string sim_fixture;
  std::string sim_memory;
  std::string sim_out;
  sim_cmd->add_option("--meeting", sim_meeting, "Meeting id (YYYY-MM-DD)")
      ->required();
  sim_cmd->add_option("--strategy", sim_strategy, "baseline, icl, or cod");
  sim_cmd->add_option("--runs", sim_runs, "Number of runs");
  sim_cmd->add_option("--seed", sim_seed, "Root seed");
  sim_cmd->add_option("--data-root", sim_data_root, "Data tree root");
  sim_cmd->add_option("--calendar", sim_calendar,
                      "Calendar CSV (default: <data-root>/calendar.csv)");
  sim_cmd->add_option("--personas", sim_personas, "personas.json path");
  sim_cmd->add_option("--backend", sim_backend, "scripted or live");
  sim_cmd->add_option("--fixture", sim_fixture, "Scripted fixture path");
  sim_cmd->add_option("--memory", sim_memory, "memory.json to read (icl)");
  sim_cmd->add_option("--out", sim_out, "Directory for run transcripts");
  sim_cmd->callback([&] {
    std::optional<fs::path> fixture, memory, out;
    if (!sim_fixture.empty()) fixture = sim_fixture;
    if (!sim_memory.empty()) memory = sim_memory;
    if (!sim_out.empty()) out = sim_out;
    exit_code = cmd_simulate(sim_data_root, sim_calendar, sim_personas,
                             sim_meeting, parse_strategy(sim_strategy), sim_runs,
                             sim_seed, backtest::backend_kind_from(sim_backend),
                             fixture, memory, out);
  });

  // backtest
  auto* bt_cmd = app.add_subcommand("backtest", "Run a full experiment");
  fs::path bt_config;
  bt_cmd->add_option("--config", bt_config, "JSON config file (see docs/config.md)")
      ->required();
  bt_cmd->callback([&] { exit_code = cmd_backtest(bt_config); });

  // score
  auto* score_cmd =
      app.add_subcommand("score", "Compute metrics for a predictions bundle");
  fs::path score_predictions;
  score_cmd->add_option("--predictions", score_predictions, "predictions.json path")
      ->required();
  score_cmd->callback([&] { exit_code = cmd_score(score_predictions); });

  // baseline
  auto* base_cmd = app.add_subcommand(
      "baseline", "Linear-regression baseline on structured indicators");
  fs::path base_data_root = "data";
  fs::path base_train;
  fs::path base_test;
  base_cmd->add_option("--data-root", base_data_root, "Data tree root");
  base_cmd->add_option("--train-calendar", base_train, "Training calendar CSV")
      ->required();
  base_cmd->add_option("--test-calendar", base_test,
                       "Test calendar CSV (default: <data-root>/calendar.csv)");
  base_cmd->callback(
      [&] { exit_code = cmd_baseline(base_data_root, base_train, base_test); });

  // make-fixture
  auto* fix_cmd = app.add_subcommand(
      "make-fixture", "Generate a scripted fixture or predictions bundle");
  std::string fix_kind;
  fs::path fix_calendar;
  fs::path fix_out;
  std::vector<std::string> fix_warmup_ids;
  fs::path fix_warmup_calendar;
  fix_cmd->add_option("--kind", fix_kind,
                      "unanimous, dissent, warmup, icl, or minifed")
      ->required();
  fix_cmd->add_option("--calendar", fix_calendar, "Calendar CSV")->required();
  fix_cmd->add_option("--out", fix_out, "Output path")->required();
  fix_cmd->add_option("--warmup-ids", fix_warmup_ids,
                      "Warm-up meeting ids (kinds warmup and icl)");
  fix_cmd->add_option("--warmup-calendar", fix_warmup_calendar,
                      "Calendar covering the warm-up meetings (kind=icl)");
  fix_cmd->callback([&] {
    exit_code = cmd_make_fixture(fix_kind, fix_calendar, fix_out, fix_warmup_ids,
                                 fix_warmup_calendar);
  });

  try {
    app.parse(argc, argv);
    return exit_code;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage hint
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const MissingDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fedsight::cli
