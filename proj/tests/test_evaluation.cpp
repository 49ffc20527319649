#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fedsight/errors.hpp"
#include "fedsight/evaluate.hpp"
#include "fedsight/rng.hpp"
#include "support/reference_metrics.hpp"
#include "support/temp_dir.hpp"

using namespace fedsight;
using namespace fedsight::evaluate;
namespace ref = fedsight::testsupport;
using fedsight::testsupport::TempDir;

namespace {

RateDecision bps(int b) { return RateDecision::from_bps(b); }

std::vector<RateDecision> bps_list(std::initializer_list<int> values) {
  std::vector<RateDecision> out;
  for (int v : values) out.push_back(bps(v));
  return out;
}

// Small random instance within the property-test envelope (n<=6, R<=5, K<=4).
MetricsInput random_input(Rng& rng) {
  MetricsInput input;
  const int n = uniform_int(rng, 1, 6);
  const int agents = uniform_int(rng, 1, 4);
  for (int i = 0; i < n; ++i) {
    input.meeting_ids.push_back("meeting_" + std::to_string(i));
    input.actuals.push_back(bps(25 * uniform_int(rng, -4, 4)));
    const int runs = uniform_int(rng, 1, 5);
    std::vector<std::vector<RateDecision>> meeting_votes;
    std::vector<RateDecision> meeting_decisions;
    std::vector<long long> meeting_tokens;
    for (int j = 0; j < runs; ++j) {
      std::vector<RateDecision> run_votes;
      for (int k = 0; k < agents; ++k) {
        run_votes.push_back(bps(25 * uniform_int(rng, -4, 4)));
      }
      meeting_votes.push_back(std::move(run_votes));
      meeting_decisions.push_back(bps(25 * uniform_int(rng, -4, 4)));
      meeting_tokens.push_back(uniform_int(rng, 0, 5000));
    }
    input.votes.push_back(std::move(meeting_votes));
    input.decisions.push_back(std::move(meeting_decisions));
    input.tokens.push_back(std::move(meeting_tokens));
  }
  return input;
}

}  // namespace

TEST_CASE("total accuracy: hand counts") {
  CHECK(total_accuracy(bps_list({0, 25, -25}), bps_list({0, 25, 0})) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(total_accuracy(bps_list({0, 0}), bps_list({0, 0})) == 1.0);
  CHECK_THROWS_AS(total_accuracy(bps_list({0}), bps_list({0, 25})),
                  ValidationError);
  CHECK_THROWS_AS(total_accuracy({}, {}), ValidationError);
}

TEST_CASE("agent accuracy: averages the run dimension inside each meeting") {
  // 1 meeting, 1 run, votes (hold, hold, hike25), actual hold -> 2/3.
  std::vector<std::vector<std::vector<RateDecision>>> votes = {
      {bps_list({0, 0, 25})}};
  CHECK(agent_accuracy(votes, bps_list({0})) == doctest::Approx(2.0 / 3.0));

  // Meeting weights are equal even when run counts differ: meeting 1 has
  // 1 run (all correct), meeting 2 has 4 runs (all wrong) -> (1 + 0) / 2.
  votes = {{bps_list({0, 0})},
           {bps_list({25, 25}), bps_list({25, 25}), bps_list({25, 25}),
            bps_list({25, 25})}};
  CHECK(agent_accuracy(votes, bps_list({0, 0})) == doctest::Approx(0.5));
}

TEST_CASE("voting stability: modal agreement across runs") {
  // One agent, 5 runs, (H,H,H,H,C) -> mode H, 4/5.
  std::vector<std::vector<std::vector<RateDecision>>> votes = {
      {bps_list({25}), bps_list({25}), bps_list({25}), bps_list({25}),
       bps_list({-25})}};
  CHECK(voting_stability(votes) == doctest::Approx(0.8));

  // Two agents: 5/5 stable and 3/5 stable -> (5 + 3) / 10.
  votes = {{bps_list({0, 25}), bps_list({0, 25}), bps_list({0, 25}),
            bps_list({0, 0}), bps_list({0, 0})}};
  CHECK(voting_stability(votes) == doctest::Approx(0.8));

  // R = 1: the mode of a singleton is itself.
  votes = {{bps_list({0, 25, -50})}, {bps_list({100})}};
  CHECK(voting_stability(votes) == 1.0);

  // Mode ties break to the smallest delta: (0, 25) -> mode 0.
  votes = {{bps_list({0}), bps_list({25})}};
  CHECK(voting_stability(votes) == doctest::Approx(0.5));
}

TEST_CASE("average tokens and MAE hand values") {
  CHECK(average_tokens({{100, 300}}) == doctest::Approx(200.0));
  CHECK(average_tokens({{100}, {300}}) == doctest::Approx(200.0));
  CHECK_THROWS_AS(average_tokens({}), ValidationError);

  CHECK(mae(bps_list({25, 0}), bps_list({0, -50})) == doctest::Approx(0.375));
  CHECK(mae(bps_list({0, 0}), bps_list({0, 0})) == 0.0);
  // One 25-bp miss over 16 meetings -> 0.25/16.
  std::vector<RateDecision> preds(16, bps(0)), actuals(16, bps(0));
  preds[3] = bps(25);
  CHECK(mae(preds, actuals) == doctest::Approx(0.015625));
}

TEST_CASE("directional accuracy uses signs only") {
  CHECK(directional_accuracy(bps_list({-25}), bps_list({-50})) == 1.0);
  CHECK(directional_accuracy(bps_list({0}), bps_list({25})) == 0.0);
  CHECK(directional_accuracy(bps_list({25, -25, 0}), bps_list({50, -100, 0})) ==
        1.0);
}

TEST_CASE("modal decision tie rules: closest to zero, then negative") {
  CHECK(modal_decision(bps_list({0, 0, 25})).bps() == 0);
  CHECK(modal_decision(bps_list({25, -25})).bps() == -25);
  CHECK(modal_decision(bps_list({0, 25})).bps() == 0);
  CHECK(modal_decision(bps_list({50, -25})).bps() == -25);
  CHECK(modal_decision(bps_list({75})).bps() == 75);
  CHECK(modal_decision(bps_list({50, 50, -25, -25, -25})).bps() == -25);
  CHECK_THROWS_AS(modal_decision({}), ValidationError);
}

TEST_CASE("tokenizer: lowercase maximal alphanumeric runs") {
  CHECK(tokenize("Rates, held STEADY!") ==
        std::vector<std::string>{"rates", "held", "steady"});
  CHECK(tokenize("a1-b2") == std::vector<std::string>{"a1", "b2"});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("tf-idf cosine: trivial and hand-computed pairs") {
  CHECK(semantic_similarity({"rates held steady"}, {"rates held steady"}) ==
        doctest::Approx(1.0));
  CHECK(semantic_similarity({"alpha beta"}, {"gamma delta"}) ==
        doctest::Approx(0.0));

  // Hand TF-IDF on the 3-term vocabulary {held, rates, steady}:
  // idf(rates) = idf(held) = ln(3/3)+1 = 1, idf(steady) = ln(3/2)+1.
  // cos = 2 / (sqrt(2 + (ln(3/2)+1)^2) * sqrt(2)).
  const double idf_steady = std::log(3.0 / 2.0) + 1.0;
  const double expected =
      2.0 / (std::sqrt(2.0 + idf_steady * idf_steady) * std::sqrt(2.0));
  CHECK(semantic_similarity({"rates held steady"}, {"rates held"}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.7092972666062737).epsilon(1e-12));

  // A zero-vector pair contributes 0 to the mean.
  CHECK(semantic_similarity({"", "same text"}, {"words here", "same text"}) ==
        doctest::Approx(0.5));
}

TEST_CASE("tf-idf similarity is symmetric and duplication-invariant") {
  Rng rng(777);
  const std::vector<std::string> bank = {
      "rates held steady amid cooling inflation",
      "the committee lowered the target range",
      "labor markets remain resilient",
      "growth slowed in the fourth quarter",
      "inflation expectations stay anchored"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> left, right;
    const int n = uniform_int(rng, 1, 4);
    for (int i = 0; i < n; ++i) {
      left.push_back(bank[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(bank.size()) - 1))]);
      right.push_back(bank[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(bank.size()) - 1))]);
    }
    double forward = semantic_similarity(left, right);
    double backward = semantic_similarity(right, left);
    CHECK(forward == doctest::Approx(backward).epsilon(1e-12));
    CHECK(forward >= 0.0);
    CHECK(forward <= 1.0 + 1e-12);

    // Duplicating every document's tokens rescales tf but not df, so the
    // cosine is unchanged.
    std::vector<std::string> left2, right2;
    for (const auto& d : left) left2.push_back(d + " " + d);
    for (const auto& d : right) right2.push_back(d + " " + d);
    CHECK(semantic_similarity(left2, right2) ==
          doctest::Approx(forward).epsilon(1e-12));
  }
}

TEST_CASE("tf-idf model internals: sorted vocabulary, cosine edge cases") {
  TfIdfModel model = TfIdfModel::fit({"beta alpha", "alpha gamma"});
  CHECK(model.vocabulary() ==
        std::vector<std::string>{"alpha", "beta", "gamma"});
  CHECK(model.idf().size() == 3);
  // "alpha" appears in both docs: idf = ln(3/3)+1 = 1.
  CHECK(model.idf()[0] == doctest::Approx(1.0));

  std::vector<double> v = model.embed("alpha alpha beta");
  CHECK(v.size() == 3);
  CHECK(v[0] == doctest::Approx(2.0));  // tf 2 x idf 1

  CHECK(TfIdfModel::cosine(model.embed(""), model.embed("alpha"))
        == 0.0);
  CHECK(TfIdfModel::cosine(model.embed("unseen words only"), model.embed("alpha"))
        == 0.0);
  CHECK_THROWS_AS(TfIdfModel::fit({}), ValidationError);
  CHECK_THROWS_AS(TfIdfModel::cosine({1.0}, {1.0, 0.0}), ValidationError);
}

TEST_CASE("metrics equal brute-force oracles on random instances") {
  Rng rng(424242);
  for (int trial = 0; trial < 400; ++trial) {
    MetricsInput input = random_input(rng);
    std::vector<RateDecision> preds = headline_predictions(input);

    for (std::size_t i = 0; i < preds.size(); ++i) {
      CHECK(preds[i] == ref::ref_modal_decision(input.decisions[i]));
    }
    CHECK(total_accuracy(preds, input.actuals) ==
          ref::ref_total_accuracy(preds, input.actuals));
    CHECK(agent_accuracy(input.votes, input.actuals) ==
          ref::ref_agent_accuracy(input.votes, input.actuals));
    CHECK(voting_stability(input.votes) == ref::ref_voting_stability(input.votes));
    CHECK(average_tokens(input.tokens) == ref::ref_average_tokens(input.tokens));
    CHECK(mae(preds, input.actuals) == ref::ref_mae(preds, input.actuals));
    CHECK(directional_accuracy(preds, input.actuals) ==
          ref::ref_directional_accuracy(preds, input.actuals));

    MetricsReport report = compute_metrics(input);
    CHECK(report.total_accuracy >= 0.0);
    CHECK(report.total_accuracy <= 1.0);
    CHECK(report.agent_accuracy >= 0.0);
    CHECK(report.agent_accuracy <= 1.0);
    CHECK(report.voting_stability >= 0.0);
    CHECK(report.voting_stability <= 1.0);
    CHECK(report.directional_accuracy >= 0.0);
    CHECK(report.directional_accuracy <= 1.0);
    CHECK(report.mae >= 0.0);
    REQUIRE(report.avg_tokens.has_value());
    CHECK(*report.avg_tokens >= 0.0);
    CHECK_FALSE(report.similarity.has_value());  // no statements supplied
  }
}

TEST_CASE("tf-idf similarity equals its oracle on random statement pairs") {
  Rng rng(99);
  const std::vector<std::string> bank = {
      "rates held steady",
      "the committee raised the target range by 25 basis points",
      "inflation remains elevated",
      "",  // empty statements exercise the zero-vector path
      "growth is moderating while hiring stays solid"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> predicted, actual;
    const int n = uniform_int(rng, 1, 5);
    bool any_tokens = false;
    for (int i = 0; i < n; ++i) {
      predicted.push_back(bank[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(bank.size()) - 1))]);
      actual.push_back(bank[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(bank.size()) - 1))]);
      any_tokens = any_tokens || !predicted.back().empty() || !actual.back().empty();
    }
    if (!any_tokens) continue;  // all-empty corpus is a validation error
    CHECK(semantic_similarity(predicted, actual) ==
          ref::ref_semantic_similarity(predicted, actual));
  }
}

TEST_CASE("metrics input validation rejects shape problems") {
  MetricsInput input;
  CHECK_THROWS_AS(input.validate(), ValidationError);  // empty

  input.meeting_ids = {"a"};
  input.actuals = bps_list({0});
  input.votes = {{bps_list({0, 0})}};
  input.decisions = {bps_list({0})};
  CHECK_NOTHROW(input.validate());

  MetricsInput bad = input;
  bad.decisions[0] = bps_list({0, 0});  // 2 decisions for 1 run of votes
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.votes[0].push_back(bps_list({0, 0, 0}));  // agent count changes mid-meeting
  bad.decisions[0] = bps_list({0, 0});
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.votes[0].clear();  // no runs
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.tokens = {{100, 200}};  // 2 token rows for 1 run
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.tokens = {{-1}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.predicted_statements = {"x"};
  bad.actual_statements = {};  // statement lists must pair up
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = input;
  bad.actuals = bps_list({0, 25});  // meeting-count disagreement
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("predictions bundle round trip preserves every field") {
  MetricsInput input;
  input.meeting_ids = {"2024-11-07", "2024-12-18"};
  input.actuals = bps_list({-25, -25});
  input.votes = {{bps_list({-25, -25, 0}), bps_list({-25, -25, -25})},
                 {bps_list({-25, 0, 0})}};
  input.decisions = {bps_list({-25, -25}), bps_list({0})};
  input.tokens = {{1200, 1400}, {900}};
  input.predicted_statements = {"lowered the range", "held the range"};
  input.actual_statements = {"the range was lowered", "the range was lowered"};
  input.validate();

  TempDir tmp;
  auto file = tmp.path() / "predictions.json";
  save_predictions(file, input);
  MetricsInput loaded = load_predictions(file);

  CHECK(loaded.meeting_ids == input.meeting_ids);
  CHECK(loaded.actuals == input.actuals);
  CHECK(loaded.votes == input.votes);
  CHECK(loaded.decisions == input.decisions);
  CHECK(loaded.tokens == input.tokens);
  CHECK(loaded.predicted_statements == input.predicted_statements);
  CHECK(loaded.actual_statements == input.actual_statements);

  // Metrics agree between the in-memory and reloaded bundles.
  MetricsReport a = compute_metrics(input);
  MetricsReport b = compute_metrics(loaded);
  CHECK(a.total_accuracy == b.total_accuracy);
  CHECK(a.mae == b.mae);
  REQUIRE(a.similarity.has_value());
  REQUIRE(b.similarity.has_value());
  CHECK(*a.similarity == *b.similarity);

  // Saving the reloaded bundle reproduces the file byte for byte.
  auto file2 = tmp.path() / "predictions2.json";
  save_predictions(file2, loaded);
  CHECK(testsupport::read_file(file) == testsupport::read_file(file2));

  CHECK_THROWS_AS(load_predictions(tmp.path() / "absent.json"), IoError);
  auto bad = tmp.write("bad.json", "{not json");
  CHECK_THROWS_AS(load_predictions(bad), ParseError);
  auto empty = tmp.write("empty.json", "{\"meetings\": []}");
  CHECK_THROWS_AS(load_predictions(empty), ParseError);
}

TEST_CASE("metrics report serializes optional fields only when present") {
  MetricsReport report;
  report.n_meetings = 16;
  report.total_accuracy = 0.9375;
  report.agent_accuracy = 0.875;
  report.voting_stability = 14.0 / 15.0;
  report.mae = 0.015625;
  report.directional_accuracy = 1.0;

  std::string text = metrics_to_json(report);
  CHECK(text.find("\"total_accuracy\": 0.9375") != std::string::npos);
  CHECK(text.find("\"n_meetings\": 16") != std::string::npos);
  CHECK(text.find("similarity") == std::string::npos);
  CHECK(text.find("avg_tokens") == std::string::npos);

  report.similarity = 0.93;
  report.avg_tokens = 60464.0;
  text = metrics_to_json(report);
  CHECK(text.find("\"similarity\": 0.93") != std::string::npos);
  CHECK(text.find("\"avg_tokens\": 60464.0") != std::string::npos);
}

TEST_CASE("ols recovers planted coefficients on noiseless data") {
  // y = 1 + 2 x1 - 0.5 x2
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    double x1 = -5.0 + 10.0 * uniform_double(rng);
    double x2 = -3.0 + 6.0 * uniform_double(rng);
    X.push_back({1.0, x1, x2});
    y.push_back(1.0 + 2.0 * x1 - 0.5 * x2);
  }
  std::vector<double> beta = fit_linear_baseline(X, y);
  REQUIRE(beta.size() == 3);
  CHECK(beta[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(beta[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(beta[2] == doctest::Approx(-0.5).epsilon(1e-9));

  // Residuals orthogonal to every design column.
  for (std::size_t col = 0; col < 3; ++col) {
    double dot = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double residual = y[i] - lr_raw_prediction(beta, X[i]);
      dot += residual * X[i][col];
    }
    CHECK(std::abs(dot) < 1e-8);
  }
}

TEST_CASE("ols ridge fallback handles a duplicated column") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  Rng rng(32);
  for (int i = 0; i < 30; ++i) {
    double x1 = -5.0 + 10.0 * uniform_double(rng);
    X.push_back({1.0, x1, x1});  // exact duplicate -> rank deficient
    y.push_back(3.0 + 4.0 * x1);
  }
  std::vector<double> beta = fit_linear_baseline(X, y);
  REQUIRE(beta.size() == 3);
  // Individual coefficients are not identified, but predictions are.
  for (int i = 0; i < 5; ++i) {
    double x1 = -5.0 + 10.0 * uniform_double(rng);
    CHECK(lr_raw_prediction(beta, {1.0, x1, x1}) ==
          doctest::Approx(3.0 + 4.0 * x1).epsilon(1e-6));
  }
}

TEST_CASE("ols rejects underdetermined systems") {
  CHECK_THROWS_AS(fit_linear_baseline({{1.0, 2.0}, {1.0, 3.0}}, {1.0, 2.0}),
                  ValidationError);  // m == p
  CHECK_THROWS_AS(fit_linear_baseline({{1.0, 2.0, 3.0}}, {1.0}), ValidationError);
  CHECK_THROWS_AS(fit_linear_baseline({}, {}), ValidationError);
  CHECK_THROWS_AS(fit_linear_baseline({{1.0}, {1.0, 2.0}, {1.0}}, {1.0, 2.0, 3.0}),
                  ValidationError);  // ragged
}

TEST_CASE("lr_predict snaps the continuous output to the grid") {
  // Raw output in percentage points: 0.3 pp -> +25 bps, -0.6 pp -> -50 bps.
  CHECK(lr_predict({0.3}, {1.0}).bps() == 25);
  CHECK(lr_predict({-0.6}, {1.0}).bps() == -50);
  CHECK(lr_predict({0.0}, {1.0}).bps() == 0);
  CHECK(lr_predict({0.125}, {1.0}).bps() == 25);  // midpoint away from zero
  CHECK(lr_predict({9.0}, {1.0}).bps() == 100);   // clamped at the bound
  CHECK_THROWS_AS(lr_predict({1.0, 2.0}, {1.0}), ValidationError);
}

TEST_CASE("lr feature builder encodes numerics plus drop-first one-hots") {
  StructuredIndicators a;
  a.pce_yoy = 2.0; a.cpi_yoy = 3.0; a.inflation_expect_1y = 2.5;
  a.tb3m = 5.0; a.tb6m = 4.8; a.m2_supply = 20800.0; a.bbk_gdp = 2.1;
  a.unemployment = 3.9; a.vix = 13.0;
  a.fed_chair = "Powell"; a.white_house_party = "Democratic";
  a.prev_fftr = 5.375; a.prev_change_bps = 25;

  StructuredIndicators b = a;
  b.fed_chair = "Yellen";
  b.white_house_party = "Republican";

  LrFeatureBuilder builder = LrFeatureBuilder::fit({a, b});
  // 12 base columns + 1 chair dummy + 1 party dummy.
  CHECK(builder.dimension() == 14);

  std::vector<double> row_a = builder.encode(a);
  std::vector<double> row_b = builder.encode(b);
  REQUIRE(row_a.size() == 14);
  CHECK(row_a[0] == 1.0);            // intercept
  CHECK(row_a[1] == doctest::Approx(2.0));
  CHECK(row_a[11] == doctest::Approx(25.0));  // prev_change_bps
  // Sorted levels: chair {Powell, Yellen} -> dummy = 1{Yellen};
  // party {Democratic, Republican} -> dummy = 1{Republican}.
  CHECK(row_a[12] == 0.0);
  CHECK(row_a[13] == 0.0);
  CHECK(row_b[12] == 1.0);
  CHECK(row_b[13] == 1.0);

  // A single-level categorical contributes no columns.
  LrFeatureBuilder constant = LrFeatureBuilder::fit({a});
  CHECK(constant.dimension() == 12);
  CHECK_THROWS_AS(LrFeatureBuilder::fit({}), ValidationError);
}
