#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsight/core.hpp"

namespace fedsight::evaluate {

// Inputs can be ragged in the run dimension: failed runs are dropped before
// metrics, so meeting i carries R_i successful runs.
struct MetricsInput {
  std::vector<std::string> meeting_ids;                    // [n]
  std::vector<std::vector<std::vector<RateDecision>>> votes;  // [n][R_i][K]
  std::vector<std::vector<RateDecision>> decisions;        // [n][R_i]
  std::vector<RateDecision> actuals;                       // [n]
  std::vector<std::vector<long long>> tokens;              // [n][R_i], optional
  std::vector<std::string> predicted_statements;           // [n], optional
  std::vector<std::string> actual_statements;              // [n], optional

  void validate() const;  // throws ValidationError on shape problems
  bool has_tokens() const { return !tokens.empty(); }
  bool has_statements() const { return !predicted_statements.empty(); }
};

struct MetricsReport {
  double total_accuracy = 0.0;
  double agent_accuracy = 0.0;
  double voting_stability = 0.0;
  std::optional<double> similarity;  // needs statements
  std::optional<double> avg_tokens;  // needs token counts
  double mae = 0.0;                  // percentage points
  double directional_accuracy = 0.0;
  int n_meetings = 0;
};

// Headline prediction for one meeting: the modal decision over its runs;
// ties prefer the delta closest to 0, then the negative one.
RateDecision modal_decision(const std::vector<RateDecision>& decisions);
std::vector<RateDecision> headline_predictions(const MetricsInput& input);

// ---------------------------------------------------------------------------
// Individual metrics
// ---------------------------------------------------------------------------

double total_accuracy(const std::vector<RateDecision>& preds,
                      const std::vector<RateDecision>& actuals);

// (1/n) sum_i (1 / (R_i * K)) sum_{j,k} 1{vote = actual_i}: the run
// dimension is averaged inside each meeting.
double agent_accuracy(const std::vector<std::vector<std::vector<RateDecision>>>& votes,
                      const std::vector<RateDecision>& actuals);

// Modal vote per (meeting, agent) across runs (ties -> smallest delta), then
// the mean over every (i, j, k) of agreement with that mode.
double voting_stability(const std::vector<std::vector<std::vector<RateDecision>>>& votes);

double average_tokens(const std::vector<std::vector<long long>>& tokens);

double mae(const std::vector<RateDecision>& preds,
           const std::vector<RateDecision>& actuals);

// sign(pred) == sign(actual); the sign of 0 is 0.
double directional_accuracy(const std::vector<RateDecision>& preds,
                            const std::vector<RateDecision>& actuals);

// TF-IDF embedding: tokens are lowercased maximal alphanumeric runs;
// tf = raw count, idf = ln((1 + n_docs) / (1 + df)) + 1 over the fitted
// corpus; vectors are dense over the sorted vocabulary.
class TfIdfModel {
 public:
  static TfIdfModel fit(const std::vector<std::string>& corpus);

  std::vector<double> embed(const std::string& text) const;
  static double cosine(const std::vector<double>& a, const std::vector<double>& b);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }

 private:
  std::vector<std::string> vocabulary_;  // sorted
  std::vector<double> idf_;
};

std::vector<std::string> tokenize(const std::string& text);

// Mean cosine over (predicted, actual) statement pairs, TF-IDF fitted on the
// union of both sides; a pair with a zero vector contributes 0.
double semantic_similarity(const std::vector<std::string>& predicted,
                           const std::vector<std::string>& actual);

// All metrics over one input bundle.
MetricsReport compute_metrics(const MetricsInput& input);

// ---------------------------------------------------------------------------
// predictions.json bundle
// ---------------------------------------------------------------------------

MetricsInput load_predictions(const std::filesystem::path& file);
void save_predictions(const std::filesystem::path& file, const MetricsInput& input);

std::string metrics_to_json(const MetricsReport& report);

// ---------------------------------------------------------------------------
// Linear-regression baseline
// ---------------------------------------------------------------------------

// OLS via normal equations; on rank deficiency retries with ridge 1e-8.
// X must already contain the intercept column. Throws when rows <= columns.
std::vector<double> fit_linear_baseline(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y);

double lr_raw_prediction(const std::vector<double>& coefficients,
                         const std::vector<double>& x);
RateDecision lr_predict(const std::vector<double>& coefficients,
                        const std::vector<double>& x);

// Design row for one meeting: intercept, the numeric indicator fields, and
// drop-first one-hot encodings of the categorical fields (level sets taken
// from the training snapshots, sorted).
class LrFeatureBuilder {
 public:
  static LrFeatureBuilder fit(const std::vector<StructuredIndicators>& training);
  std::vector<double> encode(const StructuredIndicators& ind) const;
  std::size_t dimension() const;

 private:
  std::vector<std::string> chair_levels_;  // sorted; first level dropped
  std::vector<std::string> party_levels_;
};

}  // namespace fedsight::evaluate
