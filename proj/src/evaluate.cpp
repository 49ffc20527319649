#include "fedsight/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"

namespace fedsight::evaluate {

namespace {

using nlohmann::json;

// Loops shorter than this run serially; the OpenMP path pays off only on
// bulk inputs (benchmarks, property sweeps).
constexpr std::size_t kParallelThreshold = 16;

}  // namespace

void MetricsInput::validate() const {
  const std::size_t n = meeting_ids.size();
  if (n == 0) throw ValidationError("metrics input needs at least one meeting");
  if (votes.size() != n || decisions.size() != n || actuals.size() != n) {
    throw ValidationError("metrics input shapes disagree on the meeting count");
  }
  std::size_t agents = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (votes[i].empty() || decisions[i].empty()) {
      throw ValidationError("meeting " + meeting_ids[i] + " has no runs");
    }
    if (votes[i].size() != decisions[i].size()) {
      throw ValidationError("meeting " + meeting_ids[i] +
                            ": votes and decisions disagree on the run count");
    }
    for (const auto& run : votes[i]) {
      if (run.empty()) {
        throw ValidationError("meeting " + meeting_ids[i] + " has a run with no votes");
      }
      if (agents == 0) agents = run.size();
      if (run.size() != agents) {
        throw ValidationError("meeting " + meeting_ids[i] +
                              ": agent count differs between runs");
      }
    }
  }
  if (!tokens.empty()) {
    if (tokens.size() != n) {
      throw ValidationError("token table disagrees on the meeting count");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (tokens[i].size() != decisions[i].size()) {
        throw ValidationError("meeting " + meeting_ids[i] +
                              ": token table disagrees on the run count");
      }
      for (long long t : tokens[i]) {
        if (t < 0) throw ValidationError("negative token count");
      }
    }
  }
  if (!predicted_statements.empty() || !actual_statements.empty()) {
    if (predicted_statements.size() != n || actual_statements.size() != n) {
      throw ValidationError("statement lists disagree on the meeting count");
    }
  }
}

RateDecision modal_decision(const std::vector<RateDecision>& decisions) {
  if (decisions.empty()) {
    throw ValidationError("modal decision of an empty run list is undefined");
  }
  std::map<int, int> counts;
  for (const auto& d : decisions) ++counts[d.bps()];
  int best_bps = 0;
  int best_count = -1;
  for (const auto& [bps, count] : counts) {
    if (count > best_count) {
      best_bps = bps;
      best_count = count;
      continue;
    }
    if (count == best_count) {
      // Tie: closest to zero wins; between d and -d the negative one wins.
      int a = std::abs(bps), b = std::abs(best_bps);
      if (a < b || (a == b && bps < best_bps)) best_bps = bps;
    }
  }
  return RateDecision::from_bps(best_bps);
}

std::vector<RateDecision> headline_predictions(const MetricsInput& input) {
  input.validate();
  std::vector<RateDecision> preds(input.decisions.size());
  for (std::size_t i = 0; i < input.decisions.size(); ++i) {
    preds[i] = modal_decision(input.decisions[i]);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// Metrics. Parallel kernels fill per-meeting slots, then reduce serially in
// index order so results are bitwise identical to the serial path.
// ---------------------------------------------------------------------------

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": length mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw ValidationError(std::string(what) + ": empty input");
}

}  // namespace

double total_accuracy(const std::vector<RateDecision>& preds,
                      const std::vector<RateDecision>& actuals) {
  check_lengths(preds.size(), actuals.size(), "total_accuracy");
  long long hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == actuals[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double agent_accuracy(
    const std::vector<std::vector<std::vector<RateDecision>>>& votes,
    const std::vector<RateDecision>& actuals) {
  check_lengths(votes.size(), actuals.size(), "agent_accuracy");
  const std::size_t n = votes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (votes[i].empty() || votes[i][0].empty()) {
      throw ValidationError("agent_accuracy: meeting without votes");
    }
  }
  std::vector<double> per_meeting(n, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    long long hits = 0;
    long long total = 0;
    for (const auto& run : votes[i]) {
      for (const auto& vote : run) {
        hits += vote == actuals[i] ? 1 : 0;
        ++total;
      }
    }
    per_meeting[i] = static_cast<double>(hits) / static_cast<double>(total);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += per_meeting[i];
  return sum / static_cast<double>(n);
}

double voting_stability(
    const std::vector<std::vector<std::vector<RateDecision>>>& votes) {
  if (votes.empty()) throw ValidationError("voting_stability: empty input");
  const std::size_t n = votes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (votes[i].empty() || votes[i][0].empty()) {
      throw ValidationError("voting_stability: meeting without votes");
    }
  }
  std::vector<long long> matches(n, 0);
  std::vector<long long> counts(n, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t runs = votes[i].size();
    const std::size_t agents = votes[i][0].size();
    for (std::size_t k = 0; k < agents; ++k) {
      // Modal vote of agent k across runs; ties -> smallest delta.
      std::map<int, int> tallies;
      for (std::size_t j = 0; j < runs; ++j) ++tallies[votes[i][j][k].bps()];
      int mode = 0;
      int best = -1;
      for (const auto& [bps, count] : tallies) {  // ascending bps
        if (count > best) {
          best = count;
          mode = bps;
        }
      }
      for (std::size_t j = 0; j < runs; ++j) {
        matches[i] += votes[i][j][k].bps() == mode ? 1 : 0;
        ++counts[i];
      }
    }
  }

  long long total_matches = 0;
  long long total_votes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total_matches += matches[i];
    total_votes += counts[i];
  }
  return static_cast<double>(total_matches) / static_cast<double>(total_votes);
}

double average_tokens(const std::vector<std::vector<long long>>& tokens) {
  long long sum = 0;
  long long count = 0;
  for (const auto& row : tokens) {
    for (long long t : row) {
      sum += t;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("average_tokens: empty input");
  return static_cast<double>(sum) / static_cast<double>(count);
}

double mae(const std::vector<RateDecision>& preds,
           const std::vector<RateDecision>& actuals) {
  check_lengths(preds.size(), actuals.size(), "mae");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += std::abs(preds[i].percentage_points() - actuals[i].percentage_points());
  }
  return sum / static_cast<double>(preds.size());
}

double directional_accuracy(const std::vector<RateDecision>& preds,
                            const std::vector<RateDecision>& actuals) {
  check_lengths(preds.size(), actuals.size(), "directional_accuracy");
  long long hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].sign() == actuals[i].sign()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TfIdfModel TfIdfModel::fit(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw ValidationError("TF-IDF fit on an empty corpus");
  std::map<std::string, int> document_frequency;
  for (const auto& doc : corpus) {
    std::vector<std::string> tokens = tokenize(doc);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto& token : tokens) ++document_frequency[token];
  }
  TfIdfModel model;
  const double n_docs = static_cast<double>(corpus.size());
  for (const auto& [token, df] : document_frequency) {  // map: sorted vocab
    model.vocabulary_.push_back(token);
    model.idf_.push_back(std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
  }
  return model;
}

std::vector<double> TfIdfModel::embed(const std::string& text) const {
  std::vector<double> vec(vocabulary_.size(), 0.0);
  for (const auto& token : tokenize(text)) {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), token);
    if (it != vocabulary_.end() && *it == token) {
      vec[static_cast<std::size_t>(it - vocabulary_.begin())] += 1.0;
    }
  }
  for (std::size_t t = 0; t < vec.size(); ++t) vec[t] *= idf_[t];
  return vec;
}

double TfIdfModel::cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double semantic_similarity(const std::vector<std::string>& predicted,
                           const std::vector<std::string>& actual) {
  check_lengths(predicted.size(), actual.size(), "semantic_similarity");
  std::vector<std::string> corpus;
  corpus.reserve(predicted.size() + actual.size());
  corpus.insert(corpus.end(), predicted.begin(), predicted.end());
  corpus.insert(corpus.end(), actual.begin(), actual.end());
  TfIdfModel model = TfIdfModel::fit(corpus);

  const std::size_t n = predicted.size();
  std::vector<double> sims(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    sims[i] = TfIdfModel::cosine(model.embed(predicted[i]), model.embed(actual[i]));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += sims[i];
  return sum / static_cast<double>(n);
}

MetricsReport compute_metrics(const MetricsInput& input) {
  input.validate();
  MetricsReport report;
  report.n_meetings = static_cast<int>(input.meeting_ids.size());

  std::vector<RateDecision> preds = headline_predictions(input);
  report.total_accuracy = total_accuracy(preds, input.actuals);
  report.agent_accuracy = agent_accuracy(input.votes, input.actuals);
  report.voting_stability = voting_stability(input.votes);
  report.mae = mae(preds, input.actuals);
  report.directional_accuracy = directional_accuracy(preds, input.actuals);
  if (input.has_tokens()) report.avg_tokens = average_tokens(input.tokens);
  if (input.has_statements()) {
    report.similarity =
        semantic_similarity(input.predicted_statements, input.actual_statements);
  }
  return report;
}

// ---------------------------------------------------------------------------
// predictions.json
// ---------------------------------------------------------------------------

MetricsInput load_predictions(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open predictions file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.contains("meetings") || !doc["meetings"].is_array() ||
      doc["meetings"].empty()) {
    throw ParseError(file.filename().string() + ": missing 'meetings' array");
  }

  MetricsInput input;
  bool any_tokens = false;
  bool any_statements = false;
  for (const auto& item : doc["meetings"]) {
    if (!item.contains("meeting_id") || !item.contains("actual_bps") ||
        !item.contains("decisions_bps") || !item.contains("votes_bps")) {
      throw ParseError(file.filename().string() +
                       ": meeting entry missing required fields");
    }
    input.meeting_ids.push_back(item["meeting_id"].get<std::string>());
    input.actuals.push_back(RateDecision::from_bps(item["actual_bps"].get<int>()));

    std::vector<RateDecision> decisions;
    for (const auto& d : item["decisions_bps"]) {
      decisions.push_back(RateDecision::from_bps(d.get<int>()));
    }
    input.decisions.push_back(std::move(decisions));

    std::vector<std::vector<RateDecision>> votes;
    for (const auto& run : item["votes_bps"]) {
      std::vector<RateDecision> row;
      for (const auto& v : run) row.push_back(RateDecision::from_bps(v.get<int>()));
      votes.push_back(std::move(row));
    }
    input.votes.push_back(std::move(votes));

    if (item.contains("tokens")) {
      any_tokens = true;
      input.tokens.push_back(item["tokens"].get<std::vector<long long>>());
    } else {
      input.tokens.emplace_back();
    }
    if (item.contains("predicted_statement") || item.contains("actual_statement")) {
      any_statements = true;
    }
    input.predicted_statements.push_back(item.value("predicted_statement", ""));
    input.actual_statements.push_back(item.value("actual_statement", ""));
  }
  if (!any_tokens) input.tokens.clear();
  if (!any_statements) {
    input.predicted_statements.clear();
    input.actual_statements.clear();
  }
  input.validate();
  return input;
}

void save_predictions(const std::filesystem::path& file, const MetricsInput& input) {
  input.validate();
  json meetings = json::array();
  for (std::size_t i = 0; i < input.meeting_ids.size(); ++i) {
    json item;
    item["meeting_id"] = input.meeting_ids[i];
    item["actual_bps"] = input.actuals[i].bps();
    json decisions = json::array();
    for (const auto& d : input.decisions[i]) decisions.push_back(d.bps());
    item["decisions_bps"] = decisions;
    json votes = json::array();
    for (const auto& run : input.votes[i]) {
      json row = json::array();
      for (const auto& v : run) row.push_back(v.bps());
      votes.push_back(row);
    }
    item["votes_bps"] = votes;
    if (input.has_tokens()) item["tokens"] = input.tokens[i];
    if (input.has_statements()) {
      item["predicted_statement"] = input.predicted_statements[i];
      item["actual_statement"] = input.actual_statements[i];
    }
    meetings.push_back(item);
  }
  json doc;
  doc["schema_version"] = 1;
  doc["meetings"] = meetings;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write predictions file " + file.string());
  out << doc.dump(2) << '\n';
}

std::string metrics_to_json(const MetricsReport& report) {
  json doc;
  doc["n_meetings"] = report.n_meetings;
  doc["total_accuracy"] = report.total_accuracy;
  doc["agent_accuracy"] = report.agent_accuracy;
  doc["voting_stability"] = report.voting_stability;
  doc["mae"] = report.mae;
  doc["directional_accuracy"] = report.directional_accuracy;
  if (report.similarity.has_value()) doc["similarity"] = *report.similarity;
  if (report.avg_tokens.has_value()) doc["avg_tokens"] = *report.avg_tokens;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Linear-regression baseline
// ---------------------------------------------------------------------------

namespace {

// Solves A x = b by Gaussian elimination with partial pivoting; returns
// false when a pivot collapses (rank deficiency).
bool solve_linear_system(std::vector<std::vector<double>> A, std::vector<double> b,
                         std::vector<double>& x) {
  const std::size_t p = A.size();
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < p; ++row) {
      if (std::abs(A[row][col]) > std::abs(A[pivot][col])) pivot = row;
    }
    if (std::abs(A[pivot][col]) < 1e-12) return false;
    std::swap(A[col], A[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < p; ++row) {
      double factor = A[row][col] / A[col][col];
      for (std::size_t k = col; k < p; ++k) A[row][k] -= factor * A[col][k];
      b[row] -= factor * b[col];
    }
  }
  x.assign(p, 0.0);
  for (std::size_t row = p; row-- > 0;) {
    double sum = b[row];
    for (std::size_t k = row + 1; k < p; ++k) sum -= A[row][k] * x[k];
    x[row] = sum / A[row][row];
  }
  return true;
}

}  // namespace

std::vector<double> fit_linear_baseline(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y) {
  const std::size_t m = X.size();
  if (m == 0 || y.size() != m) {
    throw ValidationError("fit_linear_baseline: empty design or length mismatch");
  }
  const std::size_t p = X.front().size();
  for (const auto& row : X) {
    if (row.size() != p) {
      throw ValidationError("fit_linear_baseline: ragged design matrix");
    }
  }
  if (m <= p) {
    throw ValidationError("fit_linear_baseline: underdetermined system (" +
                          std::to_string(m) + " rows for " + std::to_string(p) +
                          " columns)");
  }

  // Normal equations: (X^T X) beta = X^T y.
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += X[i][a] * y[i];
      for (std::size_t b = a; b < p; ++b) xtx[a][b] += X[i][a] * X[i][b];
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];
  }

  std::vector<double> beta;
  if (solve_linear_system(xtx, xty, beta)) return beta;

  // Rank deficiency: ridge fallback with a tiny diagonal bump.
  for (std::size_t a = 0; a < p; ++a) xtx[a][a] += 1e-8;
  if (!solve_linear_system(xtx, xty, beta)) {
    throw ValidationError("fit_linear_baseline: singular normal equations even "
                          "with ridge fallback");
  }
  return beta;
}

double lr_raw_prediction(const std::vector<double>& coefficients,
                         const std::vector<double>& x) {
  if (coefficients.size() != x.size()) {
    throw ValidationError("lr_predict: coefficient/feature length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += coefficients[i] * x[i];
  return sum;
}

RateDecision lr_predict(const std::vector<double>& coefficients,
                        const std::vector<double>& x) {
  return snap_to_grid(lr_raw_prediction(coefficients, x));
}

LrFeatureBuilder LrFeatureBuilder::fit(
    const std::vector<StructuredIndicators>& training) {
  if (training.empty()) {
    throw ValidationError("LR feature builder needs training snapshots");
  }
  LrFeatureBuilder builder;
  std::set<std::string> chairs, parties;
  for (const auto& ind : training) {
    chairs.insert(ind.fed_chair);
    parties.insert(ind.white_house_party);
  }
  builder.chair_levels_.assign(chairs.begin(), chairs.end());
  builder.party_levels_.assign(parties.begin(), parties.end());
  return builder;
}

std::vector<double> LrFeatureBuilder::encode(const StructuredIndicators& ind) const {
  std::vector<double> row;
  row.reserve(dimension());
  row.push_back(1.0);  // intercept
  row.push_back(ind.pce_yoy);
  row.push_back(ind.cpi_yoy);
  row.push_back(ind.inflation_expect_1y);
  row.push_back(ind.tb3m);
  row.push_back(ind.tb6m);
  row.push_back(ind.m2_supply);
  row.push_back(ind.bbk_gdp);
  row.push_back(ind.unemployment);
  row.push_back(ind.vix);
  row.push_back(ind.prev_fftr);
  row.push_back(static_cast<double>(ind.prev_change_bps));
  for (std::size_t i = 1; i < chair_levels_.size(); ++i) {  // drop-first
    row.push_back(ind.fed_chair == chair_levels_[i] ? 1.0 : 0.0);
  }
  for (std::size_t i = 1; i < party_levels_.size(); ++i) {
    row.push_back(ind.white_house_party == party_levels_[i] ? 1.0 : 0.0);
  }
  return row;
}

std::size_t LrFeatureBuilder::dimension() const {
  return 12 + (chair_levels_.empty() ? 0 : chair_levels_.size() - 1) +
         (party_levels_.empty() ? 0 : party_levels_.size() - 1);
}

}  // namespace fedsight::evaluate
