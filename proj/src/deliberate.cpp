#include "fedsight/deliberate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"
#include "fedsight/log.hpp"
#include "fedsight/rng.hpp"

namespace fedsight::deliberate {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Reads a real number starting at or after `pos`, skipping separators.
std::optional<double> read_number_after(const std::string& text, std::size_t pos) {
  while (pos < text.size() &&
         (std::isspace(static_cast<unsigned char>(text[pos])) != 0 ||
          text[pos] == ':' || text[pos] == '=')) {
    ++pos;
  }
  std::size_t start = pos;
  if (start < text.size() && (text[start] == '+' || text[start] == '-')) ++pos;
  bool digits = false;
  while (pos < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[pos])) != 0 ||
          text[pos] == '.')) {
    digits = digits || std::isdigit(static_cast<unsigned char>(text[pos])) != 0;
    ++pos;
  }
  if (!digits) return std::nullopt;
  try {
    return std::stod(text.substr(start, pos - start));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

const char* kAnalystId = "analyst";
const char* kEconomistId = "economist";
const char* kChairId = "chair";
const char* kRevealPrefix = "The actual decision was ";
const char* const kDefaultWarmupMeetings[3] = {"2019-10-30", "2022-01-26",
                                               "2022-03-16"};

std::string member_id(int index) { return "member_" + std::to_string(index + 1); }

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

std::optional<MarketOutlook> parse_outlook_response(const std::string& text) {
  const std::string haystack = lower(text);
  std::map<int, double> weights;

  auto scan_keyword = [&](const std::string& keyword, auto bps_of) {
    std::size_t pos = 0;
    while ((pos = haystack.find(keyword, pos)) != std::string::npos) {
      // Reject mid-word hits ("uphold" must not match "hold").
      if (pos > 0 && is_word_char(haystack[pos - 1])) {
        pos += keyword.size();
        continue;
      }
      std::size_t after = pos + keyword.size();
      int magnitude = 0;
      if (keyword != "hold") {
        std::size_t digits_end = after;
        while (digits_end < haystack.size() &&
               std::isdigit(static_cast<unsigned char>(haystack[digits_end])) != 0) {
          ++digits_end;
        }
        if (digits_end == after) {  // bare "cut"/"hike" without magnitude
          pos = after;
          continue;
        }
        magnitude = std::stoi(haystack.substr(after, digits_end - after));
        after = digits_end;
      }
      auto value = read_number_after(haystack, after);
      if (value.has_value() && *value >= 0.0 && std::isfinite(*value)) {
        int bps = bps_of(magnitude);
        weights[bps] += *value;
      }
      pos = after;
    }
  };

  scan_keyword("cut", [](int m) { return -m; });
  scan_keyword("hike", [](int m) { return m; });
  scan_keyword("hold", [](int) { return 0; });

  // Drop weights that are off-grid; if nothing usable remains, fail.
  for (auto it = weights.begin(); it != weights.end();) {
    if (it->first % kGridStepBps != 0 || std::abs(it->first) > kMaxAbsDeltaBps ||
        it->second <= 0.0) {
      it = weights.erase(it);
    } else {
      ++it;
    }
  }
  if (weights.empty()) return std::nullopt;
  return MarketOutlook::from_weights(weights);
}

MarketOutlook fallback_outlook() {
  return MarketOutlook::from_weights({{-25, 1.0}, {0, 1.0}, {25, 1.0}});
}

std::optional<OptionsTriple> parse_options_response(const std::string& text) {
  const std::string haystack = lower(text);

  struct Found {
    int bps = 0;
    std::string rationale;
    bool ok = false;
  };
  auto find_label = [&](const std::string& label) -> Found {
    Found found;
    std::size_t pos = 0;
    while ((pos = haystack.find(label, pos)) != std::string::npos) {
      if (pos > 0 && is_word_char(haystack[pos - 1])) {
        pos += label.size();
        continue;
      }
      auto value = read_number_after(haystack, pos + label.size());
      if (value.has_value() && *value == std::floor(*value)) {
        found.bps = static_cast<int>(*value);
        // Rationale: the rest of the original line, after any '|' separator.
        std::size_t line_end = text.find('\n', pos);
        std::string line = text.substr(
            pos, line_end == std::string::npos ? std::string::npos : line_end - pos);
        std::size_t bar = line.find('|');
        found.rationale =
            bar == std::string::npos ? "" : trim(line.substr(bar + 1));
        found.ok = true;
        return found;
      }
      pos += label.size();
    }
    return found;
  };

  Found dovish = find_label("dovish");
  Found neutral = find_label("neutral");
  Found hawkish = find_label("hawkish");
  if (!dovish.ok || !neutral.ok || !hawkish.ok) return std::nullopt;

  try {
    RateDecision d = RateDecision::from_bps(dovish.bps);
    RateDecision n = RateDecision::from_bps(neutral.bps);
    RateDecision h = RateDecision::from_bps(hawkish.bps);
    return OptionsTriple::make(
        d, n, h, dovish.rationale.empty() ? "Ease policy." : dovish.rationale,
        neutral.rationale.empty() ? "Hold policy steady." : neutral.rationale,
        hawkish.rationale.empty() ? "Tighten policy." : hawkish.rationale);
  } catch (const ValidationError&) {
    return std::nullopt;  // off-grid or non-increasing
  }
}

OptionsTriple default_options(const MarketOutlook& outlook) {
  MarketOutlook src = outlook.empty() ? fallback_outlook() : outlook;
  int lo = src.support_min_bps();
  int mode = src.mode_bps();
  int hi = src.support_max_bps();

  if (!(lo < mode && mode < hi)) {
    // Degenerate support: spread one grid step around the mode, shifting the
    // whole window inward at the grid bounds so the triple stays strictly
    // increasing (mode +100 yields {50, 75, 100}).
    lo = mode - kGridStepBps;
    hi = mode + kGridStepBps;
    if (lo < -kMaxAbsDeltaBps) {
      hi += -kMaxAbsDeltaBps - lo;
      lo = -kMaxAbsDeltaBps;
    }
    if (hi > kMaxAbsDeltaBps) {
      lo -= hi - kMaxAbsDeltaBps;
      hi = kMaxAbsDeltaBps;
    }
    mode = (lo + hi) / 2;
  }
  return OptionsTriple::make(
      RateDecision::from_bps(lo), RateDecision::from_bps(mode),
      RateDecision::from_bps(hi),
      "Ease policy in line with the softer end of market expectations.",
      "Match the market-implied modal path.",
      "Tighten policy in line with the firmer end of market expectations.");
}

ParsedView parse_view_response(const std::string& text) {
  ParsedView view;
  const std::string haystack = lower(text);

  std::size_t pos = haystack.find("leaning");
  if (pos != std::string::npos) {
    std::size_t line_end = haystack.find('\n', pos);
    std::string rest = haystack.substr(
        pos, line_end == std::string::npos ? std::string::npos : line_end - pos);
    for (OptionLabel label :
         {OptionLabel::dovish, OptionLabel::neutral, OptionLabel::hawkish}) {
      if (rest.find(option_label_name(label)) != std::string::npos) {
        view.leaning = label;
        break;
      }
    }
  }

  pos = haystack.find("confidence");
  if (pos != std::string::npos) {
    auto value = read_number_after(haystack, pos + 10);
    if (value.has_value() && std::isfinite(*value)) {
      view.confidence = std::clamp(*value, 0.0, 1.0);
    }
  }
  return view;
}

ParsedVote parse_vote_response(const std::string& text) {
  ParsedVote vote;
  const std::string haystack = lower(text);

  std::size_t pos = haystack.find("vote");
  if (pos != std::string::npos) {
    std::size_t line_end = haystack.find('\n', pos);
    std::string rest = haystack.substr(
        pos, line_end == std::string::npos ? std::string::npos : line_end - pos);
    for (OptionLabel label :
         {OptionLabel::dovish, OptionLabel::neutral, OptionLabel::hawkish}) {
      if (rest.find(option_label_name(label)) != std::string::npos) {
        vote.label = label;
        break;
      }
    }
  }

  std::size_t jpos = haystack.find("justification");
  if (jpos != std::string::npos) {
    std::size_t colon = text.find(':', jpos);
    if (colon != std::string::npos) vote.justification = trim(text.substr(colon + 1));
  }
  if (vote.justification.empty()) vote.justification = trim(text);
  return vote;
}

int word_count(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  int count = 0;
  while (in >> word) ++count;
  return count;
}

std::string build_cod_prompt(const std::string& base_prompt) {
  return base_prompt +
         "\n\nThink in drafts: write numbered draft steps (\"1.\", \"2.\", ...), "
         "each at most 30 words, then a line starting with \"FINAL:\" followed by "
         "your conclusion in the requested format.";
}

CoDValidation validate_cod(const std::string& response) {
  CoDValidation result;
  std::istringstream in(response);
  std::string line;
  bool in_final = false;
  std::string final_text;
  while (std::getline(in, line)) {
    std::string stripped = trim(line);
    if (!in_final) {
      std::size_t pos = stripped.find("FINAL:");
      if (pos == 0) {
        in_final = true;
        std::string tail = trim(stripped.substr(6));
        if (!tail.empty()) final_text += tail + '\n';
        continue;
      }
      // Draft steps look like "3." or "3)".
      std::size_t digits = 0;
      while (digits < stripped.size() &&
             std::isdigit(static_cast<unsigned char>(stripped[digits])) != 0) {
        ++digits;
      }
      if (digits > 0 && digits < stripped.size() &&
          (stripped[digits] == '.' || stripped[digits] == ')')) {
        result.draft.steps.push_back(trim(stripped.substr(digits + 1)));
      }
    } else {
      final_text += line + '\n';
    }
  }
  result.draft.final_text = trim(final_text);
  for (std::size_t i = 0; i < result.draft.steps.size(); ++i) {
    if (word_count(result.draft.steps[i]) > kCoDMaxWordsPerStep) {
      result.violating_steps.push_back(i);
    }
  }
  return result;
}

CoDDraft truncate_cod(const CoDDraft& draft) {
  CoDDraft out;
  out.final_text = draft.final_text;
  for (const auto& step : draft.steps) {
    if (word_count(step) <= kCoDMaxWordsPerStep) {
      out.steps.push_back(step);
      continue;
    }
    std::istringstream in(step);
    std::string word, rebuilt;
    int kept = 0;
    while (kept < kCoDMaxWordsPerStep && in >> word) {
      if (kept > 0) rebuilt += ' ';
      rebuilt += word;
      ++kept;
    }
    out.steps.push_back(rebuilt);
  }
  return out;
}

std::string render_cod(const CoDDraft& draft) {
  std::string out;
  for (std::size_t i = 0; i < draft.steps.size(); ++i) {
    out += std::to_string(i + 1) + ". " + draft.steps[i] + '\n';
  }
  out += "FINAL:\n";
  out += draft.final_text;
  return out;
}

RateDecision tally(const std::vector<Vote>& votes, const MarketOutlook& outlook) {
  if (votes.size() != static_cast<std::size_t>(kMemberCount)) {
    throw ValidationError("tally expects exactly " + std::to_string(kMemberCount) +
                          " votes, got " + std::to_string(votes.size()));
  }
  // Strict majority on the voted delta.
  for (const auto& vote : votes) {
    int same = 0;
    for (const auto& other : votes) {
      if (other.delta_bps == vote.delta_bps) ++same;
    }
    if (same >= 2) return vote.delta_bps;
  }
  // 1-1-1 split: highest market-implied probability wins.
  const Vote* best = nullptr;
  bool tie = false;
  for (const auto& vote : votes) {
    if (best == nullptr) {
      best = &vote;
      continue;
    }
    double p = outlook.prob_of(vote.delta_bps.bps());
    double bp = outlook.prob_of(best->delta_bps.bps());
    if (p > bp) {
      best = &vote;
      tie = false;
    } else if (p == bp) {
      tie = true;
    }
  }
  if (!tie) return best->delta_bps;
  // Residual tie: the neutral option.
  for (const auto& vote : votes) {
    if (vote.option_label == OptionLabel::neutral) return vote.delta_bps;
  }
  return best->delta_bps;  // no neutral vote present; deterministic fallback
}

// ---------------------------------------------------------------------------
// Statement consistency
// ---------------------------------------------------------------------------

namespace {

const char* kRaiseWords[] = {"raise", "raised", "raising", "increase", "increased",
                             "increasing", "hike", "hiked", "lift", "lifted"};
const char* kLowerWords[] = {"lower", "lowered", "lowering", "cut", "cutting",
                             "reduce", "reduced", "reducing", "ease", "eased"};
const char* kHoldWords[] = {"maintain", "maintained", "maintaining", "unchanged",
                            "hold", "held", "holding", "keep", "kept", "leaves",
                            "leave"};

bool contains_word(const std::string& haystack, const char* word) {
  std::size_t pos = 0;
  const std::string needle = word;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right_ok = end >= haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

// Signed basis-point claims: a number followed by "basis point(s)" or "bps",
// signed by the nearest preceding direction word.
std::vector<int> extract_bps_claims(const std::string& haystack) {
  std::vector<int> claims;
  for (std::size_t pos = 0; pos < haystack.size(); ++pos) {
    if (std::isdigit(static_cast<unsigned char>(haystack[pos])) == 0) continue;
    if (pos > 0 && (is_word_char(haystack[pos - 1]) || haystack[pos - 1] == '.')) {
      continue;
    }
    std::size_t end = pos;
    while (end < haystack.size() &&
           std::isdigit(static_cast<unsigned char>(haystack[end])) != 0) {
      ++end;
    }
    std::size_t unit = end;
    while (unit < haystack.size() &&
           (std::isspace(static_cast<unsigned char>(haystack[unit])) != 0 ||
            haystack[unit] == '-')) {
      ++unit;
    }
    bool is_bps = haystack.compare(unit, 5, "basis") == 0 ||
                  haystack.compare(unit, 3, "bps") == 0 ||
                  haystack.compare(unit, 2, "bp") == 0;
    if (!is_bps) {
      pos = end;
      continue;
    }
    int magnitude = std::stoi(haystack.substr(pos, end - pos));
    // Direction: nearest preceding raise/lower word within the sentence.
    std::size_t sentence_start = haystack.rfind('.', pos);
    sentence_start = sentence_start == std::string::npos ? 0 : sentence_start;
    std::string before = haystack.substr(sentence_start, pos - sentence_start);
    std::size_t raise_at = std::string::npos;
    std::size_t lower_at = std::string::npos;
    for (const char* w : kRaiseWords) {
      std::size_t at = before.rfind(w);
      if (at != std::string::npos && (raise_at == std::string::npos || at > raise_at)) {
        raise_at = at;
      }
    }
    for (const char* w : kLowerWords) {
      std::size_t at = before.rfind(w);
      if (at != std::string::npos && (lower_at == std::string::npos || at > lower_at)) {
        lower_at = at;
      }
    }
    if (raise_at == std::string::npos && lower_at == std::string::npos) {
      pos = end;
      continue;
    }
    bool raising = lower_at == std::string::npos ||
                   (raise_at != std::string::npos && raise_at > lower_at);
    claims.push_back(raising ? magnitude : -magnitude);
    pos = end;
  }
  return claims;
}

}  // namespace

bool statement_mentions(const RateDecision& decision, const std::string& text) {
  const std::string haystack = lower(text);
  std::vector<int> claims = extract_bps_claims(haystack);
  if (decision.bps() == 0) {
    if (!claims.empty()) return false;
    for (const char* w : kHoldWords) {
      if (contains_word(haystack, w)) return true;
    }
    return false;
  }
  return std::find(claims.begin(), claims.end(), decision.bps()) != claims.end() &&
         std::count_if(claims.begin(), claims.end(), [&](int c) {
           return c != decision.bps();
         }) == 0;
}

std::string statement_header(const RateDecision& decision) {
  std::string action;
  if (decision.bps() > 0) {
    action = "raise the target range by " + std::to_string(decision.bps()) +
             " basis points";
  } else if (decision.bps() < 0) {
    action = "lower the target range by " + std::to_string(-decision.bps()) +
             " basis points";
  } else {
    action = "maintain the current target range";
  }
  return "Committee decision: the Committee voted to " + action + ".";
}

std::string reveal_sentence(const RateDecision& actual) {
  return kRevealPrefix + actual.label() + ".";
}

std::string render_indicators(const StructuredIndicators& ind) {
  std::string out = "Structured indicators:\n";
  out += "- PCE inflation YoY: " + format_double(ind.pce_yoy, "%.2f") + "%\n";
  out += "- CPI inflation YoY: " + format_double(ind.cpi_yoy, "%.2f") + "%\n";
  out += "- 1y inflation expectations: " +
         format_double(ind.inflation_expect_1y, "%.2f") + "%\n";
  out += "- 3-month Treasury yield: " + format_double(ind.tb3m, "%.2f") + "%\n";
  out += "- 6-month Treasury yield: " + format_double(ind.tb6m, "%.2f") + "%\n";
  out += "- M2 money supply: " + format_double(ind.m2_supply, "%.0f") +
         " billion USD\n";
  out += "- GDP nowcast (QoQ annualized): " + format_double(ind.bbk_gdp, "%.2f") +
         "%\n";
  out += "- Unemployment rate: " + format_double(ind.unemployment, "%.2f") + "%\n";
  out += "- VIX: " + format_double(ind.vix, "%.2f") + "\n";
  out += "- Fed chair: " + ind.fed_chair + "\n";
  out += "- White House party: " + ind.white_house_party + "\n";
  out += "- Previous target-rate midpoint: " +
         format_double(ind.prev_fftr, "%.3f") + "%\n";
  out += "- Previous rate change: " +
         RateDecision::from_bps(ind.prev_change_bps).label() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Memory store
// ---------------------------------------------------------------------------

void MemoryStore::append(MemoryEntry entry) {
  if (entry.reflection.empty()) {
    throw ValidationError("memory entries need a non-empty reflection");
  }
  entry.created_at = ++clock_;
  entries_.push_back(std::move(entry));
}

std::vector<MemoryEntry> MemoryStore::for_agent(const std::string& agent_id,
                                                std::size_t limit) const {
  std::vector<MemoryEntry> mine;
  for (const auto& entry : entries_) {
    if (entry.agent_id == agent_id) mine.push_back(entry);
  }
  if (mine.size() > limit) {
    mine.erase(mine.begin(), mine.end() - static_cast<std::ptrdiff_t>(limit));
  }
  return mine;  // append order == created_at order: oldest first
}

MemoryStore MemoryStore::load(const std::filesystem::path& file) {
  MemoryStore store;
  if (!std::filesystem::exists(file)) return store;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open memory file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError(file.filename().string() + ": memory file must be an array");
  }
  for (const auto& item : doc) {
    MemoryEntry entry;
    entry.meeting_id = item.value("meeting_id", "");
    entry.agent_id = item.value("agent_id", "");
    entry.predicted = RateDecision::from_bps(item.value("predicted_bps", 0));
    entry.actual = RateDecision::from_bps(item.value("actual_bps", 0));
    entry.reflection = item.value("reflection", "");
    entry.created_at = item.value("created_at", static_cast<std::int64_t>(0));
    if (entry.reflection.empty()) {
      throw ParseError(file.filename().string() +
                       ": memory entry with empty reflection");
    }
    store.entries_.push_back(std::move(entry));
  }
  std::stable_sort(store.entries_.begin(), store.entries_.end(),
                   [](const MemoryEntry& a, const MemoryEntry& b) {
                     return a.created_at < b.created_at;
                   });
  for (const auto& entry : store.entries_) {
    store.clock_ = std::max(store.clock_, entry.created_at);
  }
  return store;
}

void MemoryStore::save(const std::filesystem::path& file) const {
  json doc = json::array();
  for (const auto& entry : entries_) {
    json item;
    item["meeting_id"] = entry.meeting_id;
    item["agent_id"] = entry.agent_id;
    item["predicted_bps"] = entry.predicted.bps();
    item["actual_bps"] = entry.actual.bps();
    item["reflection"] = entry.reflection;
    item["created_at"] = entry.created_at;
    doc.push_back(item);
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write memory file " + file.string());
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace {

std::string options_block(const OptionsTriple& options) {
  std::string out = "Policy options on the table:\n";
  for (const auto& option : options.all()) {
    out += "- ";
    out += option_label_name(option.label);
    out += ": " + option.delta.label() + " (" + option.rationale + ")\n";
  }
  return out;
}

std::string votes_block(const std::vector<Vote>& votes) {
  std::string out;
  for (const auto& vote : votes) {
    out += "- " + vote.agent_id + " voted ";
    out += option_label_name(vote.option_label);
    out += " (" + vote.delta_bps.label() + ")\n";
  }
  return out;
}

constexpr const char* kBeigePreamble =
    "The following is the Beige Book, the Federal Reserve's anecdotal survey of "
    "economic conditions across the twelve districts. Watch for reports on "
    "growth, hiring, wages, and price pressures:";
constexpr const char* kDotplotPreamble =
    "The following summarizes the latest Summary of Economic Projections dot "
    "plot; each line counts the policymakers projecting a given end-of-year "
    "target-rate range:";
constexpr const char* kFedwatchPreamble =
    "The following are market-implied probabilities of rate moves derived from "
    "fed funds futures. Note where market expectations concentrate:";

}  // namespace

DeliberationEngine::DeliberationEngine(gateway::Gateway& gw,
                                       std::vector<Persona> personas,
                                       EngineConfig config)
    : gateway_(gw), personas_(std::move(personas)), config_(config) {
  if (personas_.size() != static_cast<std::size_t>(kMemberCount)) {
    throw ValidationError("engine needs exactly " + std::to_string(kMemberCount) +
                          " personas, got " + std::to_string(personas_.size()));
  }
}

DeliberationEngine::CallResult DeliberationEngine::call_stage(
    const MeetingSnapshot& snapshot, Stage stage, const std::string& agent_id,
    int run_index, const std::string& system_prompt, const std::string& user_prompt,
    Strategy strategy, bool cod_wrap, RunTrace& trace) {
  gateway::ChatRequest request;
  request.tag = {snapshot.meeting_id, stage, agent_id, run_index};
  request.system_prompt = system_prompt;
  request.max_output_tokens = config_.max_output_tokens;
  request.temperature = config_.temperature;
  request.seed = derive_sub_seed(config_.root_seed, snapshot.meeting_id, run_index,
                                 stage_name(stage));

  const bool use_cod = strategy == Strategy::cod && cod_wrap;
  std::string prompt = use_cod ? build_cod_prompt(user_prompt) : user_prompt;
  request.messages = {{gateway::ChatMessage::Role::user, prompt}};

  gateway::ChatResponse response = gateway_.complete(request);
  trace.tokens += response.total_tokens();

  CallResult result;
  if (!use_cod) {
    result.text = response.text;
    return result;
  }

  CoDValidation validation = validate_cod(response.text);
  if (!validation.ok()) {
    log_warn("CoD violation at " + request.tag.to_string() + ": " +
             std::to_string(validation.violating_steps.size()) +
             " step(s) over " + std::to_string(kCoDMaxWordsPerStep) +
             " words; retrying once");
    gateway::ChatRequest retry = request;
    retry.messages.push_back({gateway::ChatMessage::Role::assistant, response.text});
    retry.messages.push_back(
        {gateway::ChatMessage::Role::user,
         "Rewrite your drafts: every numbered step must be at most 30 words. "
         "Keep the FINAL section format."});
    gateway::ChatResponse second = gateway_.complete(retry);
    trace.tokens += second.total_tokens();
    result.retries_used = 1;
    validation = validate_cod(second.text);
    if (!validation.ok()) {
      log_warn("CoD retry still violating at " + request.tag.to_string() +
               "; truncating over-long steps");
      validation.draft = truncate_cod(validation.draft);
    }
  }
  result.text = render_cod(validation.draft);
  return result;
}

std::string DeliberationEngine::member_briefing(const MeetingSnapshot& snapshot) const {
  std::string out = "Meeting date: " + snapshot.meeting_id + "\n\n";
  out += render_indicators(snapshot.indicators);
  out += '\n';
  out += kBeigePreamble;
  out += '\n';
  out += snapshot.beige_book.empty() ? "(no Beige Book available)"
                                     : snapshot.beige_book;
  out += "\n\n";
  out += kDotplotPreamble;
  out += '\n';
  out += snapshot.dotplot_verbalized.empty() ? "(no dot plot available)"
                                             : snapshot.dotplot_verbalized;
  out += "\n\n";
  out += kFedwatchPreamble;
  out += '\n';
  out += snapshot.fedwatch_text.empty() ? "(no futures data available)"
                                        : snapshot.fedwatch_text;
  out += '\n';
  return out;
}

MarketOutlook DeliberationEngine::run_analyst(const MeetingSnapshot& snapshot,
                                              Strategy strategy, int run_index,
                                              RunTrace& trace) {
  const std::string system_prompt =
      "You are the Analyst agent preparing a simulated Federal Open Market "
      "Committee meeting. Extract market-implied probabilities of the next rate "
      "move from the futures commentary. Respond with one line of "
      "comma-separated probabilities using labels cut50, cut25, hold, hike25, "
      "hike50, e.g. \"cut25: 0.10, hold: 0.70, hike25: 0.20\".";
  std::string user_prompt = "Meeting date: " + snapshot.meeting_id + "\n\n";
  user_prompt += render_indicators(snapshot.indicators);
  user_prompt += '\n';
  user_prompt += kFedwatchPreamble;
  user_prompt += '\n';
  user_prompt += snapshot.fedwatch_text.empty() ? "(no futures data available)"
                                                : snapshot.fedwatch_text;

  CallResult result = call_stage(snapshot, Stage::analyst, kAnalystId, run_index,
                                 system_prompt, user_prompt, strategy,
                                 /*cod_wrap=*/false, trace);
  trace.transcript.push_back({Stage::analyst, kAnalystId, result.text});

  auto outlook = parse_outlook_response(result.text);
  if (!outlook.has_value()) {
    log_warn("analyst response unparseable at meeting " + snapshot.meeting_id +
             "; falling back to uniform outlook");
    return fallback_outlook();
  }
  return *outlook;
}

OptionsTriple DeliberationEngine::run_economist(const MeetingSnapshot& snapshot,
                                                const MarketOutlook& outlook,
                                                Strategy strategy, int run_index,
                                                RunTrace& trace) {
  const std::string system_prompt =
      "You are the Economist agent preparing a simulated Federal Open Market "
      "Committee meeting. Propose exactly three candidate policy options. "
      "Respond with three lines:\n"
      "DOVISH: <delta bps> | <one-sentence rationale>\n"
      "NEUTRAL: <delta bps> | <one-sentence rationale>\n"
      "HAWKISH: <delta bps> | <one-sentence rationale>\n"
      "Deltas must be multiples of 25 and strictly increasing.";
  std::string user_prompt = member_briefing(snapshot);
  user_prompt += "\nMarket-implied outlook:\n";
  for (const auto& [bps, prob] : outlook.probs()) {
    user_prompt += "- " + RateDecision::from_bps(bps).label() + ": " +
                   format_double(prob, "%.4f") + "\n";
  }

  CallResult result = call_stage(snapshot, Stage::economist, kEconomistId,
                                 run_index, system_prompt, user_prompt, strategy,
                                 /*cod_wrap=*/true, trace);
  trace.transcript.push_back({Stage::economist, kEconomistId, result.text});

  auto options = parse_options_response(result.text);
  if (!options.has_value()) {
    log_warn("economist response rejected at meeting " + snapshot.meeting_id +
             "; substituting the default option triple");
    return default_options(outlook);
  }
  return *options;
}

MemberView DeliberationEngine::run_member_analysis(
    int member_index, const MeetingSnapshot& snapshot, const OptionsTriple& options,
    Strategy strategy, int run_index, const MemoryStore* memory, RunTrace& trace) {
  const Persona& persona = personas_[static_cast<std::size_t>(member_index)];
  const std::string agent_id = member_id(member_index);

  std::string system_prompt = persona.prompt_block;
  system_prompt +=
      "\n\nYou are deliberating at a simulated Federal Open Market Committee "
      "meeting. Analyze the briefing and the policy options. End your response "
      "with two lines:\nLEANING: dovish|neutral|hawkish\nCONFIDENCE: <0..1>";

  std::string user_prompt = member_briefing(snapshot);
  user_prompt += '\n';
  user_prompt += options_block(options);

  if (strategy == Strategy::icl && memory != nullptr) {
    auto entries = memory->for_agent(agent_id, config_.memory_limit);
    if (!entries.empty()) {
      user_prompt += "\nLessons from your past meeting reflections:\n";
      for (const auto& entry : entries) {
        user_prompt += "- [" + entry.meeting_id + "] " + entry.reflection + "\n";
      }
    }
  }

  CallResult result = call_stage(snapshot, Stage::member_analysis, agent_id,
                                 run_index, system_prompt, user_prompt, strategy,
                                 /*cod_wrap=*/true, trace);
  trace.transcript.push_back({Stage::member_analysis, agent_id, result.text});

  ParsedView parsed = parse_view_response(result.text);
  MemberView view;
  view.agent_id = agent_id;
  view.analysis = result.text;
  if (parsed.leaning.has_value()) {
    view.leaning = *parsed.leaning;
  } else {
    log_warn("member analysis leaning unparseable for " + agent_id + " at " +
             snapshot.meeting_id + "; defaulting to neutral");
    view.leaning = OptionLabel::neutral;
  }
  view.confidence = parsed.confidence.value_or(0.5);
  return view;
}

std::vector<MemberView> DeliberationEngine::run_exchange(
    const std::vector<MemberView>& views, const MeetingSnapshot& snapshot,
    const OptionsTriple& options, Strategy strategy, int run_index,
    RunTrace& trace) {
  if (views.size() != static_cast<std::size_t>(kMemberCount)) {
    throw ValidationError("exchange expects exactly " +
                          std::to_string(kMemberCount) + " member views");
  }
  std::vector<MemberView> revised;
  revised.reserve(views.size());
  for (int m = 0; m < kMemberCount; ++m) {
    const Persona& persona = personas_[static_cast<std::size_t>(m)];
    const std::string agent_id = member_id(m);

    std::string system_prompt = persona.prompt_block;
    system_prompt +=
        "\n\nYou are in the deliberation exchange of a simulated Federal Open "
        "Market Committee meeting. Consider your colleagues' analyses; you may "
        "keep or revise your position. End your response with two lines:\n"
        "LEANING: dovish|neutral|hawkish\nCONFIDENCE: <0..1>";

    std::string user_prompt = options_block(options);
    user_prompt += "\nYour current position: ";
    user_prompt += option_label_name(views[static_cast<std::size_t>(m)].leaning);
    user_prompt += " (confidence " +
                   format_double(views[static_cast<std::size_t>(m)].confidence,
                                 "%.2f") +
                   ")\n\nColleague analyses:\n";
    for (int other = 0; other < kMemberCount; ++other) {
      if (other == m) continue;
      user_prompt += "[" + member_id(other) + "]\n";
      user_prompt += views[static_cast<std::size_t>(other)].analysis;
      user_prompt += "\n\n";
    }

    CallResult result = call_stage(snapshot, Stage::exchange, agent_id, run_index,
                                   system_prompt, user_prompt, strategy,
                                   /*cod_wrap=*/true, trace);
    trace.transcript.push_back({Stage::exchange, agent_id, result.text});

    ParsedView parsed = parse_view_response(result.text);
    MemberView view = views[static_cast<std::size_t>(m)];
    view.analysis = result.text;
    if (parsed.leaning.has_value()) {
      view.leaning = *parsed.leaning;
    }
    if (parsed.confidence.has_value()) {
      view.confidence = *parsed.confidence;
    }
    revised.push_back(std::move(view));
  }
  return revised;
}

std::vector<Vote> DeliberationEngine::collect_votes(
    const std::vector<MemberView>& views, const MeetingSnapshot& snapshot,
    const OptionsTriple& options, Strategy strategy, int run_index,
    RunTrace& trace) {
  if (views.size() != static_cast<std::size_t>(kMemberCount)) {
    throw ValidationError("voting expects exactly " +
                          std::to_string(kMemberCount) + " member views");
  }
  std::vector<Vote> votes;
  votes.reserve(views.size());
  for (int m = 0; m < kMemberCount; ++m) {
    const Persona& persona = personas_[static_cast<std::size_t>(m)];
    const std::string agent_id = member_id(m);
    const MemberView& view = views[static_cast<std::size_t>(m)];

    std::string system_prompt = persona.prompt_block;
    system_prompt +=
        "\n\nCast your final vote on the policy options. Respond with two "
        "lines:\nVOTE: dovish|neutral|hawkish\nJUSTIFICATION: <one sentence>";

    std::string user_prompt = options_block(options);
    user_prompt += "\nYour position after deliberation: ";
    user_prompt += option_label_name(view.leaning);
    user_prompt +=
        " (confidence " + format_double(view.confidence, "%.2f") + ")\n";

    CallResult result = call_stage(snapshot, Stage::member_vote, agent_id,
                                   run_index, system_prompt, user_prompt, strategy,
                                   /*cod_wrap=*/true, trace);
    trace.transcript.push_back({Stage::member_vote, agent_id, result.text});

    ParsedVote parsed = parse_vote_response(result.text);
    Vote vote;
    vote.agent_id = agent_id;
    if (parsed.label.has_value()) {
      vote.option_label = *parsed.label;
      vote.justification = parsed.justification;
    } else {
      log_warn("vote unparseable for " + agent_id + " at " + snapshot.meeting_id +
               "; falling back to the member's leaning");
      vote.option_label = view.leaning;
      vote.justification = "(fallback to prior leaning)";
    }
    vote.delta_bps = options.by_label(vote.option_label).delta;
    votes.push_back(std::move(vote));
  }
  return votes;
}

std::string DeliberationEngine::synthesize_statement(
    const RateDecision& decision, const std::vector<Vote>& votes,
    const MeetingSnapshot& snapshot, int run_index, RunTrace& trace) {
  const std::string system_prompt =
      "You are the Chair of a simulated Federal Open Market Committee meeting. "
      "Draft the post-meeting statement: two short paragraphs covering the "
      "economic outlook and the policy action, in the style of an FOMC "
      "statement. State the decision explicitly.";
  std::string user_prompt = "Meeting date: " + snapshot.meeting_id + "\n";
  user_prompt += "Tallied decision: " + decision.label() + "\n\nVotes:\n";
  user_prompt += votes_block(votes);

  // Statements are public documents and are never CoD-wrapped.
  CallResult result = call_stage(snapshot, Stage::statement, kChairId, run_index,
                                 system_prompt, user_prompt, Strategy::baseline,
                                 /*cod_wrap=*/false, trace);

  std::string statement = trim(result.text);
  if (!statement_mentions(decision, statement)) {
    log_warn("statement for " + snapshot.meeting_id +
             " does not state the tallied decision; prepending header");
    statement = statement.empty()
                    ? statement_header(decision)
                    : statement_header(decision) + "\n\n" + statement;
  }
  trace.transcript.push_back({Stage::statement, kChairId, statement});
  return statement;
}

RunRecord DeliberationEngine::run_meeting(const MeetingSnapshot& snapshot,
                                          Strategy strategy, int run_index,
                                          const MemoryStore* memory) {
  RunRecord record;
  record.meeting_id = snapshot.meeting_id;
  record.run_index = run_index;
  record.strategy = strategy;

  RunTrace trace;
  try {
    MarketOutlook outlook = run_analyst(snapshot, strategy, run_index, trace);
    OptionsTriple options =
        run_economist(snapshot, outlook, strategy, run_index, trace);

    std::vector<MemberView> views;
    views.reserve(static_cast<std::size_t>(kMemberCount));
    for (int m = 0; m < kMemberCount; ++m) {
      views.push_back(run_member_analysis(m, snapshot, options, strategy,
                                          run_index,
                                          strategy == Strategy::icl ? memory
                                                                    : nullptr,
                                          trace));
    }
    views = run_exchange(views, snapshot, options, strategy, run_index, trace);
    std::vector<Vote> votes =
        collect_votes(views, snapshot, options, strategy, run_index, trace);

    record.votes = votes;
    record.decision = tally(votes, outlook);
    record.statement =
        synthesize_statement(record.decision, votes, snapshot, run_index, trace);
  } catch (const Error& e) {
    record.failed = true;
    record.error = e.what();
    log_error("run failed at " + snapshot.meeting_id + " run " +
              std::to_string(run_index) + ": " + record.error);
  }
  record.transcript = std::move(trace.transcript);
  record.tokens_used = trace.tokens;
  return record;
}

int DeliberationEngine::icl_warmup(const std::vector<MeetingSnapshot>& history,
                                   MemoryStore& store) {
  std::vector<const MeetingSnapshot*> ordered;
  ordered.reserve(history.size());
  for (const auto& snapshot : history) ordered.push_back(&snapshot);
  std::sort(ordered.begin(), ordered.end(),
            [](const MeetingSnapshot* a, const MeetingSnapshot* b) {
              return a->meeting_id < b->meeting_id;
            });

  int added = 0;
  for (const MeetingSnapshot* snapshot : ordered) {
    RunRecord record = run_meeting(*snapshot, Strategy::icl, 0, &store);
    if (record.failed) {
      log_warn("warm-up meeting " + snapshot->meeting_id +
               " failed; keeping previously stored reflections");
      continue;
    }
    try {
      for (int m = 0; m < kMemberCount; ++m) {
        const std::string agent_id = member_id(m);
        const Vote& vote = record.votes[static_cast<std::size_t>(m)];

        std::string system_prompt = personas_[static_cast<std::size_t>(m)].prompt_block;
        system_prompt +=
            "\n\nThe meeting outcome is now known. Reflect briefly (2-3 "
            "sentences) on your reasoning: what you got right or wrong and what "
            "to weigh differently next time.";
        std::string user_prompt = "Meeting " + snapshot->meeting_id + ": you voted ";
        user_prompt += option_label_name(vote.option_label);
        user_prompt += " (" + vote.delta_bps.label() + "). ";
        user_prompt += reveal_sentence(snapshot->actual);

        RunTrace trace;
        CallResult result = call_stage(*snapshot, Stage::reflection, agent_id, 0,
                                       system_prompt, user_prompt,
                                       Strategy::baseline, /*cod_wrap=*/false,
                                       trace);
        MemoryEntry entry;
        entry.meeting_id = snapshot->meeting_id;
        entry.agent_id = agent_id;
        entry.predicted = vote.delta_bps;
        entry.actual = snapshot->actual;
        entry.reflection = trim(result.text).empty() ? "(no reflection provided)"
                                                     : trim(result.text);
        store.append(std::move(entry));
        ++added;
      }
    } catch (const Error& e) {
      log_warn("warm-up reflections aborted at " + snapshot->meeting_id + ": " +
               e.what());
    }
  }
  return added;
}

}  // namespace fedsight::deliberate
