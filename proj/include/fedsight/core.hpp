#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedsight/dates.hpp"

namespace fedsight {

// ---------------------------------------------------------------------------
// Rate decisions
// ---------------------------------------------------------------------------

// Largest single-meeting move the simulator models; the 2004-2024 history
// contains nothing bigger. Agent outputs beyond this are clamped (with a
// warning) rather than rejected.
inline constexpr int kMaxAbsDeltaBps = 100;
inline constexpr int kGridStepBps = 25;

// A target-rate change in basis points on the 25-bp grid.
class RateDecision {
 public:
  RateDecision() = default;
  static RateDecision from_bps(int delta_bps);  // throws ValidationError

  int bps() const { return delta_bps_; }
  double percentage_points() const { return delta_bps_ / 100.0; }
  int sign() const { return delta_bps_ > 0 ? 1 : delta_bps_ < 0 ? -1 : 0; }

  // "+25 bps", "-50 bps", "0 bps".
  std::string label() const;
  // Appendix-style percent move: "0.25%", "-0.50%", "0.00%".
  std::string percent_label() const;

  friend auto operator<=>(const RateDecision&, const RateDecision&) = default;

 private:
  explicit RateDecision(int delta_bps) : delta_bps_(delta_bps) {}
  int delta_bps_ = 0;
};

// Maps a continuous rate change in percentage points (0.25 <-> 25 bps) onto
// the 25-bp grid. Exact midpoints round away from zero; results beyond
// +/-100 bps are clamped with a logged warning.
RateDecision snap_to_grid(double raw_change_pp);

// ---------------------------------------------------------------------------
// Snapshot inputs
// ---------------------------------------------------------------------------

struct StructuredIndicators {
  double pce_yoy = 0.0;
  double cpi_yoy = 0.0;
  double inflation_expect_1y = 0.0;
  double tb3m = 0.0;
  double tb6m = 0.0;
  double m2_supply = 0.0;  // billions USD
  double bbk_gdp = 0.0;
  double unemployment = 0.0;
  double vix = 0.0;
  std::string fed_chair;
  std::string white_house_party;
  double prev_fftr = 0.0;   // target-range midpoint, percent
  int prev_change_bps = 0;  // multiple of 25

  void validate() const;  // throws ValidationError
};

// Per-year counts of policymakers projecting each end-of-year target range.
// Range labels are kept verbatim ("4.25-4.50%"); ordering by parsed lower
// bound happens at verbalization time so the rendered string stays
// bit-stable.
struct DotPlot {
  std::map<int, std::map<std::string, int>> year_buckets;

  bool empty() const { return year_buckets.empty(); }
  void validate() const;  // positive counts, equal totals across years
};

// Market-implied probabilities over rate moves. Construction renormalizes,
// so probabilities always sum to 1 within 1e-9.
class MarketOutlook {
 public:
  MarketOutlook() = default;
  // Weights must be non-negative, finite, with positive total.
  static MarketOutlook from_weights(const std::map<int, double>& weights_by_bps);

  const std::map<int, double>& probs() const { return probs_; }
  double prob_of(int bps) const;
  int support_min_bps() const;
  int support_max_bps() const;
  // Highest-probability move; ties prefer the smallest |bps|, then the cut.
  int mode_bps() const;
  bool empty() const { return probs_.empty(); }

 private:
  std::map<int, double> probs_;
};

// Everything an agent may see for one meeting. `actual` is the held-out
// outcome: prompt builders never receive it, and the reveal phrase exists
// only in the ICL reflection stage.
struct MeetingSnapshot {
  std::string meeting_id;  // ISO date of decision day
  IsoDate meeting_date;
  StructuredIndicators indicators;
  std::string beige_book;
  std::string dotplot_verbalized;
  std::string fedwatch_text;
  RateDecision actual;
};

// ---------------------------------------------------------------------------
// Options, votes, runs
// ---------------------------------------------------------------------------

enum class OptionLabel { dovish, neutral, hawkish };

const char* option_label_name(OptionLabel label);
std::optional<OptionLabel> option_label_from(std::string_view name);

struct PolicyOption {
  OptionLabel label = OptionLabel::neutral;
  RateDecision delta;
  std::string rationale;
};

// Exactly three options, deltas strictly increasing dovish -> hawkish.
class OptionsTriple {
 public:
  OptionsTriple() = default;
  static OptionsTriple make(RateDecision dovish, RateDecision neutral,
                            RateDecision hawkish, std::string dovish_rationale,
                            std::string neutral_rationale,
                            std::string hawkish_rationale);

  const PolicyOption& dovish() const { return options_[0]; }
  const PolicyOption& neutral() const { return options_[1]; }
  const PolicyOption& hawkish() const { return options_[2]; }
  const PolicyOption& by_label(OptionLabel label) const;
  const std::vector<PolicyOption>& all() const { return options_; }

 private:
  std::vector<PolicyOption> options_;
};

struct Vote {
  std::string agent_id;
  OptionLabel option_label = OptionLabel::neutral;
  RateDecision delta_bps;
  std::string justification;
};

enum class Strategy { baseline, icl, cod };
const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from(std::string_view name);

enum class Stage {
  analyst,
  economist,
  member_analysis,
  exchange,
  member_vote,
  statement,
  reflection,
};
const char* stage_name(Stage s);

struct TranscriptEntry {
  Stage stage = Stage::analyst;
  std::string agent_id;
  std::string text;
};

inline constexpr int kMemberCount = 3;

// One simulated meeting run. `failed` records a run aborted mid-stage; such
// runs keep their partial transcript and are excluded from metrics.
struct RunRecord {
  std::string meeting_id;
  int run_index = 0;
  Strategy strategy = Strategy::baseline;
  std::vector<Vote> votes;  // one per member when successful
  RateDecision decision;
  std::string statement;
  std::vector<TranscriptEntry> transcript;
  long long tokens_used = 0;
  bool failed = false;
  std::string error;
};

// ---------------------------------------------------------------------------
// Member profiles and personas
// ---------------------------------------------------------------------------

struct MemberProfile {
  std::string name;
  double hawkishness = 0.0;
  std::string regional_affiliation;
  std::string gender;
  std::string political_party;
  bool focus_labor = false;
  bool focus_inflation = false;
  bool focus_banking = false;
  bool focus_global = false;
  double tenure_years = 0.0;

  void validate() const;
};

enum class Archetype { regional_pragmatist, academic_balancer, central_policymaker };

// "Regional Pragmatist" etc.; also the opening words of the prompt block.
const char* archetype_display_name(Archetype a);
// "RegionalPragmatist" etc.; used in personas.json.
const char* archetype_id(Archetype a);
std::optional<Archetype> archetype_from_id(std::string_view id);

struct Persona {
  Archetype archetype = Archetype::regional_pragmatist;
  std::vector<double> centroid;
  std::string prompt_block;
};

}  // namespace fedsight
