#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsight/core.hpp"
#include "fedsight/gateway.hpp"

namespace fedsight::deliberate {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct MemberView {
  std::string agent_id;
  std::string analysis;
  OptionLabel leaning = OptionLabel::neutral;
  double confidence = 0.5;
};

struct MemoryEntry {
  std::string meeting_id;
  std::string agent_id;
  RateDecision predicted;  // the member's own vote at that meeting
  RateDecision actual;
  std::string reflection;
  // Logical append order, not wall time: keeps replay byte-stable.
  std::int64_t created_at = 0;
};

// Long-term memory persisted as memory.json. Append-only; created_at is a
// monotone logical clock assigned on append.
class MemoryStore {
 public:
  void append(MemoryEntry entry);
  // Most recent `limit` entries for the agent, oldest first.
  std::vector<MemoryEntry> for_agent(const std::string& agent_id,
                                     std::size_t limit = 5) const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<MemoryEntry>& entries() const { return entries_; }

  static MemoryStore load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

 private:
  std::vector<MemoryEntry> entries_;
  std::int64_t clock_ = 0;
};

struct CoDDraft {
  std::vector<std::string> steps;
  std::string final_text;
};

inline constexpr int kCoDMaxWordsPerStep = 30;

struct CoDValidation {
  CoDDraft draft;
  std::vector<std::size_t> violating_steps;  // indices with > 30 words
  bool ok() const { return violating_steps.empty(); }
};

// ---------------------------------------------------------------------------
// Parsers and prompt fragments (pure; exposed for tests)
// ---------------------------------------------------------------------------

// "cut25: 0.1, hold: 0.7, hike25: 0.2" -> weights over {-25, 0, +25};
// any cutN/hikeN/hold token followed by a number counts. Returns nullopt
// when nothing usable was found.
std::optional<MarketOutlook> parse_outlook_response(const std::string& text);

// Uniform over {-25, 0, +25}: the analyst fallback.
MarketOutlook fallback_outlook();

// "DOVISH: -25 | rationale" lines (case-insensitive labels). Returns nullopt
// on a missing label, off-grid delta, or non-increasing deltas.
std::optional<OptionsTriple> parse_options_response(const std::string& text);

// {support min, mode, support max} of the outlook, with generic rationales;
// degenerate supports expand around the mode so deltas stay strictly
// increasing and inside the grid.
OptionsTriple default_options(const MarketOutlook& outlook);

struct ParsedView {
  std::optional<OptionLabel> leaning;
  std::optional<double> confidence;  // clamped to [0,1] when present
};
ParsedView parse_view_response(const std::string& text);

struct ParsedVote {
  std::optional<OptionLabel> label;
  std::string justification;
};
ParsedVote parse_vote_response(const std::string& text);

int word_count(const std::string& text);

std::string build_cod_prompt(const std::string& base_prompt);
CoDValidation validate_cod(const std::string& response);
// Truncates each violating step to its first 30 words.
CoDDraft truncate_cod(const CoDDraft& draft);
// Canonical rendering: numbered steps, then "FINAL:" and the final section.
std::string render_cod(const CoDDraft& draft);

// Strict majority (>= 2) wins; a 1-1-1 split goes to the option whose delta
// has the highest outlook probability; residual ties go to the neutral
// option. Total over all vote profiles.
RateDecision tally(const std::vector<Vote>& votes, const MarketOutlook& outlook);

// Does the statement text state this decision? Used to decide whether the
// deterministic header must be prepended.
bool statement_mentions(const RateDecision& decision, const std::string& text);
std::string statement_header(const RateDecision& decision);

// The ICL reveal phrase. Appears only in reflection prompts; the leak scan
// asserts it is absent from every prediction-phase prompt.
extern const char* kRevealPrefix;  // "The actual decision was "
std::string reveal_sentence(const RateDecision& actual);

// Default warm-up meetings for the icl strategy: one cut, one hold, one hike
// from before the backtest window.
extern const char* const kDefaultWarmupMeetings[3];

// Deterministic rendering of the structured snapshot block.
std::string render_indicators(const StructuredIndicators& ind);

// Fixed agent ids used in tags and fixtures.
extern const char* kAnalystId;    // "analyst"
extern const char* kEconomistId;  // "economist"
extern const char* kChairId;      // "chair"
std::string member_id(int index);  // 0 -> "member_1"

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct EngineConfig {
  int max_output_tokens = 1024;
  double temperature = 0.0;
  std::size_t memory_limit = 5;   // reflections retrieved per member
  std::uint64_t root_seed = 0;    // per-call sub-seeds are derived from this
};

// Accumulates one run's transcript and token usage across stages.
struct RunTrace {
  std::vector<TranscriptEntry> transcript;
  long long tokens = 0;
};

class DeliberationEngine {
 public:
  DeliberationEngine(gateway::Gateway& gw, std::vector<Persona> personas,
                     EngineConfig config = {});

  // Full workflow: analyst -> economist -> member analyses -> exchange ->
  // votes -> tally -> statement. Stage errors yield a failed RunRecord with
  // the partial transcript instead of throwing.
  RunRecord run_meeting(const MeetingSnapshot& snapshot, Strategy strategy,
                        int run_index, const MemoryStore* memory = nullptr);

  // Sequential warm-up over historical meetings (ascending meeting_id):
  // simulate, reveal the actual decision, store one reflection per member.
  // A gateway error aborts that meeting but keeps entries stored so far.
  // Returns the number of entries added.
  int icl_warmup(const std::vector<MeetingSnapshot>& history, MemoryStore& store);

  // Individual stages, public for unit tests.
  MarketOutlook run_analyst(const MeetingSnapshot& snapshot, Strategy strategy,
                            int run_index, RunTrace& trace);
  OptionsTriple run_economist(const MeetingSnapshot& snapshot,
                              const MarketOutlook& outlook, Strategy strategy,
                              int run_index, RunTrace& trace);
  MemberView run_member_analysis(int member_index, const MeetingSnapshot& snapshot,
                                 const OptionsTriple& options, Strategy strategy,
                                 int run_index, const MemoryStore* memory,
                                 RunTrace& trace);
  std::vector<MemberView> run_exchange(const std::vector<MemberView>& views,
                                       const MeetingSnapshot& snapshot,
                                       const OptionsTriple& options,
                                       Strategy strategy, int run_index,
                                       RunTrace& trace);
  std::vector<Vote> collect_votes(const std::vector<MemberView>& views,
                                  const MeetingSnapshot& snapshot,
                                  const OptionsTriple& options, Strategy strategy,
                                  int run_index, RunTrace& trace);
  std::string synthesize_statement(const RateDecision& decision,
                                   const std::vector<Vote>& votes,
                                   const MeetingSnapshot& snapshot, int run_index,
                                   RunTrace& trace);

  const std::vector<Persona>& personas() const { return personas_; }

 private:
  struct CallResult {
    std::string text;        // parseable text (CoD: re-rendered draft)
    int retries_used = 0;
  };
  // One gateway call; under strategy = cod and cod_wrap, applies the
  // build -> validate -> retry once -> truncate pipeline.
  CallResult call_stage(const MeetingSnapshot& snapshot, Stage stage,
                        const std::string& agent_id, int run_index,
                        const std::string& system_prompt,
                        const std::string& user_prompt, Strategy strategy,
                        bool cod_wrap, RunTrace& trace);

  std::string member_briefing(const MeetingSnapshot& snapshot) const;

  gateway::Gateway& gateway_;
  std::vector<Persona> personas_;
  EngineConfig config_;
};

}  // namespace fedsight::deliberate
