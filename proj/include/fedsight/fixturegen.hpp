#pragma once

#include <array>
#include <string>
#include <vector>

#include "fedsight/core.hpp"
#include "fedsight/evaluate.hpp"
#include "fedsight/gateway.hpp"
#include "fedsight/ingest.hpp"

namespace fedsight::fixturegen {

// Builders for scripted-gateway fixtures. Response texts are written against
// the deliberation parsers (draft steps + FINAL section, LEANING/VOTE lines),
// so a scripted backtest exercises the real pipeline end to end.

// One member ballot per seat, in member order.
using VoteLabels = std::array<OptionLabel, kMemberCount>;

// Script for one meeting: the economist proposes {center-25, center, center+25}
// (shifted inward at the grid bounds), and members cast the listed labels.
// `runs` with one row scripts every run identically; with multiple rows, run
// j reads row j (the last row serves any later runs).
struct ScriptPlan {
  std::string meeting_id;
  RateDecision center;
  std::vector<VoteLabels> runs;
  bool with_reflections = false;  // also script the post-meeting reflections
};

// The option triple the scripted economist proposes for a given center.
OptionsTriple centered_options(RateDecision center);

// Majority delta implied by one ballot row under centered_options(center).
RateDecision planned_decision(const ScriptPlan& plan, std::size_t run);

// Chair statement that names the decision and survives the consistency scan.
std::string stylized_statement(const std::string& meeting_id, RateDecision decision);

// Fixture entries for one meeting (analyst, economist, member stages, chair,
// and optionally reflections).
std::vector<gateway::FixtureEntry> script_meeting(const ScriptPlan& plan);

// Concatenation of script_meeting over all plans.
std::vector<gateway::FixtureEntry> script_backtest(const std::vector<ScriptPlan>& plans);

// Every meeting unanimous at the actual decision (used for the 2018 replay:
// all runs correct, so accuracy 1.0 and MAE 0).
std::vector<ScriptPlan> unanimous_plans(const ingest::MeetingCalendar& calendar);

// The 2023-2024 pattern behind the headline metric row: the first meeting is
// missed (everyone votes one step easy), and in run 2 of every meeting one
// rotating member dissents without flipping the majority. Over 16 meetings x
// 5 runs this yields total accuracy 15/16, MAE 0.25/16, and stability 224/240.
std::vector<ScriptPlan> dissent_pattern_plans(const ingest::MeetingCalendar& calendar);

// Warm-up meetings with reflections scripted (memory-building path).
std::vector<ScriptPlan> warmup_plans(const ingest::MeetingCalendar& history,
                                     const std::vector<std::string>& meeting_ids);

// Single-run prediction bundle for the simple per-meeting baseline column of
// the 2018 comparison (two misses out of eight -> accuracy 0.75, MAE 0.0625).
evaluate::MetricsInput minifed_bundle(const ingest::MeetingCalendar& calendar_2018);

}  // namespace fedsight::fixturegen
