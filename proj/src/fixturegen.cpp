#include "fedsight/fixturegen.hpp"

#include <algorithm>
#include <map>

#include "fedsight/deliberate.hpp"
#include "fedsight/errors.hpp"

namespace fedsight::fixturegen {

namespace {

std::string bps_text(int bps) { return std::to_string(bps); }

// Outlook line in the analyst grammar, concentrated on the center move.
std::string analyst_response(const OptionsTriple& options) {
  auto term = [](const RateDecision& d, const char* prob) {
    int bps = d.bps();
    std::string label;
    if (bps < 0) {
      label = "cut" + std::to_string(-bps);
    } else if (bps == 0) {
      label = "hold";
    } else {
      label = "hike" + std::to_string(bps);
    }
    return label + ": " + prob;
  };
  return term(options.dovish().delta, "0.15") + ", " +
         term(options.neutral().delta, "0.70") + ", " +
         term(options.hawkish().delta, "0.15");
}

std::string economist_response(const OptionsTriple& options) {
  return "1. Futures pricing concentrates on the middle path for this meeting.\n"
         "2. Inflation and employment trends support staying close to that path.\n"
         "FINAL:\n"
         "DOVISH: " + bps_text(options.dovish().delta.bps()) +
         " | Ease relative to the market path.\n"
         "NEUTRAL: " + bps_text(options.neutral().delta.bps()) +
         " | Follow the market-implied path.\n"
         "HAWKISH: " + bps_text(options.hawkish().delta.bps()) +
         " | Tighten relative to the market path.";
}

std::string member_analysis_response(OptionLabel label) {
  return std::string(
             "1. Inflation momentum remains the dominant risk in the briefing.\n"
             "2. District reports describe resilient hiring and steady demand.\n"
             "FINAL:\n"
             "LEANING: ") +
         option_label_name(label) + "\nCONFIDENCE: 0.80";
}

std::string exchange_response(OptionLabel label) {
  return std::string(
             "1. Colleague readings of the briefing match my own assessment.\n"
             "FINAL:\n"
             "LEANING: ") +
         option_label_name(label) + "\nCONFIDENCE: 0.85";
}

std::string vote_response(OptionLabel label) {
  return std::string(
             "1. The selected option best balances both sides of the mandate.\n"
             "FINAL:\n"
             "VOTE: ") +
         option_label_name(label) +
         "\nJUSTIFICATION: This option aligns with market expectations and the "
         "incoming data.";
}

std::string reflection_response() {
  return "The outcome tracked the market-implied path, so futures pricing "
         "deserves heavy weight. Next time, watch inflation momentum relative "
         "to the projections more closely.";
}

gateway::FixtureEntry entry(const std::string& meeting_id, Stage stage,
                            const std::string& agent_id,
                            std::vector<std::string> responses) {
  gateway::FixtureEntry e;
  e.meeting_id = meeting_id;
  e.stage = stage_name(stage);
  e.agent_id = agent_id;
  e.run_index = std::nullopt;  // wildcard: run j reads response j (clamped)
  e.responses = std::move(responses);
  return e;
}

}  // namespace

OptionsTriple centered_options(RateDecision center) {
  int bps = center.bps();
  if (std::abs(bps) + kGridStepBps > kMaxAbsDeltaBps) {
    throw ValidationError("scripted options need one grid step of headroom "
                          "around " + center.label());
  }
  return OptionsTriple::make(
      RateDecision::from_bps(bps - kGridStepBps), center,
      RateDecision::from_bps(bps + kGridStepBps),
      "Ease relative to the market path.", "Follow the market-implied path.",
      "Tighten relative to the market path.");
}

RateDecision planned_decision(const ScriptPlan& plan, std::size_t run) {
  if (plan.runs.empty()) throw ValidationError("script plan has no ballot rows");
  const VoteLabels& row = plan.runs[std::min(run, plan.runs.size() - 1)];
  OptionsTriple options = centered_options(plan.center);
  std::map<int, int> counts;
  for (OptionLabel label : row) ++counts[options.by_label(label).delta.bps()];
  for (const auto& [bps, count] : counts) {
    if (count >= 2) return RateDecision::from_bps(bps);
  }
  throw ValidationError("script plan row for " + plan.meeting_id +
                        " has no majority ballot");
}

std::string stylized_statement(const std::string& meeting_id,
                               RateDecision decision) {
  std::string action;
  if (decision.bps() > 0) {
    action = "raise the target range for the federal funds rate by " +
             std::to_string(decision.bps()) + " basis points";
  } else if (decision.bps() < 0) {
    action = "lower the target range for the federal funds rate by " +
             std::to_string(-decision.bps()) + " basis points";
  } else {
    action = "maintain the target range for the federal funds rate at its "
             "current level";
  }
  return "Recent indicators point to continued expansion in economic activity. "
         "Job gains have remained solid, and inflation is being watched "
         "closely relative to the Committee's longer-run objective.\n\n"
         "In support of its goals, the Committee decided to " + action +
         ". The Committee will continue to assess incoming information for the "
         "economic outlook as of the " + meeting_id + " meeting.";
}

std::vector<gateway::FixtureEntry> script_meeting(const ScriptPlan& plan) {
  if (plan.runs.empty()) throw ValidationError("script plan has no ballot rows");
  OptionsTriple options = centered_options(plan.center);

  // Decisions must agree across rows for a single scripted statement; the
  // builders below only ever dissent without flipping the majority.
  RateDecision decision = planned_decision(plan, 0);
  for (std::size_t j = 1; j < plan.runs.size(); ++j) {
    if (planned_decision(plan, j) != decision) {
      throw ValidationError("script plan rows for " + plan.meeting_id +
                            " imply different decisions");
    }
  }

  std::vector<gateway::FixtureEntry> entries;
  entries.push_back(entry(plan.meeting_id, Stage::analyst, deliberate::kAnalystId,
                          {analyst_response(options)}));
  entries.push_back(entry(plan.meeting_id, Stage::economist,
                          deliberate::kEconomistId, {economist_response(options)}));
  for (int m = 0; m < kMemberCount; ++m) {
    const std::string agent = deliberate::member_id(m);
    OptionLabel base = plan.runs.front()[static_cast<std::size_t>(m)];
    entries.push_back(entry(plan.meeting_id, Stage::member_analysis, agent,
                            {member_analysis_response(base)}));
    entries.push_back(entry(plan.meeting_id, Stage::exchange, agent,
                            {exchange_response(base)}));

    std::vector<std::string> votes;
    votes.reserve(plan.runs.size());
    bool varies = false;
    for (const VoteLabels& row : plan.runs) {
      OptionLabel label = row[static_cast<std::size_t>(m)];
      varies = varies || label != base;
      votes.push_back(vote_response(label));
    }
    if (!varies) votes.resize(1);  // identical runs: let the wildcard clamp
    entries.push_back(
        entry(plan.meeting_id, Stage::member_vote, agent, std::move(votes)));
  }
  entries.push_back(entry(plan.meeting_id, Stage::statement, deliberate::kChairId,
                          {stylized_statement(plan.meeting_id, decision)}));
  if (plan.with_reflections) {
    for (int m = 0; m < kMemberCount; ++m) {
      entries.push_back(entry(plan.meeting_id, Stage::reflection,
                              deliberate::member_id(m), {reflection_response()}));
    }
  }
  return entries;
}

std::vector<gateway::FixtureEntry> script_backtest(
    const std::vector<ScriptPlan>& plans) {
  std::vector<gateway::FixtureEntry> entries;
  for (const ScriptPlan& plan : plans) {
    std::vector<gateway::FixtureEntry> batch = script_meeting(plan);
    entries.insert(entries.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
  }
  return entries;
}

std::vector<ScriptPlan> unanimous_plans(const ingest::MeetingCalendar& calendar) {
  std::vector<ScriptPlan> plans;
  plans.reserve(calendar.size());
  for (const auto& [meeting_id, actual] : calendar.entries) {
    ScriptPlan plan;
    plan.meeting_id = meeting_id;
    plan.center = actual;
    plan.runs = {{OptionLabel::neutral, OptionLabel::neutral, OptionLabel::neutral}};
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<ScriptPlan> dissent_pattern_plans(
    const ingest::MeetingCalendar& calendar) {
  constexpr std::size_t kRuns = 5;
  constexpr std::size_t kDissentRun = 2;

  std::vector<ScriptPlan> plans;
  plans.reserve(calendar.size());
  for (std::size_t i = 0; i < calendar.entries.size(); ++i) {
    const auto& [meeting_id, actual] = calendar.entries[i];
    ScriptPlan plan;
    plan.meeting_id = meeting_id;
    plan.center = actual;

    // Meeting 0 is the engineered miss: everyone takes the easy option, one
    // step below the actual. Elsewhere the committee sits on the actual.
    OptionLabel consensus = i == 0 ? OptionLabel::dovish : OptionLabel::neutral;
    VoteLabels row{consensus, consensus, consensus};
    plan.runs.assign(kRuns, row);

    // One rotating member breaks ranks in a single run; two votes still
    // carry the majority, so the decision never changes.
    std::size_t dissenter = i % static_cast<std::size_t>(kMemberCount);
    plan.runs[kDissentRun][dissenter] = OptionLabel::hawkish;
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<ScriptPlan> warmup_plans(const ingest::MeetingCalendar& history,
                                     const std::vector<std::string>& meeting_ids) {
  std::vector<ScriptPlan> plans;
  plans.reserve(meeting_ids.size());
  for (const std::string& meeting_id : meeting_ids) {
    ScriptPlan plan;
    plan.meeting_id = meeting_id;
    plan.center = history.actual_for(meeting_id);
    plan.runs = {{OptionLabel::neutral, OptionLabel::neutral, OptionLabel::neutral}};
    plan.with_reflections = true;
    plans.push_back(std::move(plan));
  }
  return plans;
}

evaluate::MetricsInput minifed_bundle(const ingest::MeetingCalendar& calendar_2018) {
  if (calendar_2018.size() != 8) {
    throw ValidationError("the 2018 comparison bundle needs exactly 8 meetings");
  }
  // Simple per-meeting baseline picks for 2018: hikes at the January, March,
  // June, and December meetings. January and September are wrong.
  const int picks[8] = {25, 25, 0, 25, 0, 0, 0, 25};

  evaluate::MetricsInput input;
  for (std::size_t i = 0; i < calendar_2018.entries.size(); ++i) {
    const auto& [meeting_id, actual] = calendar_2018.entries[i];
    RateDecision pick = RateDecision::from_bps(picks[i]);
    input.meeting_ids.push_back(meeting_id);
    input.actuals.push_back(actual);
    input.decisions.push_back({pick});
    input.votes.push_back({{pick, pick, pick}});
  }
  return input;
}

}  // namespace fedsight::fixturegen
