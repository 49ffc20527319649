#include "fedsight/core.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "fedsight/errors.hpp"
#include "fedsight/log.hpp"

namespace fedsight {

RateDecision RateDecision::from_bps(int delta_bps) {
  if (delta_bps % kGridStepBps != 0) {
    throw ValidationError("rate decision " + std::to_string(delta_bps) +
                          " bps is not a multiple of 25");
  }
  if (delta_bps < -kMaxAbsDeltaBps || delta_bps > kMaxAbsDeltaBps) {
    throw ValidationError("rate decision " + std::to_string(delta_bps) +
                          " bps exceeds the +/-100 bps bound");
  }
  return RateDecision(delta_bps);
}

std::string RateDecision::label() const {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%+d bps", delta_bps_);
  if (delta_bps_ == 0) {
    return "0 bps";
  }
  return buffer;
}

std::string RateDecision::percent_label() const {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%s%.2f%%", delta_bps_ < 0 ? "-" : "",
                std::abs(delta_bps_) / 100.0);
  return buffer;
}

RateDecision snap_to_grid(double raw_change_pp) {
  if (!std::isfinite(raw_change_pp)) {
    throw ValidationError("snap_to_grid: input is not finite");
  }
  // Quantize in quarter-point units; llround rounds halfway away from zero.
  long long quarters = std::llround(raw_change_pp * 100.0 / kGridStepBps);
  long long bps = quarters * kGridStepBps;
  if (bps < -kMaxAbsDeltaBps || bps > kMaxAbsDeltaBps) {
    long long clamped = bps < 0 ? -kMaxAbsDeltaBps : kMaxAbsDeltaBps;
    log_warn("snap_to_grid: clamping " + std::to_string(bps) + " bps to " +
             std::to_string(clamped) + " bps");
    bps = clamped;
  }
  return RateDecision::from_bps(static_cast<int>(bps));
}

void StructuredIndicators::validate() const {
  auto require_finite = [](double v, const char* name) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string("indicator '") + name +
                            "' is not finite");
    }
  };
  require_finite(pce_yoy, "pce_yoy");
  require_finite(cpi_yoy, "cpi_yoy");
  require_finite(inflation_expect_1y, "inflation_expect_1y");
  require_finite(tb3m, "tb3m");
  require_finite(tb6m, "tb6m");
  require_finite(m2_supply, "m2_supply");
  require_finite(bbk_gdp, "bbk_gdp");
  require_finite(unemployment, "unemployment");
  require_finite(vix, "vix");
  require_finite(prev_fftr, "prev_fftr");
  if (unemployment < 0.0 || unemployment > 100.0) {
    throw ValidationError("unemployment rate outside [0, 100]");
  }
  if (vix < 0.0) {
    throw ValidationError("vix must be non-negative");
  }
  if (prev_change_bps % kGridStepBps != 0) {
    throw ValidationError("prev_change_bps " + std::to_string(prev_change_bps) +
                          " is not a multiple of 25");
  }
}

void DotPlot::validate() const {
  long long expected_total = -1;
  for (const auto& [year, buckets] : year_buckets) {
    long long total = 0;
    for (const auto& [range, count] : buckets) {
      if (count <= 0) {
        throw ValidationError("dot plot count for year " + std::to_string(year) +
                              " range '" + range + "' must be positive");
      }
      total += count;
    }
    if (expected_total < 0) {
      expected_total = total;
    } else if (total != expected_total) {
      throw ValidationError(
          "dot plot year " + std::to_string(year) + " sums to " +
          std::to_string(total) + " participants, expected " +
          std::to_string(expected_total));
    }
  }
}

MarketOutlook MarketOutlook::from_weights(const std::map<int, double>& weights_by_bps) {
  double total = 0.0;
  for (const auto& [bps, w] : weights_by_bps) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("market outlook weight for " + std::to_string(bps) +
                            " bps must be finite and non-negative");
    }
    RateDecision::from_bps(bps);  // grid check
    total += w;
  }
  if (weights_by_bps.empty() || total <= 0.0) {
    throw ValidationError("market outlook requires a positive total weight");
  }
  MarketOutlook outlook;
  for (const auto& [bps, w] : weights_by_bps) {
    outlook.probs_[bps] = w / total;
  }
  return outlook;
}

double MarketOutlook::prob_of(int bps) const {
  auto it = probs_.find(bps);
  return it == probs_.end() ? 0.0 : it->second;
}

int MarketOutlook::support_min_bps() const {
  if (probs_.empty()) {
    throw ValidationError("market outlook is empty");
  }
  return probs_.begin()->first;
}

int MarketOutlook::support_max_bps() const {
  if (probs_.empty()) {
    throw ValidationError("market outlook is empty");
  }
  return probs_.rbegin()->first;
}

int MarketOutlook::mode_bps() const {
  if (probs_.empty()) {
    throw ValidationError("market outlook is empty");
  }
  int best = probs_.begin()->first;
  double best_p = -1.0;
  for (const auto& [bps, p] : probs_) {
    bool better = p > best_p;
    if (p == best_p) {
      int abs_bps = std::abs(bps);
      int abs_best = std::abs(best);
      better = abs_bps < abs_best || (abs_bps == abs_best && bps < best);
    }
    if (better) {
      best = bps;
      best_p = p;
    }
  }
  return best;
}

const char* option_label_name(OptionLabel label) {
  switch (label) {
    case OptionLabel::dovish:
      return "dovish";
    case OptionLabel::neutral:
      return "neutral";
    case OptionLabel::hawkish:
      return "hawkish";
  }
  return "?";
}

std::optional<OptionLabel> option_label_from(std::string_view name) {
  if (name == "dovish") return OptionLabel::dovish;
  if (name == "neutral") return OptionLabel::neutral;
  if (name == "hawkish") return OptionLabel::hawkish;
  return std::nullopt;
}

OptionsTriple OptionsTriple::make(RateDecision dovish, RateDecision neutral,
                                  RateDecision hawkish,
                                  std::string dovish_rationale,
                                  std::string neutral_rationale,
                                  std::string hawkish_rationale) {
  if (!(dovish.bps() < neutral.bps() && neutral.bps() < hawkish.bps())) {
    throw ValidationError("policy options must be strictly increasing "
                          "dovish -> neutral -> hawkish (got " +
                          dovish.label() + ", " + neutral.label() + ", " +
                          hawkish.label() + ")");
  }
  OptionsTriple triple;
  triple.options_ = {
      PolicyOption{OptionLabel::dovish, dovish, std::move(dovish_rationale)},
      PolicyOption{OptionLabel::neutral, neutral, std::move(neutral_rationale)},
      PolicyOption{OptionLabel::hawkish, hawkish, std::move(hawkish_rationale)},
  };
  return triple;
}

const PolicyOption& OptionsTriple::by_label(OptionLabel label) const {
  for (const auto& option : options_) {
    if (option.label == label) {
      return option;
    }
  }
  throw ValidationError("options triple is not initialized");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::baseline:
      return "baseline";
    case Strategy::icl:
      return "icl";
    case Strategy::cod:
      return "cod";
  }
  return "?";
}

std::optional<Strategy> strategy_from(std::string_view name) {
  if (name == "baseline") return Strategy::baseline;
  if (name == "icl") return Strategy::icl;
  if (name == "cod") return Strategy::cod;
  return std::nullopt;
}

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::analyst:
      return "analyst";
    case Stage::economist:
      return "economist";
    case Stage::member_analysis:
      return "member_analysis";
    case Stage::exchange:
      return "exchange";
    case Stage::member_vote:
      return "member_vote";
    case Stage::statement:
      return "statement";
    case Stage::reflection:
      return "reflection";
  }
  return "?";
}

void MemberProfile::validate() const {
  if (name.empty()) {
    throw ValidationError("member profile needs a name");
  }
  if (!std::isfinite(hawkishness)) {
    throw ValidationError("hawkishness must be finite for " + name);
  }
  if (!std::isfinite(tenure_years) || tenure_years < 0.0) {
    throw ValidationError("tenure_years must be >= 0 for " + name);
  }
}

const char* archetype_display_name(Archetype a) {
  switch (a) {
    case Archetype::regional_pragmatist:
      return "Regional Pragmatist";
    case Archetype::academic_balancer:
      return "Academic Balancer";
    case Archetype::central_policymaker:
      return "Central Policymaker";
  }
  return "?";
}

const char* archetype_id(Archetype a) {
  switch (a) {
    case Archetype::regional_pragmatist:
      return "RegionalPragmatist";
    case Archetype::academic_balancer:
      return "AcademicBalancer";
    case Archetype::central_policymaker:
      return "CentralPolicymaker";
  }
  return "?";
}

std::optional<Archetype> archetype_from_id(std::string_view id) {
  if (id == "RegionalPragmatist") return Archetype::regional_pragmatist;
  if (id == "AcademicBalancer") return Archetype::academic_balancer;
  if (id == "CentralPolicymaker") return Archetype::central_policymaker;
  return std::nullopt;
}

}  // namespace fedsight
