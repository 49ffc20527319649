#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fedsight/core.hpp"
#include "fedsight/dates.hpp"

namespace fedsight::ingest {

// Availability cutoff: an observation qualifies for a meeting when its
// availability date is at most meeting date minus this many calendar days.
inline constexpr int kAvailabilityLagDays = 2;

// One structured variable as a point-in-time series: (availability_date,
// value) pairs, strictly increasing in date.
struct IndicatorSeries {
  std::string variable_name;
  std::vector<std::pair<IsoDate, double>> observations;

  void validate() const;
};

// Same shape for categorical variables (fed chair, White House party).
struct CategoricalSeries {
  std::string variable_name;
  std::vector<std::pair<IsoDate, std::string>> observations;

  void validate() const;
};

struct MeetingCalendar {
  std::vector<std::pair<std::string, RateDecision>> entries;  // ascending ids

  bool contains(const std::string& meeting_id) const;
  RateDecision actual_for(const std::string& meeting_id) const;  // throws
  std::size_t size() const { return entries.size(); }

  // Hike/cut/hold percentages over all entries.
  struct Distribution {
    double hikes_pct = 0.0;
    double cuts_pct = 0.0;
    double holds_pct = 0.0;
  };
  Distribution distribution() const;
};

// All structured series for one data tree, keyed by variable name.
struct SeriesSet {
  std::map<std::string, IndicatorSeries> numeric;
  std::map<std::string, CategoricalSeries> categorical;
};

// Variable names a snapshot requires; one CSV per name under
// data_root/indicators/.
extern const std::vector<std::string> kNumericVariables;
extern const std::vector<std::string> kCategoricalVariables;

// Latest observation with availability_date <= meeting_date - 2 days.
// Throws MissingDataError when nothing qualifies.
double align_indicator(const IndicatorSeries& series, const IsoDate& meeting_date);
std::string align_categorical(const CategoricalSeries& series,
                              const IsoDate& meeting_date);

// One line per (year, range): "Year {Y}: {range}: {n} members", years
// ascending, ranges ascending by parsed lower bound, joined by '\n'.
// Empty dot plot renders as "".
std::string verbalize_dotplot(const DotPlot& dp);

// Inverse of verbalize_dotplot; used by the round-trip property and any
// consumer that wants counts back out of a rendered block.
DotPlot parse_verbalized_dotplot(const std::string& text);

// Parses the dotplot.json schema {"year_buckets": {"<year>": {"<range>":
// count}}} and validates counts. Parse errors carry the byte position.
DotPlot parse_dotplot_json(const std::string& json_text,
                           const std::string& origin = "dotplot.json");

// CSV "meeting_id,actual_delta_bps". Entries must be strictly increasing,
// actuals on the 25-bp grid; an empty body is an error.
MeetingCalendar load_calendar(const std::filesystem::path& file);

// Loads data_root/indicators/*.csv. Files listed in kNumericVariables load
// as numeric series, fed_chair/white_house_party as categorical.
SeriesSet load_series_dir(const std::filesystem::path& indicators_dir);

// Structured indicators alone, aligned to the meeting's cutoff date; used by
// snapshot assembly and by models that need no unstructured inputs.
StructuredIndicators build_indicators(const IsoDate& meeting_date,
                                      const SeriesSet& series,
                                      const std::string& meeting_id);

// Assembles the full snapshot for data_root/<meeting_id>/. Missing
// unstructured files degrade to empty text with a warning; missing
// structured data is an error.
MeetingSnapshot load_snapshot(const std::filesystem::path& meeting_dir,
                              const MeetingCalendar& calendar,
                              const SeriesSet& series);

// Convenience: snapshot for data_root / meeting_id.
MeetingSnapshot load_snapshot_from_root(const std::filesystem::path& data_root,
                                        const std::string& meeting_id,
                                        const MeetingCalendar& calendar,
                                        const SeriesSet& series);

// Optional per-meeting reference statement (actual_statement.txt), used only
// for scoring similarity; never part of the snapshot or any prompt.
std::string load_actual_statement(const std::filesystem::path& data_root,
                                  const std::string& meeting_id);

}  // namespace fedsight::ingest
