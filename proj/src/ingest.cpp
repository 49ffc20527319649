#include "fedsight/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"
#include "fedsight/log.hpp"

namespace fedsight::ingest {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_double_field(const std::string& text, const std::string& origin,
                          std::size_t line_no) {
  try {
    std::size_t consumed = 0;
    double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw ParseError(origin + ":" + std::to_string(line_no) +
                     ": expected a number, got '" + text + "'");
  }
}

// Lower bound of a range label such as "0.00-0.25%" or "5.625%"; used only
// for ordering, so the unit suffix is irrelevant.
double range_lower_bound(const std::string& range) {
  std::size_t cut = range.find('-', 1);  // position 0 would be a minus sign
  std::string head = cut == std::string::npos ? range : range.substr(0, cut);
  if (!head.empty() && head.back() == '%') head.pop_back();
  try {
    std::size_t consumed = 0;
    double value = std::stod(head, &consumed);
    if (consumed == 0) throw std::invalid_argument("empty");
    return value;
  } catch (const std::exception&) {
    throw ValidationError("dot plot range label '" + range +
                          "' has no parsable lower bound");
  }
}

void check_series_header(std::ifstream& in, const std::string& origin,
                         std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  ++line_no;
  if (split_csv_line(line) !=
      std::vector<std::string>{"availability_date", "value"}) {
    throw ParseError(origin + ": expected header 'availability_date,value'");
  }
}

}  // namespace

const std::vector<std::string> kNumericVariables = {
    "pce_yoy", "cpi_yoy",      "inflation_expect_1y", "tb3m",
    "tb6m",    "m2_supply",    "bbk_gdp",             "unemployment",
    "vix",     "prev_fftr",    "prev_change_bps",
};

const std::vector<std::string> kCategoricalVariables = {"fed_chair",
                                                        "white_house_party"};

void IndicatorSeries::validate() const {
  if (variable_name.empty()) throw ValidationError("indicator series has no name");
  for (std::size_t i = 1; i < observations.size(); ++i) {
    if (!(observations[i - 1].first < observations[i].first)) {
      throw ValidationError(
          "series '" + variable_name +
          "': availability dates must be strictly increasing at " +
          observations[i].first.to_string());
    }
  }
  for (const auto& [date, value] : observations) {
    if (!std::isfinite(value)) {
      throw ValidationError("series '" + variable_name +
                            "': non-finite value at " + date.to_string());
    }
  }
}

void CategoricalSeries::validate() const {
  if (variable_name.empty()) throw ValidationError("categorical series has no name");
  for (std::size_t i = 1; i < observations.size(); ++i) {
    if (!(observations[i - 1].first < observations[i].first)) {
      throw ValidationError(
          "series '" + variable_name +
          "': availability dates must be strictly increasing at " +
          observations[i].first.to_string());
    }
  }
  for (const auto& [date, value] : observations) {
    if (value.empty()) {
      throw ValidationError("series '" + variable_name + "': empty category at " +
                            date.to_string());
    }
  }
}

bool MeetingCalendar::contains(const std::string& meeting_id) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const auto& e) { return e.first == meeting_id; });
}

RateDecision MeetingCalendar::actual_for(const std::string& meeting_id) const {
  for (const auto& [id, decision] : entries) {
    if (id == meeting_id) return decision;
  }
  throw ValidationError("meeting '" + meeting_id + "' is not in the calendar");
}

MeetingCalendar::Distribution MeetingCalendar::distribution() const {
  Distribution d;
  if (entries.empty()) return d;
  int hikes = 0, cuts = 0, holds = 0;
  for (const auto& [id, decision] : entries) {
    if (decision.bps() > 0) {
      ++hikes;
    } else if (decision.bps() < 0) {
      ++cuts;
    } else {
      ++holds;
    }
  }
  const double n = static_cast<double>(entries.size());
  d.hikes_pct = 100.0 * hikes / n;
  d.cuts_pct = 100.0 * cuts / n;
  d.holds_pct = 100.0 * holds / n;
  return d;
}

namespace {

template <typename T>
const T* latest_qualifying(const std::vector<std::pair<IsoDate, T>>& obs,
                           const IsoDate& cutoff) {
  const T* best = nullptr;
  for (const auto& [date, value] : obs) {
    if (date <= cutoff) {
      best = &value;
    } else {
      break;  // dates are strictly increasing
    }
  }
  return best;
}

}  // namespace

double align_indicator(const IndicatorSeries& series, const IsoDate& meeting_date) {
  const IsoDate cutoff = meeting_date.minus_days(kAvailabilityLagDays);
  const double* value = latest_qualifying(series.observations, cutoff);
  if (value == nullptr) {
    throw MissingDataError(series.variable_name, meeting_date.to_string());
  }
  return *value;
}

std::string align_categorical(const CategoricalSeries& series,
                              const IsoDate& meeting_date) {
  const IsoDate cutoff = meeting_date.minus_days(kAvailabilityLagDays);
  const std::string* value = latest_qualifying(series.observations, cutoff);
  if (value == nullptr) {
    throw MissingDataError(series.variable_name, meeting_date.to_string());
  }
  return *value;
}

std::string verbalize_dotplot(const DotPlot& dp) {
  std::string out;
  bool first = true;
  for (const auto& [year, ranges] : dp.year_buckets) {  // map: years ascend
    std::vector<std::pair<std::string, int>> ordered(ranges.begin(), ranges.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) {
                       return range_lower_bound(a.first) < range_lower_bound(b.first);
                     });
    for (const auto& [range, count] : ordered) {
      if (!first) out += '\n';
      first = false;
      out += "Year " + std::to_string(year) + ": " + range + ": " +
             std::to_string(count) + " members";
    }
  }
  return out;
}

DotPlot parse_verbalized_dotplot(const std::string& text) {
  DotPlot dp;
  if (trim(text).empty()) return dp;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "dot plot line " + std::to_string(line_no);
    if (line.rfind("Year ", 0) != 0) {
      throw ParseError(where + ": expected 'Year ...', got '" + line + "'");
    }
    std::size_t colon1 = line.find(':');
    std::size_t colon2 = line.rfind(':');
    if (colon1 == std::string::npos || colon2 == colon1) {
      throw ParseError(where + ": expected two ':' separators");
    }
    int year = 0;
    try {
      year = std::stoi(line.substr(5, colon1 - 5));
    } catch (const std::exception&) {
      throw ParseError(where + ": unparsable year");
    }
    std::string range = trim(line.substr(colon1 + 1, colon2 - colon1 - 1));
    std::string tail = trim(line.substr(colon2 + 1));
    const std::string suffix = " members";
    if (tail.size() <= suffix.size() ||
        tail.compare(tail.size() - suffix.size(), suffix.size(), suffix) != 0) {
      throw ParseError(where + ": expected '<n> members', got '" + tail + "'");
    }
    int count = 0;
    try {
      count = std::stoi(tail.substr(0, tail.size() - suffix.size()));
    } catch (const std::exception&) {
      throw ParseError(where + ": unparsable member count");
    }
    if (count <= 0) throw ParseError(where + ": member count must be positive");
    if (range.empty()) throw ParseError(where + ": empty range label");
    auto [it, inserted] = dp.year_buckets[year].emplace(range, count);
    (void)it;
    if (!inserted) {
      throw ParseError(where + ": duplicate range '" + range + "' for year " +
                       std::to_string(year));
    }
  }
  dp.validate();
  return dp;
}

DotPlot parse_dotplot_json(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": invalid JSON at byte " + std::to_string(e.byte) +
                     ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("year_buckets") ||
      !doc["year_buckets"].is_object()) {
    throw ParseError(origin + ": expected an object with a 'year_buckets' object");
  }
  DotPlot dp;
  for (const auto& [year_key, ranges] : doc["year_buckets"].items()) {
    int year = 0;
    try {
      std::size_t consumed = 0;
      year = std::stoi(year_key, &consumed);
      if (consumed != year_key.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw ParseError(origin + ": year key '" + year_key + "' is not an integer");
    }
    if (!ranges.is_object()) {
      throw ParseError(origin + ": year " + year_key + " must map to an object");
    }
    for (const auto& [range, count] : ranges.items()) {
      if (!count.is_number_integer() || count.get<long long>() <= 0) {
        throw ParseError(origin + ": count for " + year_key + " / '" + range +
                         "' must be a positive integer");
      }
      dp.year_buckets[year][range] = count.get<int>();
    }
  }
  try {
    dp.validate();
  } catch (const ValidationError& e) {
    throw ParseError(origin + ": " + std::string(e.what()));
  }
  return dp;
}

MeetingCalendar load_calendar(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open calendar " + file.string());
  const std::string origin = file.filename().string();
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  ++line_no;
  if (split_csv_line(line) !=
      std::vector<std::string>{"meeting_id", "actual_delta_bps"}) {
    throw ParseError(origin + ": expected header 'meeting_id,actual_delta_bps'");
  }
  MeetingCalendar calendar;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (fields.size() != 2) {
      throw ParseError(where + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    }
    IsoDate::parse(fields[0]);  // ids are decision-day dates; reject junk ids
    double bps = parse_double_field(fields[1], origin, line_no);
    if (bps != std::floor(bps)) {
      throw ParseError(where + ": actual_delta_bps must be an integer");
    }
    RateDecision decision = RateDecision::from_bps(static_cast<int>(bps));
    if (!calendar.entries.empty() && calendar.entries.back().first >= fields[0]) {
      throw ParseError(where + ": meeting ids must be strictly increasing");
    }
    calendar.entries.emplace_back(fields[0], decision);
  }
  if (calendar.entries.empty()) throw ParseError(origin + ": no meetings listed");
  return calendar;
}

namespace {

IndicatorSeries load_numeric_csv(const std::filesystem::path& file,
                                 const std::string& variable_name) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open series " + file.string());
  const std::string origin = file.filename().string();
  std::size_t line_no = 0;
  check_series_header(in, origin, line_no);
  IndicatorSeries series;
  series.variable_name = variable_name;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": expected 2 fields");
    }
    series.observations.emplace_back(
        IsoDate::parse(fields[0]),
        parse_double_field(fields[1], origin, line_no));
  }
  series.validate();
  return series;
}

CategoricalSeries load_categorical_csv(const std::filesystem::path& file,
                                       const std::string& variable_name) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open series " + file.string());
  const std::string origin = file.filename().string();
  std::size_t line_no = 0;
  check_series_header(in, origin, line_no);
  CategoricalSeries series;
  series.variable_name = variable_name;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": expected 2 fields");
    }
    series.observations.emplace_back(IsoDate::parse(fields[0]), fields[1]);
  }
  series.validate();
  return series;
}

}  // namespace

SeriesSet load_series_dir(const std::filesystem::path& indicators_dir) {
  if (!std::filesystem::is_directory(indicators_dir)) {
    throw IoError("indicators directory missing: " + indicators_dir.string());
  }
  SeriesSet set;
  for (const auto& name : kNumericVariables) {
    auto file = indicators_dir / (name + ".csv");
    if (!std::filesystem::exists(file)) {
      throw IoError("missing indicator file " + file.string());
    }
    set.numeric.emplace(name, load_numeric_csv(file, name));
  }
  for (const auto& name : kCategoricalVariables) {
    auto file = indicators_dir / (name + ".csv");
    if (!std::filesystem::exists(file)) {
      throw IoError("missing indicator file " + file.string());
    }
    set.categorical.emplace(name, load_categorical_csv(file, name));
  }
  return set;
}

namespace {

std::string load_optional_text(const std::filesystem::path& file,
                               const std::string& meeting_id) {
  if (!std::filesystem::exists(file)) {
    log_warn("meeting " + meeting_id + ": missing " + file.filename().string() +
             ", substituting empty text");
    return "";
  }
  return read_text_file(file);
}

}  // namespace

StructuredIndicators build_indicators(const IsoDate& meeting_date,
                                      const SeriesSet& series,
                                      const std::string& meeting_id) {
  auto need = [&](const std::string& name) -> double {
    auto it = series.numeric.find(name);
    if (it == series.numeric.end()) throw MissingDataError(name, meeting_id);
    return align_indicator(it->second, meeting_date);
  };
  auto need_cat = [&](const std::string& name) -> std::string {
    auto it = series.categorical.find(name);
    if (it == series.categorical.end()) throw MissingDataError(name, meeting_id);
    return align_categorical(it->second, meeting_date);
  };

  StructuredIndicators ind;
  ind.pce_yoy = need("pce_yoy");
  ind.cpi_yoy = need("cpi_yoy");
  ind.inflation_expect_1y = need("inflation_expect_1y");
  ind.tb3m = need("tb3m");
  ind.tb6m = need("tb6m");
  ind.m2_supply = need("m2_supply");
  ind.bbk_gdp = need("bbk_gdp");
  ind.unemployment = need("unemployment");
  ind.vix = need("vix");
  ind.prev_fftr = need("prev_fftr");
  double prev_change = need("prev_change_bps");
  if (prev_change != std::floor(prev_change)) {
    throw ValidationError("prev_change_bps for meeting " + meeting_id +
                          " must be an integer");
  }
  ind.prev_change_bps = static_cast<int>(prev_change);
  ind.fed_chair = need_cat("fed_chair");
  ind.white_house_party = need_cat("white_house_party");
  ind.validate();
  return ind;
}

MeetingSnapshot load_snapshot(const std::filesystem::path& meeting_dir,
                              const MeetingCalendar& calendar,
                              const SeriesSet& series) {
  const std::string meeting_id = meeting_dir.filename().string();
  if (!calendar.contains(meeting_id)) {
    throw ValidationError("meeting '" + meeting_id + "' is not in the calendar");
  }
  if (!std::filesystem::is_directory(meeting_dir)) {
    throw IoError("meeting directory missing: " + meeting_dir.string());
  }
  MeetingSnapshot snap;
  snap.meeting_id = meeting_id;
  snap.meeting_date = IsoDate::parse(meeting_id);
  snap.indicators = build_indicators(snap.meeting_date, series, meeting_id);

  snap.beige_book = load_optional_text(meeting_dir / "beige_book.txt", meeting_id);
  snap.fedwatch_text = load_optional_text(meeting_dir / "fedwatch.txt", meeting_id);

  auto dotplot_file = meeting_dir / "dotplot.json";
  if (std::filesystem::exists(dotplot_file)) {
    DotPlot dp = parse_dotplot_json(read_text_file(dotplot_file),
                                    meeting_id + "/dotplot.json");
    snap.dotplot_verbalized = verbalize_dotplot(dp);
  } else {
    log_warn("meeting " + meeting_id +
             ": missing dotplot.json, substituting empty text");
    snap.dotplot_verbalized = "";
  }

  snap.actual = calendar.actual_for(meeting_id);
  return snap;
}

MeetingSnapshot load_snapshot_from_root(const std::filesystem::path& data_root,
                                        const std::string& meeting_id,
                                        const MeetingCalendar& calendar,
                                        const SeriesSet& series) {
  return load_snapshot(data_root / meeting_id, calendar, series);
}

std::string load_actual_statement(const std::filesystem::path& data_root,
                                  const std::string& meeting_id) {
  auto file = data_root / meeting_id / "actual_statement.txt";
  if (!std::filesystem::exists(file)) return "";
  return read_text_file(file);
}

}  // namespace fedsight::ingest
