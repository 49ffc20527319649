#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "fedsight/errors.hpp"
#include "fedsight/ingest.hpp"
#include "fedsight/rng.hpp"
#include "support/paths.hpp"
#include "support/temp_dir.hpp"

using namespace fedsight;
using namespace fedsight::ingest;
using fedsight::testsupport::TempDir;

namespace {

// Minimal but complete data tree: every structured series has one
// observation well before `meeting_id`, plus a fully populated meeting dir.
void write_small_tree(TempDir& tmp, const std::string& meeting_id) {
  auto series = [&](const std::string& name, const std::string& value) {
    tmp.write("data/indicators/" + name + ".csv",
              "availability_date,value\n2024-01-02," + value + "\n");
  };
  series("pce_yoy", "2.4");
  series("cpi_yoy", "3.1");
  series("inflation_expect_1y", "3.0");
  series("tb3m", "5.2");
  series("tb6m", "5.1");
  series("m2_supply", "20800");
  series("bbk_gdp", "2.5");
  series("unemployment", "3.9");
  series("vix", "13.5");
  series("prev_fftr", "5.375");
  series("prev_change_bps", "0");
  series("fed_chair", "Powell");
  series("white_house_party", "Democratic");

  tmp.write("data/calendar.csv",
            "meeting_id,actual_delta_bps\n" + meeting_id + ",-25\n");
  tmp.write("data/" + meeting_id + "/beige_book.txt",
            "Districts reported modest growth.\n");
  tmp.write("data/" + meeting_id + "/fedwatch.txt",
            "hold: 0.2\ncut25: 0.7\ncut50: 0.1\n");
  tmp.write("data/" + meeting_id + "/dotplot.json",
            R"({"year_buckets": {"2024": {"4.25-4.50%": 12, "4.50-4.75%": 6}}})");
  tmp.write("data/" + meeting_id + "/actual_statement.txt",
            "The Committee decided to lower the target range.\n");
}

}  // namespace

TEST_CASE("align_indicator honors the two-day cutoff") {
  IndicatorSeries series;
  series.variable_name = "cpi_yoy";

  SUBCASE("later observation excluded by the cutoff") {
    series.observations = {{IsoDate{2024, 12, 10}, 3.1},
                           {IsoDate{2024, 12, 17}, 3.3}};
    CHECK(align_indicator(series, IsoDate{2024, 12, 18}) == 3.1);
  }
  SUBCASE("observation exactly on the cutoff is included") {
    series.observations = {{IsoDate{2024, 12, 16}, 2.0}};
    CHECK(align_indicator(series, IsoDate{2024, 12, 18}) == 2.0);
  }
  SUBCASE("only observation after the cutoff -> missing data") {
    series.observations = {{IsoDate{2024, 12, 17}, 2.0}};
    CHECK_THROWS_AS(align_indicator(series, IsoDate{2024, 12, 18}),
                    MissingDataError);
    try {
      align_indicator(series, IsoDate{2024, 12, 18});
    } catch (const MissingDataError& e) {
      CHECK(e.variable() == "cpi_yoy");
      CHECK(e.meeting_id() == "2024-12-18");
    }
  }
  SUBCASE("calendar days, not business days: Monday meeting sees Saturday") {
    series.observations = {{IsoDate{2024, 12, 14}, 4.0}};  // Saturday
    CHECK(align_indicator(series, IsoDate{2024, 12, 16}) == 4.0);  // Monday
  }
}

TEST_CASE("align_categorical uses the same cutoff") {
  CategoricalSeries series;
  series.variable_name = "fed_chair";
  series.observations = {{IsoDate{2014, 2, 3}, "Yellen"},
                         {IsoDate{2018, 2, 5}, "Powell"}};
  CHECK(align_categorical(series, IsoDate{2018, 1, 31}) == "Yellen");
  CHECK(align_categorical(series, IsoDate{2018, 2, 7}) == "Powell");
  CHECK_THROWS_AS(align_categorical(series, IsoDate{2014, 2, 3}),
                  MissingDataError);
}

TEST_CASE("series validation rejects unsorted dates and non-finite values") {
  IndicatorSeries s;
  s.variable_name = "vix";
  s.observations = {{IsoDate{2024, 1, 5}, 13.0}, {IsoDate{2024, 1, 5}, 14.0}};
  CHECK_THROWS_AS(s.validate(), ValidationError);

  s.observations = {{IsoDate{2024, 1, 5}, 13.0},
                    {IsoDate{2024, 1, 12}, std::numeric_limits<double>::infinity()}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("verbalize_dotplot is bit-exact and ordered") {
  DotPlot dp;
  dp.year_buckets[2021]["0.00-0.25%"] = 18;
  CHECK(verbalize_dotplot(dp) == "Year 2021: 0.00-0.25%: 18 members");

  CHECK(verbalize_dotplot(DotPlot{}) == "");

  DotPlot two;
  two.year_buckets[2025]["4.50-4.75%"] = 9;
  two.year_buckets[2025]["4.25-4.50%"] = 10;
  CHECK(verbalize_dotplot(two) ==
        "Year 2025: 4.25-4.50%: 10 members\nYear 2025: 4.50-4.75%: 9 members");

  // Ranges order by parsed lower bound, not lexicographically: "10.00" would
  // sort before "4.25" as a string.
  DotPlot numeric;
  numeric.year_buckets[2025]["10.00-10.25%"] = 9;
  numeric.year_buckets[2025]["4.25-4.50%"] = 10;
  CHECK(verbalize_dotplot(numeric) ==
        "Year 2025: 4.25-4.50%: 10 members\nYear 2025: 10.00-10.25%: 9 members");

  // Years ascend across buckets.
  DotPlot years;
  years.year_buckets[2026]["3.00-3.25%"] = 18;
  years.year_buckets[2024]["5.25-5.50%"] = 18;
  std::string text = verbalize_dotplot(years);
  CHECK(text.find("Year 2024") < text.find("Year 2026"));
}

TEST_CASE("verbalized dot plots round-trip through the line parser") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    DotPlot dp;
    int base_year = 2020 + static_cast<int>(uniform_int(rng, 0, 5));
    int years = 1 + static_cast<int>(uniform_int(rng, 0, 2));
    int total = 12 + static_cast<int>(uniform_int(rng, 0, 7));
    for (int y = 0; y < years; ++y) {
      int remaining = total;
      int ranges = 1 + static_cast<int>(uniform_int(rng, 0, 3));
      for (int r = 0; r < ranges; ++r) {
        double lower = 0.25 * static_cast<double>(uniform_int(rng, 0, 20));
        char label[32];
        std::snprintf(label, sizeof(label), "%.2f-%.2f%%", lower, lower + 0.25);
        int count = r + 1 == ranges
                        ? remaining
                        : 1 + static_cast<int>(uniform_int(rng, 0, remaining - ranges + r));
        remaining -= count;
        dp.year_buckets[base_year + y][label] += count;
      }
    }
    dp.validate();
    DotPlot back = parse_verbalized_dotplot(verbalize_dotplot(dp));
    CHECK(back.year_buckets == dp.year_buckets);
  }
}

TEST_CASE("parse_dotplot_json accepts the schema and rejects junk") {
  DotPlot dp = parse_dotplot_json(
      R"({"year_buckets": {"2021": {"0.00-0.25%": 18}}})");
  CHECK(dp.year_buckets.at(2021).at("0.00-0.25%") == 18);

  CHECK_THROWS_AS(parse_dotplot_json("{\"years\": {}}"), ParseError);
  CHECK_THROWS_AS(
      parse_dotplot_json(R"({"year_buckets": {"2021": {"0.00-0.25%": 0}}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_dotplot_json(R"({"year_buckets": {"soon": {"0.00-0.25%": 18}}})"),
      ParseError);
  CHECK_THROWS_AS(parse_dotplot_json("{not json"), ParseError);
  try {
    parse_dotplot_json("{not json", "bad.json");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
}

TEST_CASE("load_calendar on the committed 2023-2024 fixture") {
  MeetingCalendar calendar =
      load_calendar(fedsight::testsupport::data_dir() / "calendar.csv");
  CHECK(calendar.size() == 16);
  auto dist = calendar.distribution();
  CHECK(dist.hikes_pct == doctest::Approx(25.00));
  CHECK(dist.cuts_pct == doctest::Approx(18.75));
  CHECK(dist.holds_pct == doctest::Approx(56.25));
  CHECK(calendar.actual_for("2024-12-18").bps() == -25);
  CHECK(calendar.contains("2023-06-14"));
  CHECK_FALSE(calendar.contains("2022-12-14"));
  CHECK_THROWS_AS(calendar.actual_for("1999-01-01"), ValidationError);
}

TEST_CASE("load_calendar error cases") {
  TempDir tmp;
  auto path = tmp.write("empty.csv", "meeting_id,actual_delta_bps\n");
  CHECK_THROWS_AS(load_calendar(path), ParseError);

  path = tmp.write("offgrid.csv",
                   "meeting_id,actual_delta_bps\n2024-01-31,30\n");
  CHECK_THROWS_AS(load_calendar(path), ValidationError);

  path = tmp.write("unsorted.csv",
                   "meeting_id,actual_delta_bps\n2024-03-20,0\n2024-01-31,0\n");
  CHECK_THROWS_AS(load_calendar(path), ParseError);

  path = tmp.write("badheader.csv", "meeting,delta\n2024-01-31,0\n");
  CHECK_THROWS_AS(load_calendar(path), ParseError);

  path = tmp.write("fractional.csv",
                   "meeting_id,actual_delta_bps\n2024-01-31,12.5\n");
  CHECK_THROWS_AS(load_calendar(path), ParseError);

  CHECK_THROWS_AS(load_calendar(tmp.path() / "absent.csv"), IoError);
}

TEST_CASE("load_series_dir requires every structured variable") {
  TempDir tmp;
  write_small_tree(tmp, "2024-12-18");
  SeriesSet series = load_series_dir(tmp.path() / "data" / "indicators");
  CHECK(series.numeric.size() == kNumericVariables.size());
  CHECK(series.categorical.size() == kCategoricalVariables.size());

  std::filesystem::remove(tmp.path() / "data" / "indicators" / "vix.csv");
  CHECK_THROWS_AS(load_series_dir(tmp.path() / "data" / "indicators"), IoError);
}

TEST_CASE("load_snapshot assembles a full meeting") {
  TempDir tmp;
  write_small_tree(tmp, "2024-12-18");
  MeetingCalendar calendar = load_calendar(tmp.path() / "data" / "calendar.csv");
  SeriesSet series = load_series_dir(tmp.path() / "data" / "indicators");

  MeetingSnapshot snap =
      load_snapshot_from_root(tmp.path() / "data", "2024-12-18", calendar, series);
  CHECK(snap.meeting_id == "2024-12-18");
  CHECK(snap.actual.bps() == -25);
  CHECK(snap.indicators.cpi_yoy == 3.1);
  CHECK(snap.indicators.fed_chair == "Powell");
  CHECK(snap.indicators.prev_fftr == 5.375);
  CHECK(snap.beige_book.find("modest growth") != std::string::npos);
  CHECK(snap.fedwatch_text.find("cut25: 0.7") != std::string::npos);
  CHECK(snap.dotplot_verbalized ==
        "Year 2024: 4.25-4.50%: 12 members\nYear 2024: 4.50-4.75%: 6 members");

  // Purity: loading twice yields identical snapshots.
  MeetingSnapshot again =
      load_snapshot_from_root(tmp.path() / "data", "2024-12-18", calendar, series);
  CHECK(again.beige_book == snap.beige_book);
  CHECK(again.dotplot_verbalized == snap.dotplot_verbalized);
  CHECK(again.indicators.m2_supply == snap.indicators.m2_supply);
}

TEST_CASE("missing unstructured files degrade to empty text") {
  TempDir tmp;
  write_small_tree(tmp, "2024-12-18");
  std::filesystem::remove(tmp.path() / "data" / "2024-12-18" / "fedwatch.txt");
  std::filesystem::remove(tmp.path() / "data" / "2024-12-18" / "dotplot.json");
  MeetingCalendar calendar = load_calendar(tmp.path() / "data" / "calendar.csv");
  SeriesSet series = load_series_dir(tmp.path() / "data" / "indicators");

  MeetingSnapshot snap =
      load_snapshot_from_root(tmp.path() / "data", "2024-12-18", calendar, series);
  CHECK(snap.fedwatch_text.empty());
  CHECK(snap.dotplot_verbalized.empty());
  CHECK_FALSE(snap.beige_book.empty());
}

TEST_CASE("unknown meeting id or missing structured data is an error") {
  TempDir tmp;
  write_small_tree(tmp, "2024-12-18");
  MeetingCalendar calendar = load_calendar(tmp.path() / "data" / "calendar.csv");
  SeriesSet series = load_series_dir(tmp.path() / "data" / "indicators");

  CHECK_THROWS_AS(load_snapshot_from_root(tmp.path() / "data", "2024-11-07",
                                          calendar, series),
                  ValidationError);

  // Push every observation past the cutoff for a fresh meeting date earlier
  // than any data: structured data missing -> error, not a warning.
  CHECK_THROWS_AS(build_indicators(IsoDate{2020, 1, 1}, series, "2020-01-01"),
                  MissingDataError);
}

TEST_CASE("load_actual_statement returns empty when absent") {
  TempDir tmp;
  write_small_tree(tmp, "2024-12-18");
  CHECK(load_actual_statement(tmp.path() / "data", "2024-12-18")
            .find("lower the target range") != std::string::npos);
  CHECK(load_actual_statement(tmp.path() / "data", "2024-11-07").empty());
}

TEST_CASE("committed data tree loads every snapshot in both calendars") {
  auto root = fedsight::testsupport::data_dir();
  SeriesSet series = load_series_dir(root / "indicators");
  for (const char* calendar_name : {"calendar.csv", "calendar_2018.csv"}) {
    MeetingCalendar calendar = load_calendar(root / calendar_name);
    for (const auto& [meeting_id, actual] : calendar.entries) {
      MeetingSnapshot snap =
          load_snapshot_from_root(root, meeting_id, calendar, series);
      CHECK(snap.actual == actual);
      CHECK_FALSE(snap.beige_book.empty());
      CHECK_FALSE(snap.fedwatch_text.empty());
      snap.indicators.validate();
    }
  }
}
