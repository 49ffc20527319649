#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedsight/dates.hpp"
#include "fedsight/errors.hpp"
#include "fedsight/rng.hpp"

using fedsight::IsoDate;
using fedsight::ParseError;

TEST_CASE("parse accepts strict YYYY-MM-DD only") {
  IsoDate d = IsoDate::parse("2024-12-18");
  CHECK(d.year == 2024);
  CHECK(d.month == 12);
  CHECK(d.day == 18);

  IsoDate out;
  CHECK_FALSE(IsoDate::try_parse("2024-1-05", out));   // not zero-padded
  CHECK_FALSE(IsoDate::try_parse("2024/12/18", out));  // wrong separators
  CHECK_FALSE(IsoDate::try_parse("2024-13-01", out));
  CHECK_FALSE(IsoDate::try_parse("2024-00-10", out));
  CHECK_FALSE(IsoDate::try_parse("2024-04-31", out));
  CHECK_FALSE(IsoDate::try_parse("20241218", out));
  CHECK_FALSE(IsoDate::try_parse("", out));
  CHECK_THROWS_AS(IsoDate::parse("garbage-in"), ParseError);
}

TEST_CASE("leap-year rules") {
  IsoDate out;
  CHECK(IsoDate::try_parse("2024-02-29", out));
  CHECK(IsoDate::try_parse("2000-02-29", out));   // divisible by 400
  CHECK_FALSE(IsoDate::try_parse("1900-02-29", out));  // century, not by 400
  CHECK_FALSE(IsoDate::try_parse("2023-02-29", out));
}

TEST_CASE("epoch-day anchors") {
  CHECK(IsoDate{1970, 1, 1}.to_epoch_days() == 0);
  CHECK(IsoDate{1970, 1, 2}.to_epoch_days() == 1);
  CHECK(IsoDate{1969, 12, 31}.to_epoch_days() == -1);
  // 2024-12-18 is 20,075 days after the epoch (cross-checked against a
  // civil-calendar reference implementation).
  CHECK(IsoDate{2024, 12, 18}.to_epoch_days() == 20075);
}

TEST_CASE("epoch round trip over a wide random range") {
  fedsight::Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    std::int64_t days = fedsight::uniform_int(rng, -200000, 200000);
    IsoDate d = IsoDate::from_epoch_days(days);
    CHECK(d.to_epoch_days() == days);
    IsoDate reparsed = IsoDate::parse(d.to_string());
    CHECK(reparsed == d);
  }
}

TEST_CASE("minus_days crosses month and year boundaries") {
  CHECK(IsoDate{2023, 3, 1}.minus_days(2) == IsoDate{2023, 2, 27});
  CHECK(IsoDate{2024, 3, 1}.minus_days(2) == IsoDate{2024, 2, 28});  // leap
  CHECK(IsoDate{2024, 1, 1}.minus_days(1) == IsoDate{2023, 12, 31});
  CHECK(IsoDate{2024, 12, 18}.plus_days(14) == IsoDate{2025, 1, 1});
}

TEST_CASE("ordering matches string ordering for ISO dates") {
  fedsight::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    IsoDate a = IsoDate::from_epoch_days(fedsight::uniform_int(rng, 0, 40000));
    IsoDate b = IsoDate::from_epoch_days(fedsight::uniform_int(rng, 0, 40000));
    CHECK((a < b) == (a.to_string() < b.to_string()));
  }
}
