#!/usr/bin/env python3
"""Generates the committed data/ tree: calendars, indicator series, meeting
directories (Beige Book, futures text, dot plots, statements), and the member
roster. Deterministic: re-running reproduces the tree byte for byte.

Rate decisions and meeting dates follow the public FOMC record. Indicator
paths are reconstructions anchored to publicly known levels, and the member
roster is reconstructed from public rosters; see data/README.md.
"""

import json
import random
from datetime import date, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

RNG = random.Random(20240814)

# --------------------------------------------------------------------------
# Calendars: (meeting_id, actual_delta_bps)
# --------------------------------------------------------------------------

CALENDAR_2023_2024 = [
    ("2023-02-01", 25), ("2023-03-22", 25), ("2023-05-03", 25),
    ("2023-06-14", 0), ("2023-07-26", 25), ("2023-09-20", 0),
    ("2023-11-01", 0), ("2023-12-13", 0),
    ("2024-01-31", 0), ("2024-03-20", 0), ("2024-05-01", 0),
    ("2024-06-12", 0), ("2024-07-31", 0), ("2024-09-18", -50),
    ("2024-11-07", -25), ("2024-12-18", -25),
]

CALENDAR_2018 = [
    ("2018-01-31", 0), ("2018-03-21", 25), ("2018-05-02", 0),
    ("2018-06-13", 25), ("2018-08-01", 0), ("2018-09-26", 25),
    ("2018-11-08", 0), ("2018-12-19", 25),
]

CALENDAR_HISTORY = [
    ("2015-01-28", 0), ("2015-03-18", 0), ("2015-04-29", 0), ("2015-06-17", 0),
    ("2015-07-29", 0), ("2015-09-17", 0), ("2015-10-28", 0), ("2015-12-16", 25),
    ("2016-01-27", 0), ("2016-03-16", 0), ("2016-04-27", 0), ("2016-06-15", 0),
    ("2016-07-27", 0), ("2016-09-21", 0), ("2016-11-02", 0), ("2016-12-14", 25),
    ("2017-02-01", 0), ("2017-03-15", 25), ("2017-05-03", 0), ("2017-06-14", 25),
    ("2017-07-26", 0), ("2017-09-20", 0), ("2017-11-01", 0), ("2017-12-13", 25),
    ("2018-01-31", 0), ("2018-03-21", 25), ("2018-05-02", 0), ("2018-06-13", 25),
    ("2018-08-01", 0), ("2018-09-26", 25), ("2018-11-08", 0), ("2018-12-19", 25),
    ("2019-01-30", 0), ("2019-03-20", 0), ("2019-05-01", 0), ("2019-06-19", 0),
    ("2019-07-31", -25), ("2019-09-18", -25), ("2019-10-30", -25), ("2019-12-11", 0),
    ("2020-01-29", 0), ("2020-03-15", -100), ("2020-04-29", 0), ("2020-06-10", 0),
    ("2020-07-29", 0), ("2020-09-16", 0), ("2020-11-05", 0), ("2020-12-16", 0),
    ("2021-01-27", 0), ("2021-03-17", 0), ("2021-04-28", 0), ("2021-06-16", 0),
    ("2021-07-28", 0), ("2021-09-22", 0), ("2021-11-03", 0), ("2021-12-15", 0),
    ("2022-01-26", 0), ("2022-03-16", 25), ("2022-05-04", 50), ("2022-06-15", 75),
    ("2022-07-27", 75), ("2022-09-21", 75), ("2022-11-02", 75), ("2022-12-14", 50),
]

# Sept 2020 style SEP months: projections released at Mar/Jun/Sep/Dec meetings.
SEP_MONTHS = {3, 6, 9, 12}

# Meetings that get a full directory (simulated windows plus icl warm-ups).
WARMUP_IDS = ["2019-10-30", "2022-01-26", "2022-03-16"]


def iso(d: date) -> str:
    return d.isoformat()


def parse_iso(s: str) -> date:
    return date.fromisoformat(s)


# --------------------------------------------------------------------------
# Indicator series
# --------------------------------------------------------------------------

# Yearly anchor levels (January of each year); monthly values interpolate
# between anchors with a small deterministic wiggle.
ANCHORS = {
    "pce_yoy": {2014: 1.4, 2015: 0.3, 2016: 1.0, 2017: 1.8, 2018: 2.0,
                2019: 1.5, 2020: 1.8, 2021: 1.6, 2022: 6.1, 2023: 5.3,
                2024: 2.7, 2025: 2.5},
    "cpi_yoy": {2014: 1.6, 2015: 0.0, 2016: 1.3, 2017: 2.3, 2018: 2.1,
                2019: 1.7, 2020: 2.3, 2021: 1.4, 2022: 7.5, 2023: 6.3,
                2024: 3.1, 2025: 2.8},
    "inflation_expect_1y": {2014: 3.0, 2015: 2.5, 2016: 2.6, 2017: 2.6,
                            2018: 2.7, 2019: 2.7, 2020: 2.5, 2021: 3.0,
                            2022: 4.9, 2023: 4.0, 2024: 3.0, 2025: 2.8},
    "tb3m": {2014: 0.05, 2015: 0.03, 2016: 0.3, 2017: 0.5, 2018: 1.4,
             2019: 2.4, 2020: 1.5, 2021: 0.08, 2022: 0.2, 2023: 4.6,
             2024: 5.3, 2025: 4.3},
    "tb6m": {2014: 0.08, 2015: 0.08, 2016: 0.45, 2017: 0.6, 2018: 1.6,
             2019: 2.5, 2020: 1.6, 2021: 0.09, 2022: 0.4, 2023: 4.8,
             2024: 5.2, 2025: 4.2},
    "m2_supply": {2014: 11000, 2015: 11700, 2016: 12400, 2017: 13200,
                  2018: 13800, 2019: 14400, 2020: 15400, 2021: 19400,
                  2022: 21600, 2023: 21200, 2024: 20800, 2025: 21400},
    "bbk_gdp": {2014: 2.2, 2015: 2.9, 2016: 1.6, 2017: 2.3, 2018: 2.9,
                2019: 2.2, 2020: 0.5, 2021: 5.0, 2022: 2.0, 2023: 2.4,
                2024: 2.7, 2025: 2.2},
    "unemployment": {2014: 6.6, 2015: 5.7, 2016: 4.9, 2017: 4.7, 2018: 4.1,
                     2019: 4.0, 2020: 3.6, 2021: 6.4, 2022: 4.0, 2023: 3.4,
                     2024: 3.7, 2025: 4.1},
    "vix": {2014: 14, 2015: 17, 2016: 20, 2017: 12, 2018: 13, 2019: 17,
            2020: 16, 2021: 25, 2022: 25, 2023: 19, 2024: 14, 2025: 16},
}

# Episodes the smooth anchors cannot carry (month -> absolute override).
OVERRIDES = {
    "vix": {"2020-03": 57.0, "2020-04": 41.0, "2022-06": 31.0, "2022-10": 30.0,
            "2024-08": 23.0},
    "unemployment": {"2020-04": 14.8, "2020-05": 13.2, "2020-06": 11.0,
                     "2020-07": 10.2, "2020-08": 8.4, "2020-09": 7.8,
                     "2020-10": 6.9, "2020-11": 6.7, "2020-12": 6.7},
    "bbk_gdp": {"2020-04": -8.9, "2020-05": -7.2, "2020-06": -4.0,
                "2020-07": -1.5, "2020-08": 0.8, "2020-09": 1.7},
    "cpi_yoy": {"2022-06": 9.0, "2022-07": 8.5, "2022-09": 8.2},
    "pce_yoy": {"2022-06": 7.0, "2022-07": 6.4},
}


def monthly_value(series: str, year: int, month: int) -> float:
    key = f"{year:04d}-{month:02d}"
    if key in OVERRIDES.get(series, {}):
        return OVERRIDES[series][key]
    anchors = ANCHORS[series]
    a = anchors[year]
    b = anchors.get(year + 1, a)
    frac = (month - 1) / 12.0
    base = a + (b - a) * frac
    wiggle = (RNG.random() - 0.5) * 0.04 * max(abs(a), 1.0)
    return base + wiggle


def month_range(start_year: int, end_year: int):
    for year in range(start_year, end_year + 1):
        for month in range(1, 13):
            yield year, month


def write_csv(path: Path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("availability_date,value\n")
        for d, v in rows:
            f.write(f"{d},{v}\n")


def fmt(value: float, digits: int = 2) -> str:
    return f"{value:.{digits}f}"


def make_monthly_series():
    # Macro monthlies publish mid-month for the prior month.
    monthly = ["pce_yoy", "cpi_yoy", "inflation_expect_1y", "m2_supply",
               "bbk_gdp", "unemployment"]
    for series in monthly:
        rows = []
        for year, month in month_range(2014, 2024):
            if (year, month) == (2014, 1):
                continue  # would report December 2013, before the anchors start
            publish = date(year, month, 15)
            prev_year, prev_month = (year, month - 1) if month > 1 else (year - 1, 12)
            value = monthly_value(series, prev_year, prev_month)
            digits = 0 if series == "m2_supply" else 2
            rows.append((iso(publish), fmt(value, digits)))
        write_csv(DATA / "indicators" / f"{series}.csv", rows)

    # Market series publish weekly (Fridays).
    for series in ["tb3m", "tb6m", "vix"]:
        rows = []
        d = date(2014, 1, 3)
        while d <= date(2024, 12, 27):
            value = monthly_value(series, d.year, d.month)
            rows.append((iso(d), fmt(max(value, 0.01), 2)))
            d += timedelta(days=7)
        write_csv(DATA / "indicators" / f"{series}.csv", rows)


def target_path():
    """(effective_date, midpoint_pct, change_bps) for every rate move since 2014."""
    moves = [("2014-01-01", 0.125, 0)]  # series start: midpoint of 0.00-0.25%
    level = 0.125
    for meeting_id, delta in CALENDAR_HISTORY + CALENDAR_2023_2024:
        if delta == 0:
            continue
        level = round(level + delta / 100.0, 3)
        effective = parse_iso(meeting_id) + timedelta(days=1)
        moves.append((iso(effective), level, delta))
    # Intermeeting emergency cut of March 3, 2020 (not a calendar meeting):
    # -50 bps, folded into the path between the Jan and Mar 2020 meetings.
    moves.append(("2020-03-04", 1.125, -50))
    moves.sort(key=lambda m: m[0])
    # Re-walk levels so the inserted move shifts everything after it.
    level = 0.125
    fixed = []
    for when, _, delta in moves:
        level = round(level + delta / 100.0, 3) if delta != 0 else level
        fixed.append((when, level, delta))
    return fixed


def make_rate_series():
    moves = target_path()
    write_csv(DATA / "indicators" / "prev_fftr.csv",
              [(when, fmt(level, 3)) for when, level, _ in moves])
    write_csv(DATA / "indicators" / "prev_change_bps.csv",
              [(when, str(delta)) for when, _, delta in moves])


def make_categorical_series():
    write_csv(DATA / "indicators" / "fed_chair.csv",
              [("2014-02-03", "Yellen"), ("2018-02-05", "Powell")])
    write_csv(DATA / "indicators" / "white_house_party.csv",
              [("2014-01-01", "Democratic"), ("2017-01-20", "Republican"),
               ("2021-01-20", "Democratic")])


# --------------------------------------------------------------------------
# Meeting directories
# --------------------------------------------------------------------------

DISTRICT_NOTES = [
    "Boston reported steady consumer spending with software hiring cooling",
    "New York contacts saw resilient services demand and flat manufacturing",
    "Philadelphia noted modest growth with input costs easing gradually",
    "Cleveland manufacturers described stable order books and selective hiring",
    "Richmond firms cited slower wage growth and improving labor availability",
    "Atlanta tourism remained strong while freight volumes softened",
    "Chicago reported flat retail sales and cautious capital spending",
    "St. Louis contacts saw mild expansion led by logistics and healthcare",
    "Minneapolis noted tight skilled-trades labor despite softer demand",
    "Kansas City agriculture weakened while energy activity held firm",
    "Dallas services expanded moderately and housing steadied",
    "San Francisco reported cooling tech hiring and stable tourism",
]


def beige_book_text(meeting_id: str, actual_level_hint: str) -> str:
    d = parse_iso(meeting_id)
    picks = RNG.sample(DISTRICT_NOTES, 4)
    para1 = (f"Summary of commentary on current economic conditions, prepared "
             f"ahead of the {meeting_id} meeting. Overall economic activity "
             f"expanded at a modest pace since the previous report. "
             f"{picks[0]}. {picks[1]}.")
    period = (d.replace(day=1) - timedelta(days=1)).strftime("%B %Y")
    para2 = (f"{picks[2]}. {picks[3]}. Across districts, contacts described "
             f"{actual_level_hint}. Prices rose at a moderate rate overall, "
             f"with several districts noting slower pass-through of input "
             f"costs, and employment grew slightly on balance through "
             f"{period}.")
    return para1 + "\n\n" + para2 + "\n"


def fedwatch_text(meeting_id: str, actual_bps: int) -> str:
    cutoff = parse_iso(meeting_id) - timedelta(days=2)

    def label(bps: int) -> str:
        if bps < 0:
            return f"cut{-bps}"
        if bps == 0:
            return "hold"
        return f"hike{bps}"

    lo, hi = actual_bps - 25, actual_bps + 25
    # Markets usually concentrate near the landed outcome before the meeting.
    p_mode = round(0.62 + RNG.random() * 0.2, 2)
    p_lo = round((1.0 - p_mode) * 0.6, 2)
    p_hi = round(1.0 - p_mode - p_lo, 2)
    lines = [f"Futures-implied policy probabilities as of {iso(cutoff)}:"]
    for bps, p in ((lo, p_lo), (actual_bps, p_mode), (hi, p_hi)):
        if -100 <= bps <= 100 and p > 0:
            lines.append(f"{label(bps)}: {p:.2f}")
    return "\n".join(lines) + "\n"


def dotplot_json(meeting_id: str, current_mid: float, cycle: int) -> str:
    year = parse_iso(meeting_id).year
    buckets = {}
    level = current_mid  # range midpoint, so drifting by quarters keeps the
    for horizon in range(3):  # bucket labels on standard 25 bp bands
        if cycle == 0:  # on hold: dots drift toward a neutral-ish 2.5%
            cycle = 1 if level < 2.5 else -1
        drift = {0: 0.25, 1: 0.5, 2: 0.25}[horizon] * (1 if cycle > 0 else -1)
        level = max(0.125, level + drift)
        lower = level - 0.125
        upper = level + 0.125
        lower2 = lower + 0.25
        upper2 = upper + 0.25
        first = 10 + horizon  # each projection year must cover 18 participants
        buckets[str(year + horizon)] = {
            f"{lower:.2f}-{upper:.2f}%": first,
            f"{lower2:.2f}-{upper2:.2f}%": 18 - first,
        }
    return json.dumps({"year_buckets": buckets}, indent=2, sort_keys=True) + "\n"


def statement_text(meeting_id: str, actual_bps: int) -> str:
    if actual_bps > 0:
        action = (f"decided to raise the target range for the federal funds "
                  f"rate by {actual_bps} basis points")
        tone = "Inflation remains elevated"
    elif actual_bps < 0:
        action = (f"decided to lower the target range for the federal funds "
                  f"rate by {-actual_bps} basis points")
        tone = "Inflation has made progress toward the Committee's objective"
    else:
        action = ("decided to maintain the target range for the federal funds "
                  "rate at its current level")
        tone = "Inflation remains somewhat elevated"
    return (f"Recent indicators suggest that economic activity has continued "
            f"to expand at a solid pace. Job gains have remained strong, and "
            f"the unemployment rate has stayed low. {tone}.\n\n"
            f"In support of its goals, the Committee {action}. The Committee "
            f"will continue to monitor the implications of incoming "
            f"information for the economic outlook, including readings on "
            f"labor market conditions, inflation pressures, and financial "
            f"developments. ({meeting_id})\n")


def current_midpoint(meeting_id: str) -> float:
    mid = 0.125
    for when, level, _ in target_path():
        if when <= meeting_id:
            mid = level
    return mid


def level_hint(actual_bps: int) -> str:
    if actual_bps > 0:
        return "continued price pressures and firm demand"
    if actual_bps < 0:
        return "easing price pressures and a cooling labor market"
    return "little change in overall conditions"


def make_meeting_dirs():
    meetings = {}
    for mid, bps in CALENDAR_2023_2024 + CALENDAR_2018:
        meetings[mid] = bps
    history = dict(CALENDAR_HISTORY)
    for mid in WARMUP_IDS:
        meetings[mid] = history[mid]

    for meeting_id in sorted(meetings):
        bps = meetings[meeting_id]
        d = DATA / meeting_id
        d.mkdir(parents=True, exist_ok=True)
        (d / "beige_book.txt").write_text(
            beige_book_text(meeting_id, level_hint(bps)), newline="\n")
        (d / "fedwatch.txt").write_text(fedwatch_text(meeting_id, bps),
                                        newline="\n")
        (d / "actual_statement.txt").write_text(statement_text(meeting_id, bps),
                                                newline="\n")
        if parse_iso(meeting_id).month in SEP_MONTHS:
            # Projections prepared for a meeting drift with the action taken
            # at it (the SEP is published alongside the decision).
            (d / "dotplot.json").write_text(
                dotplot_json(meeting_id, current_midpoint(meeting_id), bps),
                newline="\n")


# --------------------------------------------------------------------------
# Member roster (reconstructed from public rosters; values are one plausible
# coding of public characterizations, not published data)
# --------------------------------------------------------------------------

MEMBERS = [
    # name, hawkishness, region, gender, party, labor, inflation, banking, global, tenure
    ("Jerome Powell", 0.50, "Board", "M", "Republican", 1, 1, 1, 1, 11.0),
    ("Philip Jefferson", 0.45, "Board", "M", "Democratic", 1, 1, 0, 0, 2.5),
    ("John Williams", 0.50, "New York", "M", "Independent", 1, 1, 1, 1, 6.5),
    ("Michael Barr", 0.40, "Board", "M", "Democratic", 0, 0, 1, 0, 2.5),
    ("Michelle Bowman", 0.80, "Board", "F", "Republican", 0, 1, 1, 0, 6.0),
    ("Lisa Cook", 0.30, "Board", "F", "Democratic", 1, 0, 0, 1, 2.5),
    ("Adriana Kugler", 0.35, "Board", "F", "Democratic", 1, 1, 0, 1, 1.5),
    ("Christopher Waller", 0.75, "Board", "M", "Republican", 0, 1, 0, 0, 4.0),
    ("Austan Goolsbee", 0.20, "Chicago", "M", "Democratic", 1, 0, 0, 0, 2.0),
    ("Patrick Harker", 0.55, "Philadelphia", "M", "Independent", 1, 1, 1, 0, 9.0),
    ("Neel Kashkari", 0.60, "Minneapolis", "M", "Republican", 1, 1, 1, 0, 9.0),
    ("Loretta Mester", 0.80, "Cleveland", "F", "Independent", 0, 1, 1, 0, 10.0),
    ("Lorie Logan", 0.75, "Dallas", "F", "Independent", 0, 1, 1, 0, 2.5),
    ("Raphael Bostic", 0.35, "Atlanta", "M", "Democratic", 1, 0, 0, 0, 7.5),
    ("Mary Daly", 0.35, "San Francisco", "F", "Independent", 1, 1, 0, 0, 6.0),
    ("Thomas Barkin", 0.60, "Richmond", "M", "Independent", 1, 1, 0, 1, 6.5),
    ("Jeffrey Schmid", 0.70, "Kansas City", "M", "Independent", 0, 1, 1, 0, 1.5),
    ("Alberto Musalem", 0.60, "St. Louis", "M", "Independent", 0, 1, 1, 1, 0.5),
    ("Susan Collins", 0.45, "Boston", "F", "Independent", 1, 1, 0, 0, 2.5),
]


def make_members_csv():
    path = DATA / "members.csv"
    with open(path, "w", newline="\n") as f:
        f.write("name,hawkishness,regional_affiliation,gender,political_party,"
                "focus_labor,focus_inflation,focus_banking,focus_global,"
                "tenure_years\n")
        for row in MEMBERS:
            f.write(",".join(str(x) for x in row) + "\n")


def make_calendars():
    def write_calendar(path: Path, rows):
        with open(path, "w", newline="\n") as f:
            f.write("meeting_id,actual_delta_bps\n")
            for mid, bps in rows:
                f.write(f"{mid},{bps}\n")

    DATA.mkdir(parents=True, exist_ok=True)
    write_calendar(DATA / "calendar.csv", CALENDAR_2023_2024)
    write_calendar(DATA / "calendar_2018.csv", CALENDAR_2018)
    write_calendar(DATA / "calendar_history.csv", CALENDAR_HISTORY)


def make_readme():
    (DATA / "README.md").write_text(
        "# Data tree\n\n"
        "Meeting dates and rate decisions follow the public FOMC record.\n"
        "Everything else is a reconstruction for offline testing:\n\n"
        "- `indicators/*.csv`: indicator paths anchored to publicly known\n"
        "  levels, interpolated monthly (macro series) or weekly (market\n"
        "  series) with a small deterministic wiggle. Values are plausible,\n"
        "  not official vintages.\n"
        "- `<meeting>/beige_book.txt`, `fedwatch.txt`, `dotplot.json`,\n"
        "  `actual_statement.txt`: stylized stand-ins written in the shape of\n"
        "  the real documents.\n"
        "- `members.csv`: roster reconstructed from public FOMC rosters; the\n"
        "  numeric codings (hawkishness, focus flags, tenure) are one\n"
        "  plausible reading of public characterizations.\n\n"
        "Regenerate with `python3 scripts/make_data.py` (deterministic).\n",
        newline="\n")


def main():
    make_calendars()
    make_monthly_series()
    make_rate_series()
    make_categorical_series()
    make_meeting_dirs()
    make_members_csv()
    make_readme()
    meeting_dirs = len(list(d for d in DATA.iterdir() if d.is_dir())) - 1
    print(f"wrote data tree: {meeting_dirs} meeting directories + indicators")


if __name__ == "__main__":
    main()
