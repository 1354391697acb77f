#include "flexgrid/time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

}  // namespace

Timestamp make_timestamp(int year, int month, int day, int hour, int minute, int second) {
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23 ||
        minute < 0 || minute > 59 || second < 0 || second > 60) {
        throw DomainError("invalid calendar components");
    }
    return {days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second};
}

Timestamp parse_iso8601(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s);
    if (n < 3) throw ParseError("invalid ISO-8601 timestamp: '" + text + "'");
    if (n == 4) throw ParseError("invalid ISO-8601 timestamp (minutes missing): '" + text + "'");
    return make_timestamp(y, mo, d, h, mi, s);
}

std::string format_iso8601(Timestamp t) {
    std::int64_t days = floor_div(t.seconds, 86400);
    std::int64_t rem = floor_mod(t.seconds, 86400);
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

int weekday_of(Timestamp t) {
    // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
    std::int64_t days = floor_div(t.seconds, 86400);
    return static_cast<int>(floor_mod(days + 3, 7));
}

double hour_of_day(Timestamp t) {
    return static_cast<double>(floor_mod(t.seconds, 86400)) / 3600.0;
}

Timestamp add_minutes(Timestamp t, std::int64_t minutes) {
    return {t.seconds + minutes * 60};
}

std::string to_string(Season s) {
    switch (s) {
        case Season::Winter: return "winter";
        case Season::Summer: return "summer";
        case Season::Transitional: return "transitional";
    }
    return "winter";
}

Season season_from_string(const std::string& text) {
    if (text == "winter") return Season::Winter;
    if (text == "summer") return Season::Summer;
    if (text == "transitional") return Season::Transitional;
    throw ParseError("unknown season '" + text + "'");
}

WeeklyCalendar WeeklyCalendar::always() {
    WeeklyCalendar c;
    for (auto& day : c.windows) day.push_back({0.0, 24.0});
    return c;
}

bool WeeklyCalendar::permits(int weekday, double hour) const {
    if (weekday < 0 || weekday > 6) return false;
    for (const auto& w : windows[weekday]) {
        if (hour >= w.begin_h && hour < w.end_h) return true;
    }
    return false;
}

bool WeeklyCalendar::permits(Timestamp t) const {
    return permits(weekday_of(t), hour_of_day(t));
}

bool WeeklyCalendar::well_formed() const {
    for (const auto& day : windows) {
        auto sorted = day;
        std::sort(sorted.begin(), sorted.end(),
                  [](const HourWindow& a, const HourWindow& b) { return a.begin_h < b.begin_h; });
        double prev_end = 0.0;
        bool first = true;
        for (const auto& w : sorted) {
            if (!(w.begin_h >= 0.0 && w.end_h <= 24.0 && w.begin_h < w.end_h)) return false;
            if (!first && w.begin_h < prev_end) return false;
            prev_end = w.end_h;
            first = false;
        }
    }
    return true;
}

bool WeeklyCalendar::is_always() const {
    for (const auto& day : windows) {
        if (day.size() != 1 || day[0].begin_h != 0.0 || day[0].end_h != 24.0) return false;
    }
    return true;
}

}  // namespace flexgrid
