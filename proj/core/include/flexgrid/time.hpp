#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace flexgrid {

// Naive calendar timestamp (no timezone), second resolution.
struct Timestamp {
    std::int64_t seconds = 0;  // since 1970-01-01T00:00:00

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

Timestamp make_timestamp(int year, int month, int day, int hour = 0, int minute = 0, int second = 0);

// Accepts "YYYY-MM-DD" and "YYYY-MM-DDTHH:MM[:SS]".
Timestamp parse_iso8601(const std::string& text);
std::string format_iso8601(Timestamp t);

// 0 = Monday ... 6 = Sunday.
int weekday_of(Timestamp t);
// Hours since local midnight, fractional.
double hour_of_day(Timestamp t);

Timestamp add_minutes(Timestamp t, std::int64_t minutes);

enum class Season { Winter, Summer, Transitional };

std::string to_string(Season s);
Season season_from_string(const std::string& text);

// Permitted window [begin_h, end_h) within one day, hours in [0, 24].
struct HourWindow {
    double begin_h = 0.0;
    double end_h = 24.0;

    friend bool operator==(const HourWindow&, const HourWindow&) = default;
};

// Weekly availability calendar: permitted hour windows per weekday (0 = Monday).
// Default-constructed calendar permits nothing; always() permits everything.
struct WeeklyCalendar {
    std::array<std::vector<HourWindow>, 7> windows;

    static WeeklyCalendar always();
    bool permits(int weekday, double hour) const;
    bool permits(Timestamp t) const;
    // True when every day's windows are sorted, non-overlapping and within [0, 24].
    bool well_formed() const;
    bool is_always() const;

    friend bool operator==(const WeeklyCalendar&, const WeeklyCalendar&) = default;
};

}  // namespace flexgrid
