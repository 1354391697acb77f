#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexgrid/characterize.hpp"
#include "flexgrid/model.hpp"
#include "flexgrid/schedule.hpp"

namespace flexgrid {

// Site config + flexibility matrix travel as a single JSON document
// (format_version 1; schema in docs/formats.md). Profiles may be inline or
// reference CSV files relative to base_dir.
SiteConfig parse_site_json(const std::string& text, const std::string& base_dir = "");
// Canonical form: inline profiles, sorted keys. parse(to_json(c)) == c.
std::string site_to_json(const SiteConfig& config);

FlexibilityMatrix parse_matrix_json(const std::string& text);
std::string matrix_to_json(const FlexibilityMatrix& matrix);

std::vector<AuditAnswers> parse_answers_json(const std::string& text);

// DR event envelope; stochastic cost data rides along when present.
struct EventFile {
    FlexEventRequest event;
    std::optional<StochasticProgram> program;
};
EventFile parse_event_json(const std::string& text);

// CSV interface: header `timestamp,load_kw`, ISO-8601 timestamps, strictly
// increasing with uniform spacing.
LoadProfile parse_profile_csv(const std::string& text, Season season);
std::string profile_to_csv(const LoadProfile& profile);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace flexgrid
