#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexgrid/model.hpp"
#include "flexgrid/schedule.hpp"

namespace flexgrid {

// One assessment cell request: an event window evaluated over cumulative
// prefixes of the source stack (e.g. battery, then +PV, then +HVAC).
struct ScenarioSpec {
    double duration_h = 1.0;
    Season season = Season::Winter;
    std::vector<std::string> source_stack;
    Timestamp window_start;
};

struct PrefixResult {
    std::vector<std::string> assets;       // stack prefix
    std::vector<double> per_step_percent;  // clamped to [0,100]
    std::vector<double> delivered_kw;
    double aggregate_percent = 0.0;        // time-average over the window
    double peak_percent = 0.0;             // max over the window
    double net_percent_after_rebound = 0.0;
    double rebound_energy_kwh = 0.0;
    bool clamped = false;                  // any raw value exceeded 100%
};

struct ScenarioResult {
    Season season = Season::Winter;
    double duration_h = 1.0;
    Timestamp window_start;
    std::vector<PrefixResult> prefixes;
};

struct BenchmarkRow {
    std::string benchmark;  // "Benchmark 1" / "Benchmark 2"
    std::string figure;     // published figure, reproduced verbatim
    std::string kind;       // "avg" | "min" | "max"
    double range_lo = 0.0;
    double range_hi = 0.0;
    double duration_h = 0.0;
    double site_value = 0.0;
    std::string flag;       // "within" | "above" | "below" (closed intervals)
};

struct AssessmentReport {
    std::string site_name;
    std::string reference_season;  // basis for the KPI fields and benchmarks
    std::vector<ScenarioResult> scenarios;

    // KPI label fields.
    int kpi_min_percent = 0;
    int kpi_max_percent = 0;
    std::vector<double> durations_h;
    double max_power_kw = 0.0;
    double shortest_tia_h = 0.0;
    std::string availability_summary;
    std::string benchmark_verdict;
    bool no_flexible_assets = true;

    std::vector<BenchmarkRow> benchmark;
};

// Percent-of-total-load flexibility per stack prefix for one event window.
// Delivered power per step comes from a single-step peak-power schedule over
// the prefix's resources.
ScenarioResult event_flexibility_percent(const SiteConfig& config, const ScenarioSpec& spec);

// Full scenario matrix: {1 h, 4 h} x available seasons x cumulative stack
// prefixes, plus KPI fields and the benchmark comparison.
// `seasons` filters which seasons run (empty = winter + summer as available).
AssessmentReport scenario_matrix(const SiteConfig& config,
                                 const std::vector<Season>& seasons = {});

// Fills the published-benchmark rows and classifies the site against each
// range (closed intervals; the verdict names the largest maximum range).
std::vector<BenchmarkRow> benchmark_compare(const AssessmentReport& report);

struct LabelDocument {
    std::string text;
    std::string svg;  // static, fixed dimensions
};

// At-a-glance label: flexibility range, supported durations, max deliverable
// power, shortest TIA, availability and benchmark verdict. Byte-identical
// output for identical inputs.
LabelDocument kpi_label(const AssessmentReport& report, const FlexibilityMatrix& matrix);

std::string benchmark_table_text(const AssessmentReport& report);
std::string report_to_csv(const AssessmentReport& report);
std::string report_to_json(const AssessmentReport& report);

}  // namespace flexgrid
