// flexgrid: assess a site's demand-response flexibility from a characterized
// asset inventory, schedule flexibility against DR events, and emit the
// assessment artifacts (reports, benchmark table, KPI label).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexgrid/assess.hpp"
#include "flexgrid/characterize.hpp"
#include "flexgrid/errors.hpp"
#include "flexgrid/json_io.hpp"
#include "flexgrid/model.hpp"
#include "flexgrid/schedule.hpp"
#include "flexgrid/sha256.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit code contract: 0 ok, 2 input, 3 I/O, 4 infeasible, 5 node cap.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitCap = 5;

int log_level() {
    static int level = [] {
        const char* env = std::getenv("FLEXGRID_LOG");
        std::string v = env ? env : "warn";
        if (v == "error") return 0;
        if (v == "warn") return 1;
        if (v == "info") return 2;
        if (v == "debug") return 3;
        return 1;
    }();
    return level;
}

void log_line(int level, const char* tag, const std::string& msg) {
    if (log_level() >= level) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

void log_info(const std::string& msg) { log_line(2, "info", msg); }
void log_error(const std::string& msg) { log_line(0, "error", msg); }

struct OutputDir {
    std::filesystem::path dir;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
    std::vector<std::string> outputs;

    void add_input(const std::string& path, const std::string& content) {
        inputs.emplace_back(path, flexgrid::sha256_hex(content));
    }
    void write(const std::string& name, const std::string& content) {
        flexgrid::write_text_file((dir / name).string(), content);
        outputs.push_back(name);
        log_info("wrote " + (dir / name).string());
    }
    void write_manifest(const std::string& command, int step_minutes) {
        nlohmann::json j;
        j["tool"] = "flexgrid";
        j["tool_version"] = kVersion;
        j["command"] = command;
        nlohmann::json in = nlohmann::json::array();
        for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"sha256", hash}});
        j["inputs"] = in;
        j["outputs"] = outputs;
        j["step_minutes"] = step_minutes;
        j["tolerances"] = {{"feasibility", flexgrid::tol::feasibility},
                           {"integrality", flexgrid::tol::integrality},
                           {"pivot", flexgrid::tol::pivot}};
        flexgrid::write_text_file((dir / "manifest.json").string(), j.dump(2) + "\n");
    }
};

OutputDir make_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw flexgrid::IoError("cannot create output directory '" + out + "'");
    return {out, {}, {}};
}

std::string base_dir_of(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? std::string{"."} : parent.string();
}

flexgrid::SiteConfig load_site(const std::string& path, OutputDir* out, int step_minutes_flag) {
    std::string text = flexgrid::read_text_file(path);
    if (out) out->add_input(path, text);
    flexgrid::SiteConfig config = flexgrid::parse_site_json(text, base_dir_of(path));
    auto violations = flexgrid::validate_site(config);
    if (!violations.empty()) {
        for (const auto& v : violations) log_error(v.str());
        throw flexgrid::DomainError("site config '" + path + "' has " +
                                    std::to_string(violations.size()) + " validation error(s): " +
                                    violations.front().str());
    }
    if (step_minutes_flag > 0 && config.total_load.step_minutes != step_minutes_flag) {
        throw flexgrid::DomainError("config step (" + std::to_string(config.total_load.step_minutes) +
                                    " min) does not match --step-minutes " +
                                    std::to_string(step_minutes_flag));
    }
    return config;
}

int run_characterize(const std::string& site_path, const std::string& answers_path,
                     const std::string& out_path, int step_minutes_flag) {
    OutputDir out = make_out_dir(out_path);
    flexgrid::SiteConfig config = load_site(site_path, &out, step_minutes_flag);
    std::string answers_text = flexgrid::read_text_file(answers_path);
    out.add_input(answers_path, answers_text);
    auto answers = flexgrid::parse_answers_json(answers_text);

    std::vector<flexgrid::ProductSpec> products = config.products;
    if (products.empty()) products.push_back({"dr", 4.0});

    flexgrid::FlexibilityMatrix matrix = flexgrid::characterize_site(config.assets, answers, products);
    out.write("matrix.json", flexgrid::matrix_to_json(matrix));
    out.write("intake_report.txt", flexgrid::audit_intake_report(config, answers));
    out.write_manifest("characterize", config.total_load.step_minutes);
    std::printf("%zu matrix rows from %zu assets\n", matrix.rows.size(), config.assets.size());
    return kExitOk;
}

int run_schedule(const std::string& site_path, const std::string& event_path,
                 const std::string& objective, const std::string& out_path, long node_cap,
                 int step_minutes_flag) {
    OutputDir out = make_out_dir(out_path);
    flexgrid::SiteConfig config = load_site(site_path, &out, step_minutes_flag);
    std::string event_text = flexgrid::read_text_file(event_path);
    out.add_input(event_path, event_text);
    flexgrid::EventFile ev = flexgrid::parse_event_json(event_text);

    flexgrid::EventImpactTable table = flexgrid::build_event_impact(config, ev.event);
    flexgrid::ScheduleOptions options;
    options.node_cap = node_cap;

    flexgrid::Schedule schedule;
    if (objective == "revenue") {
        std::vector<double> weights = ev.event.energy_weight.value_or(
            std::vector<double>(table.n_steps(), 1.0));
        schedule = flexgrid::max_revenue_schedule(table, weights, table.step_h, options);
    } else if (objective == "duration") {
        schedule = flexgrid::max_bid_duration_schedule(table, ev.event.min_power_kw, options);
    } else if (objective == "peak") {
        schedule = flexgrid::max_peak_power_schedule(table, options);
    } else if (objective == "stochastic") {
        flexgrid::StochasticProgram program;
        if (ev.program) {
            program = *ev.program;
        } else {
            // No scenario data supplied: degenerate single scenario with a
            // flat unit price against the baseline load in the window.
            flexgrid::CostScenario sc;
            sc.probability = 1.0;
            sc.energy_price_per_step = {1.0};
            for (int t : table.timesteps) {
                sc.import_quantities_kw.push_back(config.total_load.values_kw[t]);
            }
            program.scenarios.push_back(std::move(sc));
        }
        schedule = flexgrid::stochastic_schedule(program, table, table.step_h, options);
    } else {
        throw flexgrid::DomainError("unknown objective '" + objective + "'");
    }

    if (schedule.status == flexgrid::SolveStatus::Infeasible) {
        log_error("no feasible schedule: the event constraints cannot all be met");
        std::printf("infeasible\n");
        return kExitInfeasible;
    }
    if (schedule.status == flexgrid::SolveStatus::CapExceeded) {
        log_error("node cap exceeded before proving optimality (best incumbent attached)");
        out.write("schedule.csv", flexgrid::schedule_to_csv(schedule, table));
        out.write("summary.json", flexgrid::schedule_summary_json(schedule, table));
        out.write_manifest("schedule", config.total_load.step_minutes);
        return kExitCap;
    }

    out.write("schedule.csv", flexgrid::schedule_to_csv(schedule, table));
    out.write("summary.json", flexgrid::schedule_summary_json(schedule, table));
    out.write_manifest("schedule", config.total_load.step_minutes);
    std::printf("%.10g\n", schedule.objective_value);
    return kExitOk;
}

int run_assess(const std::string& site_path, const std::string& out_path,
               const std::string& season, const std::string& format, int step_minutes_flag) {
    OutputDir out = make_out_dir(out_path);
    flexgrid::SiteConfig config = load_site(site_path, &out, step_minutes_flag);

    std::vector<flexgrid::Season> seasons;
    if (season == "winter") seasons.push_back(flexgrid::Season::Winter);
    else if (season == "summer") seasons.push_back(flexgrid::Season::Summer);
    else if (season != "both") throw flexgrid::DomainError("unknown season '" + season + "'");

    flexgrid::AssessmentReport report;
    flexgrid::LabelDocument label;
    if (config.matrix.rows.empty() || !config.assessment || config.assessment->stack.empty()) {
        // Nothing to schedule: emit a zero-range label so the artifact set is
        // still complete.
        report.site_name = config.site_name;
        report.reference_season = to_string(config.total_load.season);
        report.no_flexible_assets = true;
        report.availability_summary = "n/a";
        label = flexgrid::kpi_label(report, config.matrix);
    } else {
        report = flexgrid::scenario_matrix(config, seasons);
        label = flexgrid::kpi_label(report, config.matrix);
    }

    if (format == "csv" || format == "both") out.write("report.csv", flexgrid::report_to_csv(report));
    if (format == "json" || format == "both") out.write("report.json", flexgrid::report_to_json(report));
    out.write("label.svg", label.svg);
    out.write("label.txt", label.text);
    out.write("benchmark.txt", flexgrid::benchmark_table_text(report));
    out.write_manifest("assess", config.total_load.step_minutes);

    for (const auto& sc : report.scenarios) {
        std::string line = to_string(sc.season) + " " + std::to_string((int)sc.duration_h) + "h:";
        bool first = true;
        for (const auto& prefix : sc.prefixes) {
            line += first ? " " : " | +";
            line += prefix.assets.back() + " " +
                    std::to_string((int)std::lround(prefix.aggregate_percent)) + "%";
            first = false;
        }
        std::printf("%s\n", line.c_str());
    }
    std::printf("flexibility range: %d%%–%d%%\n", report.kpi_min_percent,
                report.kpi_max_percent);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flexgrid: site flexibility assessment and DR event scheduling"};
    app.set_version_flag("--version", std::string("flexgrid ") + kVersion);
    app.require_subcommand(1);

    int step_minutes = 0;  // 0 = take the config's step
    app.add_option("--step-minutes", step_minutes,
                   "expected site timestep (default 15; must be a divisor of 60)");

    auto* characterize = app.add_subcommand(
        "characterize", "derive a flexibility matrix from audit answers");
    std::string c_site, c_answers, c_out;
    characterize->add_option("site", c_site, "site config JSON")->required();
    characterize->add_option("answers", c_answers, "audit answers JSON")->required();
    characterize->add_option("--out", c_out, "output directory")->required();

    auto* schedule = app.add_subcommand("schedule", "schedule resources against a DR event");
    std::string s_site, s_event, s_objective = "revenue", s_out;
    long node_cap = 100000;
    schedule->add_option("site", s_site, "site config JSON")->required();
    schedule->add_option("event", s_event, "DR event JSON")->required();
    schedule->add_option("--objective", s_objective, "revenue|duration|peak|stochastic")
        ->check(CLI::IsMember({"revenue", "duration", "peak", "stochastic"}));
    schedule->add_option("--out", s_out, "output directory")->required();
    schedule->add_option("--node-cap", node_cap, "branch-and-bound node cap");

    auto* assess = app.add_subcommand("assess", "run the scenario matrix and emit the KPI label");
    std::string a_site, a_out, a_season = "both", a_format = "both";
    assess->add_option("site", a_site, "site config JSON")->required();
    assess->add_option("--out", a_out, "output directory")->required();
    assess->add_option("--season", a_season, "winter|summer|both")
        ->check(CLI::IsMember({"winter", "summer", "both"}));
    assess->add_option("--format", a_format, "csv|json (default: both)")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitInput;
    }

    if (step_minutes != 0 && (step_minutes < 0 || 60 % step_minutes != 0)) {
        log_error("--step-minutes must be a positive divisor of 60");
        return kExitInput;
    }

    try {
        if (characterize->parsed()) {
            return run_characterize(c_site, c_answers, c_out, step_minutes);
        }
        if (schedule->parsed()) {
            return run_schedule(s_site, s_event, s_objective, s_out, node_cap, step_minutes);
        }
        if (assess->parsed()) {
            return run_assess(a_site, a_out, a_season, a_format, step_minutes);
        }
    } catch (const flexgrid::IoError& e) {
        log_error(e.what());
        return kExitIo;
    } catch (const flexgrid::NumericalBreakdown& e) {
        log_error(e.what());
        return 1;
    } catch (const flexgrid::Error& e) {
        log_error(e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
    return kExitInput;
}
