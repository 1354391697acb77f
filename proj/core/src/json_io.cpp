#include "flexgrid/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
const char* kDayNames[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

double need_number(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::string need_string(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

WeeklyCalendar calendar_from_json(const json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "always") return WeeklyCalendar::always();
    if (!j.is_object()) throw ParseError(where + ": availability must be \"always\" or a day map");
    WeeklyCalendar cal;
    for (int d = 0; d < 7; ++d) {
        auto it = j.find(kDayNames[d]);
        if (it == j.end()) continue;
        for (const auto& pair : *it) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ParseError(where + ": availability windows are [begin_h, end_h] pairs");
            }
            cal.windows[d].push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
    }
    return cal;
}

json calendar_to_json(const WeeklyCalendar& cal) {
    if (cal.is_always()) return "always";
    json j = json::object();
    for (int d = 0; d < 7; ++d) {
        if (cal.windows[d].empty()) continue;
        json day = json::array();
        for (const auto& w : cal.windows[d]) day.push_back({w.begin_h, w.end_h});
        j[kDayNames[d]] = day;
    }
    return j;
}

std::optional<PowerPulse> pulse_from_json(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return PowerPulse{it->at("power_kw").get<double>(), it->at("duration_h").get<double>()};
}

json pulse_to_json(const PowerPulse& p) {
    return {{"power_kw", p.power_kw}, {"duration_h", p.duration_h}};
}

FlexibilityParameters row_from_json(const json& j) {
    FlexibilityParameters row;
    const std::string where = "matrix row";
    row.asset_id = need_string(j, "asset_id", where);
    row.product_id = need_string(j, "product_id", where);
    row.flexible_power_kw = need_number(j, "flexible_power_kw", where);
    row.max_duration_h = need_number(j, "max_duration_h", where);
    row.tia_notice_h = j.value("tia_notice_h", 0.0);
    row.preload = pulse_from_json(j, "preload");
    row.rebound = pulse_from_json(j, "rebound");
    if (j.contains("availability")) {
        row.availability = calendar_from_json(j["availability"], where);
    }
    row.disutility_cost_per_event = j.value("disutility_cost_per_event", 0.0);
    row.disutility_unit = j.value("disutility_unit", std::string{});
    row.shed_time_s = j.value("shed_time_s", 0.0);
    if (j.contains("max_activations_per_day") && !j["max_activations_per_day"].is_null()) {
        row.max_activations_per_day = j["max_activations_per_day"].get<int>();
    }
    row.min_recovery_h = j.value("min_recovery_h", 0.0);
    return row;
}

json row_to_json(const FlexibilityParameters& row) {
    json j;
    j["asset_id"] = row.asset_id;
    j["product_id"] = row.product_id;
    j["flexible_power_kw"] = row.flexible_power_kw;
    j["max_duration_h"] = row.max_duration_h;
    j["tia_notice_h"] = row.tia_notice_h;
    if (row.preload) j["preload"] = pulse_to_json(*row.preload);
    if (row.rebound) j["rebound"] = pulse_to_json(*row.rebound);
    j["availability"] = calendar_to_json(row.availability);
    j["disutility_cost_per_event"] = row.disutility_cost_per_event;
    if (!row.disutility_unit.empty()) j["disutility_unit"] = row.disutility_unit;
    j["shed_time_s"] = row.shed_time_s;
    if (row.max_activations_per_day) j["max_activations_per_day"] = *row.max_activations_per_day;
    j["min_recovery_h"] = row.min_recovery_h;
    return j;
}

LoadProfile profile_from_json(const json& j, const std::string& base_dir, const std::string& where) {
    LoadProfile p;
    p.season = season_from_string(j.value("season", "winter"));
    if (j.contains("csv")) {
        std::string path = j["csv"].get<std::string>();
        if (!base_dir.empty() && !path.empty() && path.front() != '/') {
            path = base_dir + "/" + path;
        }
        return parse_profile_csv(read_text_file(path), p.season);
    }
    p.start = parse_iso8601(need_string(j, "start", where));
    p.step_minutes = static_cast<int>(need_number(j, "step_minutes", where));
    const json& values = need(j, "values_kw", where);
    if (!values.is_array()) throw ParseError(where + ": values_kw must be an array");
    for (const auto& v : values) p.values_kw.push_back(v.get<double>());
    return p;
}

json profile_to_json(const LoadProfile& p) {
    json j;
    j["start"] = format_iso8601(p.start);
    j["step_minutes"] = p.step_minutes;
    j["season"] = to_string(p.season);
    j["values_kw"] = p.values_kw;
    return j;
}

ParameterEstimates estimates_from_json(const json& j) {
    ParameterEstimates est;
    if (j.contains("flexible_power_kw")) est.flexible_power_kw = j["flexible_power_kw"].get<double>();
    if (j.contains("max_duration_h")) est.max_duration_h = j["max_duration_h"].get<double>();
    if (j.contains("tia_notice_h")) est.tia_notice_h = j["tia_notice_h"].get<double>();
    est.preload = pulse_from_json(j, "preload");
    est.rebound = pulse_from_json(j, "rebound");
    if (j.contains("availability")) {
        est.availability = calendar_from_json(j["availability"], "parameter_estimates");
    }
    if (j.contains("disutility_cost_per_event")) {
        est.disutility_cost_per_event = j["disutility_cost_per_event"].get<double>();
    }
    if (j.contains("disutility_unit")) est.disutility_unit = j["disutility_unit"].get<std::string>();
    if (j.contains("shed_time_s")) est.shed_time_s = j["shed_time_s"].get<double>();
    if (j.contains("max_activations_per_day")) {
        est.max_activations_per_day = j["max_activations_per_day"].get<int>();
    }
    if (j.contains("min_recovery_h")) est.min_recovery_h = j["min_recovery_h"].get<double>();
    return est;
}

}  // namespace

SiteConfig parse_site_json(const std::string& text, const std::string& base_dir) {
    json j = parse_json_text(text, "site config");
    if (j.value("format_version", 0) != kFormatVersion) {
        throw ParseError("site config: format_version must be " + std::to_string(kFormatVersion));
    }
    SiteConfig config;
    config.site_name = need_string(j, "site_name", "site config");
    config.floor_area_m2 = need_number(j, "floor_area_m2", "site config");
    config.notes = j.value("notes", std::string{});

    for (const auto& a : need(j, "assets", "site config")) {
        FlexAsset asset;
        asset.id = need_string(a, "id", "asset");
        asset.name = a.value("name", asset.id);
        std::string kind = need_string(a, "kind", "asset " + asset.id);
        asset.kind.category = asset_category_from_string(kind);
        if (a.contains("load_class") && !a["load_class"].is_null()) {
            asset.kind.load_class = load_class_from_string(a["load_class"].get<std::string>());
        }
        asset.rated_power_kw = need_number(a, "rated_power_kw", "asset " + asset.id);
        if (a.contains("energy_capacity_kwh") && !a["energy_capacity_kwh"].is_null()) {
            asset.energy_capacity_kwh = a["energy_capacity_kwh"].get<double>();
        }
        if (a.contains("round_trip_efficiency") && !a["round_trip_efficiency"].is_null()) {
            asset.round_trip_efficiency = a["round_trip_efficiency"].get<double>();
        }
        asset.sheddable_s = a.value("sheddable_s", 0.0);
        asset.controllable_c = a.value("controllable_c", 0.0);
        asset.acceptable_a = a.value("acceptable_a", 0.0);
        config.assets.push_back(std::move(asset));
    }

    if (j.contains("products")) {
        for (const auto& pj : j["products"]) {
            config.products.push_back({need_string(pj, "id", "product"),
                                       pj.value("event_duration_h", 1.0)});
        }
    }

    for (const auto& r : need(j, "matrix", "site config")) config.matrix.rows.push_back(row_from_json(r));

    config.total_load = profile_from_json(need(j, "total_load", "site config"), base_dir, "total_load");
    if (j.contains("per_asset_profiles")) {
        for (const auto& [id, pj] : j["per_asset_profiles"].items()) {
            config.per_asset_profiles[id] = profile_from_json(pj, base_dir, "per_asset_profiles");
        }
    }
    if (j.contains("seasonal_profiles")) {
        for (const auto& [season, sj] : j["seasonal_profiles"].items()) {
            SeasonProfiles set;
            set.total_load =
                profile_from_json(need(sj, "total_load", "seasonal_profiles"), base_dir, season);
            if (sj.contains("per_asset_profiles")) {
                for (const auto& [id, pj] : sj["per_asset_profiles"].items()) {
                    set.per_asset[id] = profile_from_json(pj, base_dir, season);
                }
            }
            config.seasonal_profiles[season] = std::move(set);
        }
    }
    if (j.contains("assessment")) {
        const json& aj = j["assessment"];
        AssessmentSetup setup;
        for (const auto& id : need(aj, "stack", "assessment")) setup.stack.push_back(id.get<std::string>());
        setup.product_id = aj.value("product_id", std::string{});
        if (aj.contains("windows")) {
            for (const auto& [season, wj] : aj["windows"].items()) {
                for (const auto& [key, ts] : wj.items()) {
                    setup.windows[season][key] = parse_iso8601(ts.get<std::string>());
                }
            }
        }
        config.assessment = std::move(setup);
    }
    return config;
}

std::string site_to_json(const SiteConfig& config) {
    json j;
    j["format_version"] = kFormatVersion;
    j["site_name"] = config.site_name;
    j["floor_area_m2"] = config.floor_area_m2;
    if (!config.notes.empty()) j["notes"] = config.notes;

    json assets = json::array();
    for (const auto& a : config.assets) {
        json aj;
        aj["id"] = a.id;
        aj["name"] = a.name;
        aj["kind"] = to_string(a.kind.category);
        if (a.kind.load_class) aj["load_class"] = to_string(*a.kind.load_class);
        aj["rated_power_kw"] = a.rated_power_kw;
        if (a.energy_capacity_kwh) aj["energy_capacity_kwh"] = *a.energy_capacity_kwh;
        if (a.round_trip_efficiency) aj["round_trip_efficiency"] = *a.round_trip_efficiency;
        aj["sheddable_s"] = a.sheddable_s;
        aj["controllable_c"] = a.controllable_c;
        aj["acceptable_a"] = a.acceptable_a;
        assets.push_back(aj);
    }
    j["assets"] = assets;

    if (!config.products.empty()) {
        json products = json::array();
        for (const auto& p : config.products) {
            products.push_back({{"id", p.id}, {"event_duration_h", p.event_duration_h}});
        }
        j["products"] = products;
    }

    json matrix = json::array();
    for (const auto& r : config.matrix.rows) matrix.push_back(row_to_json(r));
    j["matrix"] = matrix;

    j["total_load"] = profile_to_json(config.total_load);
    if (!config.per_asset_profiles.empty()) {
        json per = json::object();
        for (const auto& [id, p] : config.per_asset_profiles) per[id] = profile_to_json(p);
        j["per_asset_profiles"] = per;
    }
    if (!config.seasonal_profiles.empty()) {
        json seasons = json::object();
        for (const auto& [season, set] : config.seasonal_profiles) {
            json sj;
            sj["total_load"] = profile_to_json(set.total_load);
            if (!set.per_asset.empty()) {
                json per = json::object();
                for (const auto& [id, p] : set.per_asset) per[id] = profile_to_json(p);
                sj["per_asset_profiles"] = per;
            }
            seasons[season] = sj;
        }
        j["seasonal_profiles"] = seasons;
    }
    if (config.assessment) {
        json aj;
        aj["stack"] = config.assessment->stack;
        if (!config.assessment->product_id.empty()) aj["product_id"] = config.assessment->product_id;
        if (!config.assessment->windows.empty()) {
            json wj = json::object();
            for (const auto& [season, entries] : config.assessment->windows) {
                json sj = json::object();
                for (const auto& [key, ts] : entries) sj[key] = format_iso8601(ts);
                wj[season] = sj;
            }
            aj["windows"] = wj;
        }
        j["assessment"] = aj;
    }
    return j.dump(2) + "\n";
}

FlexibilityMatrix parse_matrix_json(const std::string& text) {
    json j = parse_json_text(text, "matrix");
    FlexibilityMatrix matrix;
    const json& rows = j.is_array() ? j : need(j, "matrix", "matrix");
    for (const auto& r : rows) matrix.rows.push_back(row_from_json(r));
    return matrix;
}

std::string matrix_to_json(const FlexibilityMatrix& matrix) {
    json rows = json::array();
    for (const auto& r : matrix.rows) rows.push_back(row_to_json(r));
    json j;
    j["format_version"] = kFormatVersion;
    j["matrix"] = rows;
    return j.dump(2) + "\n";
}

std::vector<AuditAnswers> parse_answers_json(const std::string& text) {
    json j = parse_json_text(text, "audit answers");
    if (!j.is_array()) throw ParseError("audit answers: expected a JSON list");
    std::vector<AuditAnswers> out;
    for (const auto& aj : j) {
        AuditAnswers a;
        a.asset_id = need_string(aj, "asset_id", "audit answers");
        a.audit_type = static_cast<int>(aj.value("audit_type", 1.0));
        if (a.audit_type < 1 || a.audit_type > 3) {
            throw ParseError("audit answers: audit_type must be 1, 2 or 3");
        }
        a.is_sheddable = aj.value("is_sheddable", false);
        a.shed_fraction = aj.value("shed_fraction", 0.0);
        a.has_control_point = aj.value("has_control_point", false);
        a.controllable_fraction = aj.value("controllable_fraction", 0.0);
        a.acceptable_fraction = aj.value("acceptable_fraction", 0.0);
        a.shift_or_curtail = flex_action_from_string(aj.value("shift_or_curtail", "none"));
        a.rebound_expected = aj.value("rebound_expected", false);
        if (aj.contains("parameter_estimates")) {
            a.parameter_estimates = estimates_from_json(aj["parameter_estimates"]);
        }
        out.push_back(std::move(a));
    }
    return out;
}

EventFile parse_event_json(const std::string& text) {
    json j = parse_json_text(text, "event");
    EventFile out;
    out.event.product_id = need_string(j, "product", "event");
    out.event.window_start = parse_iso8601(need_string(j, "window_start", "event"));
    out.event.duration_h = need_number(j, "duration_h", "event");
    out.event.direction = direction_from_string(j.value("direction", "decrease"));
    out.event.min_power_kw = j.value("min_power_kw", 0.0);
    out.event.notice_given_h = j.value("notice_h", 0.0);
    if (j.contains("energy_weight")) {
        std::vector<double> w;
        for (const auto& v : j["energy_weight"]) w.push_back(v.get<double>());
        out.event.energy_weight = std::move(w);
    }
    if (j.contains("scenarios")) {
        StochasticProgram program;
        auto number_or_list = [](const json& v) {
            std::vector<double> out;
            if (v.is_number()) out.push_back(v.get<double>());
            else for (const auto& x : v) out.push_back(x.get<double>());
            return out;
        };
        for (const auto& sj : j["scenarios"]) {
            CostScenario sc;
            sc.probability = need_number(sj, "probability", "scenario");
            if (sj.contains("energy_price_per_step")) {
                sc.energy_price_per_step = number_or_list(sj["energy_price_per_step"]);
            }
            sc.peak_price = sj.value("peak_price", 0.0);
            if (sj.contains("import_quantities_kw")) {
                sc.import_quantities_kw = number_or_list(sj["import_quantities_kw"]);
            }
            if (sj.contains("export_price_per_step")) {
                sc.export_price_per_step = number_or_list(sj["export_price_per_step"]);
            }
            if (sj.contains("export_quantities_kw")) {
                sc.export_quantities_kw = number_or_list(sj["export_quantities_kw"]);
            }
            program.scenarios.push_back(std::move(sc));
        }
        for (const auto& cj : j.value("converters", json::array())) {
            program.converters.push_back({cj.value("id", std::string{}),
                                          need_string(cj, "resource_id", "converter"),
                                          cj.value("startup_cost", 0.0)});
        }
        for (const auto& dj : j.value("curtailable_devices", json::array())) {
            program.curtailable_devices.push_back({dj.value("id", std::string{}),
                                                   need_string(dj, "resource_id", "device"),
                                                   dj.value("disutility_cost", 0.0)});
        }
        out.program = std::move(program);
    }
    return out;
}

LoadProfile parse_profile_csv(const std::string& text, Season season) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("profile CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,load_kw") {
        throw ParseError("profile CSV: header must be 'timestamp,load_kw'");
    }
    LoadProfile p;
    p.season = season;
    std::int64_t prev_seconds = 0;
    std::int64_t step_seconds = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("profile CSV line " + std::to_string(line_no) + ": expected 2 columns");
        }
        Timestamp ts = parse_iso8601(line.substr(0, comma));
        double value = 0.0;
        try {
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError("profile CSV line " + std::to_string(line_no) + ": bad load value");
        }
        if (!(std::isfinite(value) && value >= 0.0)) {
            throw ParseError("profile CSV line " + std::to_string(line_no) +
                             ": load must be finite and >= 0");
        }
        if (p.values_kw.empty()) {
            p.start = ts;
        } else {
            std::int64_t delta = ts.seconds - prev_seconds;
            if (delta <= 0) {
                throw ParseError("profile CSV line " + std::to_string(line_no) +
                                 ": timestamps must be strictly increasing");
            }
            if (step_seconds == 0) {
                step_seconds = delta;
                if (step_seconds % 60 != 0 || 60 % (step_seconds / 60) != 0) {
                    throw ParseError("profile CSV: step must be a whole divisor of 60 minutes");
                }
            } else if (delta != step_seconds) {
                throw ParseError("profile CSV line " + std::to_string(line_no) +
                                 ": spacing must be uniform");
            }
        }
        prev_seconds = ts.seconds;
        p.values_kw.push_back(value);
    }
    if (p.values_kw.size() < 2) throw ParseError("profile CSV: need at least 2 samples");
    p.step_minutes = static_cast<int>(step_seconds / 60);
    return p;
}

std::string profile_to_csv(const LoadProfile& profile) {
    std::string out = "timestamp,load_kw\n";
    char buf[96];
    for (std::size_t t = 0; t < profile.values_kw.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%s,%.10g\n", format_iso8601(profile.time_at(t)).c_str(),
                      profile.values_kw[t]);
        out += buf;
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace flexgrid
