#include <cstdio>
#include <sstream>

#include "flexgrid/assess.hpp"

namespace flexgrid {

namespace {

std::string fmt(const char* f, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string durations_line(const AssessmentReport& report) {
    if (report.durations_h.empty()) return "n/a";
    std::string out;
    for (double d : report.durations_h) {
        if (!out.empty()) out += ", ";
        out += fmt("%g h", d);
    }
    return out;
}

std::string range_line(const AssessmentReport& report) {
    // En dash between the endpoints.
    return std::to_string(report.kpi_min_percent) + "%–" +
           std::to_string(report.kpi_max_percent) + "%";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

LabelDocument kpi_label(const AssessmentReport& report, const FlexibilityMatrix& matrix) {
    LabelDocument doc;
    const std::string range = range_line(report);
    const std::string durations = durations_line(report);
    const std::string power = fmt("%.1f kW", report.max_power_kw);
    const std::string tia = matrix.rows.empty() ? "n/a" : fmt("%g h", report.shortest_tia_h);
    const bool empty = report.no_flexible_assets || matrix.rows.empty();

    {
        std::ostringstream t;
        t << "SITE FLEXIBILITY LABEL\n";
        t << "site: " << report.site_name << "\n";
        t << "flexibility range: " << range << "\n";
        if (empty) t << "note: no flexible assets\n";
        t << "event durations: " << durations << "\n";
        t << "max deliverable power: " << power << "\n";
        t << "shortest notice (TIA): " << tia << "\n";
        t << "availability: " << report.availability_summary << "\n";
        t << "benchmark: " << (report.benchmark_verdict.empty() ? "n/a" : report.benchmark_verdict)
          << "\n";
        doc.text = t.str();
    }

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"300\" "
         "viewBox=\"0 0 420 300\">\n";
    s << "  <rect x=\"1\" y=\"1\" width=\"418\" height=\"298\" fill=\"#ffffff\" "
         "stroke=\"#1a3a5c\" stroke-width=\"2\"/>\n";
    s << "  <rect x=\"1\" y=\"1\" width=\"418\" height=\"46\" fill=\"#1a3a5c\"/>\n";
    s << "  <text x=\"210\" y=\"31\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, "
         "sans-serif\" font-size=\"20\" fill=\"#ffffff\">SITE FLEXIBILITY</text>\n";
    s << "  <text x=\"210\" y=\"70\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, "
         "sans-serif\" font-size=\"14\" fill=\"#444444\">"
      << xml_escape(report.site_name) << "</text>\n";
    s << "  <text x=\"210\" y=\"128\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, "
         "sans-serif\" font-size=\"44\" font-weight=\"bold\" fill=\"#1a3a5c\">"
      << range << "</text>\n";
    s << "  <text x=\"210\" y=\"150\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, "
         "sans-serif\" font-size=\"12\" fill=\"#444444\">"
      << (empty ? "no flexible assets" : "of total site load, by event duration and sources")
      << "</text>\n";
    s << "  <line x1=\"20\" y1=\"166\" x2=\"400\" y2=\"166\" stroke=\"#cccccc\" "
         "stroke-width=\"1\"/>\n";
    int y = 190;
    auto field = [&](const std::string& key, const std::string& value) {
        s << "  <text x=\"30\" y=\"" << y
          << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\" "
             "fill=\"#444444\">"
          << xml_escape(key) << "</text>\n";
        s << "  <text x=\"390\" y=\"" << y
          << "\" text-anchor=\"end\" font-family=\"Helvetica, Arial, sans-serif\" "
             "font-size=\"13\" fill=\"#1a3a5c\">"
          << xml_escape(value) << "</text>\n";
        y += 22;
    };
    field("Event durations", durations);
    field("Max deliverable power", power);
    field("Shortest notice (TIA)", tia);
    field("Availability", report.availability_summary);
    field("Benchmark", report.benchmark_verdict.empty() ? "n/a" : report.benchmark_verdict);
    s << "</svg>\n";
    doc.svg = s.str();
    return doc;
}

}  // namespace flexgrid
