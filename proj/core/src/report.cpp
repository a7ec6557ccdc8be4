#include "sislab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sislab/error.hpp"

namespace sislab {

namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV cells keep nan/inf spelled out
std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt(v);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out + "\"";
}

std::string boolean(bool b) { return b ? "true" : "false"; }

template <class Map, class F>
std::string object(const Map& m, F value) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : m) {
        if (!first) out += ",";
        first = false;
        out += quote(k) + ":" + value(v);
    }
    return out + "}";
}

std::string number_map(const std::map<std::string, double>& m) {
    return object(m, [](double v) { return fmt(v); });
}

const char* grading_name(const Grading& g) {
    return g.type == Grading::Type::Uniform ? "uniform" : "geometric";
}

}  // namespace

std::string summary_body(const ConvergenceReport& r, const RunConfig& cfg) {
    std::string s = "{";
    s += "\"kind\":" + quote(r.label.empty() ? to_string(r.kind) : r.label);
    s += ",\"parameter\":" + quote(r.parameter);
    s += ",\"pass\":" + boolean(r.pass);
    s += ",\"tolerance\":" + fmt(r.tolerance);
    s += ",\"order_estimate\":" + (r.order ? fmt(*r.order) : std::string("null"));
    s += ",\"checks\":" + object(r.checks, [](bool b) { return boolean(b); });
    s += ",\"scalars\":" + number_map(r.scalars);
    s += ",\"ladder\":[";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const LadderPoint& p = r.points[i];
        if (i) s += ",";
        s += "{\"param\":" + fmt(p.param) + ",\"error\":" + fmt(p.error) + ",\"ok\":" + boolean(p.ok) +
             ",\"message\":" + quote(p.message) + ",\"metrics\":" + number_map(p.metrics) + "}";
    }
    s += "],\"criteria\":[";
    for (std::size_t i = 0; i < r.criteria.size(); ++i) {
        const CriterionResult& c = r.criteria[i];
        if (i) s += ",";
        s += "{\"id\":" + std::to_string(c.id) + ",\"name\":" + quote(c.name) + ",\"pass\":" + boolean(c.pass) +
             ",\"metrics\":" + number_map(c.metrics) + ",\"detail\":" + quote(c.detail) + "}";
    }
    s += "],\"notes\":[";
    for (std::size_t i = 0; i < r.notes.size(); ++i) s += (i ? "," : "") + quote(r.notes[i]);
    s += "],\"provenance\":{";
    s += "\"config_hash\":" + quote(hex64(cfg.hash));
    s += ",\"config\":" + (cfg.canonical.empty() ? std::string("null") : cfg.canonical);
    s += ",\"mesh\":{\"L\":" + fmt(cfg.mesh.L) + ",\"cells\":" + std::to_string(cfg.mesh.cells) +
         ",\"grading\":" + quote(grading_name(cfg.mesh.grading)) + ",\"ratio\":" + fmt(cfg.mesh.grading.ratio) + "}";
    s += ",\"solver\":{\"newton_tol\":" + fmt(cfg.solver.newton_tol) + ",\"eig_tol\":" + fmt(cfg.solver.eig_tol) +
         ",\"bc_variant\":" + quote(to_string(cfg.solver.bc_variant)) + "}";
    s += ",\"tolerance\":" + fmt(r.tolerance);
    s += ",\"result_hash\":" + quote(hex64(fnv1a(s)));
    s += "}";
    return s;
}

std::string summary_json(const ConvergenceReport& r, const RunConfig& cfg) {
    std::string s = summary_body(r, cfg);
    s += ",\"runtimes\":{\"total_s\":" + fmt(r.runtime_s) + ",\"ladder_s\":[";
    for (std::size_t i = 0; i < r.points.size(); ++i) s += (i ? "," : "") + fmt(r.points[i].runtime_s);
    s += "]}}\n";
    return s;
}

std::string ladder_csv(const ConvergenceReport& r) {
    std::string s = "param,error,order_estimate,runtime_s\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const LadderPoint& p = r.points[i];
        std::string order;
        if (i > 0) {
            const LadderPoint& a = r.points[i - 1];
            order = cell(std::log(p.error / a.error) / std::log(p.param / a.param));
        }
        s += cell(p.param) + "," + cell(p.error) + "," + order + "," + cell(p.runtime_s) + "\n";
    }
    return s;
}

std::string profile_csv(const Profile& p) {
    std::string s = "x,S,I\n";
    for (std::size_t i = 0; i < p.x.size(); ++i) s += cell(p.x[i]) + "," + cell(p.S[i]) + "," + cell(p.I[i]) + "\n";
    return s;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string s = "t,massS,massI,minI,F,ceiling_margin,gronwall_margin\n";
    for (const TraceRow& t : rows) {
        s += cell(t.t) + "," + cell(t.mass_S) + "," + cell(t.mass_I) + "," + cell(t.min_I) + "," + cell(t.F) + "," +
             cell(t.ceiling_margin) + "," + cell(t.gronwall_margin) + "\n";
    }
    return s;
}

std::vector<std::string> emit_report(const ConvergenceReport& report, const RunConfig& cfg,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
    std::vector<std::string> written;
    const auto put = [&](const char* name, const std::string& body) {
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        out << body;
        if (!out) throw ConfigError("cannot write " + path);
        written.push_back(path);
    };
    if (!report.points.empty()) put("ladder.csv", ladder_csv(report));
    if (report.profile) put("profile.csv", profile_csv(*report.profile));
    if (!report.trace.empty()) put("trace.csv", trace_csv(report.trace));
    put("summary.json", summary_json(report, cfg));
    return written;
}

}  // namespace sislab
