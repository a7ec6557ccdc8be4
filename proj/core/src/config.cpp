#include "sislab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sislab/error.hpp"

namespace sislab {

using nlohmann::json;

namespace {

json defaults() {
    return json::parse(R"({
      "domain": {"L": 1.0, "cells": 400, "grading": {"type": "uniform", "ratio": 1.0}},
      "coefficients": {"Lambda": "1", "mu": "1", "beta": "3", "gamma": "1"},
      "params": {"dS": 1.0, "dI": 1.0, "q": 0.0, "m": 1.0},
      "initial": {"S": "1", "I": "0.1"},
      "time": {"dt": 0.01, "t_end": 50.0, "output_every": 1.0},
      "solver": {"newton_tol": 1e-10, "eig_tol": 1e-12, "bc_variant": "derived"},
      "experiment": {"kind": "verify", "ladder": [], "tolerance": null}
    })");
}

void merge(json& base, const json& patch, const std::string& where) {
    if (!patch.is_object()) throw ConfigError("config section " + where + " must be an object");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown config key " + path);
        json& slot = base[it.key()];
        if (slot.is_object()) {
            merge(slot, it.value(), path);
        } else {
            slot = it.value();
        }
    }
}

void apply_override(json& doc, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + text);
    const std::string key = text.substr(0, eq);
    const std::string raw = text.substr(eq + 1);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key " + key);
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw ConfigError("override targets a section: " + key);
    json value = json::parse(raw, nullptr, false);
    *node = value.is_discarded() ? json(raw) : value;
}

double number(const json& j, const char* path) {
    if (!j.is_number()) throw ConfigError(std::string(path) + " must be a number");
    return j.get<double>();
}

std::string text(const json& j, const char* path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        return buf;
    }
    throw ConfigError(std::string(path) + " must be an expression string");
}

RunConfig resolve(const json& doc) {
    RunConfig c;
    const json& d = doc["domain"];
    c.mesh.L = number(d["L"], "domain.L");
    const json& cells = d["cells"];
    if (!cells.is_number_integer()) throw ConfigError("domain.cells must be an integer");
    c.mesh.cells = cells.get<int>();
    const std::string gt = text(d["grading"]["type"], "domain.grading.type");
    const double ratio = number(d["grading"]["ratio"], "domain.grading.ratio");
    if (gt == "uniform") {
        c.mesh.grading = Grading::uniform();
    } else if (gt == "geometric") {
        c.mesh.grading = Grading::geometric(ratio);
    } else {
        throw ConfigError("domain.grading.type must be uniform or geometric");
    }

    const json& k = doc["coefficients"];
    const json& p = doc["params"];
    c.coeffs = make_coefficients(text(k["Lambda"], "coefficients.Lambda"), text(k["mu"], "coefficients.mu"),
                                 text(k["beta"], "coefficients.beta"), text(k["gamma"], "coefficients.gamma"),
                                 number(p["dS"], "params.dS"), number(p["dI"], "params.dI"),
                                 number(p["q"], "params.q"), number(p["m"], "params.m"), c.mesh.L);
    c.initial_S = text(doc["initial"]["S"], "initial.S");
    c.initial_I = text(doc["initial"]["I"], "initial.I");
    parse_expr(c.initial_S);
    parse_expr(c.initial_I);

    const json& t = doc["time"];
    c.time.dt = number(t["dt"], "time.dt");
    c.time.t_end = number(t["t_end"], "time.t_end");
    c.time.output_every = number(t["output_every"], "time.output_every");
    if (!(c.time.dt > 0.0) || !(c.time.t_end > c.time.dt) || !(c.time.output_every > 0.0)) {
        throw ConfigError("time needs 0 < dt < t_end and output_every > 0");
    }

    const json& s = doc["solver"];
    c.solver.newton_tol = number(s["newton_tol"], "solver.newton_tol");
    c.solver.eig_tol = number(s["eig_tol"], "solver.eig_tol");
    if (!(c.solver.newton_tol > 0.0) || !(c.solver.eig_tol > 0.0)) {
        throw ConfigError("solver tolerances must be positive");
    }
    c.solver.bc_variant = parse_bc_variant(text(s["bc_variant"], "solver.bc_variant"));

    const json& e = doc["experiment"];
    c.experiment.kind = parse_experiment_kind(text(e["kind"], "experiment.kind"));
    if (!e["ladder"].is_array()) throw ConfigError("experiment.ladder must be an array");
    for (const json& v : e["ladder"]) c.experiment.ladder.push_back(number(v, "experiment.ladder[]"));
    if (!c.experiment.ladder.empty()) {
        if (c.experiment.ladder.size() < 3) throw ConfigError("experiment.ladder needs at least 3 values");
        const bool up = c.experiment.ladder[1] > c.experiment.ladder[0];
        for (std::size_t i = 1; i < c.experiment.ladder.size(); ++i) {
            const double a = c.experiment.ladder[i - 1], b = c.experiment.ladder[i];
            if (!(up ? b > a : b < a)) throw ConfigError("experiment.ladder must be strictly monotone");
        }
        for (double v : c.experiment.ladder) {
            if (!(v > 0.0)) throw ConfigError("experiment.ladder values must be positive");
        }
    }
    if (!e["tolerance"].is_null()) {
        c.experiment.tolerance = number(e["tolerance"], "experiment.tolerance");
        if (!(*c.experiment.tolerance > 0.0)) throw ConfigError("experiment.tolerance must be positive");
    }

    validate(c.coeffs, make_mesh(c.mesh));
    c.canonical = doc.dump();
    c.hash = fnv1a(c.canonical);
    return c;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::QInfty: return "q_infty";
        case ExperimentKind::DsZero: return "ds_zero";
        case ExperimentKind::DiZero: return "di_zero";
        case ExperimentKind::DsInfty: return "ds_infty";
        case ExperimentKind::DiInfty: return "di_infty";
        case ExperimentKind::MInfty: return "m_infty";
        case ExperimentKind::R0Limits: return "r0_limits";
        case ExperimentKind::Stability: return "stability";
        case ExperimentKind::Verify: return "verify";
    }
    return "";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
    for (ExperimentKind k : {ExperimentKind::QInfty, ExperimentKind::DsZero, ExperimentKind::DiZero,
                             ExperimentKind::DsInfty, ExperimentKind::DiInfty, ExperimentKind::MInfty,
                             ExperimentKind::R0Limits, ExperimentKind::Stability, ExperimentKind::Verify}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown experiment kind \"" + std::string(s) + "\"");
}

RunConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides,
                       std::optional<int> cells) {
    json doc = defaults();
    if (!json_text.empty()) {
        json file;
        try {
            file = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        merge(doc, file, "");
    }
    for (const std::string& o : overrides) apply_override(doc, o);
    if (cells) doc["domain"]["cells"] = *cells;
    try {
        return resolve(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                      std::optional<int> cells) {
    std::string body;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot read config file " + *path);
        std::ostringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    return parse_config(body, overrides, cells);
}

Mesh make_mesh(const MeshSpec& spec) { return build_mesh(spec.L, spec.cells, spec.grading); }

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace sislab
