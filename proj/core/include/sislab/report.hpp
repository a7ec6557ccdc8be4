#pragma once

#include <string>
#include <vector>

#include "sislab/config.hpp"
#include "sislab/experiments.hpp"

namespace sislab {

/// summary.json without the "runtimes" field. Numbers use %.17g, maps are
/// key-sorted, non-finite values are written as null; the text depends only
/// on the report's deterministic content and the configuration.
/// provenance.result_hash is FNV-1a of everything before it.
std::string summary_body(const ConvergenceReport& report, const RunConfig& cfg);

/// summary_body with the "runtimes" field appended.
std::string summary_json(const ConvergenceReport& report, const RunConfig& cfg);

std::string ladder_csv(const ConvergenceReport& report);   // param,error,order_estimate,runtime_s
std::string profile_csv(const Profile& profile);           // x,S,I
std::string trace_csv(const std::vector<TraceRow>& rows);  // t,massS,massI,minI,F,ceiling_margin,gronwall_margin

/// Writes summary.json and, when present, ladder.csv, profile.csv and
/// trace.csv into out_dir (created if missing). Returns the paths written.
/// Throws ConfigError when a file cannot be written.
std::vector<std::string> emit_report(const ConvergenceReport& report, const RunConfig& cfg,
                                     const std::string& out_dir);

}  // namespace sislab
