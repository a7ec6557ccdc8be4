// Prints one PASS/FAIL line per acceptance criterion. Exit status is 0 only
// when the failing criteria are exactly kKnownFailures; an unexpected failure
// or an unexpected pass both exit 1.

#include <cstdio>
#include <set>
#include <string>

#include "sislab/config.hpp"
#include "sislab/experiments.hpp"
#include "sislab/report.hpp"

using namespace sislab;

namespace {

// Failures analysed in README "Known failures"; the criteria themselves are unchanged.
const std::set<int> kKnownFailures = {9, 10, 11};

std::string metrics_text(const CriterionResult& c) {
    std::string s;
    for (const auto& [k, v] : c.metrics) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        s += " " + k + "=" + buf;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg = parse_config("");
    cfg.experiment.kind = ExperimentKind::Verify;
    const ConvergenceReport r = run_experiment(cfg);

    std::set<int> failed;
    for (const CriterionResult& c : r.criteria) {
        if (!c.pass) failed.insert(c.id);
        std::printf("%s %2d %s%s%s |%s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str(), metrics_text(c).c_str());
    }
    if (argc > 1) emit_report(r, cfg, argv[1]);

    const bool all_reported = r.criteria.size() == 14;
    const bool as_expected = failed == kKnownFailures;
    std::printf("%zu/%zu criteria pass; known failures %s\n", r.criteria.size() - failed.size(), r.criteria.size(),
                as_expected ? "match" : "DO NOT match");
    return all_reported && as_expected ? 0 : 1;
}
