#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sislab/error.hpp"
#include "sislab/experiments.hpp"
#include "sislab/report.hpp"
#include "sislab/suite.hpp"

using namespace sislab;

namespace {

RunConfig config_for(const CoefficientSet& cs, ExperimentKind kind, std::vector<double> ladder, int cells = 100,
                     double ratio = 0.99) {
    RunConfig cfg = parse_config("");
    cfg.coeffs = cs;
    cfg.mesh = {cs.L, cells, Grading::geometric(ratio)};
    cfg.experiment.kind = kind;
    cfg.experiment.ladder = std::move(ladder);
    return cfg;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

LadderPoint point(double p, double e) {
    LadderPoint lp;
    lp.param = p;
    lp.error = e;
    lp.ok = true;
    return lp;
}

}  // namespace

TEST_CASE("order fit") {
    CHECK(*fit_order({point(10, 1e-2), point(100, 1e-4), point(1000, 1e-6)}) == doctest::Approx(-2.0));
    CHECK_FALSE(fit_order({point(10, 1e-2)}).has_value());
    LadderPoint bad = point(100, 1.0);
    bad.ok = false;
    CHECK(*fit_order({point(1, 1.0), bad, point(10, 10.0)}) == doctest::Approx(1.0));
    CHECK_FALSE(fit_order({point(1, 0.0), point(10, 0.0), point(100, 0.0)}).has_value());
}

TEST_CASE("default ladders are monotone with at least three values") {
    for (ExperimentKind k : {ExperimentKind::QInfty, ExperimentKind::DsZero, ExperimentKind::DiZero,
                             ExperimentKind::DsInfty, ExperimentKind::DiInfty, ExperimentKind::MInfty,
                             ExperimentKind::R0Limits, ExperimentKind::Stability}) {
        const std::vector<double> l = default_ladder(k);
        REQUIRE(l.size() >= 3);
        const bool up = l[1] > l[0];
        for (std::size_t i = 1; i < l.size(); ++i) CHECK((up ? l[i] > l[i - 1] : l[i] < l[i - 1]));
        CHECK(default_tolerance(k) > 0.0);
    }
}

TEST_CASE("saturation ladder approaches the scaled limit") {
    const ConvergenceReport r = run_experiment(config_for(cs_c(1.0), ExperimentKind::MInfty, {10, 100, 1000, 1e4}));
    REQUIRE(r.points.size() == 4);
    for (std::size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i].error < r.points[i - 1].error);
    CHECK(r.points.back().error <= 0.02);
    CHECK(r.pass);
    CHECK(r.checks.at("errors_decreasing"));
    REQUIRE(r.order.has_value());
    CHECK(*r.order == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("concurrent and sequential ladders give identical reports") {
    const RunConfig cfg = config_for(cs_c(1.0), ExperimentKind::DsInfty, {10, 100, 1000});
    const ConvergenceReport a = run_experiment(cfg, {1});
    const ConvergenceReport b = run_experiment(cfg, {3});
    CHECK(summary_body(a, cfg) == summary_body(b, cfg));
    CHECK(a.scalars.at("uniqueness_probe") <= 1e-9);
}

TEST_CASE("large-advection ladder") {
    const ConvergenceReport r =
        run_experiment(config_for(cs_a(), ExperimentKind::QInfty, {10, 20, 40}, 300, 0.98));
    REQUIRE(r.points.size() == 3);
    for (const LadderPoint& p : r.points) {
        CHECK(p.ok);
        CHECK(p.metrics.count("error_a") == 1);
        CHECK(p.metrics.count("interior_max") == 1);
    }
    CHECK(r.points.back().error < r.points.front().error);
    CHECK(r.scalars.at("K_S") == doctest::Approx(1.0));
    CHECK(r.scalars.at("K_I") == doctest::Approx(3.0));
    REQUIRE(r.profile.has_value());
    CHECK(r.profile->x.size() == 300);
}

TEST_CASE("failed ladder points are reported, not thrown") {
    // R0 < 1 at every point: the large-q limit hypothesis fails per point
    const ConvergenceReport r =
        run_experiment(config_for(cs_a(0.5), ExperimentKind::QInfty, {0.5, 0.7, 0.9}, 100, 0.99));
    REQUIRE(r.points.size() == 3);
    for (const LadderPoint& p : r.points) {
        CHECK_FALSE(p.ok);
        CHECK(std::isnan(p.error));
        CHECK_FALSE(p.message.empty());
    }
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.checks.at("all_points_solved"));
}

TEST_CASE("base data violating a kind's hypothesis throw") {
    CHECK_THROWS_AS(run_experiment(config_for(cs_a(), ExperimentKind::DsZero, {1e-2, 1e-3, 1e-4})), HypothesisError);
    CHECK_THROWS_AS(run_experiment(config_for(cs_a(), ExperimentKind::DiZero, {1e-1, 1e-2, 1e-3})), HypothesisError);
    CHECK_THROWS_AS(run_experiment(config_for(cs_a(0.5), ExperimentKind::MInfty, {10, 100, 1000})), HypothesisError);
}

TEST_CASE("threshold limits") {
    const ConvergenceReport r =
        run_experiment(config_for(cs_c(1.0), ExperimentKind::R0Limits, {1e-1, 1e-2, 1e-3}, 600, 0.99));
    CHECK(r.checks.at("advection_increasing"));
    CHECK(r.checks.at("averaged_limit"));
    CHECK(r.checks.at("monotone_decay"));
    CHECK(r.scalars.at("R0_q40") > r.scalars.at("R0_q5"));
}

TEST_CASE("stability scan") {
    RunConfig cfg = config_for(cs_b(1.0), ExperimentKind::Stability, {1, 10, 100}, 40, 1.0);
    cfg.time.dt = 0.05;
    cfg.time.t_end = 60.0;
    const ConvergenceReport r = run_experiment(cfg);
    REQUIRE(r.points.size() == 3);
    CHECK(r.points.back().metrics.at("analytic_reference") == 1.0);
    CHECK(r.points.back().metrics.at("max_F_increase") <= 1e-10);
    CHECK(r.checks.at("lyapunov_descent"));
    CHECK(r.scalars.at("empirical_M") <= 100.0);
}

TEST_CASE("CSV layout") {
    ConvergenceReport r;
    r.points = {point(10, 1e-2), point(100, 1e-4), point(1000, 1e-6)};
    const std::string csv = ladder_csv(r);
    CHECK(count_lines(csv) == 4);
    CHECK(csv.rfind("param,error,order_estimate,runtime_s\n", 0) == 0);
    CHECK(csv.find("\n100,0.0001,-") != std::string::npos);
    CHECK(csv.find("\n10,0.01,,0\n") != std::string::npos);

    const Profile p{{0.25, 0.75}, {1.0, 2.0}, {0.5, 0.125}};
    CHECK(profile_csv(p) == "x,S,I\n0.25,1,0.5\n0.75,2,0.125\n");

    TraceRow t;
    t.F = std::nan("");
    const std::string tr = trace_csv({t});
    CHECK(tr == "t,massS,massI,minI,F,ceiling_margin,gronwall_margin\n0,0,0,0,nan,0,0\n");
}

TEST_CASE("summary body is deterministic and excludes runtimes") {
    const RunConfig cfg = parse_config("");
    ConvergenceReport a;
    a.kind = ExperimentKind::MInfty;
    a.points = {point(10, 0.1), point(100, std::nan(""))};
    a.points[0].runtime_s = 1.0;
    a.scalars["x"] = 0.1;
    CriterionResult c;
    c.id = 3;
    c.name = "demo \"quoted\"";
    c.pass = true;
    a.criteria.push_back(c);
    ConvergenceReport b = a;
    b.points[0].runtime_s = 7.0;
    b.runtime_s = 3.0;
    CHECK(summary_body(a, cfg) == summary_body(b, cfg));
    CHECK(summary_json(a, cfg) != summary_json(b, cfg));
    const std::string s = summary_json(a, cfg);
    CHECK(s.find("\"kind\":\"m_infty\"") != std::string::npos);
    CHECK(s.find("\"x\":0.10000000000000001") != std::string::npos);
    CHECK(s.find("\"error\":null") != std::string::npos);
    CHECK(s.find("\"name\":\"demo \\\"quoted\\\"\",\"pass\":true") != std::string::npos);
    CHECK(s.find("\"config_hash\":\"" + hex64(cfg.hash) + "\"") != std::string::npos);
    CHECK(s.find("\"runtimes\":{\"total_s\":0,\"ladder_s\":[1,0]}") != std::string::npos);
    CHECK(s.find("\"result_hash\":\"") != std::string::npos);
}

TEST_CASE("emit_report writes the files present in the report") {
    const auto dir = std::filesystem::temp_directory_path() / "sislab_emit_test";
    std::filesystem::remove_all(dir);
    ConvergenceReport r;
    r.points = {point(1, 1), point(2, 0.5), point(4, 0.25)};
    r.profile = Profile{{0.5}, {1.0}, {2.0}};
    const auto files = emit_report(r, parse_config(""), dir.string());
    CHECK(files.size() == 3);
    CHECK(std::filesystem::exists(dir / "ladder.csv"));
    CHECK(std::filesystem::exists(dir / "profile.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "trace.csv"));
    std::ifstream in(dir / "summary.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().back() == '\n');
    std::filesystem::remove_all(dir);
}

TEST_CASE("Peclet cap only lowers q") {
    RandomConfigOptions o;
    o.peclet_max = 2.0;
    const auto capped = random_configs(31, 20, o);
    const auto plain = random_configs(31, 20);
    for (std::size_t i = 0; i < capped.size(); ++i) {
        CHECK(capped[i].q * capped[i].L / std::min(capped[i].dS, capped[i].dI) <= 2.0 * (1 + 1e-15));
        CHECK(capped[i].q <= plain[i].q);
        CHECK(capped[i].dI == plain[i].dI);
    }
}
