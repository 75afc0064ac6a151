#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/eval/filter.hpp"
#include "testmend/eval/report.hpp"
#include "testmend/eval/statistics.hpp"
#include "testmend/toolchain/mock_adapter.hpp"

using namespace testmend;

namespace {

TestSuite five_tests() {
    std::string code = "public class FTest {\n";
    for (int i = 1; i <= 5; ++i) code += "    @Test\n    void t" + std::to_string(i) + "() {\n        assertTrue(true);\n    }\n";
    return parse_suite(code + "}\n", TargetRef{"F", std::nullopt}, Granularity::class_level);
}

Diagnostic diag(std::optional<std::string> test, DiagnosticKind kind = DiagnosticKind::unknown_method) {
    Diagnostic d;
    d.kind = kind;
    d.message = "boom";
    d.test_name = std::move(test);
    return d;
}

// Pairs (x > y) + half the ties: the textbook definition, computed directly.
double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (double x : a) {
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return u;
}

// Two-sided permutation p over all splits of the pooled sample.
double brute_force_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size(), na = a.size();
    const double centre = static_cast<double>(a.size() * b.size()) / 2.0;
    const double observed = std::abs(pairwise_u(a, b) - centre);
    std::size_t extreme = 0, total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        ++total;
        if (std::abs(pairwise_u(x, y) - centre) >= observed - 1e-9) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

TargetSummary target(const std::string& id, std::size_t gen, std::size_t comp, std::size_t pass) {
    TargetSummary t;
    t.target = id;
    t.unit = id;
    t.tests_generated = gen;
    t.tests_compiling = comp;
    t.tests_passing = pass;
    return t;
}

RunSummary run(const std::string& label, std::vector<TargetSummary> targets) {
    RunSummary r;
    r.project = "p";
    r.mode = "full";
    r.label = label;
    r.targets = std::move(targets);
    return r;
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("filtering removes tests with attributed diagnostics") {
    auto s = five_tests();
    CompileOutcome outcome{false, {diag("t2"), diag("t4")}, ""};
    auto out = filter_invalid(s, outcome);
    CHECK(out.active_case_count() == 3);
    CHECK(out.find_case("t2")->removed());
    CHECK(out.find_case("t1")->status == s.find_case("t1")->status);
    CHECK(filter_invalid(s, CompileOutcome{true, {}, ""}) == s);
    CHECK(filter_invalid(s, CompileOutcome{false, {diag(std::nullopt, DiagnosticKind::whole_file)}, ""}).active_case_count() == 0);
    CHECK(filter_invalid(s, CompileOutcome{false, {}, "javac crashed"}).active_case_count() == 0);
}

TEST_CASE("a broken helper takes its dependent tests with it") {
    auto fc = testing::fault_corpus().front();
    MockAdapter adapter(fc.project);
    const std::string code = "package f0.shop;\n\nimport f0.util.Clock0;\nimport org.junit.jupiter.api.Test;\n"
                             "import static org.junit.jupiter.api.Assertions.*;\n\npublic class Cart0Test {\n"
                             "    private Cart0 make() {\n        Cart0 c = new Cart0(new Clock0());\n        c.explode();\n        return c;\n    }\n"
                             "    @Test\n    void usesHelper() {\n        assertEquals(3, make().count());\n    }\n"
                             "    @Test\n    void standalone() {\n        assertEquals(3, new Cart0(new Clock0()).count());\n    }\n}\n";
    auto s = parse_suite(code, TargetRef{fc.unit, std::nullopt}, Granularity::class_level);
    auto filtered = filter_until_compiles(s, adapter, fc.project);
    CHECK(filtered.outcome.success);
    CHECK(filtered.suite.helper_methods.at(0).removed);
    CHECK(filtered.suite.find_case("usesHelper")->removed());
    CHECK_FALSE(filtered.suite.find_case("standalone")->removed());
}

TEST_CASE("rates round half up and report n/a without a denominator") {
    CHECK(compute_rate(0, 10).str() == "0.00%");
    CHECK(compute_rate(3, 0).str() == "n/a");
    CHECK_FALSE(compute_rate(3, 0).defined());
    CHECK(compute_rate(2, 3).str() == "66.67%");
    CHECK(compute_rate(1, 800).str() == "0.13%");
    CHECK(compute_rate(4681, 4948).with_counts() == "94.60% (4681/4948)");
    CHECK(pooled_rate({compute_rate(1, 2), compute_rate(3, 6)}).str() == "50.00%");
    CHECK(*average_rate({compute_rate(1, 4), compute_rate(3, 4), compute_rate(1, 0)}) == doctest::Approx(50.0));
    CHECK_FALSE(average_rate({compute_rate(0, 0)}));
}

TEST_CASE("coverage deltas in points and relative percent") {
    auto d = coverage_delta(23.58, 52.26);
    CHECK(format_percent(d.difference) == "28.68");
    REQUIRE(d.improvement);
    CHECK(*d.improvement == doctest::Approx(28.68 / 23.58 * 100).epsilon(1e-9));
    CHECK_FALSE(coverage_delta(0, 10).improvement);
    CHECK(coverage_delta(40, 40).difference == 0);
    CHECK(*coverage_delta(40, 40).improvement == 0);
    CHECK_THROWS_AS(coverage_delta(-1, 10), InvalidState);
    CHECK_THROWS_AS(coverage_delta(10, 100.5), InvalidState);
}

TEST_CASE("identical samples are not significantly different") {
    std::vector<double> a = {1, 2, 3, 4}, b = {1, 2, 3, 4};
    auto r = mann_whitney_u(a, b);
    CHECK(r.p_value >= 0.99);
    CHECK(r.exact);
    CHECK(r.u == doctest::Approx(8.0));
    CHECK(vargha_delaney_a(a, b) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mann_whitney_u({2, 2}, {2, 2, 2}), DegenerateSample);
    CHECK_THROWS_AS(mann_whitney_u({}, {1}), InvalidState);
}

TEST_CASE("exact p-values match a brute-force permutation count") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 60; ++i) {
        std::vector<double> a(2 + rng() % 4), b(2 + rng() % 4);
        for (auto& x : a) x = static_cast<double>(rng() % 6);
        for (auto& y : b) y = static_cast<double>(rng() % 6);
        if (std::equal(a.begin() + 1, a.end(), a.begin()) && std::equal(b.begin(), b.end(), a.begin())) continue;
        CHECK(mwu_statistic(a, b) == doctest::Approx(pairwise_u(a, b)));
        CHECK(mwu_exact_p(a, b) == doctest::Approx(brute_force_p(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("normal and exact p agree closely at twelve observations") {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
        {{1, 3, 5, 7, 9, 11}, {2, 4, 6, 8, 10, 12}},
        {{1, 2, 3, 7, 8, 9}, {4, 5, 6, 10, 11, 12}},
        {{2, 4, 6, 8, 10, 12}, {1, 3, 5, 7, 9, 11}},
    };
    for (const auto& [a, b] : cases) {
        CHECK(std::abs(mwu_exact_p(a, b) - mwu_normal_p(a, b)) <= 0.02);
    }
    // Thirteen observations switch to the normal approximation.
    CHECK_FALSE(mann_whitney_u({1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13}).exact);
}

TEST_CASE("Vargha-Delaney A on small samples") {
    CHECK(vargha_delaney_a({4, 5}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(vargha_delaney_a({1, 2, 3}, {4, 5}) == doctest::Approx(0.0));
    CHECK(vargha_delaney_a({1, 2}, {2, 3}) == doctest::Approx(0.125));
    CHECK(vargha_delaney_a({1, 2}, {2, 3}) + vargha_delaney_a({2, 3}, {1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("comparing a run with itself finds no effect") {
    auto r = run("class", {target("a", 10, 8, 6), target("b", 10, 5, 5), target("c", 4, 4, 1)});
    auto comps = compare_runs(r, r);
    REQUIRE(comps.size() == 4);
    for (const auto& c : comps) {
        CHECK(c.vda == doctest::Approx(0.5));
        CHECK(c.p_value >= 0.99);
        CHECK_FALSE(c.significant);
        CHECK(c.mean_difference == doctest::Approx(0.0));
    }
    auto other = run("class", {target("a", 10, 8, 6), target("z", 10, 5, 5), target("c", 4, 4, 1)});
    CHECK_THROWS_AS(compare_runs(r, other), MismatchedTargets);
}

TEST_CASE("a single summary has equal total and average rows") {
    auto r = run("class", {target("a", 10, 8, 6), target("b", 10, 5, 5)});
    r.ledger.requests = 9;
    r.ledger.per_phase = {{"plan", 2}, {"generate", 2}, {"compile_errorlog", 5}};
    auto report = build_report({r});
    CHECK(report["rates"]["total"]["compile_rate"]["percent"] == report["rates"]["average"]["compile_rate"]);
    CHECK(report["rates"]["total"]["pass_rate"]["text"] == "55.00%");
    CHECK(report["cost"]["rows"][0]["per_phase"]["compile_errorlog"] == 5);
    CHECK(report["cost"]["total"]["requests"] == 9);

    auto r2 = r;
    r2.label = "method";
    r2.ledger.per_phase = {{"plan", 1}};
    r2.ledger.requests = 1;
    auto both = build_report({r, r2});
    CHECK(both["cost"]["total"]["per_phase"]["plan"] == 3);
    CHECK(both["cost"]["total"]["requests"] == 10);
    CHECK(render_report_table(both).find("Average") != std::string::npos);
}

TEST_CASE("emitting a report checks its inputs and destination") {
    testing::TempDir dir;
    auto r = run("class", {target("a", 2, 2, 1)});
    CHECK_THROWS_AS(emit_report({}, ReportFormat::table, (dir.path / "r.txt").string()), InvalidState);
    CHECK_THROWS_AS(emit_report({r}, ReportFormat::table, dir.path.string()), IOFailure);
    emit_report({r}, ReportFormat::structured, (dir.path / "r.json").string());
    auto back = nlohmann::json::parse(testing::read_file(dir.path / "r.json"));
    CHECK(back["rates"]["rows"][0]["passing"] == 1);
    CHECK_THROWS_AS(target("x", 1, 2, 1).validate(), InvalidState);
}

TEST_CASE("run summaries survive the JSON round trip") {
    auto r = run("class", {target("a", 3, 2, 1)});
    r.targets[0].coverage.units["a"].lines_total = 5;
    r.targets[0].coverage.units["a"].covered_lines = {1, 2};
    r.ledger.per_phase["plan"] = 1;
    r.ledger.requests = 1;
    CHECK(nlohmann::json(r).get<RunSummary>() == r);
}

} // TEST_SUITE
