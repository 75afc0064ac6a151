#include <doctest.h>

#include "support.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/toolchain/mock_adapter.hpp"
#include "testmend/toolchain/process_adapter.hpp"
#include "testmend/toolchain/test_syntax.hpp"

using namespace testmend;
using namespace testmend::testing;

namespace {

const char* kPay = R"(package com.pay;

public class Pay {
    public Pay() {
    }

    public Pay(int cents) {
    }

    public int total() {
        return 7;
    }

    public int add(int a, int b) {
        return a + b;
    }

    public int add(int a) {
        return a;
    }

    public void boom() {
    }
}
)";

nlohmann::json pay_settings() {
    nlohmann::json branches = nlohmann::json::array();
    for (int i = 1; i <= 10; ++i) {
        branches.push_back({{"file", "src/com/pay/Pay.java"},
                            {"line", 16},
                            {"ordinal", i - 1},
                            {"condition", "case " + std::to_string(i)},
                            {"triggers", {"add(" + std::to_string(i) + ")"}}});
    }
    return {
        {"runtime",
         {{"values", {{"pay.total()", "7"}, {"pay.add(2,3)", "5"}}},
          {"throws", {{"pay.boom()", "BoomError"}}}}},
        {"coverage", {{"com.pay.Pay", {{"lines_total", 12}, {"lines", {{{"line", 11}, {"triggers", {"total()"}}}}}, {"branches", branches}}}}},
    };
}

ProjectContext pay_project() { return make_project({{"src/com/pay/Pay.java", kPay}}, pay_settings()); }

std::string test_class(const std::string& members, const std::string& imports = "") {
    return "package com.pay;\n\nimport org.junit.jupiter.api.Test;\n" + imports +
           "import static org.junit.jupiter.api.Assertions.*;\n\npublic class PayTest {\n" + members + "}\n";
}

std::string test_method(const std::string& name, const std::string& body) {
    return "\n    @Test\n    void " + name + "() {\n" + body + "    }\n";
}

TestSuite suite_of(const std::string& text) { return parse_suite(text, TargetRef{"com.pay.Pay", {}}, Granularity::class_level); }

} // namespace

TEST_SUITE("toolchain") {

TEST_CASE("well-formed suite compiles cleanly") {
    auto project = pay_project();
    MockAdapter mock(project);
    auto out = mock.compile(suite_of(test_class(test_method("t", "        Pay pay = new Pay();\n        assertEquals(7, pay.total());\n"))), project);
    CHECK(out.success);
    CHECK(out.diagnostics.empty());
}

TEST_CASE("an unindexed type is one unknown_symbol diagnostic on its test") {
    auto project = pay_project();
    MockAdapter mock(project);
    auto out = mock.compile(suite_of(test_class(test_method("t", "        Foo foo = new Foo();\n"))), project);
    CHECK_FALSE(out.success);
    REQUIRE(out.diagnostics.size() == 1);
    CHECK(out.diagnostics[0].kind == DiagnosticKind::unknown_symbol);
    CHECK(out.diagnostics[0].test_name == "t");
    CHECK(out.raw_log.find("cannot find symbol: class Foo") != std::string::npos);
}

TEST_CASE("broken scaffolding is a whole-file diagnostic") {
    auto project = pay_project();
    MockAdapter mock(project);
    TestSuite suite = suite_of(test_class(test_method("t", "        assertTrue(true);\n")));
    suite.preamble += "    private String s = \"unterminated;\n";
    auto out = mock.compile(suite, project);
    REQUIRE(out.diagnostics.size() == 1);
    CHECK(out.diagnostics[0].kind == DiagnosticKind::whole_file);
    CHECK(out.diagnostics[0].file_level());
}

TEST_CASE("wrong arity and missing methods are reported per call") {
    auto project = pay_project();
    MockAdapter mock(project);
    auto text = test_class(test_method("a", "        Pay pay = new Pay(1, 2);\n") +
                           test_method("b", "        Pay pay = new Pay();\n        pay.frob(3);\n") +
                           test_method("c", "        Pay pay = new Pay();\n        pay.add(1, 2, 3);\n"));
    auto out = mock.compile(suite_of(text), project);
    REQUIRE(out.diagnostics.size() == 3);
    CHECK(out.diagnostics[0].kind == DiagnosticKind::signature_mismatch);
    CHECK(out.diagnostics[1].kind == DiagnosticKind::unknown_method);
    CHECK(out.diagnostics[1].message == "method frob(int) does not exist on type Pay");
    CHECK(out.diagnostics[2].kind == DiagnosticKind::signature_mismatch);
    CHECK(compiling_test_count(suite_of(text), out) == 0);
}

TEST_CASE("run verdicts and observed values") {
    auto project = pay_project();
    MockAdapter mock(project);
    auto suite = suite_of(test_class(test_method("ok", "        Pay pay = new Pay();\n        assertEquals(7, pay.total());\n") +
                                     test_method("stale", "        Pay pay = new Pay();\n        assertEquals(5, pay.total());\n") +
                                     test_method("boom", "        Pay pay = new Pay();\n        pay.boom();\n        assertTrue(true);\n")));
    auto run = mock.run_tests(suite, project);
    REQUIRE(run.tests.size() == 3);
    CHECK(run.find("ok")->verdict == Verdict::pass);
    const auto* stale = run.find("stale");
    CHECK(stale->verdict == Verdict::fail);
    CHECK(stale->observed.expected_text == "5");
    CHECK(stale->observed.actual_text == "7");
    CHECK(stale->observed.statement_index == 1u);
    CHECK(stale->observed.failing_assertion_index == 0u);
    const auto* boom = run.find("boom");
    CHECK(boom->verdict == Verdict::error);
    CHECK(boom->observed.thrown_exception == "BoomError");
    CHECK(boom->observed.statement_index == 1u);
}

TEST_CASE("running a broken suite is refused") {
    auto project = pay_project();
    MockAdapter mock(project);
    CHECK_THROWS_AS(mock.run_tests(suite_of(test_class(test_method("t", "        Foo f;\n"))), project), NotCompiled);
}

TEST_CASE("coverage counts, totals and unions") {
    auto project = pay_project();
    MockAdapter mock(project);
    auto empty = mock.measure_coverage({}, project);
    CHECK(empty.branches_covered() == 0);
    CHECK(empty.branches_total() == 10);
    CHECK(empty.lines_total() == 12);

    std::string calls;
    for (int i = 1; i <= 6; ++i) calls += "        pay.add(" + std::to_string(i) + ");\n";
    auto first = suite_of(test_class(test_method("t", "        Pay pay = new Pay();\n" + calls)));
    auto report = mock.measure_coverage({first}, project);
    CHECK(report.branches_covered() == 6);
    CHECK(report.uncovered_branches().size() == 4);

    auto second = suite_of(test_class(test_method("u", "        Pay pay = new Pay();\n        pay.add(9);\n        pay.total();\n")));
    auto joint = mock.measure_coverage({first, second}, project);
    auto a = report.units["com.pay.Pay"].covered_branches;
    auto b = mock.measure_coverage({second}, project).units["com.pay.Pay"].covered_branches;
    a.insert(b.begin(), b.end());
    CHECK(joint.units["com.pay.Pay"].covered_branches == a);
    CHECK(joint.lines_covered() == 1);
}

TEST_CASE("the mock is pure") {
    auto project = pay_project();
    MockAdapter one(project);
    MockAdapter two(project);
    auto suite = suite_of(test_class(test_method("t", "        Pay pay = new Pay(1, 2);\n        assertEquals(5, pay.total());\n")));
    auto a = one.compile(suite, project);
    auto b = two.for_session("other")->compile(suite, project);
    CHECK(a.raw_log == b.raw_log);
    CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("scripted rules override outcomes by fingerprint or substring") {
    auto project = pay_project();
    auto suite = suite_of(test_class(test_method("t", "        Pay pay = new Pay();\n        assertEquals(7, pay.total());\n")));
    nlohmann::json rules = nlohmann::json::parse(R"({"rules": [
        {"fingerprint": "FP", "compile": {"success": false, "diagnostics": [{"message": "cannot find symbol: class X", "line": 3}]}},
        {"contains": "pay.total", "run": {"tests": {"t": {"verdict": "fail", "log": "org.opentest4j.AssertionFailedError: expected: <1> but was: <2>"}}}}
    ]})");
    rules["rules"][0]["fingerprint"] = suite_fingerprint(suite);
    auto script = MockScript::from_json(rules);
    MockAdapter mock(project, script);
    auto out = mock.compile(suite, project);
    CHECK_FALSE(out.success);
    REQUIRE(out.diagnostics.size() == 1);
    CHECK(out.diagnostics[0].kind == DiagnosticKind::unknown_symbol);
    CHECK(out.diagnostics[0].path == "PayTest.java");

    auto other = suite_of(test_class(test_method("t", "        Pay pay = new Pay();\n        assertEquals(1, pay.total());\n")));
    REQUIRE(mock.compile(other, project).success);
    auto run = mock.run_tests(other, project);
    CHECK(run.find("t")->verdict == Verdict::fail);
    CHECK(run.find("t")->observed.actual_text == "2");
}

TEST_CASE("diagnostic classification table") {
    CHECK(classify_diagnostic("cannot find symbol: class RequestHandler") == DiagnosticKind::unknown_symbol);
    CHECK(classify_diagnostic("method frob(int) does not exist on type Pay") == DiagnosticKind::unknown_method);
    CHECK(classify_diagnostic("something nobody anticipated") == DiagnosticKind::other);
    DiagnosticPatternTable empty;
    CHECK(empty.classify("cannot find symbol: class RequestHandler") == DiagnosticKind::other);
    DiagnosticPatternTable custom;
    custom.add("^frob", DiagnosticKind::ambiguous_overload);
    CHECK(custom.classify("frob is ambiguous") == DiagnosticKind::ambiguous_overload);
}

TEST_CASE("failure logs yield expected, actual and thrown values") {
    auto obs = parse_failure_log("org.opentest4j.AssertionFailedError: expected: <5> but was: <7>\n\tat a.PayTest.t(PayTest.java:12)\n", "PayTest");
    CHECK(obs.expected_text == "5");
    CHECK(obs.actual_text == "7");
    CHECK(obs.failure_line == 12u);
    auto thrown = parse_failure_log("java.lang.IllegalStateException: closed\n", "PayTest");
    CHECK(thrown.thrown_exception == "java.lang.IllegalStateException");
    auto none = parse_failure_log("org.opentest4j.AssertionFailedError: Expected java.io.IOException to be thrown, but nothing was thrown.", "");
    CHECK_FALSE(none.thrown_exception);
}

TEST_CASE("test class recognition and rendering") {
    std::string text = test_class("\n    private Pay make() {\n        return new Pay();\n    }\n" +
                                  test_method("one", "        assertEquals(7, make().total());\n") +
                                  test_method("two", "        assertTrue(make() != null);\n"));
    auto suite = suite_of(text);
    CHECK(suite.cases.size() == 2);
    CHECK(suite.helper_methods.size() == 1);
    CHECK(render_text(suite) == text);
    CHECK(preamble_class_name(suite.preamble) == "PayTest");
    CHECK(preamble_package(suite.preamble) == "com.pay");
    CHECK(suite.cases[0].assertions.size() == 1);
    CHECK(suite.cases[0].assertions[0].kind == AssertionKind::equality);
    CHECK(suite.cases[0].assertions[0].expected_literal == "7");
    CHECK(suite.cases[0].assertions[0].subject_expr == "make().total()");
    auto with = add_import(suite.preamble, ImportRef{"com.pay.Extra", false, false});
    CHECK(preamble_imports(with).size() == 3);
    CHECK(add_import(with, ImportRef{"com.pay.Extra", false, false}) == with);
    CHECK(remove_import(with, ImportRef{"com.pay.Extra", false, false}) == suite.preamble);
    CHECK_THROWS_AS(parse_test_class("no class here"), ParseFailure);
}

TEST_CASE("process adapter: missing compiler program") {
    auto project = pay_project();
    project.toolchain_id = "process";
    project.toolchain_settings = {{"compile_command", "definitely-not-a-compiler-xyz {test_file}"}};
    CHECK_THROWS_AS(ProcessAdapter{project}, ToolchainUnavailable);
    project.toolchain_settings = nlohmann::json::object();
    CHECK_THROWS_AS(ProcessAdapter{project}, InvalidConfig);
}

TEST_CASE("process adapter: shell commands drive compile and run") {
    TempDir dir;
    auto project = pay_project();
    project.root_path = dir.path.string();
    project.toolchain_id = "process";
    project.toolchain_settings = {
        {"compile_command", "grep -q Broken {test_file} && echo \"{test_file}:9: error: cannot find symbol: class Broken\" && exit 1 || exit 0"},
        {"test_command", "echo 'RESULT one pass'; echo 'RESULT two fail'; echo 'org.opentest4j.AssertionFailedError: expected: <1> but was: <2>'"},
    };
    ProcessAdapter adapter(project);
    auto ws = adapter.for_session("s1");
    auto good = suite_of(test_class(test_method("one", "        assertTrue(true);\n") + test_method("two", "        assertEquals(1, 2);\n")));
    CHECK(ws->compile(good, project).success);
    auto run = ws->run_tests(good, project);
    REQUIRE(run.tests.size() == 2);
    CHECK(run.find("two")->observed.actual_text == "2");
    auto bad = suite_of(test_class(test_method("one", "        Broken b;\n")));
    auto out = ws->compile(bad, project);
    CHECK_FALSE(out.success);
    REQUIRE(out.diagnostics.size() == 1);
    CHECK(out.diagnostics[0].kind == DiagnosticKind::unknown_symbol);
    CHECK(out.diagnostics[0].line == 9u);
}

TEST_CASE("result protocol and compiler log parsing") {
    auto run = parse_result_protocol("noise\nRESULT a pass\nRESULT b error\njava.lang.RuntimeException: x\n\tat T.b(T.java:3)\n");
    REQUIRE(run.tests.size() == 2);
    CHECK(run.tests[1].verdict == Verdict::error);
    CHECK(run.tests[1].failure_log.find("RuntimeException") != std::string::npos);
    auto diags = parse_compiler_log("A.java:4: error: cannot find symbol: class Q\nwarning line\n", default_pattern_table());
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].path == "A.java");
    CHECK(diags[0].kind == DiagnosticKind::unknown_symbol);
}

TEST_CASE("unknown toolchain names are rejected") {
    auto project = pay_project();
    project.toolchain_id = "gradle";
    CHECK_THROWS_AS(make_toolchain(project), InvalidConfig);
    CHECK_THROWS_AS(validate_project(project, registered_toolchains()), InvalidConfig);
}

} // TEST_SUITE
