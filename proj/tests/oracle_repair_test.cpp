#include <doctest.h>

#include <random>

#include "support.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/repair/oracle_repair.hpp"
#include "testmend/toolchain/mock_adapter.hpp"

using namespace testmend;
using testing::java_block;
using testing::OfflineLlm;

namespace {

AssertionModel only_assertion(const std::string& statement) {
    auto parsed = parse_assertions("        " + statement + "\n");
    REQUIRE(parsed.size() == 1);
    return parsed[0];
}

ObservedState actual(const std::string& text) {
    ObservedState o;
    o.actual_text = text;
    return o;
}

TestCase make_case(const std::string& name, const std::string& body) {
    auto suite = parse_suite("public class T {\n    @Test\n    void " + name + "() {\n" + body + "    }\n}\n",
                             TargetRef{"T", std::nullopt}, Granularity::class_level);
    return suite.cases.at(0);
}

// Cart0 from the fault corpus: count() is 3, checkout(-1) throws IllegalStateException.
struct Shop {
    testing::FaultCase fc = testing::fault_corpus().front();
    PipelineConfig config;
    std::unique_ptr<MockAdapter> adapter;

    explicit Shop(nlohmann::json extra_runtime = nlohmann::json::object()) {
        auto& rt = fc.project.toolchain_settings["runtime"];
        for (auto it = extra_runtime.begin(); it != extra_runtime.end(); ++it) rt[it.key()] = it.value();
        adapter = std::make_unique<MockAdapter>(fc.project);
    }

    TestSuite suite(const std::vector<std::pair<std::string, std::string>>& tests) const {
        std::string code = "package f0.shop;\n\nimport f0.util.Clock0;\nimport org.junit.jupiter.api.Test;\n"
                           "import static org.junit.jupiter.api.Assertions.*;\n\npublic class Cart0Test {\n";
        for (const auto& [name, body] : tests) {
            code += "\n    @Test\n    void " + name + "() {\n        Cart0 cart = new Cart0(new Clock0());\n" + body + "    }\n";
        }
        return parse_suite(code + "}\n", TargetRef{fc.unit, std::nullopt}, Granularity::class_level);
    }

    OracleRepairResult rules_only(const TestSuite& s) {
        OracleRepairInput in{fc.project, *adapter, config, {}};
        return run_oracle_repair(nullptr, nullptr, s, in);
    }

    OracleRepairResult with_llm(OfflineLlm& llm, const TestSuite& s) {
        auto ctx = llm.ctx();
        ChatSession session("class/f0.shop.Cart0", "scripted");
        OracleRepairInput in{fc.project, *adapter, config, {}};
        return run_oracle_repair(&ctx, &session, s, in);
    }
};

const std::pair<std::string, std::string> green = {"counts", "        assertEquals(3, cart.count());\n"};

} // namespace

TEST_SUITE("oracle_repair") {

TEST_CASE("a stale literal takes the observed value in its own syntax") {
    auto a = only_assertion("assertEquals(5, calc.add(2, 3));");
    CHECK(render_assertion(substitute_literal(a, actual("7"))) == "assertEquals(7, calc.add(2, 3));");
    auto l = only_assertion("assertEquals(5L, calc.total());");
    CHECK(substitute_literal(l, actual("7")).expected_literal == "7L");
    auto s = only_assertion("assertEquals(\"a\", x.say());");
    CHECK(substitute_literal(s, actual("say \"hi\"\n")).expected_literal == "\"say \\\"hi\\\"\\n\"");
    auto c = only_assertion("assertEquals('A', x.grade());");
    CHECK(substitute_literal(c, actual("B")).expected_literal == "'B'");
    CHECK_THROWS_AS(substitute_literal(only_assertion("assertEquals(5, x.n());"), actual("five")), UnparseableLiteral);
    // Without an observed value nothing changes.
    CHECK(substitute_literal(a, ObservedState{}) == a);
}

TEST_CASE("opaque assertions are left to the model") {
    auto a = only_assertion("assertIterableEquals(List.of(1), xs);");
    CHECK(a.kind == AssertionKind::opaque);
    CHECK(substitute_literal(a, actual("7")) == a);
    CHECK(invert_predicate(a) == a);
    CHECK_THROWS_AS(invert_exception_assertion(a), OpaqueOracle);
}

TEST_CASE("inverting a predicate twice gives the original back") {
    const char* forms[] = {"assertTrue({});", "assertFalse({});", "assertNull({});", "assertNotNull({});",
                           "Assertions.assertTrue({}, \"msg\");", "assertNotNull({}, () -> \"m\");"};
    const char* subjects[] = {"x.isOpen()", "map.get(\"k\")", "a && b", "f(g(1), 2)"};
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        std::string form = forms[rng() % 6];
        form.replace(form.find("{}"), 2, subjects[rng() % 4]);
        auto a = only_assertion(form);
        auto once = invert_predicate(a);
        CHECK(render_assertion(once) != render_assertion(a));
        CHECK(render_assertion(invert_predicate(once)) == render_assertion(a));
    }
    CHECK(render_assertion(invert_predicate(only_assertion("assertTrue(x.ok());"))) == "assertFalse(x.ok());");
    CHECK(render_assertion(invert_predicate(only_assertion("assertNull(x.y());"))) == "assertNotNull(x.y());");
}

TEST_CASE("exceptionize wraps the throwing statement and drops what follows") {
    auto t = make_case("t", "        Cart c = new Cart();\n        c.checkout(-1);\n        assertEquals(1, c.count());\n");
    ObservedState obs;
    obs.statement_index = 1;
    auto out = exceptionize(t, "java.lang.IllegalStateException", default_exception_blocklist(), obs);
    CHECK(out.body_text.find("assertThrows(IllegalStateException.class, () -> { c.checkout(-1); });") != std::string::npos);
    CHECK(out.body_text.find("assertEquals") == std::string::npos);
    CHECK(out.body_text.find("Cart c = new Cart();") != std::string::npos);

    // No assertion and no statement index: the final statement is wrapped.
    auto bare = make_case("bare", "        Cart c = new Cart();\n        c.checkout(-1);\n");
    auto wrapped = exceptionize(bare, "java.lang.IllegalStateException", {});
    CHECK(wrapped.body_text.find("assertThrows(IllegalStateException.class") != std::string::npos);

    // A type outside java.lang and not imported is written qualified.
    auto q = exceptionize(bare, "com.acme.CartException", {});
    CHECK(q.body_text.find("assertThrows(com.acme.CartException.class") != std::string::npos);
}

TEST_CASE("blocklisted exceptions are never turned into expectations") {
    auto t = make_case("t", "        when(x.y()).thenReturn(1);\n");
    auto out = exceptionize(t, "org.mockito.exceptions.misusing.UnfinishedStubbingException",
                            default_exception_blocklist());
    CHECK(out.body_text == t.body_text);
    CHECK(out.status == TestStatus::failing);
    CHECK(is_blocklisted("org.mockito.exceptions.misusing.UnfinishedStubbingException", {"UnfinishedStubbingException"}));
    CHECK_FALSE(is_blocklisted("a.b.Other", {"c.d.Other"}));
    CHECK(is_blocklisted("Other", {"c.d.Other"}));
}

TEST_CASE("an exception assertion with nothing thrown is inverted") {
    auto a = only_assertion("assertThrows(IllegalStateException.class, () -> cart.checkout(1));");
    auto inv = invert_exception_assertion(a);
    CHECK(inv.kind == AssertionKind::exception_absent);
    CHECK(render_assertion(inv) == "assertDoesNotThrow(() -> cart.checkout(1));");
    CHECK_THROWS_AS(invert_exception_assertion(only_assertion("assertEquals(1, x);")), OpaqueOracle);
}

TEST_CASE("rule stages repair stale values, predicates and exception oracles") {
    Shop shop;
    auto s = shop.suite({green,
                         {"stale", "        assertEquals(2, cart.count());\n"},
                         {"closed", "        assertFalse(cart.isOpen());\n"},
                         {"noThrow", "        assertThrows(IllegalStateException.class, () -> cart.checkout(1));\n"},
                         {"throwsOut", "        cart.checkout(-1);\n        assertTrue(cart.isOpen());\n"}});
    auto result = shop.rules_only(s);
    CHECK(result.run.count(Verdict::pass) == 5);
    std::map<std::string, OracleStep> step_of;
    for (const auto& a : result.actions) {
        CHECK(a.accepted);
        step_of[a.test_name] = a.step;
    }
    CHECK(step_of["stale"] == OracleStep::substitute_literal);
    CHECK(step_of["closed"] == OracleStep::invert_predicate);
    CHECK(step_of["noThrow"] == OracleStep::invert_exception);
    CHECK(step_of["throwsOut"] == OracleStep::exceptionize);
    CHECK(result.suite.find_case("stale")->body_text.find("assertEquals(3, cart.count())") != std::string::npos);
    for (const auto& c : result.suite.cases) CHECK(c.status == TestStatus::passing);
    CHECK(shop.adapter->compile(result.suite, shop.fc.project).success);
}

TEST_CASE("timeouts are not turned into expected exceptions") {
    Shop shop(nlohmann::json{{"timeouts", {"cart.checkout(5)"}}});
    auto result = shop.rules_only(shop.suite({green, {"slow", "        cart.checkout(5);\n"}}));
    CHECK(result.actions.empty());
    CHECK(result.suite.find_case("slow")->status == TestStatus::failing);
}

TEST_CASE("the model loop stops when nothing is red") {
    Shop shop;
    auto llm = OfflineLlm::silent();
    auto result = shop.with_llm(*llm, shop.suite({green}));
    CHECK(llm->ledger.requests() == 0);
    CHECK(result.actions.empty());
}

TEST_CASE("the model loop spends one request per round up to its budget") {
    // An opaque assertion the rules cannot touch.
    const std::pair<std::string, std::string> red = {"opaque", "        assertSame(5, cart.count());\n"};
    const std::pair<std::string, std::string> fixed = {"opaque", "        assertEquals(3, cart.count());\n"};
    auto runtime = nlohmann::json{{"fails", {{"assertSame(5,cart.count())", "expected: <5> but was: <3>"}}}};

    SUBCASE("fixed on the second round") {
        Shop shop(runtime);
        auto broken = shop.suite({green, red});
        auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
            java_block(render_text(broken)), java_block(render_text(shop.suite({green, fixed})))});
        OfflineLlm llm(backend);
        auto result = shop.with_llm(llm, broken);
        CHECK(llm.ledger.phase_count("oracle_llm") == 2);
        CHECK(result.run.count(Verdict::pass) == 2);
        REQUIRE(result.actions.size() == 2);
        CHECK_FALSE(result.actions[0].accepted);
        CHECK(result.actions[1].accepted);
        CHECK(result.actions[1].step == OracleStep::llm_fix);
    }
    SUBCASE("never fixed") {
        Shop shop(runtime);
        auto broken = shop.suite({green, red});
        const std::string same = java_block(render_text(broken));
        OfflineLlm llm(std::make_shared<ScriptedBackend>([&](const ChatRequest&) { return same; }));
        auto result = shop.with_llm(llm, broken);
        CHECK(llm.ledger.phase_count("oracle_llm") == 3);
        CHECK(result.suite.find_case("opaque")->status == TestStatus::failing);
    }
    SUBCASE("a budget of zero sends nothing") {
        Shop shop(runtime);
        shop.config.max_oracle_llm_iterations = 0;
        auto llm = OfflineLlm::silent();
        shop.with_llm(*llm, shop.suite({green, red}));
        CHECK(llm->backend->calls() == 0);
    }
}

TEST_CASE("a model patch that breaks compilation is reverted") {
    Shop shop(nlohmann::json{{"fails", {{"assertSame(5,cart.count())", "expected: <5> but was: <3>"}}}});
    shop.config.max_oracle_llm_iterations = 1;
    auto broken = shop.suite({green, {"opaque", "        assertSame(5, cart.count());\n"}});
    auto bad = shop.suite({green, {"opaque", "        assertEquals(3, cart.countAll());\n"}});
    OfflineLlm llm(std::make_shared<ScriptedBackend>(std::vector<std::string>{java_block(render_text(bad))}));
    auto result = shop.with_llm(llm, broken);
    REQUIRE(result.actions.size() == 1);
    CHECK_FALSE(result.actions[0].accepted);
    CHECK(result.actions[0].note == "reverted: breaks compilation");
    CHECK(render_text(result.suite) == render_text(broken));
    CHECK(shop.adapter->compile(result.suite, shop.fc.project).success);
}

TEST_CASE("green tests are never rewritten by the model") {
    Shop shop(nlohmann::json{{"fails", {{"assertSame(5,cart.count())", "expected: <5> but was: <3>"}}}});
    shop.config.max_oracle_llm_iterations = 1;
    auto broken = shop.suite({green, {"opaque", "        assertSame(5, cart.count());\n"}});
    auto answer = shop.suite({{"counts", "        assertEquals(99, cart.count());\n"},
                              {"opaque", "        assertEquals(3, cart.count());\n"}});
    OfflineLlm llm(std::make_shared<ScriptedBackend>(std::vector<std::string>{java_block(render_text(answer))}));
    auto result = shop.with_llm(llm, broken);
    CHECK(result.run.count(Verdict::pass) == 2);
    CHECK(result.suite.find_case("counts")->body_text == broken.find_case("counts")->body_text);
}

} // TEST_SUITE
