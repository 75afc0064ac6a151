#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "testmend/augment/coverage_augment.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/toolchain/mock_adapter.hpp"

using namespace testmend;
using testing::java_block;
using testing::OfflineLlm;

namespace {

// Cart0 from the fault corpus with branch facts for checkout().
struct Covered {
    testing::FaultCase fc = testing::fault_corpus().front();
    std::unique_ptr<MockAdapter> adapter;
    SymbolIndex index;
    CallGraph graph;
    PipelineConfig config;
    GenerationTarget target;

    Covered() {
        fc.project.toolchain_settings["coverage"] = nlohmann::json::parse(R"json({
            "f0.shop.Cart0": {
                "lines_total": 10,
                "lines": [{"line": 14, "triggers": ["cart.count()"]}, {"line": 34, "triggers": ["cart.checkout("]}],
                "branches": [
                    {"file": "Cart0.java", "line": 34, "ordinal": 0, "condition": "n < 0", "triggers": ["checkout(-1)"]},
                    {"file": "Cart0.java", "line": 34, "ordinal": 1, "condition": "!(n < 0)", "triggers": ["checkout(1)"]}
                ]
            }
        })json");
        adapter = std::make_unique<MockAdapter>(fc.project);
        index = build_index(fc.project);
        graph = build_call_graph(index);
        target = GenerationTarget{index.find(fc.unit), std::nullopt};
    }

    std::string text(const std::vector<std::pair<std::string, std::string>>& tests) const {
        std::string code = "package f0.shop;\n\nimport f0.util.Clock0;\nimport org.junit.jupiter.api.Test;\n"
                           "import static org.junit.jupiter.api.Assertions.*;\n\npublic class Cart0Test {\n";
        for (const auto& [name, body] : tests) {
            code += "\n    @Test\n    void " + name + "() {\n        Cart0 cart = new Cart0(new Clock0());\n" + body + "    }\n";
        }
        return code + "}\n";
    }

    TestSuite passing_suite(const std::vector<std::pair<std::string, std::string>>& tests) const {
        auto s = parse_suite(text(tests), TargetRef{fc.unit, std::nullopt}, Granularity::class_level);
        for (auto& c : s.cases) c.status = TestStatus::passing;
        return s;
    }

    AugmentResult run(OfflineLlm& llm, const TestSuite& existing, const std::string& digest) {
        auto ctx = llm.ctx();
        ChatSession session(fc.unit + "/augment", "scripted");
        AugmentInput in{fc.project, *adapter, index, graph, target, config, {}};
        return augment(ctx, session, existing, digest, in);
    }

    CoverageReport coverage(const TestSuite& s) { return adapter->measure_coverage({s}, fc.project).only(fc.unit); }
};

const std::pair<std::string, std::string> negative = {
    "rejectsNegative", "        assertThrows(IllegalStateException.class, () -> cart.checkout(-1));\n"};
const std::pair<std::string, std::string> positive = {
    "acceptsPositive", "        assertDoesNotThrow(() -> cart.checkout(1));\n"};

} // namespace

TEST_SUITE("augment") {

TEST_CASE("the digest lists uncovered branches in source order") {
    CoverageReport r;
    auto& uc = r.units["u"];
    BranchRef b[] = {{"u", "B.java", 3, 1, "x > 1"}, {"u", "A.java", 9, 0, "y"}, {"u", "A.java", 2, 1, "!z"},
                     {"u", "A.java", 2, 0, "z"}};
    uc.branches.assign(std::begin(b), std::end(b));
    CHECK(uncovered_branch_digest(r, "u") ==
          "A.java:2 branch 0: z\nA.java:2 branch 1: !z\nA.java:9 branch 0: y\nB.java:3 branch 1: x > 1\n");
    CHECK(uncovered_branch_digest(r, "u") == uncovered_branch_digest(r, "u"));
    uc.covered_branches = {b[2], b[1]};
    CHECK(uncovered_branch_digest(r, "u") == "A.java:2 branch 0: z\nB.java:3 branch 1: x > 1\n");
    uc.covered_branches.insert(std::begin(b), std::end(b));
    CHECK(uncovered_branch_digest(r, "u").empty());
    CHECK(uncovered_branch_digest(r, "other").empty());
}

TEST_CASE("an empty digest sends nothing") {
    Covered w;
    auto llm = OfflineLlm::silent();
    auto result = w.run(*llm, w.passing_suite({negative}), "");
    CHECK_FALSE(result.suite);
    CHECK(llm->backend->calls() == 0);
}

TEST_CASE("a missed branch is covered after one augmentation cycle") {
    Covered w;
    auto first = w.passing_suite({negative});
    auto digest = uncovered_branch_digest(w.coverage(first), w.fc.unit);
    CHECK(digest == "Cart0.java:34 branch 1: !(n < 0)\n");

    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{java_block(w.text({positive}))});
    OfflineLlm llm(backend);
    auto result = w.run(llm, first, digest);
    REQUIRE(result.suite);
    CHECK(result.generated == 1);
    CHECK(result.passing == 1);
    CHECK(llm.ledger.phase_count("augment") == 1);
    CHECK(llm.ledger.requests() == 1);
    CHECK(backend->requests()[0].messages.back().content.find("!(n < 0)") != std::string::npos);

    auto merged = merge_suites(first, *result.suite);
    CHECK(merged.active_case_count() == 2);
    CHECK(uncovered_branch_digest(w.coverage(merged), w.fc.unit).empty());
}

TEST_CASE("an augmentation that never compiles leaves nothing to merge") {
    Covered w;
    auto first = w.passing_suite({negative});
    const std::string bad = java_block(w.text({{"nope", "        cart.explode(1, 2);\n"}}));
    OfflineLlm llm(std::make_shared<ScriptedBackend>([&](const ChatRequest&) { return bad; }));
    auto result = w.run(llm, first, "Cart0.java:34 branch 1: !(n < 0)\n");
    CHECK_FALSE(result.suite);
    CHECK(result.error == "augmentation suite does not compile");
    CHECK(result.compiling == 0);

    OfflineLlm prose(std::make_shared<ScriptedBackend>(std::vector<std::string>{"I cannot see any branches."}));
    auto none = w.run(prose, first, "Cart0.java:34 branch 1: !(n < 0)\n");
    CHECK_FALSE(none.suite);
    CHECK_FALSE(none.error.empty());
    CHECK(prose.ledger.requests() == 1);
}

TEST_CASE("merging renames collisions and drops duplicates and red tests") {
    Covered w;
    auto a = w.passing_suite({negative, {"counts", "        assertEquals(3, cart.count());\n"}});
    auto b = w.passing_suite({negative, {"counts", "        assertEquals(1200L, cart.total());\n"}, positive,
                              {"red", "        assertTrue(cart.isOpen());\n"}});
    b.find_case("red")->status = TestStatus::failing;
    b.preamble = add_import(b.preamble, ImportRef{"java.util.List", false, false});

    auto merged = merge_suites(a, b);
    std::vector<std::string> names;
    for (const auto& c : merged.cases) {
        if (!c.removed()) names.push_back(c.name);
    }
    CHECK(names == std::vector<std::string>{"rejectsNegative", "counts", "counts_2", "acceptsPositive"});
    CHECK(merged.preamble.find("import java.util.List;") != std::string::npos);
    CHECK(w.adapter->compile(merged, w.fc.project).success);

    // Coverage of the merge contains both parts.
    auto ca = w.coverage(a).units[w.fc.unit].covered_branches;
    auto cb = w.coverage(b).units[w.fc.unit].covered_branches;
    auto cm = w.coverage(merged).units[w.fc.unit].covered_branches;
    CHECK(std::includes(cm.begin(), cm.end(), ca.begin(), ca.end()));
    CHECK(std::includes(cm.begin(), cm.end(), cb.begin(), cb.end()));

    TestSuite other = b;
    other.target.unit = "f0.shop.Other";
    CHECK_THROWS_AS(merge_suites(a, other), TargetMismatch);
}

} // TEST_SUITE
