#include "generators.hpp"

#include "testmend/core/errors.hpp"
#include "testmend/eval/filter.hpp"
#include "testmend/repair/compile_repair.hpp"
#include "testmend/repair/oracle_repair.hpp"

namespace testmend::testing {

namespace {

const char* const kSetups[] = {
    "Cart0 cart = new Cart0(new Clock0());",
    "Cart0 cart = new Cart0(new Clock0());",
    "Cart0 cart = new Cart0();",
    "Cart0 cart = make();",
};

const char* const kChecks[] = {
    "assertEquals(3, cart.count());",
    "assertEquals(4, cart.count());",
    "assertEquals(\"x\", cart.label());",
    "assertEquals(\"cart-0\", cart.label());",
    "assertTrue(cart.isOpen());",
    "assertFalse(cart.isOpen());",
    "assertThrows(IllegalStateException.class, () -> cart.checkout(-1));",
    "assertThrows(IllegalStateException.class, () -> cart.checkout(1));",
    "cart.checkout(-1);",
    "cart.frob();",
    "Zorp z = new Zorp();",
    "assertNotNull(cart.label());",
    "assertNull(cart.label());",
    "assertEquals(2, cart.count(), \"count\");",
    "assertEquals(1000L, cart.total());",
    "assertEquals('A', cart.grade());",
    "assertEquals(0.5, cart.ratio(), 0.001);",
    "assertTrue(cart.count() > 5);",
    "Tag0 tag = new Tag0();",
    "cart.count(7);",
};

template <class T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&items)[N]) {
    return items[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

ProjectContext world_project() {
    auto corpus = fault_corpus();
    return corpus.front().project;
}

} // namespace

PropertyWorld::PropertyWorld() : project(world_project()) {
    index = build_index(project);
    graph = build_call_graph(index);
    adapter = std::make_unique<MockAdapter>(project);
    config = validate_config(PipelineConfig{});
    target = GenerationTarget{project.find_unit("f0.shop.Cart0"), std::nullopt};
}

const PropertyWorld& property_world() {
    static const PropertyWorld world;
    return world;
}

std::string random_test_class(std::mt19937_64& rng) {
    std::string text = "package f0.shop;\n\nimport org.junit.jupiter.api.Test;\n";
    if (coin(rng, 0.5)) text += "import f0.util.Clock0;\n";
    if (coin(rng, 0.2)) text += "import f0.util.Tag0;\n";
    if (coin(rng, 0.2)) text += "import x.y.Zorp;\n";
    text += "import static org.junit.jupiter.api.Assertions.*;\n\npublic class Cart0Test {\n";
    if (coin(rng, 0.3)) text += "\n    private Cart0 make() {\n        return new Cart0(new Clock0());\n    }\n";
    if (coin(rng, 0.15)) text += "\n    private Zorp broken() {\n        return new Zorp();\n    }\n";
    const int tests = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int t = 0; t < tests; ++t) {
        text += "\n    @Test\n    void case" + std::to_string(t) + "() {\n";
        text += "        " + std::string(pick(rng, kSetups)) + "\n";
        const int checks = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int c = 0; c < checks; ++c) text += "        " + std::string(pick(rng, kChecks)) + "\n";
        text += "    }\n";
    }
    return text + "}\n";
}

TestSuite random_suite(std::mt19937_64& rng) {
    const auto& w = property_world();
    return parse_suite(random_test_class(rng), w.target.ref(), Granularity::class_level);
}

std::shared_ptr<ScriptedBackend> random_backend(std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return std::make_shared<ScriptedBackend>([rng](const ChatRequest&) {
        if (coin(*rng, 0.1)) return std::string("I could not find anything to change.");
        return "Here is the fixed class.\n\n" + java_block(random_test_class(*rng));
    });
}

namespace {

template <class Check>
PropertyStats run_property(std::size_t cases, std::uint64_t seed, Check check) {
    PropertyStats stats;
    std::mt19937_64 rng(seed);
    while (stats.cases < cases) {
        std::uint64_t case_seed = rng();
        std::string failure;
        try {
            if (!check(case_seed, failure)) continue; // input rejected by the property's precondition
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        ++stats.cases;
        if (!failure.empty()) {
            ++stats.failures;
            if (stats.first_failure.empty()) stats.first_failure = "seed " + std::to_string(case_seed) + ": " + failure;
        }
    }
    return stats;
}

} // namespace

PropertyStats check_compile_monotone(std::size_t cases, std::uint64_t seed) {
    const auto& w = property_world();
    return run_property(cases, seed, [&](std::uint64_t s, std::string& failure) {
        std::mt19937_64 rng(s);
        TestSuite suite = random_suite(rng);
        auto adapter = w.adapter->for_session("property");
        std::size_t before = compiling_test_count(suite, adapter->compile(suite, w.project));
        OfflineLlm llm(random_backend(rng()));
        auto ctx = llm.ctx();
        ChatSession session("property", "scripted");
        CompileRepairInput in{w.project, *adapter, w.index, w.graph, w.target, w.config,
                              coin(rng, 0.5) ? RepairMode::full : RepairMode::plain, {}};
        auto out = run_compile_repair(ctx, session, suite, in);
        std::size_t after = compiling_test_count(out.suite, out.outcome);
        if (after < before)
            failure = "compiling tests dropped from " + std::to_string(before) + " to " + std::to_string(after);
        else if (!(adapter->compile(out.suite, w.project).diagnostics == out.outcome.diagnostics))
            failure = "returned outcome does not belong to the returned suite";
        return true;
    });
}

PropertyStats check_oracle_monotone(std::size_t cases, std::uint64_t seed) {
    const auto& w = property_world();
    return run_property(cases, seed, [&](std::uint64_t s, std::string& failure) {
        std::mt19937_64 rng(s);
        auto adapter = w.adapter->for_session("property");
        auto filtered = filter_until_compiles(random_suite(rng), *adapter, w.project);
        if (!filtered.outcome.success || filtered.suite.active_case_count() == 0) return false;
        const TestSuite& suite = filtered.suite;
        std::size_t before = adapter->run_tests(suite, w.project).count(Verdict::pass);
        OfflineLlm llm(random_backend(rng()));
        auto ctx = llm.ctx();
        ChatSession session("property", "scripted");
        OracleRepairInput in{w.project, *adapter, w.config, {}};
        auto out = run_oracle_repair(&ctx, &session, suite, in);
        if (!adapter->compile(out.suite, w.project).success) {
            failure = "repaired suite does not compile";
            return true;
        }
        std::size_t after = adapter->run_tests(out.suite, w.project).count(Verdict::pass);
        if (after < before)
            failure = "passing tests dropped from " + std::to_string(before) + " to " + std::to_string(after);
        return true;
    });
}

PropertyStats check_filter_idempotent(std::size_t cases, std::uint64_t seed) {
    const auto& w = property_world();
    return run_property(cases, seed, [&](std::uint64_t s, std::string& failure) {
        std::mt19937_64 rng(s);
        TestSuite suite = random_suite(rng);
        auto adapter = w.adapter->for_session("property");
        auto outcome = adapter->compile(suite, w.project);
        TestSuite once = filter_invalid(suite, outcome);
        if (!(filter_invalid(once, outcome) == once)) {
            failure = "second filter with the same outcome changed the suite";
            return true;
        }
        auto settled = filter_until_compiles(suite, *adapter, w.project);
        if (!settled.outcome.success && settled.suite.active_case_count() > 0) {
            failure = "filtered suite still has tests and does not compile";
            return true;
        }
        if (settled.outcome.success) {
            TestSuite again = filter_invalid(settled.suite, adapter->compile(settled.suite, w.project));
            if (!(again == settled.suite)) failure = "filtering a compiling suite changed it";
        }
        return true;
    });
}

} // namespace testmend::testing
