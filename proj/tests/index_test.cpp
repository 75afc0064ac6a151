#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "support.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/index/call_graph.hpp"
#include "testmend/index/source_parser.hpp"
#include "testmend/index/symbol_index.hpp"

using namespace testmend;
using testing::make_project;

namespace {

const testing::SourceFiles sig_sources = {
    {"src/a/b/SigGen.java", "package a.b;\npublic interface SigGen {\n    String sign(String s);\n}\n"},
    {"src/a/b/HmacSigGen.java",
     "package a.b;\npublic class HmacSigGen implements SigGen {\n    private final String key;\n"
     "    public HmacSigGen(String key) {\n        this.key = key;\n    }\n"
     "    public String sign(String s) {\n        return key + s;\n    }\n}\n"},
    {"src/a/b/Signer.java",
     "package a.b;\npublic class Signer {\n    public String run(SigGen g) {\n        return g.sign(\"x\");\n    }\n"
     "    public int size() {\n        return 1;\n    }\n    public int size(int extra) {\n        return 1 + extra;\n    }\n"
     "    private int secret() {\n        return 2;\n    }\n}\n"},
};

} // namespace

TEST_SUITE("index") {

TEST_CASE("parser reads kind, members and visibility") {
    auto unit = parse_source_unit("src/a/b/Signer.java", sig_sources[2].second);
    CHECK(unit.qualified_name == "a.b.Signer");
    CHECK(unit.kind == UnitKind::class_type);
    CHECK(unit.methods.size() == 4);
    CHECK(unit.methods[3].visibility == Visibility::private_access);
    CHECK(unit.methods[2].param_types == std::vector<std::string>{"int"});
    CHECK(parse_source_unit("x/SigGen.java", sig_sources[0].second).kind == UnitKind::interface_type);
    CHECK_THROWS_AS(parse_source_unit("x/Bad.java", "package a;\npublic class Bad {\n"), ParseFailure);
    CHECK(erase_type_arguments("List<Map<String, Foo>>[]") == "List");
    CHECK(parameter_types("final List<String> xs, int[] ys") == std::vector<std::string>{"List<String>", "int[]"});
}

TEST_CASE("same simple name in two packages gives two candidates") {
    auto project = make_project({{"src/a/b/Foo.java", "package a.b;\npublic class Foo {\n}\n"},
                                 {"src/c/d/Foo.java", "package c.d;\npublic class Foo {\n}\n"}});
    auto index = build_index(project);
    CHECK(index.by_simple_name["Foo"] == std::vector<std::string>{"a.b.Foo", "c.d.Foo"});
    CHECK(build_index(make_project({})).by_qualified_name.empty());
}

TEST_CASE("interfaces map to their concrete implementors") {
    auto index = build_index(make_project(sig_sources));
    CHECK(index.implementors["a.b.SigGen"] == std::vector<std::string>{"a.b.HmacSigGen"});
    CHECK(index.ancestry("a.b.HmacSigGen") == std::vector<std::string>{"a.b.HmacSigGen", "a.b.SigGen"});
}

TEST_CASE("duplicate qualified names are skipped and reported") {
    auto index = build_index(make_project({{"src/a/Foo.java", "package a;\npublic class Foo {\n}\n"},
                                           {"src/a2/Foo.java", "package a;\npublic class Foo {\n}\n"}}));
    CHECK(index.by_qualified_name.size() == 1);
    CHECK(index.parse_failures.size() == 1);
}

TEST_CASE("import resolution prefers the CUT's package") {
    auto project = make_project({{"src/a/b/Foo.java", "package a.b;\npublic class Foo {\n}\n"},
                                 {"src/c/d/Foo.java", "package c.d;\npublic class Foo {\n}\n"},
                                 {"src/c/d/Bar.java", "package c.d;\npublic class Bar {\n}\n"}});
    auto index = build_index(project);
    auto r = resolve_import("Foo", index, "c.d");
    CHECK_FALSE(r.unique());
    CHECK(r.candidates == std::vector<std::string>{"c.d.Foo", "a.b.Foo"});
    CHECK(resolve_import("Foo", index, "a.b.x").best().qualified_name == "a.b.Foo");
    CHECK(resolve_import("Bar", index, "a.b").unique());
    CHECK_THROWS_AS(resolve_import("Zorp", index, "a.b"), NotFound);
    CHECK(shared_package_prefix("a.b.c", "a.b.d") == 2);
    CHECK(shared_package_prefix("", "a") == 0);
}

TEST_CASE("classpath names take part in resolution") {
    auto project = make_project({}, nlohmann::json::object());
    project.classpath = {"java.util.List", "org.junit.jupiter.api.Test"};
    auto index = build_index(project);
    CHECK(resolve_import("List", index, "a").best().qualified_name == "java.util.List");
    CHECK(index.knows("java.util.List"));
    CHECK(index.has_package("org.junit.jupiter.api"));
}

TEST_CASE("constructor signatures of an interface come from its implementors") {
    auto index = build_index(make_project(sig_sources));
    auto sigs = constructor_signatures("a.b.SigGen", index);
    REQUIRE(sigs.size() == 1);
    CHECK(sigs[0].type == "HmacSigGen");
    CHECK(sigs[0].render().find("HmacSigGen(String key)") != std::string::npos);
    CHECK(constructor_signatures("HmacSigGen", index).size() == 1);
    CHECK_THROWS_AS(constructor_signatures("a.b.Nope", index), UnknownType);
}

TEST_CASE("method signatures list overloads and private members") {
    auto index = build_index(make_project(sig_sources));
    CHECK(method_signatures("a.b.Signer", "size", index).size() == 2);
    CHECK(method_signatures("a.b.Signer", "grow", index).empty());
    auto secret = method_signatures("a.b.Signer", "secret", index);
    REQUIRE(secret.size() == 1);
    CHECK(secret[0].visibility == Visibility::private_access);
    auto sign = method_signatures("a.b.HmacSigGen", "sign", index);
    REQUIRE(sign.size() == 2);
    CHECK(sign[0].owner == "a.b.HmacSigGen");
    CHECK(sign[1].owner == "a.b.SigGen");
    CHECK_THROWS_AS(method_signatures("a.b.Nope", "x", index), UnknownType);
}

TEST_CASE("call graph neighborhoods grow with depth and carry notes") {
    auto index = build_index(make_project({
        {"src/p/M.java", "package p;\npublic class M {\n    public int m() {\n        return X.x() + own();\n    }\n"
                         "    private int own() {\n        return 1;\n    }\n}\n"},
        {"src/p/X.java", "package p;\npublic class X {\n    public static int x() {\n        return Y.y();\n    }\n}\n"},
        {"src/p/Y.java", "package p;\npublic class Y {\n    public static int y() {\n        return 3;\n    }\n}\n"},
        {"src/p/Lone.java", "package p;\npublic class Lone {\n    public int z() {\n        return 4;\n    }\n}\n"},
    }));
    auto graph = build_call_graph(index);
    const MethodRef& m = index.find("p.M")->methods[0];
    auto d1 = callgraph_neighborhood(m, 1, graph);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].method.name == "x");
    CHECK(d1[0].relation_note == "called by M.m");
    auto d2 = callgraph_neighborhood(m, 2, graph);
    REQUIRE(d2.size() == 2);
    CHECK(d2[1].method.name == "y");
    CHECK(d2[1].hop == 2);
    CHECK(d2[1].relation_note == "called by X.x");
    CHECK(callgraph_neighborhood(index.find("p.Lone")->methods[0], 2, graph).empty());
    CHECK(callgraph_neighborhood(m, 0, graph).empty());
}

TEST_CASE("neighborhoods match a breadth-first search over the generated call edges") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 40; ++round) {
        const int n = 2 + static_cast<int>(rng() % 6);
        std::vector<std::set<int>> adj(n);
        testing::SourceFiles files;
        for (int i = 0; i < n; ++i) {
            std::string expr = "0";
            for (int j = 0; j < n; ++j) {
                if (j != i && rng() % 3 == 0) {
                    adj[i].insert(j);
                    expr += " + C" + std::to_string(j) + ".m" + std::to_string(j) + "()";
                }
            }
            files.emplace_back("src/q/C" + std::to_string(i) + ".java",
                               "package q;\npublic class C" + std::to_string(i) + " {\n    public static int m" +
                                   std::to_string(i) + "() {\n        return " + expr + ";\n    }\n}\n");
        }
        auto index = build_index(make_project(files));
        auto graph = build_call_graph(index);
        const int depth = 1 + static_cast<int>(rng() % 3);

        // Expected: shortest hop count from node 0, excluding node 0 itself.
        std::map<int, int> dist{{0, 0}};
        std::vector<int> frontier{0};
        for (int hop = 1; hop <= depth; ++hop) {
            std::vector<int> next;
            for (int u : frontier) {
                for (int v : adj[u]) {
                    if (dist.emplace(v, hop).second) next.push_back(v);
                }
            }
            frontier = next;
        }
        std::set<std::pair<std::string, int>> expected, actual;
        for (auto [v, h] : dist) {
            if (v != 0) expected.insert({"m" + std::to_string(v), h});
        }
        for (const auto& e : callgraph_neighborhood(index.find("q.C0")->methods[0], depth, graph)) {
            actual.insert({e.method.name, e.hop});
        }
        CHECK(actual == expected);
    }
}

TEST_CASE("declared variables map names to written types") {
    auto vars = declared_variables("Cart c = new Cart(); List<String> xs = f(); int[] ns; for (Item it : items) {}");
    CHECK(vars["c"] == "Cart");
    CHECK(vars["xs"] == "List");
    CHECK(vars["ns"] == "int");
    CHECK(vars["it"] == "Item");
    CHECK(vars.count("items") == 0);
}

TEST_CASE("index building is idempotent and the cache round-trips") {
    testing::TempDir dir;
    auto project = make_project(sig_sources);
    project.root_path = dir.path.string();
    auto first = build_index(project);
    CHECK(build_index(project) == first);
    CHECK(load_or_build_index(project, true) == first);
    bool cached = false;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path)) {
        cached = cached || e.path().filename().string().rfind("index-", 0) == 0;
    }
    CHECK(cached);
    CHECK(load_or_build_index(project, true) == first);
    CHECK(index_content_hash(project) == index_content_hash(make_project(sig_sources)));
}

} // TEST_SUITE
