#include "support.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "testmend/app/project_loader.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/index/source_parser.hpp"

namespace fs = std::filesystem;

namespace testmend::testing {

fs::path fixture_dir() { return TESTMEND_FIXTURE_DIR; }
fs::path cli_path() { return TESTMEND_CLI_PATH; }
fs::path bank_dir() { return fixture_dir() / "bank"; }

ProjectContext load_fixture(const fs::path& root, const nlohmann::json& config) {
    return load_project(root.string(), validate_config(config));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) out[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
    }
    return out;
}

TempDir::TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    for (int attempt = 0; attempt < 100; ++attempt) {
        fs::path p = fs::temp_directory_path() / ("testmend-test-" + std::to_string(rng()));
        if (fs::create_directory(p)) {
            path = p;
            return;
        }
    }
    throw IOFailure("cannot create a temporary directory");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
}

ProjectContext make_project(const SourceFiles& files, nlohmann::json settings, std::vector<std::string> targets) {
    ProjectContext p;
    p.root_path = "/nonexistent/project";
    p.toolchain_id = "mock";
    p.classpath = default_classpath();
    p.toolchain_settings = std::move(settings);
    p.targets = std::move(targets);
    for (const auto& [path, text] : files) p.source_units.push_back(parse_source_unit(path, text));
    return p;
}

void write_project(const fs::path& root, const SourceFiles& files, const nlohmann::json& manifest) {
    fs::create_directories(root);
    std::ofstream(root / "testmend.json") << manifest.dump(2);
    for (const auto& [path, text] : files) {
        fs::create_directories((root / path).parent_path());
        std::ofstream(root / path) << text;
    }
}

std::string java_block(const std::string& code) { return "```java\n" + code + "\n```\n"; }

OfflineLlm::OfflineLlm(std::shared_ptr<ScriptedBackend> b)
    : backend(b), gateway(b, 5, 0, [](std::chrono::milliseconds) {}), templates("") {}

std::unique_ptr<OfflineLlm> OfflineLlm::silent() {
    return std::make_unique<OfflineLlm>(std::make_shared<ScriptedBackend>(std::vector<std::string>{}));
}

namespace {

struct StaleForm {
    const char* method;
    const char* stale;
};

} // namespace

std::vector<FaultCase> fault_corpus() {
    static const StaleForm forms[] = {
        {"count", "2"}, {"total", "1000L"}, {"label", "\"cart\""}, {"grade", "'A'"}, {"ratio", "0.5"},
    };
    std::vector<FaultCase> out;
    for (int i = 0; i < 12; ++i) {
        const std::string n = std::to_string(i);
        const std::string pkg = "f" + n + ".shop";
        const std::string util = "f" + n + ".util";
        const std::string cart = "Cart" + n;
        const std::string clock = "Clock" + n;
        const std::string tag = "Tag" + n;
        SourceFiles files = {
            {"src/f" + n + "/util/" + clock + ".java", "package " + util + ";\n\npublic class " + clock + " {\n    public " +
                                                           clock + "() {\n    }\n\n    public long now() {\n        return 42;\n    }\n}\n"},
            {"src/f" + n + "/util/" + tag + ".java", "package " + util + ";\n\npublic class " + tag + " {\n    public boolean isSet() {\n        return true;\n    }\n}\n"},
            {"src/f" + n + "/shop/" + cart + ".java",
             "package " + pkg + ";\n\nimport " + util + "." + clock + ";\n\npublic class " + cart + " {\n" +
                 "    private final " + clock + " clock;\n\n" +
                 "    public " + cart + "(" + clock + " clock) {\n        this.clock = clock;\n    }\n\n" +
                 "    public int count() {\n        return 3;\n    }\n\n" +
                 "    public long total() {\n        return 1200L;\n    }\n\n" +
                 "    public String label() {\n        return \"cart-" + n + "\";\n    }\n\n" +
                 "    public char grade() {\n        return 'B';\n    }\n\n" +
                 "    public double ratio() {\n        return 0.75;\n    }\n\n" +
                 "    public boolean isOpen() {\n        return true;\n    }\n\n" +
                 "    public void checkout(int n) {\n        if (n < 0) {\n            throw new IllegalStateException(\"negative\");\n        }\n    }\n}\n"},
        };
        nlohmann::json settings = {
            {"runtime",
             {{"values",
               {{"cart.count()", "3"},
                {"cart.total()", "1200"},
                {"cart.label()", "\"cart-" + n + "\""},
                {"cart.grade()", "'B'"},
                {"cart.ratio()", "0.75"},
                {"cart.isOpen()", "true"},
                {"tag.isSet()", "true"}}},
              {"throws", {{"cart.checkout(-1)", "java.lang.IllegalStateException: negative"}}}}},
        };
        FaultCase fc;
        fc.name = "fault-" + n;
        fc.project = make_project(files, settings, {pkg + "." + cart});
        fc.unit = pkg + "." + cart;

        const std::string make = "        " + cart + " cart = new " + cart + "(new " + clock + "());\n";
        std::string code = "package " + pkg + ";\n\nimport org.junit.jupiter.api.Test;\nimport static org.junit.jupiter.api.Assertions.*;\n\npublic class " +
                           cart + "Test {\n";
        auto add = [&](const std::string& name, const std::string& body) {
            code += "\n    @Test\n    void " + name + "() {\n" + body + "    }\n";
        };
        add("countIsThree", make + "        assertEquals(3, cart.count());\n");
        add("cartIsOpen", make + "        assertTrue(cart.isOpen());\n");
        add("negativeCheckoutIsRejected", make + "        assertThrows(IllegalStateException.class, () -> cart.checkout(-1));\n");
        const StaleForm& form = forms[i % 5];
        add("staleValue", make + "        assertEquals(" + std::string(form.stale) + ", cart." + form.method + "());\n");
        fc.stale_tests.push_back("staleValue");
        add("checkoutThrows", make + "        assertThrows(IllegalStateException.class, () -> cart.checkout(1));\n");
        fc.no_throw_tests.push_back("checkoutThrows");
        if (i % 2 == 1) {
            add("checkoutZeroThrows", make + "        assertThrows(IllegalStateException.class, () -> cart.checkout(0));\n");
            fc.no_throw_tests.push_back("checkoutZeroThrows");
        }
        fc.missing_imports.push_back(util + "." + clock);
        if (i % 3 == 0) {
            add("tagIsSet", "        " + tag + " tag = new " + tag + "();\n        assertTrue(tag.isSet());\n");
            fc.missing_imports.push_back(util + "." + tag);
        }
        code += "}\n";
        fc.test_code = code;
        out.push_back(std::move(fc));
    }
    return out;
}

} // namespace testmend::testing
