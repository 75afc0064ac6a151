#pragma once

// Shared helpers for the unit, property and acceptance tests.

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "testmend/core/config.hpp"
#include "testmend/generation/generation.hpp"
#include "testmend/llm/gateway.hpp"
#include "testmend/llm/scripted_backend.hpp"
#include "testmend/llm/templates.hpp"

namespace testmend::testing {

std::filesystem::path fixture_dir();
std::filesystem::path cli_path();

struct TempDir {
    std::filesystem::path path;
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

using SourceFiles = std::vector<std::pair<std::string, std::string>>; // path, text

/// Project from in-memory sources on the mock toolchain.
ProjectContext make_project(const SourceFiles& files, nlohmann::json settings = nlohmann::json::object(),
                            std::vector<std::string> targets = {});

/// Writes a project directory (manifest + sources) for CLI-level tests.
void write_project(const std::filesystem::path& root, const SourceFiles& files, const nlohmann::json& manifest);

/// ```java fenced block.
std::string java_block(const std::string& code);

/// Gateway over a scripted backend that never sleeps.
struct OfflineLlm {
    std::shared_ptr<ScriptedBackend> backend;
    Gateway gateway;
    CostLedger ledger;
    TemplateSet templates;

    explicit OfflineLlm(std::shared_ptr<ScriptedBackend> b);
    /// A backend that rejects every call; counts show whether anyone tried.
    static std::unique_ptr<OfflineLlm> silent();
    LlmContext ctx() { return LlmContext{gateway, ledger, templates}; }
};

/// One project of the injected-fault corpus with its faulty suite.
struct FaultCase {
    std::string name;
    ProjectContext project;
    std::string test_code; // generated test class with the injected faults
    std::string unit;      // qualified name of the class under test
    std::vector<std::string> missing_imports; // unique-candidate import faults, qualified
    std::vector<std::string> stale_tests;    // equality with a stale literal
    std::vector<std::string> no_throw_tests; // assertThrows where nothing is thrown
};

/// Twelve small projects; literal classes and counts vary with the index.
std::vector<FaultCase> fault_corpus();

/// The bank fixture shipped under tests/fixtures/bank.
std::filesystem::path bank_dir();

/// Loads a fixture project with `config` (a partial pipeline config).
ProjectContext load_fixture(const std::filesystem::path& root, const nlohmann::json& config = nlohmann::json::object());

/// Relative path -> bytes of every regular file under `root`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);
std::string read_file(const std::filesystem::path& path);

} // namespace testmend::testing
