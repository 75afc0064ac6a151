#include "testmend/generation/plan.hpp"

#include <optional>
#include <regex>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

std::size_t TestPlan::counted() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.test_descriptions.size();
    return n;
}

std::string TestPlan::render() const {
    std::string out;
    for (const auto& e : entries) {
        out += "method: " + e.method.signature + "\n";
        for (std::size_t i = 0; i < e.test_descriptions.size(); ++i)
            out += std::to_string(i + 1) + ". " + e.test_descriptions[i] + "\n";
    }
    out += "TOTAL: " + std::to_string(total_tests) + "\n";
    return out;
}

namespace {

std::string method_name_of(const std::string& signature) {
    auto paren = signature.find('(');
    std::string head = lex::trim(signature.substr(0, paren));
    auto space = head.find_last_of(" \t");
    return space == std::string::npos ? head : head.substr(space + 1);
}

MethodRef match_method(const std::string& written, const std::vector<MethodRef>& known, const std::string& owner) {
    const std::string norm = lex::strip_whitespace(written);
    for (const auto& m : known) {
        if (lex::strip_whitespace(m.signature) == norm) return m;
    }
    // The model often drops modifiers; compare from the method name on.
    const std::string name = method_name_of(written);
    auto tail = [](const std::string& sig) {
        auto name_end = sig.find('(');
        auto start = sig.find_last_of(" \t", name_end);
        return lex::strip_whitespace(sig.substr(start == std::string::npos ? 0 : start + 1));
    };
    for (const auto& m : known) {
        if (tail(m.signature) == tail(written)) return m;
    }
    const MethodRef* unique = nullptr;
    for (const auto& m : known) {
        if (m.name != name) continue;
        if (unique) {
            unique = nullptr;
            break;
        }
        unique = &m;
    }
    if (unique) return *unique;
    MethodRef m;
    m.owner = owner;
    m.name = name;
    m.signature = lex::collapse_whitespace(written);
    return m;
}

} // namespace

TestPlan parse_plan(const std::string& text, const std::vector<MethodRef>& known, const std::string& owner) {
    static const std::regex method_re(R"(^\s*[-*]?\s*\**method\**\s*:\s*`?(.+?)`?\s*$)", std::regex::icase);
    static const std::regex item_re(R"(^\s*(\d+)[.)]\s+(.+?)\s*$)");
    static const std::regex total_re(R"(^\s*\**total\**\s*:\s*\**\s*(\d+)\s*\**\s*$)", std::regex::icase);

    TestPlan plan;
    std::optional<std::size_t> total;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch m;
        if (std::regex_match(line, m, total_re)) {
            total = std::stoul(m[1].str());
            continue;
        }
        if (std::regex_match(line, m, method_re)) {
            PlanEntry entry;
            entry.method = match_method(m[1].str(), known, owner);
            plan.entries.push_back(std::move(entry));
            continue;
        }
        if (std::regex_match(line, m, item_re) && !plan.entries.empty()) {
            plan.entries.back().test_descriptions.push_back(m[2].str());
        }
    }
    if (plan.entries.empty()) throw ParseFailure("no 'method:' entries in plan");
    if (!total) throw ParseFailure("plan has no TOTAL line");
    for (const auto& e : plan.entries) {
        if (e.test_descriptions.empty()) throw ParseFailure("plan entry '" + e.method.signature + "' lists no tests");
    }
    if (*total != plan.counted())
        throw ParseFailure("plan TOTAL " + std::to_string(*total) + " but " + std::to_string(plan.counted()) +
                           " tests listed");
    plan.total_tests = *total;
    return plan;
}

} // namespace testmend
