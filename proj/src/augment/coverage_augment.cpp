#include "testmend/augment/coverage_augment.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

std::string uncovered_branch_digest(const CoverageReport& report, const std::string& unit) {
    auto branches = report.only(unit).uncovered_branches();
    std::sort(branches.begin(), branches.end(), [](const BranchRef& x, const BranchRef& y) {
        return std::tie(x.file, x.line, x.ordinal, x.condition) < std::tie(y.file, y.line, y.ordinal, y.condition);
    });
    std::string out;
    for (const auto& b : branches) {
        out += (b.file.empty() ? b.unit : b.file) + ":" + std::to_string(b.line) + " branch " +
               std::to_string(b.ordinal) + ": " + b.condition + "\n";
    }
    return out;
}

AugmentResult augment(LlmContext& ctx, ChatSession& session, const TestSuite& existing, const std::string& digest,
                      const AugmentInput& input) {
    AugmentResult out;
    if (digest.empty()) return out;
    TemplateValues values = {
        {"source", input.target.unit->body_text},
        {"test_code", render_text(existing)},
        {"branches", digest},
        {"test_class", input.target.test_class_name()},
        {"package", input.target.unit->package_name()},
        {"name", input.target.unit->simple_name()},
    };
    std::string response = ctx.gateway.send(session, ctx.templates.render("augment", values), phase::augment, ctx.ledger);
    TestSuite suite;
    try {
        suite = suite_from_response(response, existing.target, existing.granularity);
    } catch (const Error& e) {
        out.error = e.what();
        return out;
    }
    out.generated = suite.active_case_count();

    CompileRepairInput cin{input.project, input.adapter, input.index, input.graph, input.target, input.config,
                           RepairMode::full, input.sink};
    auto compiled = run_compile_repair(ctx, session, suite, cin);
    out.compile_actions = compiled.actions;
    out.compiling = compiling_test_count(compiled.suite, compiled.outcome);
    if (!compiled.outcome.success || out.compiling == 0) {
        out.error = "augmentation suite does not compile";
        return out;
    }
    OracleRepairInput oin{input.project, input.adapter, input.config, input.sink};
    auto repaired = run_oracle_repair(&ctx, &session, compiled.suite, oin);
    out.oracle_actions = repaired.actions;
    out.passing = repaired.run.count(Verdict::pass);
    out.suite = repaired.suite;
    return out;
}

namespace {

// Lines of the preamble after the class header's opening brace.
std::vector<std::string> scaffolding_lines(const std::string& preamble) {
    std::vector<std::string> out;
    auto toks = lex::tokenize(preamble);
    std::size_t body = std::string::npos;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].is("class") && toks[i + 1].is_identifier()) {
            for (std::size_t j = i; j < toks.size(); ++j) {
                if (toks[j].is("{")) {
                    body = toks[j].end();
                    break;
                }
            }
            break;
        }
    }
    if (body == std::string::npos) return out;
    std::istringstream in(preamble.substr(body));
    std::string line;
    while (std::getline(in, line)) {
        if (!lex::trim(line).empty()) out.push_back(lex::trim(line));
    }
    return out;
}

} // namespace

TestSuite merge_suites(const TestSuite& a, const TestSuite& b) {
    if (!(a.target == b.target))
        throw TargetMismatch("cannot merge suites for " + a.target.id() + " and " + b.target.id());
    TestSuite out = a;
    out.cases.clear();
    std::set<std::string> names;
    auto take = [&](const TestCase& c) {
        if (c.status != TestStatus::passing) return;
        for (const auto& existing : out.cases) {
            if (existing.name == c.name && existing.body_text == c.body_text) return;
        }
        TestCase copy = c;
        for (int n = 2; names.count(copy.name); ++n) copy.name = c.name + "_" + std::to_string(n);
        names.insert(copy.name);
        out.cases.push_back(std::move(copy));
    };
    for (const auto& c : a.cases) take(c);
    for (const auto& c : b.cases) take(c);

    for (const auto& imp : preamble_imports(b.preamble)) out.preamble = add_import(out.preamble, imp);
    const auto have = scaffolding_lines(out.preamble);
    std::string extra;
    for (const auto& line : scaffolding_lines(b.preamble)) {
        if (std::find(have.begin(), have.end(), line) == have.end()) extra += "\n    " + line;
    }
    if (!extra.empty()) {
        std::string p = out.preamble;
        while (!p.empty() && (p.back() == '\n' || p.back() == ' ')) p.pop_back();
        out.preamble = p + extra + "\n";
    }
    for (const auto& h : b.helper_methods) {
        if (h.removed) continue;
        bool same = std::any_of(out.helper_methods.begin(), out.helper_methods.end(), [&](const HelperMethod& x) {
            return x.name == h.name && lex::strip_whitespace(x.text) == lex::strip_whitespace(h.text);
        });
        if (!same) out.helper_methods.push_back(h);
    }
    return out;
}

} // namespace testmend
