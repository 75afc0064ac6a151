#include "testmend/repair/oracle_repair.hpp"

#include <algorithm>
#include <set>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"
#include "testmend/core/literals.hpp"

namespace testmend {

std::string to_string(OracleStep step) {
    switch (step) {
    case OracleStep::substitute_literal: return "substitute_literal";
    case OracleStep::invert_predicate: return "invert_predicate";
    case OracleStep::exceptionize: return "exceptionize";
    case OracleStep::invert_exception: return "invert_exception";
    case OracleStep::llm_fix: return "llm_fix";
    }
    return "llm_fix";
}

void to_json(nlohmann::json& j, const OracleAction& v) {
    j = {{"step", to_string(v.step)},
         {"test", v.test_name},
         {"before", v.before_fingerprint},
         {"after", v.after_fingerprint},
         {"accepted", v.accepted},
         {"passing_before", v.passing_before},
         {"passing_after", v.passing_after},
         {"note", v.note}};
}

AssertionModel substitute_literal(const AssertionModel& assertion, const ObservedState& observed) {
    if (assertion.kind != AssertionKind::equality || !observed.actual_text || !assertion.expected_literal)
        return assertion;
    auto current = parse_literal(*assertion.expected_literal);
    if (!current) throw UnparseableLiteral("expected value '" + *assertion.expected_literal + "' is not a literal");
    AssertionModel out = assertion;
    out.expected_literal = render_literal(current->cls, *observed.actual_text);
    return out;
}

AssertionModel invert_predicate(const AssertionModel& assertion) {
    AssertionModel out = assertion;
    if (assertion.kind == AssertionKind::truth) {
        out.expected_literal = assertion.expected_literal.value_or("true") == "true" ? "false" : "true";
    } else if (assertion.kind == AssertionKind::nullness) {
        out.expects_null = !assertion.expects_null;
    }
    return out;
}

AssertionModel invert_exception_assertion(const AssertionModel& assertion) {
    if (assertion.kind != AssertionKind::exception_expected)
        throw OpaqueOracle("not a recognized exception assertion: " + lex::collapse_whitespace(assertion.subject_expr));
    AssertionModel out = assertion;
    out.kind = AssertionKind::exception_absent;
    out.expected_literal.reset();
    return out;
}

bool is_blocklisted(const std::string& thrown, const std::vector<std::string>& blocklist) {
    const std::string simple = simple_type_name(thrown);
    for (const auto& b : blocklist) {
        if (b == thrown) return true;
        // An unqualified name on either side matches by simple name.
        bool unqualified = b.find('.') == std::string::npos || thrown.find('.') == std::string::npos;
        if (unqualified && simple_type_name(b) == simple) return true;
    }
    return false;
}

namespace {

std::string package_of(const std::string& q) {
    auto dot = q.rfind('.');
    return dot == std::string::npos ? std::string{} : q.substr(0, dot);
}

// How `thrown` can be written inside the test class.
std::string written_type(const std::string& thrown, const std::string& preamble) {
    if (thrown.find('.') == std::string::npos) return thrown;
    const std::string pkg = package_of(thrown);
    const std::string simple = simple_type_name(thrown);
    if (pkg == "java.lang" || pkg == preamble_package(preamble)) return simple;
    for (const auto& imp : preamble_imports(preamble)) {
        if (imp.is_static) continue;
        if ((!imp.wildcard && imp.qualified_name == thrown) || (imp.wildcard && imp.qualified_name == pkg))
            return simple;
    }
    return thrown;
}

std::string qualifier_of(const TestCase& test) {
    for (const auto& a : test.assertions) {
        if (!a.qualifier.empty()) return a.qualifier;
    }
    return {};
}

} // namespace

TestCase exceptionize(const TestCase& test, const std::string& thrown, const std::vector<std::string>& blocklist,
                      const ObservedState& observed, const std::string& preamble) {
    if (is_blocklisted(thrown, blocklist)) {
        TestCase out = test;
        out.status = TestStatus::failing;
        return out;
    }
    auto statements = split_statements(test.body_text);
    if (statements.empty()) return test;

    std::size_t k = statements.size() - 1;
    if (observed.statement_index && *observed.statement_index < statements.size()) {
        k = *observed.statement_index;
    } else if (!test.assertions.empty()) {
        const Span last = test.assertions.back().span;
        for (std::size_t i = 0; i < statements.size(); ++i) {
            if (statements[i].span == last) k = i;
        }
    }
    const Statement& stmt = statements[k];
    const AssertionModel* a = nullptr;
    for (const auto& candidate : test.assertions) {
        if (candidate.span == stmt.span) a = &candidate;
    }

    AssertionModel replacement;
    replacement.kind = AssertionKind::exception_expected;
    replacement.expected_literal = written_type(thrown, preamble);
    replacement.qualifier = a ? a->qualifier : qualifier_of(test);
    if (a && a->kind != AssertionKind::opaque) {
        replacement.subject_expr = a->subject_expr;
    } else {
        replacement.subject_expr = "{ " + lex::trim(stmt.text) + " }";
    }
    Span span{stmt.span.begin, statements.back().span.end};
    return splice_body(test, span, render_assertion(replacement));
}

void apply_run_status(TestSuite& suite, const TestRunResult& run) {
    for (auto& c : suite.cases) {
        if (c.removed()) continue;
        const TestOutcome* o = run.find(c.name);
        if (!o) continue;
        c.status = o->verdict == Verdict::pass ? TestStatus::passing : TestStatus::failing;
    }
}

namespace {

constexpr const char* assertions_class = "org.junit.jupiter.api.Assertions";

// Adds a static import for `method` when the preamble imports assertion methods one by one.
std::string ensure_assertion_import(const std::string& preamble, const std::string& method) {
    bool explicit_imports = false;
    for (const auto& imp : preamble_imports(preamble)) {
        if (!imp.is_static) continue;
        if (imp.wildcard && imp.qualified_name == assertions_class) return preamble;
        if (!imp.wildcard && package_of(imp.qualified_name) == assertions_class) {
            if (simple_type_name(imp.qualified_name) == method) return preamble;
            explicit_imports = true;
        }
    }
    if (!explicit_imports) return preamble;
    return add_import(preamble, ImportRef{std::string(assertions_class) + "." + method, true, false});
}

bool is_timeout(const std::string& thrown) { return simple_type_name(thrown) == "TimeoutException"; }

struct Patch {
    OracleStep step;
    TestCase test;
    std::string note;
    std::string import_method;
};

std::optional<Patch> rule_patch(int stage, const TestCase& test, const TestOutcome& outcome,
                                const std::vector<std::string>& blocklist, const std::string& preamble) {
    const ObservedState& obs = outcome.observed;
    const AssertionModel* a = nullptr;
    if (obs.failing_assertion_index && *obs.failing_assertion_index < test.assertions.size())
        a = &test.assertions[*obs.failing_assertion_index];

    if (stage == 1) {
        if (outcome.verdict != Verdict::fail || !a) return std::nullopt;
        if (a->kind == AssertionKind::equality) {
            AssertionModel fixed;
            try {
                fixed = substitute_literal(*a, obs);
            } catch (const UnparseableLiteral&) {
                return std::nullopt;
            }
            if (fixed == *a) return std::nullopt;
            return Patch{OracleStep::substitute_literal, splice_body(test, a->span, render_assertion(fixed)),
                         *a->expected_literal + " -> " + *fixed.expected_literal, {}};
        }
        if (a->kind == AssertionKind::truth || a->kind == AssertionKind::nullness) {
            // Only when the log confirms the predicate itself failed.
            if (!obs.expected_text) return std::nullopt;
            AssertionModel fixed = invert_predicate(*a);
            return Patch{OracleStep::invert_predicate, splice_body(test, a->span, render_assertion(fixed)), "", {}};
        }
        return std::nullopt;
    }

    if (outcome.verdict == Verdict::error) {
        if (!obs.thrown_exception || is_timeout(*obs.thrown_exception)) return std::nullopt;
        if (is_blocklisted(*obs.thrown_exception, blocklist)) return std::nullopt;
        return Patch{OracleStep::exceptionize, exceptionize(test, *obs.thrown_exception, blocklist, obs, preamble),
                     "expects " + *obs.thrown_exception, "assertThrows"};
    }
    if (!a) return std::nullopt;
    if (a->kind == AssertionKind::exception_expected && !obs.thrown_exception) {
        AssertionModel fixed = invert_exception_assertion(*a);
        return Patch{OracleStep::invert_exception, splice_body(test, a->span, render_assertion(fixed)), "",
                     "assertDoesNotThrow"};
    }
    if ((a->kind == AssertionKind::exception_expected || a->kind == AssertionKind::exception_absent) &&
        obs.thrown_exception && !is_blocklisted(*obs.thrown_exception, blocklist)) {
        return Patch{OracleStep::exceptionize, exceptionize(test, *obs.thrown_exception, blocklist, obs, preamble),
                     "expects " + *obs.thrown_exception, "assertThrows"};
    }
    return std::nullopt;
}

TestSuite with_case(const TestSuite& suite, const TestCase& test) {
    TestSuite out = suite;
    if (TestCase* c = out.find_case(test.name)) *c = test;
    return out;
}

class OracleRepairRun {
public:
    explicit OracleRepairRun(const OracleRepairInput& in) : in_(in) {}

    void start(const TestSuite& suite, const TestRunResult* known_run = nullptr) {
        suite_ = suite;
        run_ = known_run ? *known_run : in_.adapter.run_tests(suite_, in_.project);
        apply_run_status(suite_, run_);
    }

    void rule_stages() {
        for (int outer = 0; outer < 16; ++outer) {
            bool changed = false;
            for (int stage = 1; stage <= 2; ++stage) {
                for (int round = 0; round < 32 && rule_round(stage); ++round) changed = true;
            }
            if (!changed) break;
        }
    }

    void llm_stage(LlmContext& ctx, ChatSession& session) {
        for (int i = 0; i < in_.config.max_oracle_llm_iterations; ++i) {
            if (failing_count() == 0) break;
            llm_round(ctx, session);
        }
    }

    OracleRepairResult result() const { return {suite_, run_, actions_}; }

private:
    const OracleRepairInput& in_;
    TestSuite suite_;
    TestRunResult run_;
    std::vector<OracleAction> actions_;

    std::size_t failing_count() const { return run_.count(Verdict::fail) + run_.count(Verdict::error); }
    std::size_t passing() const { return run_.count(Verdict::pass); }

    void emit(const OracleAction& a) {
        actions_.push_back(a);
        if (in_.sink) in_.sink(nlohmann::json(a));
    }

    bool compiles(const TestSuite& s) { return in_.adapter.compile(s, in_.project).success; }

    // One pass of a rule stage over all red tests. Returns true when something was kept.
    bool rule_round(int stage) {
        TestSuite before = suite_;
        std::vector<OracleAction> pending;
        for (const auto& outcome : run_.tests) {
            if (outcome.verdict == Verdict::pass) continue;
            const TestCase* test = suite_.find_case(outcome.name);
            if (!test) continue;
            std::optional<Patch> patch;
            try {
                patch = rule_patch(stage, *test, outcome, in_.config.exception_blocklist, suite_.preamble);
            } catch (const Error&) {
                continue; // unrecognized oracle: left for the LLM stage
            }
            if (!patch || patch->test.body_text == test->body_text) continue;
            TestSuite candidate = with_case(suite_, patch->test);
            if (!patch->import_method.empty())
                candidate.preamble = ensure_assertion_import(candidate.preamble, patch->import_method);
            OracleAction a;
            a.step = patch->step;
            a.test_name = outcome.name;
            a.before_fingerprint = suite_fingerprint(suite_);
            a.after_fingerprint = suite_fingerprint(candidate);
            a.passing_before = passing();
            a.note = patch->note;
            if (!compiles(candidate)) {
                a.accepted = false;
                a.passing_after = a.passing_before;
                a.note += a.note.empty() ? "reverted: breaks compilation" : "; reverted: breaks compilation";
                emit(a);
                continue;
            }
            a.accepted = true;
            suite_ = std::move(candidate);
            pending.push_back(std::move(a));
        }
        if (pending.empty()) return false;
        TestRunResult next = in_.adapter.run_tests(suite_, in_.project);
        bool keep = next.count(Verdict::pass) >= passing();
        for (auto& a : pending) {
            a.accepted = keep;
            a.passing_after = keep ? next.count(Verdict::pass) : passing();
            if (!keep) a.note += a.note.empty() ? "reverted: fewer passing tests" : "; reverted: fewer passing tests";
            emit(a);
        }
        if (!keep) {
            suite_ = std::move(before);
            return false;
        }
        run_ = std::move(next);
        apply_run_status(suite_, run_);
        return true;
    }

    std::string failure_report() const {
        std::string out;
        for (const auto& o : run_.tests) {
            if (o.verdict == Verdict::pass) continue;
            out += "Test " + o.name + " (" + to_string(o.verdict) + "):\n" + o.failure_log + "\n";
        }
        return out;
    }

    void llm_round(LlmContext& ctx, ChatSession& session) {
        OracleAction a;
        a.step = OracleStep::llm_fix;
        a.before_fingerprint = suite_fingerprint(suite_);
        a.passing_before = passing();
        TemplateValues values = {{"test_code", render_text(suite_)}, {"failures", failure_report()}};
        std::string response =
            ctx.gateway.send(session, ctx.templates.render("oracle_fix", values), phase::oracle_llm, ctx.ledger);
        auto reject = [&](const std::string& why) {
            a.after_fingerprint = a.before_fingerprint;
            a.passing_after = a.passing_before;
            a.accepted = false;
            a.note = why;
            emit(a);
        };
        TestSuite proposed;
        try {
            proposed = suite_from_response(response, suite_.target, suite_.granularity);
        } catch (const Error& e) {
            reject(std::string("unusable response: ") + e.what());
            return;
        }
        // Only red tests are taken from the answer; green ones stay as they are.
        TestSuite candidate = suite_;
        std::size_t replaced = 0;
        for (const auto& o : run_.tests) {
            if (o.verdict == Verdict::pass) continue;
            const TestCase* fixed = proposed.find_case(o.name);
            TestCase* current = candidate.find_case(o.name);
            if (!fixed || !current || fixed->removed()) continue;
            if (fixed->body_text == current->body_text && fixed->throws_clause == current->throws_clause) continue;
            current->body_text = fixed->body_text;
            current->throws_clause = fixed->throws_clause;
            current->assertions = fixed->assertions;
            ++replaced;
        }
        for (const auto& imp : preamble_imports(proposed.preamble))
            candidate.preamble = add_import(candidate.preamble, imp);
        for (const auto& h : proposed.helper_methods) {
            bool known = std::any_of(candidate.helper_methods.begin(), candidate.helper_methods.end(),
                                     [&](const HelperMethod& x) { return x.name == h.name; });
            if (!known && !h.removed) candidate.helper_methods.push_back(h);
        }
        if (replaced == 0) {
            reject("no failing test was changed");
            return;
        }
        a.after_fingerprint = suite_fingerprint(candidate);
        if (!compiles(candidate)) {
            reject("reverted: breaks compilation");
            return;
        }
        TestRunResult next = in_.adapter.run_tests(candidate, in_.project);
        if (next.count(Verdict::pass) < passing()) {
            a.passing_after = a.passing_before;
            a.accepted = false;
            a.note = "reverted: fewer passing tests";
            emit(a);
            return;
        }
        a.accepted = true;
        a.passing_after = next.count(Verdict::pass);
        a.note = std::to_string(replaced) + " tests rewritten";
        suite_ = std::move(candidate);
        run_ = std::move(next);
        apply_run_status(suite_, run_);
        emit(a);
    }
};

} // namespace

OracleRepairResult llm_fix_oracles(LlmContext& ctx, ChatSession& session, const TestSuite& suite,
                                   const TestRunResult& run, const OracleRepairInput& input) {
    OracleRepairRun r(input);
    r.start(suite, &run);
    r.llm_stage(ctx, session);
    return r.result();
}

OracleRepairResult run_oracle_repair(LlmContext* ctx, ChatSession* session, const TestSuite& suite,
                                     const OracleRepairInput& input) {
    OracleRepairRun r(input);
    r.start(suite);
    r.rule_stages();
    if (ctx && session) r.llm_stage(*ctx, *session);
    return r.result();
}

} // namespace testmend
