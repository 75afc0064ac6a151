#include "testmend/repair/compile_repair.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

std::string to_string(RepairStep step) {
    switch (step) {
    case RepairStep::rule_import_add: return "rule_import_add";
    case RepairStep::rule_import_prune: return "rule_import_prune";
    case RepairStep::prompt_constructors: return "prompt_constructors";
    case RepairStep::prompt_invocations: return "prompt_invocations";
    case RepairStep::prompt_callgraph: return "prompt_callgraph";
    case RepairStep::prompt_errorlog: return "prompt_errorlog";
    case RepairStep::prompt_null_hint: return "prompt_null_hint";
    }
    return "rule_import_add";
}

RepairStep repair_step_from_string(const std::string& text) {
    for (auto s : {RepairStep::rule_import_add, RepairStep::rule_import_prune, RepairStep::prompt_constructors,
                   RepairStep::prompt_invocations, RepairStep::prompt_callgraph, RepairStep::prompt_errorlog,
                   RepairStep::prompt_null_hint}) {
        if (to_string(s) == text) return s;
    }
    throw ParseFailure("unknown repair step: " + text);
}

void to_json(nlohmann::json& j, const RepairAction& v) {
    j = {{"step", to_string(v.step)},
         {"before", v.before_fingerprint},
         {"after", v.after_fingerprint},
         {"accepted", v.accepted},
         {"diagnostics_before", v.diagnostics_before},
         {"diagnostics_after", v.diagnostics_after},
         {"note", v.note}};
}

void from_json(const nlohmann::json& j, RepairAction& v) {
    v.step = repair_step_from_string(j.at("step").get<std::string>());
    v.before_fingerprint = j.value("before", std::string{});
    v.after_fingerprint = j.value("after", std::string{});
    v.accepted = j.value("accepted", false);
    v.diagnostics_before = j.value("diagnostics_before", std::size_t{0});
    v.diagnostics_after = j.value("diagnostics_after", std::size_t{0});
    v.note = j.value("note", std::string{});
}

std::string test_file_name(const TestSuite& suite) {
    std::string cls = preamble_class_name(suite.preamble);
    return (cls.empty() ? std::string("GeneratedTest") : cls) + ".java";
}

std::optional<std::string> unresolved_type_name(const Diagnostic& d) {
    if (d.kind != DiagnosticKind::unknown_symbol) return std::nullopt;
    if (d.symbol && d.symbol->find('.') == std::string::npos && !d.symbol->empty()) return d.symbol;
    static const std::regex javac_re(R"(cannot find symbol:?\s*(?:symbol:\s*)?class\s+(\w+))");
    static const std::regex jdt_re(R"((\w+) cannot be resolved to a type)");
    std::smatch m;
    if (std::regex_search(d.message, m, javac_re) || std::regex_search(d.message, m, jdt_re)) {
        // "class X in package p" is an import problem, not an unresolved simple name.
        if (d.message.find(" in package ") != std::string::npos) return std::nullopt;
        return m[1].str();
    }
    return std::nullopt;
}

std::pair<TestSuite, std::vector<RepairAction>> fix_missing_imports(const TestSuite& suite,
                                                                    const std::vector<Diagnostic>& diagnostics,
                                                                    const SymbolIndex& index) {
    TestSuite out = suite;
    std::vector<std::string> added;
    std::set<std::string> seen;
    for (const auto& d : diagnostics) {
        auto name = unresolved_type_name(d);
        if (!name || !seen.insert(*name).second) continue;
        auto candidates = index.candidates(*name);
        if (candidates.size() != 1) continue; // ambiguous or unknown: left to the prompt rounds
        std::string before = out.preamble;
        out.preamble = add_import(out.preamble, ImportRef{candidates.front(), false, false});
        if (out.preamble != before) added.push_back(candidates.front());
    }
    std::vector<RepairAction> actions;
    if (!added.empty()) {
        RepairAction a;
        a.step = RepairStep::rule_import_add;
        a.before_fingerprint = suite_fingerprint(suite);
        a.after_fingerprint = suite_fingerprint(out);
        a.accepted = true;
        a.diagnostics_before = diagnostics.size();
        for (const auto& q : added) a.note += (a.note.empty() ? "added " : ", ") + q;
        actions.push_back(std::move(a));
    }
    return {std::move(out), std::move(actions)};
}

namespace {

std::string package_of(const std::string& q) {
    auto dot = q.rfind('.');
    return dot == std::string::npos ? std::string{} : q.substr(0, dot);
}

bool import_resolvable(const ImportRef& imp, const SymbolIndex& index) {
    if (imp.is_static) return index.knows(imp.wildcard ? imp.qualified_name : package_of(imp.qualified_name));
    if (imp.wildcard) return index.has_package(imp.qualified_name);
    return index.knows(imp.qualified_name);
}

} // namespace

std::pair<TestSuite, std::vector<RepairAction>> prune_hallucinated_imports(const TestSuite& suite,
                                                                           const SymbolIndex& index) {
    TestSuite out = suite;
    std::vector<std::string> removed;
    for (const auto& imp : preamble_imports(suite.preamble)) {
        if (import_resolvable(imp, index)) continue;
        out.preamble = remove_import(out.preamble, imp);
        removed.push_back(imp.qualified_name + (imp.wildcard ? ".*" : ""));
    }
    std::vector<RepairAction> actions;
    if (!removed.empty()) {
        RepairAction a;
        a.step = RepairStep::rule_import_prune;
        a.before_fingerprint = suite_fingerprint(suite);
        a.after_fingerprint = suite_fingerprint(out);
        a.accepted = true;
        for (const auto& q : removed) a.note += (a.note.empty() ? "removed " : ", ") + q;
        actions.push_back(std::move(a));
    }
    return {std::move(out), std::move(actions)};
}

namespace {

std::optional<std::string> resolve_simple(const std::string& name, const SymbolIndex& index) {
    if (index.find(name)) return name;
    for (const auto& q : index.candidates(simple_type_name(name))) {
        if (index.find(q)) return q;
    }
    return std::nullopt;
}

bool about_construction(const Diagnostic& d) {
    return d.message.find("constructor") != std::string::npos ||
           d.message.find("cannot be instantiated") != std::string::npos ||
           (d.kind == DiagnosticKind::ambiguous_overload && d.message.find("reference to") != std::string::npos);
}

std::optional<std::string> constructed_type(const Diagnostic& d, const SymbolIndex& index) {
    if (d.symbol) {
        if (auto q = resolve_simple(*d.symbol, index)) return q;
    }
    static const std::regex patterns[] = {
        std::regex(R"(constructor (\w+) in class)"),
        std::regex(R"((\w+) is abstract; cannot be instantiated)"),
        std::regex(R"(reference to (\w+) is ambiguous)"),
        std::regex(R"(no suitable constructor found for (\w+))"),
        std::regex(R"(Cannot instantiate the type (\w+))"),
    };
    for (const auto& re : patterns) {
        std::smatch m;
        if (std::regex_search(d.message, m, re)) return resolve_simple(m[1].str(), index);
    }
    return std::nullopt;
}

bool in_test_file(const Diagnostic& d, const std::string& test_file) {
    if (d.path.empty()) return true;
    auto slash = d.path.find_last_of('/');
    return (slash == std::string::npos ? d.path : d.path.substr(slash + 1)) == test_file;
}

} // namespace

std::string constructor_context(const std::vector<Diagnostic>& diagnostics, const SymbolIndex& index) {
    std::set<std::string> types;
    for (const auto& d : diagnostics) {
        if (d.kind != DiagnosticKind::signature_mismatch && d.kind != DiagnosticKind::ambiguous_overload) continue;
        if (!about_construction(d)) continue;
        if (auto q = constructed_type(d, index)) types.insert(*q);
    }
    std::string out;
    for (const auto& q : types) {
        const SourceUnit* unit = index.find(q);
        std::vector<LabeledSignature> sigs;
        try {
            sigs = constructor_signatures(q, index);
        } catch (const UnknownType&) {
            continue;
        }
        std::string simple = simple_type_name(q);
        if (unit && (unit->kind == UnitKind::interface_type || unit->kind == UnitKind::abstract_type)) {
            out += simple + " (" + q + ") is " + (unit->kind == UnitKind::interface_type ? "an interface" : "abstract") +
                   " and cannot be instantiated. Constructors of its implementations:\n";
        } else {
            out += "Constructors of " + simple + " (" + q + "):\n";
        }
        if (sigs.empty()) out += "- " + simple + ": " + simple + "() (implicit default constructor)\n";
        for (const auto& s : sigs) out += "- " + s.render() + "\n";
        out += "\n";
    }
    return out;
}

std::string invocation_context(const std::vector<Diagnostic>& diagnostics, const SymbolIndex& index,
                               const std::string& test_file) {
    static const std::regex javac_re(R"(method (\w+) in (?:class|type) (\w+))");
    static const std::regex access_re(R"((\w+)\(.*\) has private access in (\w+))");
    std::set<std::pair<std::string, std::string>> done;
    std::string out;
    for (const auto& d : diagnostics) {
        if (d.kind != DiagnosticKind::unknown_method && d.kind != DiagnosticKind::signature_mismatch) continue;
        if (about_construction(d) || !d.test_name || !in_test_file(d, test_file)) continue;
        std::string type;
        std::string method;
        if (d.symbol) {
            auto dot = d.symbol->rfind('.');
            if (dot == std::string::npos) {
                method = *d.symbol;
            } else {
                type = d.symbol->substr(0, dot);
                method = d.symbol->substr(dot + 1);
            }
        } else {
            std::smatch m;
            if (std::regex_search(d.message, m, javac_re) || std::regex_search(d.message, m, access_re)) {
                method = m[1].str();
                type = m[2].str();
            }
        }
        if (method.empty() || !done.insert({type, method}).second) continue;
        if (type.empty()) {
            out += "- The method " + method + "(...) called in test " + *d.test_name +
                   " does not exist in the test class or its static imports. Do not call it.\n";
            continue;
        }
        auto q = resolve_simple(type, index);
        std::vector<MethodRef> sigs;
        if (q) sigs = method_signatures(*q, method, index);
        if (sigs.empty()) {
            out += "- The method " + simple_type_name(type) + "." + method + " does not exist. Do not call it; use "
                   "only methods that the class declares.\n";
            continue;
        }
        bool all_private = std::all_of(sigs.begin(), sigs.end(),
                                       [](const MethodRef& m) { return m.visibility == Visibility::private_access; });
        out += "- " + simple_type_name(type) + "." + method + (all_private ? " is private and cannot be called from a "
                                                                             "test. Its declarations:\n"
                                                                           : " is declared as:\n");
        for (const auto& s : sigs) out += "    " + s.signature + "\n";
    }
    return out;
}

std::string callgraph_context(const std::vector<NeighborEntry>& neighborhood) {
    std::string out;
    for (const auto& e : neighborhood) {
        out += "// " + e.relation_note + " (" + simple_type_name(e.method.owner) + ")\n";
        out += e.method.body_text.value_or(e.method.signature + ";") + "\n\n";
    }
    return out;
}

bool needs_null_hint(const CompileOutcome& outcome) {
    for (const auto& d : outcome.diagnostics) {
        if (d.kind == DiagnosticKind::ambiguous_overload) return true;
    }
    static const std::regex ambiguous_re(R"(reference to \w+ is ambiguous)");
    return std::regex_search(outcome.raw_log, ambiguous_re);
}

namespace {

struct Candidate {
    TestSuite suite;
    CompileOutcome outcome;
    std::size_t compiling = 0;
};

void apply_compile_status(TestSuite& suite, const CompileOutcome& outcome) {
    std::set<std::string> broken;
    bool file_level = false;
    for (const auto& d : outcome.diagnostics) {
        if (d.file_level()) file_level = true;
        else broken.insert(*d.test_name);
    }
    if (!outcome.success && outcome.diagnostics.empty()) file_level = true;
    for (auto& c : suite.cases) {
        if (c.removed()) continue;
        c.status = (file_level || broken.count(c.name)) ? TestStatus::unbuilt : TestStatus::compiling;
    }
}

class CompileRepairRun {
public:
    CompileRepairRun(LlmContext& ctx, ChatSession& session, const CompileRepairInput& in)
        : ctx_(ctx), session_(session), in_(in) {}

    CompileRepairResult run(const TestSuite& suite) {
        best_ = evaluate(suite);
        if (!best_.outcome.success) {
            rule_step();
            if (in_.mode == RepairMode::full) {
                full_rounds();
            } else {
                plain_rounds();
            }
        }
        CompileRepairResult out{best_.suite, best_.outcome, actions_};
        apply_compile_status(out.suite, out.outcome);
        return out;
    }

private:
    LlmContext& ctx_;
    ChatSession& session_;
    const CompileRepairInput& in_;
    Candidate best_;
    std::vector<RepairAction> actions_;

    Candidate evaluate(const TestSuite& suite) {
        Candidate c{suite, in_.adapter.compile(suite, in_.project), 0};
        c.compiling = compiling_test_count(c.suite, c.outcome);
        return c;
    }

    void emit(const RepairAction& a) {
        actions_.push_back(a);
        if (in_.sink) in_.sink(nlohmann::json(a));
    }

    bool better_or_equal(const Candidate& c) const {
        // Compiling tests first: a clean build of fewer tests is still a loss.
        if (c.compiling != best_.compiling) return c.compiling > best_.compiling;
        if (c.outcome.success != best_.outcome.success) return c.outcome.success;
        return c.outcome.diagnostics.size() <= best_.outcome.diagnostics.size();
    }

    /// Applies the import rules to `suite`; returns the rule actions taken.
    std::vector<RepairAction> apply_rules(TestSuite& suite, const CompileOutcome& outcome) {
        std::vector<RepairAction> taken;
        if (in_.mode == RepairMode::full) {
            auto [pruned, acts] = prune_hallucinated_imports(suite, in_.index);
            suite = std::move(pruned);
            taken.insert(taken.end(), acts.begin(), acts.end());
        }
        auto [fixed, acts] = fix_missing_imports(suite, outcome.diagnostics, in_.index);
        suite = std::move(fixed);
        taken.insert(taken.end(), acts.begin(), acts.end());
        return taken;
    }

    void rule_step() {
        TestSuite s = best_.suite;
        auto taken = apply_rules(s, best_.outcome);
        if (taken.empty()) return;
        Candidate c = evaluate(s);
        bool accepted = better_or_equal(c);
        for (auto& a : taken) {
            a.diagnostics_before = best_.outcome.diagnostics.size();
            a.diagnostics_after = c.outcome.diagnostics.size();
            a.accepted = accepted;
        }
        if (accepted) best_ = std::move(c);
        for (const auto& a : taken) emit(a);
    }

    /// One prompt round. Returns the model's version (after import rules), or nullopt if unusable.
    std::optional<Candidate> prompt_round(RepairStep step, const char* phase_tag, const std::string& prompt) {
        RepairAction a;
        a.step = step;
        a.before_fingerprint = suite_fingerprint(best_.suite);
        a.diagnostics_before = best_.outcome.diagnostics.size();
        std::string response = ctx_.gateway.send(session_, prompt, phase_tag, ctx_.ledger);
        TestSuite proposed;
        try {
            proposed = suite_from_response(response, best_.suite.target, best_.suite.granularity);
        } catch (const Error& e) {
            a.after_fingerprint = a.before_fingerprint;
            a.diagnostics_after = a.diagnostics_before;
            a.accepted = false;
            a.note = std::string("unusable response: ") + e.what();
            emit(a);
            return std::nullopt;
        }
        Candidate c = evaluate(proposed);
        if (!c.outcome.success) {
            TestSuite s = c.suite;
            auto taken = apply_rules(s, c.outcome);
            if (!taken.empty()) {
                c = evaluate(s);
                a.note = "import rules reapplied";
            }
        }
        a.after_fingerprint = suite_fingerprint(c.suite);
        a.diagnostics_after = c.outcome.diagnostics.size();
        a.accepted = better_or_equal(c);
        if (a.accepted) best_ = c;
        emit(a);
        return c;
    }

    void errorlog_after(const std::string& shown_text, const std::optional<Candidate>& produced) {
        if (!produced || best_.outcome.success || produced->outcome.success) return;
        if (render_text(produced->suite) == shown_text) return; // the model changed nothing
        const bool hint = needs_null_hint(produced->outcome);
        TemplateValues values = {
            {"log", produced->outcome.raw_log},
            {"test_code", render_text(produced->suite)},
            {"hint", hint ? ctx_.templates.render("null_hint", {}) : std::string{}},
        };
        prompt_round(hint ? RepairStep::prompt_null_hint : RepairStep::prompt_errorlog, phase::compile_errorlog,
                     ctx_.templates.render("compile_errorlog", values));
    }

    template <class MakeContext>
    void escalation(RepairStep step, const char* phase_tag, const char* template_name, const char* key,
                    MakeContext make_context) {
        if (best_.outcome.success) return;
        std::string context = make_context();
        if (context.empty()) return;
        std::string shown = render_text(best_.suite);
        TemplateValues values = {
            {key, context},
            {"test_code", shown},
            {"log", best_.outcome.raw_log},
        };
        auto produced = prompt_round(step, phase_tag, ctx_.templates.render(template_name, values));
        errorlog_after(shown, produced);
    }

    void full_rounds() {
        escalation(RepairStep::prompt_constructors, phase::compile_constructors, "compile_constructors",
                   "constructors", [&] { return constructor_context(best_.outcome.diagnostics, in_.index); });
        escalation(RepairStep::prompt_invocations, phase::compile_invocations, "compile_invocations", "invocations",
                   [&] {
                       return invocation_context(best_.outcome.diagnostics, in_.index, test_file_name(best_.suite));
                   });
        escalation(RepairStep::prompt_callgraph, phase::compile_callgraph, "compile_callgraph", "neighborhood", [&] {
            std::vector<MethodRef> sources;
            if (in_.target.method) {
                sources.push_back(*in_.target.method);
            } else {
                sources = in_.target.unit->methods;
                sources.insert(sources.end(), in_.target.unit->constructors.begin(),
                               in_.target.unit->constructors.end());
            }
            return callgraph_context(callgraph_neighborhood(sources, in_.config.call_graph_depth, in_.graph));
        });
    }

    void plain_rounds() {
        for (int i = 0; i < in_.config.plain_fix_iterations && !best_.outcome.success; ++i) {
            TemplateValues values = {
                {"log", best_.outcome.raw_log},
                {"test_code", render_text(best_.suite)},
                {"hint", std::string{}},
            };
            prompt_round(RepairStep::prompt_errorlog, phase::compile_errorlog,
                         ctx_.templates.render("compile_errorlog", values));
        }
    }
};

} // namespace

CompileRepairResult run_compile_repair(LlmContext& ctx, ChatSession& session, const TestSuite& suite,
                                       const CompileRepairInput& input) {
    CompileRepairRun run(ctx, session, input);
    return run.run(suite);
}

} // namespace testmend
