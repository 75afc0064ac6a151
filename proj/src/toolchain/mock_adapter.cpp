#include "testmend/toolchain/mock_adapter.hpp"

#include <algorithm>
#include <set>

#include "testmend/core/errors.hpp"
#include "testmend/core/hash.hpp"
#include "testmend/core/lexer.hpp"
#include "testmend/core/literals.hpp"
#include "testmend/core/serialize.hpp"
#include "testmend/index/call_graph.hpp"
#include "testmend/index/source_parser.hpp"

namespace testmend {

using lex::Token;

// ---------------------------------------------------------------------------
// Script and facts

const MockRule* MockScript::match(const std::string& rendered_text, const std::string& fp) const {
    for (const auto& rule : rules) {
        if (rule.fingerprint && *rule.fingerprint == fp) return &rule;
        if (rule.contains && rendered_text.find(*rule.contains) != std::string::npos) return &rule;
    }
    return default_response ? &*default_response : nullptr;
}

namespace {

CompileOutcome compile_from_json(const nlohmann::json& j) {
    CompileOutcome out;
    out.success = j.value("success", false);
    for (const auto& d : j.value("diagnostics", nlohmann::json::array())) {
        Diagnostic diag;
        diag.message = d.at("message").get<std::string>();
        diag.kind = d.contains("kind") ? diagnostic_kind_from_string(d["kind"].get<std::string>())
                                       : classify_diagnostic(diag.message);
        diag.path = d.value("path", std::string{});
        diag.line = d.value("line", std::size_t{0});
        if (d.contains("test") && !d["test"].is_null() && diag.kind != DiagnosticKind::whole_file)
            diag.test_name = d["test"].get<std::string>();
        if (d.contains("symbol")) diag.symbol = d["symbol"].get<std::string>();
        out.diagnostics.push_back(std::move(diag));
    }
    if (j.contains("raw_log")) {
        out.raw_log = j["raw_log"].get<std::string>();
    } else {
        for (const auto& d : out.diagnostics) {
            out.raw_log += d.path + ":" + std::to_string(d.line) + ": error: " + d.message + "\n";
        }
    }
    return out;
}

MockRule rule_from_json(const nlohmann::json& j) {
    MockRule rule;
    if (j.contains("fingerprint")) rule.fingerprint = j["fingerprint"].get<std::string>();
    if (j.contains("contains")) rule.contains = j["contains"].get<std::string>();
    if (j.contains("compile")) rule.compile = compile_from_json(j["compile"]);
    if (j.contains("run")) {
        const auto& run = j["run"];
        std::map<std::string, ScriptedVerdict> verdicts;
        const auto tests = run.value("tests", nlohmann::json::object());
        for (const auto& [name, v] : tests.items()) {
            ScriptedVerdict sv;
            sv.verdict = verdict_from_string(v.value("verdict", std::string("pass")));
            sv.log = v.value("log", std::string{});
            verdicts[name] = sv;
        }
        rule.run = verdicts;
        rule.run_default = verdict_from_string(run.value("default", std::string("pass")));
    }
    if (j.contains("coverage")) rule.coverage = j["coverage"].get<CoverageReport>();
    return rule;
}

} // namespace

MockScript MockScript::from_json(const nlohmann::json& j) {
    MockScript script;
    if (j.is_null()) return script;
    for (const auto& r : j.value("rules", nlohmann::json::array())) script.rules.push_back(rule_from_json(r));
    if (j.contains("default") && j["default"].is_object()) script.default_response = rule_from_json(j["default"]);
    return script;
}

MockRuntime MockRuntime::from_json(const nlohmann::json& j) {
    MockRuntime rt;
    if (j.is_null()) return rt;
    const auto runtime = j.value("runtime", nlohmann::json::object());
    // items() keeps a reference, so the sections must outlive the loops.
    const auto values = runtime.value("values", nlohmann::json::object());
    const auto throws = runtime.value("throws", nlohmann::json::object());
    const auto fails = runtime.value("fails", nlohmann::json::object());
    const auto coverage = j.value("coverage", nlohmann::json::object());
    for (const auto& [k, v] : values.items())
        rt.values[lex::strip_whitespace(k)] = v.get<std::string>();
    for (const auto& [k, v] : throws.items())
        rt.throws[lex::strip_whitespace(k)] = v.get<std::string>();
    for (const auto& [k, v] : fails.items())
        rt.fails[lex::strip_whitespace(k)] = v.get<std::string>();
    for (const auto& t : runtime.value("timeouts", nlohmann::json::array()))
        rt.timeouts.push_back(lex::strip_whitespace(t.get<std::string>()));
    for (const auto& [unit, facts] : coverage.items()) {
        UnitCoverageFacts f;
        f.lines_total = facts.value("lines_total", std::size_t{0});
        for (const auto& l : facts.value("lines", nlohmann::json::array())) {
            CoverageTrigger t;
            t.line = l.at("line").get<int>();
            for (const auto& s : l.value("triggers", nlohmann::json::array()))
                t.triggers.push_back(lex::strip_whitespace(s.get<std::string>()));
            f.lines.push_back(std::move(t));
        }
        for (const auto& b : facts.value("branches", nlohmann::json::array())) {
            BranchTrigger t;
            t.branch.unit = unit;
            t.branch.file = b.value("file", std::string{});
            t.branch.line = b.at("line").get<int>();
            t.branch.ordinal = b.value("ordinal", 0);
            t.branch.condition = b.value("condition", std::string{});
            for (const auto& s : b.value("triggers", nlohmann::json::array()))
                t.triggers.push_back(lex::strip_whitespace(s.get<std::string>()));
            f.branches.push_back(std::move(t));
        }
        std::sort(f.branches.begin(), f.branches.end(),
                  [](const BranchTrigger& a, const BranchTrigger& b) { return a.branch < b.branch; });
        if (f.lines_total < f.lines.size()) f.lines_total = f.lines.size();
        rt.coverage[unit] = std::move(f);
    }
    return rt;
}

// ---------------------------------------------------------------------------
// Construction

MockAdapter::MockAdapter(const ProjectContext& project)
    : MockAdapter(project, MockScript::from_json(project.toolchain_settings.is_object()
                                                     ? project.toolchain_settings.value("script", nlohmann::json())
                                                     : nlohmann::json())) {}

MockAdapter::MockAdapter(const ProjectContext& project, MockScript script) {
    auto state = std::make_shared<State>();
    state->index = build_index(project);
    state->runtime = MockRuntime::from_json(project.toolchain_settings);
    state->script = std::move(script);
    for (const auto& [unit, _] : state->runtime.coverage) state->unit_names.push_back(unit);
    state_ = std::move(state);
}

std::unique_ptr<ToolchainAdapter> MockAdapter::for_session(const std::string&) const {
    return std::make_unique<MockAdapter>(*this);
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

const std::set<std::string>& java_lang_types() {
    static const std::set<std::string> names = {
        "AssertionError", "ArithmeticException", "ArrayIndexOutOfBoundsException", "AutoCloseable", "Boolean",
        "Byte", "CharSequence", "Character", "Class", "ClassCastException", "CloneNotSupportedException",
        "Comparable", "Deprecated", "Double", "Enum", "Error", "Exception", "Float", "FunctionalInterface",
        "IllegalArgumentException", "IllegalStateException", "IndexOutOfBoundsException", "Integer",
        "InterruptedException", "Iterable", "Long", "Math", "NegativeArraySizeException", "NullPointerException",
        "Number", "NumberFormatException", "Object", "OutOfMemoryError", "Override", "Record", "Runnable",
        "RuntimeException", "SafeVarargs", "SecurityException", "Short", "StackOverflowError", "String",
        "StringBuilder", "StringIndexOutOfBoundsException", "SuppressWarnings", "System", "Thread", "Throwable",
        "UnsupportedOperationException", "Void"};
    return names;
}

bool all_caps(std::string_view w) {
    bool letter = false;
    for (char c : w) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isalpha(static_cast<unsigned char>(c))) letter = true;
    }
    return letter;
}

std::string guess_arg_type(const std::string& arg, const std::map<std::string, std::string>& vars) {
    if (auto lit = parse_literal(arg)) {
        switch (lit->cls) {
        case LiteralClass::string: return "String";
        case LiteralClass::character: return "char";
        case LiteralClass::integer: return "int";
        case LiteralClass::long_integer: return "long";
        case LiteralClass::float_number: return "float";
        case LiteralClass::double_number: return "double";
        case LiteralClass::boolean: return "boolean";
        case LiteralClass::null: return "<null>";
        }
    }
    auto toks = lex::tokenize(arg);
    if (toks.size() == 1 && toks[0].is_identifier()) {
        if (auto it = vars.find(std::string(toks[0].text)); it != vars.end()) return it->second;
    }
    if (toks.size() >= 2 && toks[0].is("new") && toks[1].is_identifier()) return std::string(toks[1].text);
    return "Object";
}

class CompileChecker {
public:
    CompileChecker(const SymbolIndex& index, const TestSuite& suite) : index_(index), suite_(suite) {
        rendered_ = render_suite(suite);
        class_name_ = preamble_class_name(suite.preamble);
        if (class_name_.empty()) class_name_ = "GeneratedTest";
        path_ = class_name_ + ".java";
    }

    CompileOutcome run() {
        const std::string& text = rendered_.text;
        toks_ = lex::tokenize(text);
        if (lex::has_invalid(toks_)) {
            const auto& bad = toks_.back();
            file_error(bad.text.size() && bad.text[0] == '/' ? "unclosed comment" : "unclosed string literal",
                       bad.offset);
            return finish();
        }
        try {
            auto reparsed = parse_test_class(text);
            TestSuite again = suite_;
            again.preamble = reparsed.preamble;
            again.cases = reparsed.cases;
            again.helper_methods = reparsed.helpers;
            bool same_members = again.active_case_count() == suite_.active_case_count();
            if (!same_members || render_text(again) != text) {
                file_error("reached end of file while parsing", text.size() > 0 ? text.size() - 1 : 0);
                return finish();
            }
        } catch (const ParseFailure&) {
            file_error("class, interface, enum, or record expected", 0);
            return finish();
        }

        context_.qualified_name = preamble_package(suite_.preamble);
        context_.qualified_name += (context_.qualified_name.empty() ? "" : ".") + class_name_;
        context_.imports = preamble_imports(suite_.preamble);
        field_vars_ = declared_variables(suite_.preamble);
        for (const auto& h : suite_.helper_methods) {
            if (!h.removed) helper_names_.insert(h.name);
        }

        check_imports();
        check_types();
        check_calls();
        return finish();
    }

private:
    const SymbolIndex& index_;
    const TestSuite& suite_;
    RenderedSuite rendered_;
    std::vector<Token> toks_;
    std::string class_name_;
    std::string path_;
    SourceUnit context_;
    std::map<std::string, std::string> field_vars_;
    std::set<std::string> helper_names_;
    std::set<std::string> visible_;
    std::size_t body_start_ = 0; // first token after the import section
    CompileOutcome out_;
    std::set<std::pair<std::string, std::string>> reported_;

    void file_error(const std::string& message, std::size_t offset) {
        Diagnostic d;
        d.message = message;
        d.kind = classify_diagnostic(message);
        d.path = path_;
        d.line = static_cast<std::size_t>(lex::line_of(rendered_.text, offset));
        d.span = {offset, offset};
        out_.diagnostics.push_back(std::move(d));
    }

    void error(const std::string& message, const Token& at, const std::string& symbol) {
        const MemberLayout* member = rendered_.member_at(at.offset);
        std::string owner = member ? member->name : std::string{};
        if (!reported_.insert({owner, message}).second) return;
        Diagnostic d;
        d.message = message;
        d.kind = classify_diagnostic(message);
        d.path = path_;
        d.line = static_cast<std::size_t>(at.line);
        d.span = {at.offset, at.end()};
        if (member && d.kind != DiagnosticKind::whole_file) d.test_name = member->name;
        d.symbol = symbol;
        out_.diagnostics.push_back(std::move(d));
    }

    CompileOutcome finish() {
        out_.success = out_.diagnostics.empty();
        std::string log;
        for (const auto& d : out_.diagnostics) {
            log += d.path + ":" + std::to_string(d.line) + ": error: " + d.message + "\n";
        }
        if (!out_.diagnostics.empty()) {
            auto n = out_.diagnostics.size();
            log += std::to_string(n) + (n == 1 ? " error\n" : " errors\n");
        }
        out_.raw_log = log;
        return out_;
    }

    static std::string package_of(const std::string& q) {
        auto dot = q.rfind('.');
        return dot == std::string::npos ? std::string{} : q.substr(0, dot);
    }

    void check_imports() {
        // Locate import statements in the rendered text for positions.
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (toks_[i].is("package")) {
                while (i < toks_.size() && !toks_[i].is(";")) ++i;
                body_start_ = i + 1;
                continue;
            }
            if (!toks_[i].is("import")) break;
            std::size_t j = i + 1;
            bool is_static = false;
            if (j < toks_.size() && toks_[j].is("static")) {
                is_static = true;
                ++j;
            }
            std::string name;
            bool wildcard = false;
            std::size_t name_tok = j;
            while (j < toks_.size() && !toks_[j].is(";")) {
                if (toks_[j].is("*")) {
                    wildcard = true;
                    if (!name.empty() && name.back() == '.') name.pop_back();
                } else {
                    name += std::string(toks_[j].text);
                }
                ++j;
            }
            body_start_ = j + 1;
            const Token& at = toks_[std::min(name_tok, toks_.size() - 1)];
            std::string type = name;
            if (is_static && !wildcard) type = package_of(name);
            bool ok = wildcard && !is_static ? index_.has_package(type) : index_.knows(type);
            if (!ok) {
                std::string pkg = wildcard && !is_static ? type : package_of(type);
                if (!wildcard && !is_static && index_.has_package(pkg)) {
                    error("cannot find symbol: class " + simple_type_name(type) + " in package " + pkg, at, type);
                } else if (is_static && index_.has_package(package_of(type))) {
                    error("cannot find symbol: class " + simple_type_name(type) + " in package " +
                              package_of(type),
                          at, type);
                } else {
                    error("package " + pkg + " does not exist: import " + name + (wildcard ? ".*" : ""), at, type);
                }
            }
            i = j;
        }
    }

    void build_visible() {
        visible_ = java_lang_types();
        visible_.insert(class_name_);
        const std::string pkg = package_of(context_.qualified_name);
        for (const auto& imp : context_.imports) {
            if (imp.is_static) continue;
            if (!imp.wildcard) {
                visible_.insert(imp.simple_name());
                continue;
            }
            for (const auto& [q, _] : index_.by_qualified_name) {
                if (package_of(q) == imp.qualified_name) visible_.insert(simple_type_name(q));
            }
            for (const auto& q : index_.classpath) {
                if (package_of(q) == imp.qualified_name) visible_.insert(simple_type_name(q));
            }
        }
        for (const auto& [q, _] : index_.by_qualified_name) {
            if (package_of(q) == pkg) visible_.insert(simple_type_name(q));
        }
        for (const auto& q : index_.classpath) {
            if (package_of(q) == pkg) visible_.insert(simple_type_name(q));
        }
        // Types declared inside the test class itself.
        for (std::size_t i = body_start_; i + 1 < toks_.size(); ++i) {
            if ((toks_[i].is("class") || toks_[i].is("interface") || toks_[i].is("enum") || toks_[i].is("record")) &&
                (i == 0 || !toks_[i - 1].is(".")) && toks_[i + 1].is_identifier())
                visible_.insert(std::string(toks_[i + 1].text));
        }
    }

    void check_types() {
        build_visible();
        for (std::size_t i = body_start_; i < toks_.size(); ++i) {
            const Token& t = toks_[i];
            if (!t.is_identifier() || lex::is_java_keyword(t.text)) continue;
            if (!std::isupper(static_cast<unsigned char>(t.text[0]))) continue;
            if (t.text.size() == 1 || all_caps(t.text)) continue;
            if (i > 0 && toks_[i - 1].is(".")) continue;
            bool after_new = i > 0 && toks_[i - 1].is("new");
            if (!after_new && i + 1 < toks_.size() && toks_[i + 1].is("(")) continue;
            std::string name(t.text);
            if (visible_.count(name)) continue;
            // A capitalized variable name declared somewhere in scope.
            if (field_vars_.count(name)) continue;
            error("cannot find symbol: class " + name, t, name);
        }
    }

    std::optional<std::string> resolve_unit(const std::string& written) const {
        if (!visible_.count(written) && written.find('.') == std::string::npos) return std::nullopt;
        auto resolved = index_.resolve_in(written, context_);
        if (!resolved || !index_.find(*resolved)) return std::nullopt;
        return resolved;
    }

    std::vector<std::string> call_args(std::size_t open, std::size_t close) const {
        auto b = toks_[open].end();
        return lex::split_arguments(std::string_view(rendered_.text).substr(b, toks_[close].offset - b));
    }

    bool static_import_provides(const std::string& method) const {
        for (const auto& imp : context_.imports) {
            if (!imp.is_static) continue;
            if (!imp.wildcard) {
                if (simple_type_name(imp.qualified_name) == method) return true;
                continue;
            }
            const SourceUnit* unit = index_.find(imp.qualified_name);
            if (!unit) {
                if (!index_.classpath.count(imp.qualified_name)) continue;
                // Assertion classes only provide assert* and fail*; other external classes anything.
                const std::string cls = simple_type_name(imp.qualified_name);
                if (cls != "Assertions" && cls != "Assert") return true;
                if (method.rfind("assert", 0) == 0 || method.rfind("fail", 0) == 0) return true;
                continue;
            }
            for (const auto& m : unit->methods) {
                if (m.name == method && m.is_static) return true;
            }
        }
        return false;
    }

    void check_calls() {
        const std::string& text = rendered_.text;
        std::map<std::string, std::map<std::string, std::string>> member_vars;
        auto vars_at = [&](std::size_t offset) -> const std::map<std::string, std::string>& {
            const MemberLayout* m = rendered_.member_at(offset);
            std::string key = m ? m->name + (m->is_test ? "#t" : "#h") : std::string{};
            auto it = member_vars.find(key);
            if (it != member_vars.end()) return it->second;
            auto vars = field_vars_;
            if (m) {
                for (auto& [k, v] : declared_variables(std::string_view(text).substr(m->decl.begin, m->decl.size())))
                    vars[k] = v;
            }
            return member_vars.emplace(key, std::move(vars)).first->second;
        };

        for (std::size_t i = body_start_; i + 1 < toks_.size(); ++i) {
            const Token& t = toks_[i];
            if (!t.is_identifier() || !toks_[i + 1].is("(") || lex::is_java_keyword(t.text)) continue;
            auto close = lex::match_close(toks_, i + 1);
            if (close == lex::npos) continue;
            const auto& vars = vars_at(t.offset);
            auto args = call_args(i + 1, close);
            std::string name(t.text);

            if (i > 0 && toks_[i - 1].is("new")) {
                if (close + 1 < toks_.size() && toks_[close + 1].is("{")) continue; // anonymous class
                auto unit_name = resolve_unit(name);
                if (!unit_name) continue;
                check_construction(*index_.find(*unit_name), args, t);
                continue;
            }
            if (i >= 2 && toks_[i - 1].is(".")) {
                const Token& recv = toks_[i - 2];
                if (!recv.is_identifier() || (i >= 3 && toks_[i - 3].is("."))) continue;
                std::string r(recv.text);
                std::string written;
                if (auto it = vars.find(r); it != vars.end()) {
                    written = it->second;
                } else if (std::isupper(static_cast<unsigned char>(r[0]))) {
                    written = r;
                } else {
                    continue;
                }
                auto unit_name = resolve_unit(written);
                if (!unit_name) continue;
                check_invocation(*index_.find(*unit_name), name, args, vars, t);
                continue;
            }
            if (i > 0 && (toks_[i - 1].is_identifier() || toks_[i - 1].is(">") || toks_[i - 1].is("@") ||
                          toks_[i - 1].is("]") || toks_[i - 1].is("::")))
                continue; // declaration, annotation or method reference
            if (std::isupper(static_cast<unsigned char>(name[0]))) continue;
            if (helper_names_.count(name) || static_import_provides(name)) continue;
            if (rendered_.member_at(t.offset) == nullptr) continue;
            error("cannot find symbol: method " + name, t, name);
        }
    }

    void check_construction(const SourceUnit& unit, const std::vector<std::string>& args, const Token& at) {
        const std::string simple = unit.simple_name();
        if (unit.kind == UnitKind::interface_type || unit.kind == UnitKind::abstract_type) {
            error(simple + " is abstract; cannot be instantiated", at, unit.qualified_name);
            return;
        }
        std::vector<const MethodRef*> matches;
        for (const auto& c : unit.constructors) {
            if (c.arity() == args.size()) matches.push_back(&c);
        }
        bool implicit_default = unit.constructors.empty() && args.empty();
        if (matches.empty() && !implicit_default) {
            error("constructor " + simple + " in class " + simple + " cannot be applied to given types (found " +
                      std::to_string(args.size()) + " arguments)",
                  at, unit.qualified_name);
            return;
        }
        if (matches.size() >= 2) {
            for (std::size_t p = 0; p < args.size(); ++p) {
                if (lex::trim(args[p]) != "null") continue;
                std::set<std::string> types;
                for (const auto* m : matches) types.insert(m->param_types[p]);
                if (types.size() >= 2) {
                    error("reference to " + simple + " is ambiguous: both constructor " + matches[0]->signature +
                              " and constructor " + matches[1]->signature + " match",
                          at, unit.qualified_name);
                    return;
                }
            }
        }
    }

    void check_invocation(const SourceUnit& unit, const std::string& method, const std::vector<std::string>& args,
                          const std::map<std::string, std::string>& vars, const Token& at) {
        const std::string simple = unit.simple_name();
        auto candidates = method_signatures(unit.qualified_name, method, index_);
        if (candidates.empty()) {
            std::string types;
            for (std::size_t k = 0; k < args.size(); ++k) {
                if (k) types += ",";
                types += guess_arg_type(args[k], vars);
            }
            error("method " + method + "(" + types + ") does not exist on type " + simple, at,
                  simple + "." + method);
            return;
        }
        std::vector<const MethodRef*> matches;
        for (const auto& c : candidates) {
            if (c.arity() == args.size()) matches.push_back(&c);
        }
        if (matches.empty()) {
            error("method " + method + " in type " + simple + " cannot be applied to given types (found " +
                      std::to_string(args.size()) + " arguments)",
                  at, simple + "." + method);
            return;
        }
        bool accessible = std::any_of(matches.begin(), matches.end(), [](const MethodRef* m) {
            return m->visibility != Visibility::private_access;
        });
        if (!accessible) error(method + "(" + ") has private access in " + simple, at, simple + "." + method);
    }
};

} // namespace

CompileOutcome MockAdapter::simulate_compile(const TestSuite& suite) const {
    CompileChecker checker(state_->index, suite);
    return checker.run();
}

CompileOutcome MockAdapter::compile(const TestSuite& suite, const ProjectContext&) {
    auto rendered = render_suite(suite);
    auto fp = fingerprint(rendered.text);
    if (const MockRule* rule = state_->script.match(rendered.text, fp); rule && rule->compile) {
        CompileOutcome out = *rule->compile;
        for (auto& d : out.diagnostics) {
            if (d.path.empty()) d.path = preamble_class_name(suite.preamble) + ".java";
        }
        return out;
    }
    return simulate_compile(suite);
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct Throw {
    std::string type;
    std::string message;
};

std::string first_line_for(const Throw& t) { return t.message.empty() ? t.type : t.type + ": " + t.message; }

class RunSimulator {
public:
    RunSimulator(const MockRuntime& rt, const TestSuite& suite) : rt_(rt), suite_(suite) {
        rendered_ = render_suite(suite);
        class_name_ = preamble_class_name(suite.preamble);
        auto pkg = preamble_package(suite.preamble);
        qualified_class_ = pkg.empty() ? class_name_ : pkg + "." + class_name_;
    }

    TestRunResult run() {
        TestRunResult out;
        for (const auto& test : suite_.cases) {
            if (test.removed()) continue;
            out.tests.push_back(run_test(test));
        }
        return out;
    }

private:
    const MockRuntime& rt_;
    const TestSuite& suite_;
    RenderedSuite rendered_;
    std::string class_name_;
    std::string qualified_class_;

    std::optional<Throw> throw_in(const std::string& normalized) const {
        for (const auto& [key, value] : rt_.throws) {
            if (normalized.find(key) == std::string::npos) continue;
            Throw t;
            auto colon = value.find(':');
            t.type = lex::trim(value.substr(0, colon));
            if (colon != std::string::npos) t.message = lex::trim(value.substr(colon + 1));
            return t;
        }
        return std::nullopt;
    }

    std::optional<std::string> value_of(const std::string& expr) const {
        auto it = rt_.values.find(lex::strip_whitespace(expr));
        if (it == rt_.values.end()) return std::nullopt;
        return it->second;
    }

    static std::string display(const std::string& code) {
        auto lit = parse_literal(code);
        return lit ? display_literal(*lit) : code;
    }

    std::string frame(const TestCase& test, std::size_t body_offset) const {
        const MemberLayout* layout = rendered_.find_test(test.name);
        std::size_t line = layout ? static_cast<std::size_t>(lex::line_of(rendered_.text, layout->body.begin + body_offset))
                                  : 0;
        return "\tat " + qualified_class_ + "." + test.name + "(" + class_name_ + ".java:" + std::to_string(line) +
               ")\n";
    }

    TestOutcome finish(const TestCase& test, Verdict verdict, const std::string& first_line,
                       std::size_t body_offset) const {
        TestOutcome o;
        o.name = test.name;
        o.verdict = verdict;
        o.failure_log = first_line + "\n" + frame(test, body_offset);
        o.observed = parse_failure_log(o.failure_log, class_name_);
        locate_failure(rendered_, test, o.observed);
        return o;
    }

    TestOutcome run_test(const TestCase& test) const {
        static const std::string afe = "org.opentest4j.AssertionFailedError: ";
        auto statements = split_statements(test.body_text);
        for (const auto& s : statements) {
            const std::string norm = lex::strip_whitespace(s.text);
            for (const auto& t : rt_.timeouts) {
                if (norm.find(t) != std::string::npos)
                    return finish(test, Verdict::error,
                                  "java.util.concurrent.TimeoutException: " + test.name + "() timed out", s.span.begin);
            }
            const AssertionModel* a = nullptr;
            for (const auto& candidate : test.assertions) {
                if (candidate.span == s.span) a = &candidate;
            }
            if (!a) {
                if (auto t = throw_in(norm)) return finish(test, Verdict::error, first_line_for(*t), s.span.begin);
                continue;
            }
            const std::string subject = lex::strip_whitespace(a->subject_expr);
            switch (a->kind) {
            case AssertionKind::equality: {
                if (auto t = throw_in(subject)) return finish(test, Verdict::error, first_line_for(*t), s.span.begin);
                auto v = value_of(a->subject_expr);
                if (!v) break;
                auto expected = parse_literal(*a->expected_literal);
                auto actual = parse_literal(*v);
                bool equal = expected && actual ? literal_equal(*expected, *actual)
                                                : lex::strip_whitespace(*a->expected_literal) == lex::strip_whitespace(*v);
                if (!equal)
                    return finish(test, Verdict::fail,
                                  afe + "expected: <" + display(*a->expected_literal) + "> but was: <" + display(*v) + ">",
                                  s.span.begin);
                break;
            }
            case AssertionKind::truth: {
                if (auto t = throw_in(subject)) return finish(test, Verdict::error, first_line_for(*t), s.span.begin);
                auto v = value_of(a->subject_expr);
                if (v && lex::strip_whitespace(*v) != *a->expected_literal)
                    return finish(test, Verdict::fail,
                                  afe + "expected: <" + *a->expected_literal + "> but was: <" + display(*v) + ">",
                                  s.span.begin);
                break;
            }
            case AssertionKind::nullness: {
                if (auto t = throw_in(subject)) return finish(test, Verdict::error, first_line_for(*t), s.span.begin);
                auto v = value_of(a->subject_expr);
                if (!v) break;
                bool is_null = lex::strip_whitespace(*v) == "null";
                if (a->expects_null && !is_null)
                    return finish(test, Verdict::fail, afe + "expected: <null> but was: <" + display(*v) + ">",
                                  s.span.begin);
                if (!a->expects_null && is_null)
                    return finish(test, Verdict::fail, afe + "expected: not <null>", s.span.begin);
                break;
            }
            case AssertionKind::exception_expected: {
                const std::string expected = *a->expected_literal;
                auto t = throw_in(subject);
                if (!t)
                    return finish(test, Verdict::fail,
                                  afe + "Expected " + expected + " to be thrown, but nothing was thrown.", s.span.begin);
                auto es = simple_type_name(expected);
                if (es != simple_type_name(t->type) && es != "Exception" && es != "Throwable" &&
                    es != "RuntimeException")
                    return finish(test, Verdict::fail,
                                  afe + "Unexpected exception type thrown, expected: <" + expected + "> but was: <" +
                                      t->type + ">",
                                  s.span.begin);
                break;
            }
            case AssertionKind::exception_absent: {
                if (auto t = throw_in(subject))
                    return finish(test, Verdict::fail, afe + "Unexpected exception thrown: " + first_line_for(*t),
                                  s.span.begin);
                break;
            }
            case AssertionKind::opaque: {
                for (const auto& [key, message] : rt_.fails) {
                    if (norm.find(key) != std::string::npos)
                        return finish(test, Verdict::fail, afe + message, s.span.begin);
                }
                if (auto t = throw_in(norm)) return finish(test, Verdict::error, first_line_for(*t), s.span.begin);
                break;
            }
            }
        }
        TestOutcome o;
        o.name = test.name;
        o.verdict = Verdict::pass;
        return o;
    }
};

} // namespace

TestRunResult MockAdapter::simulate_run(const TestSuite& suite) const {
    RunSimulator sim(state_->runtime, suite);
    return sim.run();
}

TestRunResult MockAdapter::run_tests(const TestSuite& suite, const ProjectContext& project) {
    if (!compile(suite, project).success) throw NotCompiled("suite for " + suite.target.id() + " does not compile");
    auto rendered = render_suite(suite);
    auto fp = fingerprint(rendered.text);
    const MockRule* rule = state_->script.match(rendered.text, fp);
    if (!rule || !rule->run) return simulate_run(suite);
    const std::string class_name = preamble_class_name(suite.preamble);
    TestRunResult out;
    for (const auto& test : suite.cases) {
        if (test.removed()) continue;
        TestOutcome o;
        o.name = test.name;
        auto it = rule->run->find(test.name);
        if (it != rule->run->end()) {
            o.verdict = it->second.verdict;
            o.failure_log = it->second.log;
        } else {
            o.verdict = rule->run_default;
            if (o.verdict != Verdict::pass) o.failure_log = "org.opentest4j.AssertionFailedError: scripted failure";
        }
        if (o.verdict == Verdict::pass) {
            o.failure_log.clear();
        } else {
            o.observed = parse_failure_log(o.failure_log, class_name);
            locate_failure(rendered, test, o.observed);
        }
        out.tests.push_back(std::move(o));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coverage

CoverageReport MockAdapter::empty_coverage() const {
    CoverageReport report;
    for (const auto& [unit, facts] : state_->runtime.coverage) {
        UnitCoverage uc;
        uc.lines_total = facts.lines_total;
        for (const auto& b : facts.branches) uc.branches.push_back(b.branch);
        report.units[unit] = std::move(uc);
    }
    return report;
}

CoverageReport MockAdapter::simulate_coverage(const std::vector<TestSuite>& suites) const {
    CoverageReport report = empty_coverage();
    auto triggered = [](const std::vector<std::string>& triggers, const std::string& corpus) {
        if (triggers.empty()) return true;
        return std::any_of(triggers.begin(), triggers.end(),
                           [&](const std::string& t) { return corpus.find(t) != std::string::npos; });
    };
    for (const auto& suite : suites) {
        std::string shared = suite.preamble;
        for (const auto& h : suite.helper_methods) {
            if (!h.removed) shared += "\n" + h.text;
        }
        for (const auto& test : suite.cases) {
            if (test.removed()) continue;
            const std::string corpus = lex::strip_whitespace(shared + "\n" + test.body_text);
            for (const auto& [unit, facts] : state_->runtime.coverage) {
                auto& uc = report.units[unit];
                for (const auto& l : facts.lines) {
                    if (triggered(l.triggers, corpus)) uc.covered_lines.insert(l.line);
                }
                for (const auto& b : facts.branches) {
                    if (triggered(b.triggers, corpus)) uc.covered_branches.insert(b.branch);
                }
            }
        }
    }
    return report;
}

CoverageReport MockAdapter::measure_coverage(const std::vector<TestSuite>& suites, const ProjectContext&) {
    CoverageReport report = empty_coverage();
    std::vector<TestSuite> simulated;
    for (const auto& suite : suites) {
        auto rendered = render_text(suite);
        const MockRule* rule = state_->script.match(rendered, fingerprint(rendered));
        if (rule && rule->coverage) {
            for (const auto& [unit, uc] : rule->coverage->units) {
                auto& target = report.units[unit];
                if (target.lines_total == 0 && target.branches.empty()) {
                    target.lines_total = uc.lines_total;
                    target.branches = uc.branches;
                }
                target.covered_lines.insert(uc.covered_lines.begin(), uc.covered_lines.end());
                target.covered_branches.insert(uc.covered_branches.begin(), uc.covered_branches.end());
            }
        } else {
            simulated.push_back(suite);
        }
    }
    auto sim = simulate_coverage(simulated);
    for (const auto& [unit, uc] : sim.units) {
        auto& target = report.units[unit];
        target.covered_lines.insert(uc.covered_lines.begin(), uc.covered_lines.end());
        target.covered_branches.insert(uc.covered_branches.begin(), uc.covered_branches.end());
    }
    return report;
}

} // namespace testmend
