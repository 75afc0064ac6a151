#include "testmend/generation/generation.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

TargetRef GenerationTarget::ref() const {
    TargetRef r;
    r.unit = unit->qualified_name;
    if (method) r.method_signature = method->signature;
    return r;
}

std::string GenerationTarget::test_class_name() const {
    std::string name = unit->simple_name();
    if (method) {
        std::string m = method->name;
        if (!m.empty()) m[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(m[0])));
        name += "_" + m;
    }
    return name + "Test";
}

std::vector<MethodRef> GenerationTarget::plan_methods() const {
    if (method) return {*method};
    std::vector<MethodRef> out;
    for (const auto& m : unit->methods) {
        if (m.visibility != Visibility::private_access) out.push_back(m);
    }
    return out;
}

namespace {

bool mentions_call(const std::string& code, const std::string& name) {
    auto toks = lex::tokenize(code);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].is(name) && toks[i + 1].is("(") && (i == 0 || !toks[i - 1].is_identifier())) return true;
    }
    return false;
}

} // namespace

std::vector<MethodRef> GenerationTarget::private_methods() const {
    std::vector<MethodRef> privates;
    for (const auto& m : unit->methods) {
        if (m.visibility == Visibility::private_access) privates.push_back(m);
    }
    if (!method || privates.empty()) return privates;
    // Method granularity: only private methods the target reaches, transitively.
    std::vector<MethodRef> out;
    std::vector<std::string> bodies{method->body_text.value_or("")};
    std::set<std::string> taken;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        for (const auto& p : privates) {
            if (taken.count(p.key()) || !mentions_call(bodies[i], p.name)) continue;
            taken.insert(p.key());
            out.push_back(p);
            bodies.push_back(p.body_text.value_or(""));
        }
    }
    return out;
}

std::string target_source(const GenerationTarget& target) {
    const SourceUnit& unit = *target.unit;
    if (!target.method) return unit.body_text;
    std::string out;
    if (!unit.package_name().empty()) out += "package " + unit.package_name() + ";\n\n";
    for (const auto& imp : unit.imports) out += imp.render() + "\n";
    if (!unit.imports.empty()) out += "\n";
    std::string kind = unit.kind == UnitKind::interface_type  ? "interface"
                       : unit.kind == UnitKind::abstract_type ? "abstract class"
                                                              : "class";
    out += kind + " " + unit.simple_name() + " {\n";
    for (const auto& f : unit.fields) out += "    " + f.text + "\n";
    for (const auto& c : unit.constructors) out += "    " + c.signature + " { ... }\n";
    out += "\n    " + target.method->body_text.value_or(target.method->signature + ";") + "\n}\n";
    return out;
}

namespace {

std::string signature_list(const std::vector<MethodRef>& methods) {
    std::string out;
    for (const auto& m : methods) out += "- " + m.signature + "\n";
    return out;
}

TemplateValues target_values(const GenerationTarget& target) {
    return {
        {"kind", target.method ? "method" : "class"},
        {"name", target.method ? target.unit->simple_name() + "." + target.method->name : target.unit->simple_name()},
        {"source", target_source(target)},
        {"methods", signature_list(target.plan_methods())},
        {"package", target.unit->package_name()},
        {"test_class", target.test_class_name()},
    };
}

// Sends `prompt` and parses a plan from the answer, with one reformat request on failure.
TestPlan ask_for_plan(LlmContext& ctx, ChatSession& session, const std::string& prompt, const char* phase_tag,
                      const GenerationTarget& target) {
    std::vector<MethodRef> known = target.unit->methods;
    std::string response = ctx.gateway.send(session, prompt, phase_tag, ctx.ledger);
    try {
        return parse_plan(response, known, target.unit->qualified_name);
    } catch (const ParseFailure&) {
    }
    std::string retry = ctx.gateway.send(session, ctx.templates.render("plan_reformat", {}), phase_tag, ctx.ledger);
    return parse_plan(retry, known, target.unit->qualified_name);
}

} // namespace

TestPlan draft_test_plan(LlmContext& ctx, ChatSession& session, const GenerationTarget& target) {
    if (lex::trim(target_source(target)).empty()) throw ParseFailure("target " + target.ref().id() + " has no source");
    return ask_for_plan(ctx, session, ctx.templates.render("plan", target_values(target)), phase::plan, target);
}

TestPlan enrich_plan_private(LlmContext& ctx, ChatSession& session, const TestPlan& plan,
                             const GenerationTarget& target, const std::vector<MethodRef>& private_methods) {
    if (private_methods.empty()) return plan;
    std::string bodies;
    for (const auto& m : private_methods) bodies += m.body_text.value_or(m.signature) + "\n\n";
    auto values = target_values(target);
    values["plan"] = plan.render();
    values["private_methods"] = bodies;
    TestPlan enriched = ask_for_plan(ctx, session, ctx.templates.render("plan_private", values), phase::plan_private, target);
    // Enrichment only adds tests; a shrunken plan is treated as a misunderstanding.
    return enriched.total_tests < plan.total_tests ? plan : enriched;
}

TestPlan challenge_plan(LlmContext& ctx, ChatSession& session, const TestPlan& plan, const GenerationTarget& target) {
    auto values = target_values(target);
    values["plan"] = plan.render();
    return ask_for_plan(ctx, session, ctx.templates.render("challenge", values), phase::challenge, target);
}

TestSuite generate_tests(LlmContext& ctx, ChatSession& session, const TestPlan& plan, const GenerationTarget& target) {
    auto values = target_values(target);
    values["plan"] = plan.render();
    const char* name = target.method ? "generate_method" : "generate_class";
    std::string response = ctx.gateway.send(session, ctx.templates.render(name, values), phase::generate, ctx.ledger);
    return suite_from_response(response, target.ref(), target.granularity());
}

TestSuite run_generation(LlmContext& ctx, ChatSession& session, const GenerationTarget& target) {
    TestPlan plan = draft_test_plan(ctx, session, target);
    auto privates = target.private_methods();
    if (!privates.empty()) plan = enrich_plan_private(ctx, session, plan, target, privates);
    plan = challenge_plan(ctx, session, plan, target);
    return generate_tests(ctx, session, plan, target);
}

std::vector<std::string> extract_code_blocks(const std::string& response) {
    std::vector<std::string> blocks;
    std::istringstream in(response);
    std::string line;
    bool inside = false;
    std::string current;
    while (std::getline(in, line)) {
        std::string t = lex::trim(line);
        if (t.rfind("```", 0) == 0) {
            if (inside) {
                if (!lex::trim(current).empty()) blocks.push_back(current);
                current.clear();
            }
            inside = !inside;
            continue;
        }
        if (inside) current += line + "\n";
    }
    if (inside && !lex::trim(current).empty()) blocks.push_back(current); // unterminated fence
    if (!blocks.empty()) return blocks;

    static const std::regex start_re(R"((^|\n)[ \t]*(package|import|public|final|class|@)[ \t])");
    std::smatch m;
    if (std::regex_search(response, m, start_re)) {
        std::size_t begin = static_cast<std::size_t>(m.position(0)) + (m[1].length());
        std::size_t end = response.rfind('}');
        if (end != std::string::npos && end > begin && response.find("class", begin) < end)
            return {response.substr(begin, end - begin + 1) + "\n"};
    }
    throw NoCodeFound("response contains no code");
}

namespace {

bool declares_class(const std::string& code) {
    auto toks = lex::tokenize(code);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].is("class") && toks[i + 1].is_identifier()) return true;
    }
    return false;
}

} // namespace

ParsedTestClass extract_code(const std::string& response) {
    auto blocks = extract_code_blocks(response);
    std::string main_block;
    std::string loose; // member-only blocks
    std::vector<std::string> extra_classes;
    for (const auto& b : blocks) {
        if (!declares_class(b)) {
            loose += b;
        } else if (main_block.empty()) {
            main_block = b;
        } else {
            extra_classes.push_back(b);
        }
    }
    if (main_block.empty()) throw NoCodeFound("no class declaration in the code blocks");
    if (!loose.empty()) {
        auto close = main_block.rfind('}');
        main_block = main_block.substr(0, close) + "\n" + loose + "}\n";
    }
    ParsedTestClass parsed = parse_test_class(main_block);
    for (const auto& extra : extra_classes) {
        ParsedTestClass more;
        try {
            more = parse_test_class(extra);
        } catch (const ParseFailure&) {
            continue;
        }
        for (const auto& imp : preamble_imports(more.preamble)) parsed.preamble = add_import(parsed.preamble, imp);
        std::set<std::string> names;
        for (const auto& c : parsed.cases) names.insert(c.name);
        for (auto& c : more.cases) {
            if (names.insert(c.name).second) parsed.cases.push_back(std::move(c));
        }
        for (auto& h : more.helpers) parsed.helpers.push_back(std::move(h));
    }
    return parsed;
}

TestSuite suite_from_response(const std::string& response, const TargetRef& target, Granularity granularity) {
    ParsedTestClass parsed = extract_code(response);
    TestSuite suite;
    suite.target = target;
    suite.granularity = granularity;
    suite.preamble = std::move(parsed.preamble);
    suite.cases = std::move(parsed.cases);
    suite.helper_methods = std::move(parsed.helpers);
    if (suite.active_case_count() == 0) throw EmptySuite("response for " + target.id() + " has no test methods");
    return suite;
}

} // namespace testmend
