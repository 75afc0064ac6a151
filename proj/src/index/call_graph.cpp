#include "testmend/index/call_graph.hpp"

#include <algorithm>

#include "testmend/core/lexer.hpp"
#include "testmend/index/source_parser.hpp"

namespace testmend {

using lex::Token;

const MethodRef* CallGraph::find(const std::string& key) const {
    auto it = methods.find(key);
    return it == methods.end() ? nullptr : &it->second;
}

namespace {

bool is_primitive(std::string_view w) {
    return w == "int" || w == "long" || w == "short" || w == "byte" || w == "char" || w == "boolean" ||
           w == "float" || w == "double" || w == "var";
}

// Index of the '<' that opens the generic argument list ending at toks[close], or npos.
std::size_t generic_open(const std::vector<Token>& toks, std::size_t close) {
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
        if (toks[i].is(">")) ++depth;
        else if (toks[i].is("<") && --depth == 0) return i;
        else if (toks[i].is(";") || toks[i].is("{") || toks[i].is("}") || toks[i].is("=")) return lex::npos;
    }
    return lex::npos;
}

} // namespace

std::map<std::string, std::string> declared_variables(std::string_view code) {
    std::map<std::string, std::string> out;
    auto toks = lex::tokenize(code);
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
        const auto& name = toks[i];
        if (!name.is_identifier() || lex::is_java_keyword(name.text)) continue;
        const auto& next = toks[i + 1];
        if (!(next.is("=") || next.is(";") || next.is(":") || next.is(",") || next.is(")"))) continue;
        std::size_t t = i - 1;
        while (t > 0 && toks[t].is("]") && toks[t - 1].is("[")) t -= 2;
        if (toks[t].is(">")) {
            auto open = generic_open(toks, t);
            if (open == lex::npos || open == 0) continue;
            t = open - 1;
        }
        const auto& type = toks[t];
        if (!type.is_identifier()) continue;
        if (lex::is_java_keyword(type.text) && !is_primitive(type.text)) continue;
        if (type.is("var")) continue;
        out[std::string(name.text)] = std::string(type.text);
    }
    return out;
}

namespace {

struct Call {
    std::string receiver_type; // resolved qualified type; empty = own class
    bool unresolved_receiver = false;
    std::string name;
    std::size_t arity = 0;
    bool constructor = false;
};

std::vector<Call> extract_calls(const MethodRef& method, const SourceUnit& owner, const SymbolIndex& index) {
    std::vector<Call> out;
    if (!method.body_text) return out;
    const std::string& code = *method.body_text;
    auto toks = lex::tokenize(code);
    auto vars = declared_variables(code);
    std::map<std::string, std::string> fields;
    for (const auto& f : owner.fields) fields[f.name] = erase_type_arguments(f.type);

    std::size_t start = 0;
    while (start < toks.size() && !toks[start].is("{")) ++start;
    for (std::size_t i = start + 1; i + 1 < toks.size(); ++i) {
        if (!toks[i].is_identifier() || !toks[i + 1].is("(")) continue;
        if (lex::is_java_keyword(toks[i].text)) continue;
        auto close = lex::match_close(toks, i + 1);
        if (close == lex::npos) continue;
        auto b = toks[i + 1].end();
        Call call;
        call.name = std::string(toks[i].text);
        call.arity = lex::split_arguments(std::string_view(code).substr(b, toks[close].offset - b)).size();
        if (i > 0 && toks[i - 1].is("new")) {
            call.constructor = true;
            auto resolved = index.resolve_in(call.name, owner);
            if (!resolved) continue;
            call.receiver_type = *resolved;
            out.push_back(call);
            continue;
        }
        if (i >= 2 && toks[i - 1].is(".")) {
            const auto& recv = toks[i - 2];
            std::string written;
            if (recv.is("this")) {
                written = owner.simple_name();
            } else if (recv.is_identifier() && (i < 3 || !toks[i - 3].is("."))) {
                std::string r(recv.text);
                if (auto it = vars.find(r); it != vars.end()) written = it->second;
                else if (auto f = fields.find(r); f != fields.end()) written = f->second;
                else if (std::isupper(static_cast<unsigned char>(r[0]))) written = r; // static call
            }
            if (written.empty()) {
                call.unresolved_receiver = true;
            } else {
                auto resolved = index.resolve_in(written, owner);
                if (!resolved) continue;
                call.receiver_type = *resolved;
            }
            out.push_back(call);
            continue;
        }
        if (i > 0 && (toks[i - 1].is("@") || toks[i - 1].is_identifier())) continue; // declarations
        call.receiver_type = owner.qualified_name;
        out.push_back(call);
    }
    return out;
}

} // namespace

CallGraph build_call_graph(const SymbolIndex& index) {
    CallGraph graph;
    std::map<std::pair<std::string, std::size_t>, std::vector<std::string>> by_name_arity;
    for (const auto& [q, unit] : index.by_qualified_name) {
        for (const auto& m : unit.methods) {
            graph.methods[m.key()] = m;
            graph.file_of[m.key()] = unit.path;
            by_name_arity[{m.name, m.arity()}].push_back(m.key());
        }
        for (const auto& c : unit.constructors) {
            graph.methods[c.key()] = c;
            graph.file_of[c.key()] = unit.path;
        }
    }
    auto lookup = [&](const std::string& type, const std::string& name, std::size_t arity, bool ctor) {
        std::vector<std::string> keys;
        if (ctor) {
            if (const SourceUnit* u = index.find(type)) {
                for (const auto& c : u->constructors) {
                    if (c.arity() == arity) keys.push_back(c.key());
                }
            }
            return keys;
        }
        for (const auto& q : index.ancestry(type)) {
            const SourceUnit* u = index.find(q);
            if (!u) continue;
            for (const auto& m : u->methods) {
                if (m.name == name && m.arity() == arity) keys.push_back(m.key());
            }
            if (!keys.empty()) break;
        }
        return keys;
    };
    for (const auto& [q, unit] : index.by_qualified_name) {
        std::vector<const MethodRef*> members;
        for (const auto& m : unit.methods) members.push_back(&m);
        for (const auto& c : unit.constructors) members.push_back(&c);
        for (const MethodRef* m : members) {
            auto& targets = graph.edges[m->key()];
            for (const auto& call : extract_calls(*m, unit, index)) {
                std::vector<std::string> keys;
                if (call.unresolved_receiver) {
                    auto it = by_name_arity.find({call.name, call.arity});
                    if (it != by_name_arity.end() && it->second.size() == 1) keys = it->second;
                } else {
                    keys = lookup(call.receiver_type, call.name, call.arity, call.constructor);
                }
                for (const auto& k : keys) {
                    if (k != m->key()) targets.insert(k);
                }
            }
        }
    }
    return graph;
}

std::vector<NeighborEntry> callgraph_neighborhood(const std::vector<MethodRef>& sources, int depth,
                                                  const CallGraph& graph) {
    std::vector<NeighborEntry> out;
    if (sources.empty() || depth < 1) return out;
    std::string cut_file;
    if (auto it = graph.file_of.find(sources.front().key()); it != graph.file_of.end()) cut_file = it->second;
    auto in_cut = [&](const std::string& key) {
        auto it = graph.file_of.find(key);
        return it != graph.file_of.end() && it->second == cut_file;
    };

    // Same-file callees act as additional sources.
    std::vector<std::string> frontier;
    std::set<std::string> seen;
    for (const auto& s : sources) {
        if (seen.insert(s.key()).second) frontier.push_back(s.key());
    }
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        auto e = graph.edges.find(frontier[i]);
        if (e == graph.edges.end()) continue;
        for (const auto& callee : e->second) {
            if (in_cut(callee) && seen.insert(callee).second) frontier.push_back(callee);
        }
    }

    for (int hop = 1; hop <= depth && !frontier.empty(); ++hop) {
        std::vector<std::string> next;
        for (const auto& caller : frontier) {
            auto e = graph.edges.find(caller);
            if (e == graph.edges.end()) continue;
            const MethodRef* from = graph.find(caller);
            for (const auto& callee : e->second) {
                if (in_cut(callee) || !seen.insert(callee).second) continue;
                const MethodRef* to = graph.find(callee);
                if (!to) continue;
                NeighborEntry entry;
                entry.method = *to;
                entry.hop = hop;
                std::string owner = from ? from->owner : std::string{};
                auto dot = owner.rfind('.');
                if (dot != std::string::npos) owner = owner.substr(dot + 1);
                entry.relation_note = "called by " + owner + "." + (from ? from->name : caller);
                out.push_back(std::move(entry));
                next.push_back(callee);
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::vector<NeighborEntry> callgraph_neighborhood(const MethodRef& method, int depth, const CallGraph& graph) {
    return callgraph_neighborhood(std::vector<MethodRef>{method}, depth, graph);
}

} // namespace testmend
