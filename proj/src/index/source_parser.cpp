#include "testmend/index/source_parser.hpp"

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

using lex::Token;

namespace {

bool is_modifier(std::string_view w) {
    return w == "public" || w == "private" || w == "protected" || w == "static" || w == "final" ||
           w == "abstract" || w == "synchronized" || w == "native" || w == "default" || w == "strictfp" ||
           w == "transient" || w == "volatile" || w == "sealed" || w == "non-sealed";
}

std::size_t skip_annotation(const std::vector<Token>& toks, std::size_t i, std::size_t limit) {
    ++i;
    while (i < limit && toks[i].is_identifier()) {
        ++i;
        if (i + 1 < limit && toks[i].is(".") && toks[i + 1].is_identifier()) {
            ++i;
        } else {
            break;
        }
    }
    if (i < limit && toks[i].is("(")) {
        auto close = lex::match_close(toks, i);
        return close == lex::npos || close >= limit ? limit : close + 1;
    }
    return i;
}

std::string text_between(std::string_view text, const std::vector<Token>& toks, std::size_t first,
                         std::size_t last) {
    return std::string(text.substr(toks[first].offset, toks[last].end() - toks[first].offset));
}

struct Modifiers {
    Visibility visibility = Visibility::internal;
    bool is_static = false;
    bool is_abstract = false;
    std::size_t after = 0;       // first token after annotations and modifiers
    std::size_t first_word = 0;  // first modifier token (or `after`), annotations excluded
};

Modifiers read_modifiers(const std::vector<Token>& toks, std::size_t i, std::size_t limit) {
    Modifiers m;
    bool seen_word = false;
    while (i < limit) {
        if (toks[i].is("@") && i + 1 < limit && toks[i + 1].is_identifier() && !toks[i + 1].is("interface")) {
            i = skip_annotation(toks, i, limit);
            continue;
        }
        if (toks[i].is_identifier() && is_modifier(toks[i].text)) {
            if (!seen_word) m.first_word = i;
            seen_word = true;
            auto w = toks[i].text;
            if (w == "public") m.visibility = Visibility::public_access;
            else if (w == "private") m.visibility = Visibility::private_access;
            else if (w == "protected") m.visibility = Visibility::protected_access;
            else if (w == "static") m.is_static = true;
            else if (w == "abstract") m.is_abstract = true;
            ++i;
            continue;
        }
        break;
    }
    m.after = i;
    if (!seen_word) m.first_word = i;
    return m;
}

} // namespace

std::string erase_type_arguments(std::string_view type) {
    std::string out;
    int depth = 0;
    for (char c : type) {
        if (c == '<') {
            ++depth;
        } else if (c == '>') {
            --depth;
        } else if (depth == 0 && c != '[' && c != ']' && !std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    while (out.size() >= 3 && out.compare(out.size() - 3, 3, "...") == 0) out.resize(out.size() - 3);
    return out;
}

std::vector<std::string> parameter_types(std::string_view params) {
    std::vector<std::string> out;
    for (const auto& param : lex::split_arguments(params)) {
        auto toks = lex::tokenize(param);
        std::size_t i = 0;
        while (i < toks.size()) {
            if (toks[i].is("@")) {
                i = skip_annotation(toks, i, toks.size());
            } else if (toks[i].is("final")) {
                ++i;
            } else {
                break;
            }
        }
        if (i >= toks.size()) continue;
        std::size_t name = toks.size() - 1;
        if (name <= i || !toks[name].is_identifier()) {
            out.push_back(lex::strip_whitespace(std::string_view(param).substr(toks[i].offset)));
            continue;
        }
        auto b = toks[i].offset;
        out.push_back(lex::strip_whitespace(std::string_view(param).substr(b, toks[name].offset - b)));
    }
    return out;
}

SourceUnit parse_source_unit(const std::string& path, std::string_view text) {
    auto toks = lex::tokenize(text);
    if (lex::has_invalid(toks)) throw ParseFailure(path + ": unterminated literal or comment");

    SourceUnit unit;
    unit.path = path;
    unit.body_text = std::string(text);

    std::size_t i = 0;
    std::string package;
    if (i < toks.size() && toks[i].is("package")) {
        ++i;
        while (i < toks.size() && !toks[i].is(";")) package += std::string(toks[i++].text);
        if (i >= toks.size()) throw ParseFailure(path + ": unterminated package declaration");
        ++i;
    }
    while (i < toks.size() && toks[i].is("import")) {
        ImportRef ref;
        ++i;
        if (i < toks.size() && toks[i].is("static")) {
            ref.is_static = true;
            ++i;
        }
        std::string name;
        while (i < toks.size() && !toks[i].is(";")) {
            if (toks[i].is("*")) {
                ref.wildcard = true;
                if (!name.empty() && name.back() == '.') name.pop_back();
            } else {
                name += std::string(toks[i].text);
            }
            ++i;
        }
        if (i >= toks.size()) throw ParseFailure(path + ": unterminated import");
        ref.qualified_name = name;
        unit.imports.push_back(ref);
        ++i;
    }
    while (i < toks.size() && toks[i].is(";")) ++i;

    auto mods = read_modifiers(toks, i, toks.size());
    i = mods.after;
    if (i + 1 >= toks.size() || !toks[i + 1].is_identifier()) throw ParseFailure(path + ": no type declaration");
    auto kw = toks[i].text;
    if (kw == "class") {
        unit.kind = mods.is_abstract ? UnitKind::abstract_type : UnitKind::class_type;
    } else if (kw == "interface") {
        unit.kind = UnitKind::interface_type;
    } else if (kw == "enum" || kw == "record") {
        unit.kind = UnitKind::other;
    } else {
        throw ParseFailure(path + ": expected a type declaration, found '" + std::string(kw) + "'");
    }
    const std::string simple(toks[i + 1].text);
    unit.qualified_name = package.empty() ? simple : package + "." + simple;
    i += 2;
    if (i < toks.size() && toks[i].is("<")) {
        auto c = lex::match_close(toks, i);
        if (c == lex::npos) throw ParseFailure(path + ": unbalanced type parameters");
        i = c + 1;
    }
    std::size_t record_params = lex::npos;
    if (i < toks.size() && toks[i].is("(")) { // record components
        record_params = i;
        auto c = lex::match_close(toks, i);
        if (c == lex::npos) throw ParseFailure(path + ": unbalanced record header");
        i = c + 1;
    }
    while (i < toks.size() && !toks[i].is("{")) {
        if (toks[i].is("extends") || toks[i].is("implements") || toks[i].is("permits")) {
            bool collect = !toks[i].is("permits");
            ++i;
            while (i < toks.size() && !toks[i].is("{") && !toks[i].is("implements") && !toks[i].is("permits")) {
                std::size_t b = i;
                while (i < toks.size() && !toks[i].is(",") && !toks[i].is("{") && !toks[i].is("implements") &&
                       !toks[i].is("permits")) {
                    if (toks[i].is("<")) {
                        auto c = lex::match_close(toks, i);
                        if (c == lex::npos) throw ParseFailure(path + ": unbalanced type arguments");
                        i = c;
                    }
                    ++i;
                }
                if (collect && i > b) unit.supertypes.push_back(erase_type_arguments(text_between(text, toks, b, i - 1)));
                if (i < toks.size() && toks[i].is(",")) ++i;
            }
            continue;
        }
        ++i;
    }
    if (i >= toks.size()) throw ParseFailure(path + ": type body missing");
    const std::size_t open = i;
    const std::size_t close = lex::match_close(toks, open);
    if (close == lex::npos) throw ParseFailure(path + ": type body is not closed");
    (void)record_params;

    const bool in_interface = unit.kind == UnitKind::interface_type;
    std::size_t j = open + 1;
    // Enum constants come before the first ';' of an enum body.
    if (kw == "enum") {
        while (j < close && !toks[j].is(";")) {
            if (toks[j].is("(") || toks[j].is("{")) {
                auto c = lex::match_close(toks, j);
                j = c == lex::npos ? close : c;
            }
            ++j;
        }
        ++j;
    }
    while (j < close) {
        if (toks[j].is(";")) {
            ++j;
            continue;
        }
        const std::size_t member_first = j;
        auto mm = read_modifiers(toks, j, close);
        std::size_t k = mm.after;
        if (k >= close) break;
        if (toks[k].is("{")) { // initializer
            auto c = lex::match_close(toks, k);
            j = c == lex::npos ? close : c + 1;
            continue;
        }
        if (toks[k].is("class") || toks[k].is("interface") || toks[k].is("enum") || toks[k].is("record") ||
            (toks[k].is("@") && k + 1 < close && toks[k + 1].is("interface"))) {
            while (k < close && !toks[k].is("{")) ++k;
            auto c = k < close ? lex::match_close(toks, k) : lex::npos;
            j = c == lex::npos ? close : c + 1;
            continue;
        }
        std::size_t type_params_end = k;
        if (toks[k].is("<")) { // generic method
            auto c = lex::match_close(toks, k);
            if (c == lex::npos || c >= close) throw ParseFailure(path + ": unbalanced method type parameters");
            k = c + 1;
            type_params_end = k;
        }
        // Scan to the first '(' , '=' or ';' at depth zero.
        std::size_t q = k;
        while (q < close && !toks[q].is("(") && !toks[q].is("=") && !toks[q].is(";") && !toks[q].is("{")) {
            if (toks[q].is("<")) {
                auto c = lex::match_close(toks, q);
                if (c != lex::npos && c < close) q = c;
            }
            ++q;
        }
        if (q >= close) throw ParseFailure(path + ": malformed member near line " + std::to_string(toks[k].line));
        if (toks[q].is("(") && q > k && toks[q - 1].is_identifier()) {
            auto pclose = lex::match_close(toks, q);
            if (pclose == lex::npos || pclose >= close) throw ParseFailure(path + ": unbalanced parameter list");
            MethodRef m;
            m.owner = unit.qualified_name;
            m.name = std::string(toks[q - 1].text);
            m.visibility = in_interface && mm.visibility == Visibility::internal ? Visibility::public_access
                                                                                  : mm.visibility;
            m.is_static = mm.is_static;
            auto pb = toks[q].end();
            m.param_types = parameter_types(text.substr(pb, toks[pclose].offset - pb));
            bool is_ctor = q - 1 == type_params_end && m.name == simple;
            if (!is_ctor && q - 1 > type_params_end)
                m.return_type = lex::strip_whitespace(text_between(text, toks, type_params_end, q - 2));
            std::size_t r = pclose + 1;
            while (r < close && !toks[r].is("{") && !toks[r].is(";")) ++r;
            if (r >= close) throw ParseFailure(path + ": method " + m.name + " has no body or terminator");
            std::size_t sig_last = r - 1;
            m.signature = lex::collapse_whitespace(text_between(text, toks, mm.first_word, sig_last));
            std::size_t end = r;
            if (toks[r].is("{")) {
                auto bclose = lex::match_close(toks, r);
                if (bclose == lex::npos || bclose >= close) throw ParseFailure(path + ": unbalanced method body");
                end = bclose;
                m.body_text = text_between(text, toks, member_first, end);
            }
            if (is_ctor) {
                if (unit.kind == UnitKind::interface_type) throw ParseFailure(path + ": constructor in interface");
                unit.constructors.push_back(std::move(m));
            } else {
                unit.methods.push_back(std::move(m));
            }
            j = end + 1;
            continue;
        }
        // Field declaration (possibly several declarators).
        std::size_t end = q;
        while (end < close && !toks[end].is(";")) {
            if (toks[end].is("{") || toks[end].is("(") || toks[end].is("[")) {
                auto c = lex::match_close(toks, end);
                if (c == lex::npos || c >= close) throw ParseFailure(path + ": unbalanced field initializer");
                end = c;
            }
            ++end;
        }
        if (end >= close) throw ParseFailure(path + ": unterminated field declaration");
        std::size_t name_tok = q;
        while (name_tok > k && !toks[name_tok].is_identifier()) --name_tok;
        if (toks[q].is("=") || toks[q].is(";")) name_tok = q - 1;
        if (name_tok > k && toks[name_tok].is_identifier()) {
            FieldRef f;
            f.name = std::string(toks[name_tok].text);
            f.type = lex::strip_whitespace(text_between(text, toks, k, name_tok - 1));
            f.text = lex::collapse_whitespace(text_between(text, toks, member_first, end));
            unit.fields.push_back(std::move(f));
        }
        j = end + 1;
    }
    return unit;
}

} // namespace testmend
