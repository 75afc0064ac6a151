#include "testmend/toolchain/adapter.hpp"

namespace testmend {

void DiagnosticPatternTable::add(const std::string& pattern, DiagnosticKind kind) {
    rules_.emplace_back(std::regex(pattern, std::regex::ECMAScript | std::regex::icase), kind);
}

DiagnosticKind DiagnosticPatternTable::classify(const std::string& raw) const {
    for (const auto& [re, kind] : rules_) {
        if (std::regex_search(raw, re)) return kind;
    }
    return DiagnosticKind::other;
}

const DiagnosticPatternTable& default_pattern_table() {
    static const DiagnosticPatternTable table = [] {
        DiagnosticPatternTable t;
        t.add(R"(class, interface, enum,? or record expected)", DiagnosticKind::whole_file);
        t.add(R"(reached end of file while parsing)", DiagnosticKind::whole_file);
        t.add(R"(illegal start of type)", DiagnosticKind::whole_file);
        t.add(R"(unclosed (string literal|comment))", DiagnosticKind::whole_file);
        t.add(R"(package \S+ does not exist)", DiagnosticKind::missing_import);
        t.add(R"(^import \S+ cannot be resolved)", DiagnosticKind::missing_import);
        t.add(R"(cannot find symbol:?\s*(symbol:\s*)?class\b)", DiagnosticKind::unknown_symbol);
        t.add(R"(\S+ cannot be resolved to a type)", DiagnosticKind::unknown_symbol);
        t.add(R"(method \S+ does not exist on type)", DiagnosticKind::unknown_method);
        t.add(R"(cannot find symbol:?\s*(symbol:\s*)?method\b)", DiagnosticKind::unknown_method);
        t.add(R"(the method \S+ is undefined for the type)", DiagnosticKind::unknown_method);
        t.add(R"(reference to \S+ is ambiguous)", DiagnosticKind::ambiguous_overload);
        t.add(R"(cannot be applied to given types)", DiagnosticKind::signature_mismatch);
        t.add(R"(no suitable (constructor|method) found)", DiagnosticKind::signature_mismatch);
        t.add(R"(is abstract; cannot be instantiated)", DiagnosticKind::signature_mismatch);
        t.add(R"(has private access in)", DiagnosticKind::signature_mismatch);
        t.add(R"(incompatible types)", DiagnosticKind::signature_mismatch);
        return t;
    }();
    return table;
}

DiagnosticKind classify_diagnostic(const std::string& raw) { return default_pattern_table().classify(raw); }

} // namespace testmend
