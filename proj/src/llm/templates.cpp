#include "testmend/llm/templates.hpp"

#include <fstream>
#include <sstream>

#include "testmend/core/errors.hpp"

namespace testmend {

std::string strip_template_header(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (line.rfind("##", 0) == 0) continue;
        out += line + "\n";
    }
    auto start = out.find_first_not_of('\n');
    return start == std::string::npos ? std::string{} : out.substr(start);
}

std::string fill_template(const std::string& text, const TemplateValues& values) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("{{", pos);
        if (open == std::string::npos) break;
        auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        std::string key = text.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it == values.end()) throw InvalidConfig("template", "no value for placeholder {{" + key + "}}");
        out.append(text, pos, open - pos);
        out += it->second;
        pos = close + 2;
    }
    out.append(text, pos, std::string::npos);
    return out;
}

TemplateSet::TemplateSet(std::string dir) : dir_(dir.empty() ? std::string(TESTMEND_TEMPLATE_DIR) : std::move(dir)) {}

std::string TemplateSet::raw(const std::string& name) const {
    std::string path = dir_ + "/" + name + ".txt";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("prompt template " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string TemplateSet::render(const std::string& name, const TemplateValues& values) const {
    return fill_template(strip_template_header(raw(name)), values);
}

} // namespace testmend
