#pragma once

// Prompt templates are plain text files `<dir>/<name>.txt`. Lines starting
// with "##" are header comments and never reach the model. Placeholders are
// written {{name}}.

#include <map>
#include <string>

namespace testmend {

using TemplateValues = std::map<std::string, std::string>;

/// Fills every placeholder. Throws InvalidConfig when one has no value.
std::string fill_template(const std::string& text, const TemplateValues& values);

/// Removes "##" header lines.
std::string strip_template_header(const std::string& text);

class TemplateSet {
public:
    /// Empty `dir` means the templates installed with the build.
    explicit TemplateSet(std::string dir = {});

    /// Throws NotFound when `<dir>/<name>.txt` is missing.
    std::string render(const std::string& name, const TemplateValues& values) const;
    std::string raw(const std::string& name) const;
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

} // namespace testmend
