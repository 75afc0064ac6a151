#pragma once

// Test plans requested from the model have a fixed shape:
//
//   method: public int add(int a, int b)
//   1. adds two positive numbers
//   2. overflows at Integer.MAX_VALUE
//   TOTAL: 2
//
// Any other text around it is ignored.

#include <string>
#include <vector>

#include "testmend/core/model.hpp"

namespace testmend {

struct PlanEntry {
    MethodRef method;
    std::vector<std::string> test_descriptions;
    bool operator==(const PlanEntry&) const = default;
};

struct TestPlan {
    std::vector<PlanEntry> entries;
    std::size_t total_tests = 0;

    /// Sum of description counts.
    std::size_t counted() const;
    std::string render() const;
    bool operator==(const TestPlan&) const = default;
};

/// Parses a plan; `known` maps written signatures back to indexed methods
/// (matched by normalized signature, then by unique name). Throws ParseFailure
/// when no entry is found or the TOTAL line disagrees with the entries.
TestPlan parse_plan(const std::string& text, const std::vector<MethodRef>& known, const std::string& owner);

} // namespace testmend
