#pragma once

#include <utility>

#include "testmend/core/model.hpp"
#include "testmend/toolchain/adapter.hpp"

namespace testmend {

/// Marks tests and helpers with attributed diagnostics as removed. Any
/// file-level diagnostic (or a failure without diagnostics) removes every
/// member. A successful outcome leaves the suite unchanged.
TestSuite filter_invalid(const TestSuite& suite, const CompileOutcome& outcome);

struct FilteredSuite {
    TestSuite suite;
    CompileOutcome outcome;
};

/// Filters and recompiles until the suite compiles or has no members left;
/// tests that depended on a removed helper fall out on the next round.
FilteredSuite filter_until_compiles(const TestSuite& suite, ToolchainAdapter& adapter, const ProjectContext& project);

} // namespace testmend
