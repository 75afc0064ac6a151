#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "testmend/core/model.hpp"
#include "testmend/index/symbol_index.hpp"

namespace testmend {

/// Methods and constructors keyed by MethodRef::key(); edges resolved by name and arity.
struct CallGraph {
    std::map<std::string, MethodRef> methods;
    std::map<std::string, std::set<std::string>> edges;
    std::map<std::string, std::string> file_of; // key -> source path of the declaring unit

    const MethodRef* find(const std::string& key) const;
};

CallGraph build_call_graph(const SymbolIndex& index);

struct NeighborEntry {
    MethodRef method;
    std::string relation_note; // "called by Owner.method"
    int hop = 1;
};

/// Breadth-first callees of `sources` declared outside the sources' file, up to `depth` hops.
/// Callees inside that file are walked through without being listed.
std::vector<NeighborEntry> callgraph_neighborhood(const std::vector<MethodRef>& sources, int depth,
                                                  const CallGraph& graph);
std::vector<NeighborEntry> callgraph_neighborhood(const MethodRef& method, int depth, const CallGraph& graph);

/// Local variable, parameter and field names declared in `code` mapped to their written type.
std::map<std::string, std::string> declared_variables(std::string_view code);

} // namespace testmend
