#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "amrlin/graph.hpp"

namespace amrlin {

struct InstanceTriple {
    std::string variable;
    std::string concept_label;
    auto operator<=>(const InstanceTriple&) const = default;
};

struct AttributeTriple {
    std::string variable;
    std::string relation;
    std::string value;
    auto operator<=>(const AttributeTriple&) const = default;
};

struct RelationTriple {
    std::string source;
    std::string relation;
    std::string target;
    auto operator<=>(const RelationTriple&) const = default;
};

/// The unit SMATCH operates on. Each member is kept sorted and free of
/// duplicates, so two TripleSets are equal iff they describe the same graph
/// (up to edge order).
struct TripleSet {
    std::vector<InstanceTriple> instances;
    std::vector<AttributeTriple> attributes;
    std::vector<RelationTriple> relations;
    std::string top;

    /// Instances + attributes + relations + the top pseudo-triple.
    std::size_t size() const {
        return instances.size() + attributes.size() + relations.size() + 1;
    }
    bool operator==(const TripleSet&) const = default;
};

namespace detail {
template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace detail

inline TripleSet extract_triples(const AmrGraph& g) {
    TripleSet t;
    for (const Node& n : g.nodes())
        if (!n.is_constant()) t.instances.push_back({n.variable, n.label});
    for (const Edge& e : g.edges()) {
        const Node& src = g.node(e.source);
        const Node& dst = g.node(e.target);
        if (dst.is_constant())
            t.attributes.push_back({src.variable, e.relation, dst.label});
        else
            t.relations.push_back({src.variable, e.relation, dst.variable});
    }
    t.top = g.node(g.root()).variable;
    detail::sort_unique(t.instances);
    detail::sort_unique(t.attributes);
    detail::sort_unique(t.relations);
    return t;
}

}  // namespace amrlin
