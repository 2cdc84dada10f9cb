#pragma once

// Rooted, labeled AMR graph. Variable nodes carry a variable and a concept;
// constant leaves ("-", numbers, quoted strings) carry only a value.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace amrlin {

using NodeId = std::size_t;

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline bool is_valid_variable(std::string_view v) {
    if (v.empty()) return false;
    return std::none_of(v.begin(), v.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '/' || c == '(' || c == ')' ||
               c == ':';
    });
}

inline bool is_quoted(std::string_view s) {
    return s.size() >= 2 && s.front() == '"' && s.back() == '"';
}

// Quoted constants may contain spaces; everything else must be a bare token
// that cannot be mistaken for a relation.
inline bool is_valid_label(std::string_view c) {
    if (c.empty() || c.front() == ':') return false;
    if (is_quoted(c)) return true;
    return std::none_of(c.begin(), c.end(), [](char ch) {
        return std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')';
    });
}

inline bool is_relation(std::string_view r) {
    if (r.size() < 2 || r.front() != ':') return false;
    return std::none_of(r.begin(), r.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')';
    });
}

/// True for relations written in inverse form (":ARG0-of"). Informational only;
/// nothing in the library normalizes inverse edges.
inline bool is_inverse_relation(std::string_view r) {
    return is_relation(r) && r.size() > 4 && r.ends_with("-of");
}

struct Node {
    std::string variable;  // empty for constants
    std::string label;  // concept, or the constant value

    bool is_constant() const { return variable.empty(); }
    friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
    NodeId source;
    std::string relation;
    NodeId target;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable after construction. The constructor checks every structural
/// invariant and throws GraphError on violation:
///  - the root and every edge source are variable nodes
///  - variables are unique and well-formed
///  - each constant is the target of exactly one edge
///  - every variable node is reachable from the root
class AmrGraph {
public:
    AmrGraph(std::vector<Node> nodes, std::vector<Edge> edges, NodeId root)
        : nodes_(std::move(nodes)), edges_(std::move(edges)), root_(root) {
        validate();
        index();
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    NodeId root() const { return root_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }

    /// Indices into edges(), in input order.
    std::span<const std::size_t> outgoing(NodeId id) const { return outgoing_.at(id); }

    std::optional<NodeId> find_variable(std::string_view var) const {
        auto it = by_variable_.find(std::string(var));
        if (it == by_variable_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t variable_count() const { return by_variable_.size(); }
    std::size_t constant_count() const { return nodes_.size() - by_variable_.size(); }

private:
    void validate() const {
        if (nodes_.empty()) throw GraphError("graph has no nodes");
        if (root_ >= nodes_.size()) throw GraphError("root index out of range");
        if (nodes_[root_].is_constant()) throw GraphError("root must be a variable node");

        std::unordered_map<std::string, NodeId> seen;
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            const Node& n = nodes_[i];
            if (!is_valid_label(n.label))
                throw GraphError("invalid concept '" + n.label + "'");
            if (n.is_constant()) continue;
            if (!is_valid_variable(n.variable))
                throw GraphError("invalid variable '" + n.variable + "'");
            if (!seen.emplace(n.variable, i).second)
                throw GraphError("duplicate variable '" + n.variable + "'");
        }

        std::vector<int> constant_uses(nodes_.size(), 0);
        std::vector<std::vector<NodeId>> adj(nodes_.size());
        for (const Edge& e : edges_) {
            if (e.source >= nodes_.size() || e.target >= nodes_.size())
                throw GraphError("edge endpoint out of range");
            if (nodes_[e.source].is_constant())
                throw GraphError("edge source must be a variable node (constant '" +
                                 nodes_[e.source].label + "')");
            if (!is_relation(e.relation))
                throw GraphError("invalid relation '" + e.relation + "'");
            if (nodes_[e.target].is_constant()) ++constant_uses[e.target];
            adj[e.source].push_back(e.target);
        }

        std::vector<bool> reached(nodes_.size(), false);
        std::vector<NodeId> stack{root_};
        reached[root_] = true;
        while (!stack.empty()) {
            NodeId cur = stack.back();
            stack.pop_back();
            for (NodeId t : adj[cur]) {
                if (!reached[t]) {
                    reached[t] = true;
                    stack.push_back(t);
                }
            }
        }
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].is_constant() && constant_uses[i] != 1)
                throw GraphError("constant '" + nodes_[i].label +
                                 "' must be the target of exactly one edge");
            if (!reached[i])
                throw GraphError("node '" +
                                 (nodes_[i].is_constant() ? nodes_[i].label : nodes_[i].variable) +
                                 "' unreachable from root");
        }
    }

    void index() {
        outgoing_.assign(nodes_.size(), {});
        for (std::size_t i = 0; i < edges_.size(); ++i) outgoing_[edges_[i].source].push_back(i);
        for (NodeId i = 0; i < nodes_.size(); ++i)
            if (!nodes_[i].is_constant()) by_variable_.emplace(nodes_[i].variable, i);
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    NodeId root_;
    std::vector<std::vector<std::size_t>> outgoing_;
    std::unordered_map<std::string, NodeId> by_variable_;
};

/// Incremental construction helper; build() validates.
class GraphBuilder {
public:
    NodeId add_variable(std::string variable, std::string label) {
        nodes_.push_back({std::move(variable), std::move(label)});
        return nodes_.size() - 1;
    }
    NodeId add_constant(std::string value) {
        nodes_.push_back({{}, std::move(value)});
        return nodes_.size() - 1;
    }
    GraphBuilder& add_edge(NodeId source, std::string relation, NodeId target) {
        edges_.push_back({source, std::move(relation), target});
        return *this;
    }
    AmrGraph build(NodeId root = 0) && { return AmrGraph(std::move(nodes_), std::move(edges_), root); }
    AmrGraph build(NodeId root = 0) const& { return AmrGraph(nodes_, edges_, root); }

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

/// Applies a bijective variable renaming. The mapping must cover every
/// variable of g and be injective; otherwise GraphError.
inline AmrGraph rename_variables(const AmrGraph& g,
                                 const std::map<std::string, std::string>& mapping) {
    std::vector<Node> nodes = g.nodes();
    std::map<std::string, std::string> inverse;
    for (Node& n : nodes) {
        if (n.is_constant()) continue;
        auto it = mapping.find(n.variable);
        if (it == mapping.end())
            throw GraphError("renaming does not cover variable '" + n.variable + "'");
        auto [pos, fresh] = inverse.emplace(it->second, n.variable);
        if (!fresh)
            throw GraphError("renaming is not injective: '" + pos->second + "' and '" +
                             n.variable + "' both map to '" + it->second + "'");
        n.variable = it->second;
    }
    return AmrGraph(std::move(nodes), g.edges(), g.root());
}

/// Depth-first walk in edge order. Each variable node is expanded at its
/// first visit; later edges into it are reported as references.
/// Visitor interface:
///   enter(NodeId, const Edge* via)      first visit (via == nullptr for root)
///   leave(NodeId)                       after all children of an expanded node
///   constant(NodeId, const Edge& via)
///   reference(NodeId, const Edge& via)  re-entrant edge to an already visited node
template <class Visitor>
void depth_first(const AmrGraph& g, Visitor&& vis) {
    std::vector<bool> visited(g.nodes().size(), false);
    auto walk = [&](auto&& self, NodeId id, const Edge* via) -> void {
        visited[id] = true;
        vis.enter(id, via);
        for (std::size_t ei : g.outgoing(id)) {
            const Edge& e = g.edges()[ei];
            if (g.node(e.target).is_constant())
                vis.constant(e.target, e);
            else if (visited[e.target])
                vis.reference(e.target, e);
            else
                self(self, e.target, &e);
        }
        vis.leave(id);
    };
    walk(walk, g.root(), nullptr);
}

/// Number of re-entrant edges (edges into a variable node already visited
/// by the depth-first walk).
inline std::size_t reentrant_edge_count(const AmrGraph& g) {
    struct Counter {
        std::size_t count = 0;
        void enter(NodeId, const Edge*) {}
        void leave(NodeId) {}
        void constant(NodeId, const Edge&) {}
        void reference(NodeId, const Edge&) { ++count; }
    } c;
    depth_first(g, c);
    return c.count;
}

/// True when two variable nodes share a concept label.
inline bool has_duplicate_concepts(const AmrGraph& g) {
    std::vector<std::string_view> concepts;
    for (const Node& n : g.nodes())
        if (!n.is_constant()) concepts.push_back(n.label);
    std::sort(concepts.begin(), concepts.end());
    return std::adjacent_find(concepts.begin(), concepts.end()) != concepts.end();
}

}  // namespace amrlin
