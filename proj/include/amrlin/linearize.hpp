#pragma once

// Graph <-> token sequence conversion.
//
// Linearization walks the graph depth first, drops variables and brackets,
// and marks the end of every node by repeating its concept:
//
//   (p / permit-01 :polarity - :ARG1 (a / abuse-01 :ARG1 (r / right-05)))
//   permit-01 :polarity - - :ARG1 abuse-01 :ARG1 right-05 right-05 abuse-01 permit-01
//
// De-linearization runs the inverse stack machine. Because variables are
// gone, every variable node carrying the same concept is merged into one.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "amrlin/graph.hpp"

namespace amrlin {

inline constexpr std::string_view kUnkToken = "<<unk>>";

struct TokenSeq {
    std::vector<std::string> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    /// Single-space separated.
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) out += ' ';
            out += tokens[i];
        }
        return out;
    }

    static TokenSeq parse(std::string_view line) {
        TokenSeq seq;
        std::istringstream in{std::string(line)};
        for (std::string t; in >> t;) seq.tokens.push_back(std::move(t));
        return seq;
    }

    bool operator==(const TokenSeq&) const = default;
};

/// Values that de-linearization turns back into constant leaves: "-", "+",
/// numbers and quoted strings.
inline bool is_constant_token(std::string_view tok) {
    if (tok == "-" || tok == "+") return true;
    if (is_quoted(tok)) return true;
    static const std::regex number(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
    return std::regex_match(tok.begin(), tok.end(), number);
}

namespace detail {
inline std::string token_safe(std::string_view label) {
    std::string s(label);
    for (char& c : s)
        if (std::isspace(static_cast<unsigned char>(c))) c = '_';
    return s;
}
}  // namespace detail

/// Labels in g that contain whitespace (quoted names such as "New York").
/// Linearization rewrites their whitespace to '_'.
inline std::vector<std::string> whitespace_labels(const AmrGraph& g) {
    std::vector<std::string> out;
    for (const Node& n : g.nodes())
        if (std::any_of(n.label.begin(), n.label.end(),
                        [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
            out.push_back(n.label);
    return out;
}

/// PENMAN text with "var / " prefixes deleted; re-entrant references are
/// written as the referenced node's bare concept.
inline std::string remove_variables(const AmrGraph& g) {
    struct Writer {
        const AmrGraph& g;
        std::string out;
        void enter(NodeId id, const Edge* via) {
            if (via) out += ' ' + via->relation + ' ';
            out += '(' + g.node(id).label;
        }
        void leave(NodeId) { out += ')'; }
        void constant(NodeId id, const Edge& via) {
            out += ' ' + via.relation + ' ' + g.node(id).label;
        }
        void reference(NodeId id, const Edge& via) {
            out += ' ' + via.relation + ' ' + g.node(id).label;
        }
    } w{g, {}};
    depth_first(g, w);
    return std::move(w.out);
}

/// Depth-first linearization with terminal doubling. Constants and
/// re-entrant references are emitted leaf style ("concept concept").
/// Length is always 2 * (node visits) + edges.
inline TokenSeq linearize(const AmrGraph& g) {
    struct Emitter {
        const AmrGraph& g;
        std::vector<std::string> out;
        void enter(NodeId id, const Edge* via) {
            if (via) out.push_back(via->relation);
            out.push_back(detail::token_safe(g.node(id).label));
        }
        void leave(NodeId id) { out.push_back(detail::token_safe(g.node(id).label)); }
        void leaf(NodeId id, const Edge& via) {
            out.push_back(via.relation);
            out.push_back(detail::token_safe(g.node(id).label));
            out.push_back(out.back());
        }
        void constant(NodeId id, const Edge& via) { leaf(id, via); }
        void reference(NodeId id, const Edge& via) { leaf(id, via); }
    } e{g, {}};
    depth_first(g, e);
    return TokenSeq{std::move(e.out)};
}

enum class DelinearizeMode {
    Strict,  // any malformation throws DelinearizeError
    Repair,  // malformations are fixed up and reported as diagnostics
};

struct Diagnostic {
    enum class Kind {
        NodeCollision,  // distinct nodes with one concept merged
        ImplicitClose,  // node left open, closed by the repair
        DroppedToken,   // token that neither opens nor closes a node
        EmptySequence,  // nothing usable; placeholder graph returned
    };
    Kind kind;
    std::size_t token_index;
    std::string message;

    bool is_syntax_error() const { return kind != Kind::NodeCollision; }
};

inline std::string_view to_string(Diagnostic::Kind k) {
    switch (k) {
    case Diagnostic::Kind::NodeCollision: return "node-collision";
    case Diagnostic::Kind::ImplicitClose: return "implicit-close";
    case Diagnostic::Kind::DroppedToken: return "dropped-token";
    case Diagnostic::Kind::EmptySequence: return "empty-sequence";
    }
    return "unknown";
}

class DelinearizeError : public std::runtime_error {
public:
    DelinearizeError(const std::string& what, std::size_t token_index)
        : std::runtime_error(what + " at token " + std::to_string(token_index)),
          token_index_(token_index) {}
    std::size_t token_index() const { return token_index_; }

private:
    std::size_t token_index_;
};

struct DelinearizeResult {
    AmrGraph graph;
    std::vector<Diagnostic> diagnostics;

    bool has_syntax_errors() const {
        return std::any_of(diagnostics.begin(), diagnostics.end(),
                           [](const Diagnostic& d) { return d.is_syntax_error(); });
    }
};

namespace detail {

class Delinearizer {
public:
    Delinearizer(const TokenSeq& seq, DelinearizeMode mode) : seq_(seq), mode_(mode) {}

    DelinearizeResult run() {
        const auto& toks = seq_.tokens;
        for (std::size_t i = 0; i < toks.size(); ++i) step(i, toks[i]);
        finish();
        return build();
    }

private:
    struct Provisional {
        std::string label;
        std::size_t open_token;
        std::size_t children = 0;
    };
    struct ProvEdge {
        std::size_t source;
        std::string relation;
        std::size_t target;
    };
    struct Pending {
        std::string relation;
        std::size_t token;
    };

    bool strict() const { return mode_ == DelinearizeMode::Strict; }

    void fail_or_drop(std::size_t i, const std::string& why) {
        if (strict()) throw DelinearizeError(why, i);
        diags_.push_back({Diagnostic::Kind::DroppedToken, i,
                          "dropped '" + seq_.tokens[i] + "': " + why});
    }

    std::size_t open(const std::string& label, std::size_t i) {
        nodes_.push_back({label, i});
        stack_.push_back(nodes_.size() - 1);
        return nodes_.size() - 1;
    }

    void step(std::size_t i, const std::string& tok) {
        bool rel = is_relation(tok);
        if (pending_) {
            if (rel) {
                if (strict()) throw DelinearizeError("relation follows relation '" + pending_->relation + "'", i);
                diags_.push_back({Diagnostic::Kind::DroppedToken, pending_->token,
                                  "dropped '" + pending_->relation + "': relation has no target"});
                pending_ = Pending{tok, i};
                return;
            }
            std::size_t parent = stack_.back();
            std::size_t child = open(tok, i);
            edges_.push_back({parent, std::move(pending_->relation), child});
            ++nodes_[parent].children;
            pending_.reset();
            return;
        }
        if (stack_.empty()) {
            if (!rooted_ && !rel) {
                open(tok, i);
                rooted_ = true;
                return;
            }
            fail_or_drop(i, rel ? "relation with no open node" : "content after root closed");
            return;
        }
        if (rel) {
            pending_ = Pending{tok, i};
            return;
        }
        if (nodes_[stack_.back()].label == tok) {
            stack_.pop_back();
            return;
        }
        // Neither opens (no relation before it) nor closes the top node.
        if (strict())
            throw DelinearizeError("'" + tok + "' neither closes '" + nodes_[stack_.back()].label +
                                       "' nor follows a relation",
                                   i);
        auto deeper = std::find_if(stack_.rbegin(), stack_.rend(),
                                   [&](std::size_t n) { return nodes_[n].label == tok; });
        if (deeper == stack_.rend()) {
            fail_or_drop(i, "neither closes an open node nor follows a relation");
            return;
        }
        while (stack_.back() != *deeper) {
            implicit_close(i);
        }
        stack_.pop_back();
    }

    void implicit_close(std::size_t at) {
        const Provisional& p = nodes_[stack_.back()];
        diags_.push_back({Diagnostic::Kind::ImplicitClose, at,
                          "implicitly closed '" + p.label + "' opened at token " +
                              std::to_string(p.open_token)});
        stack_.pop_back();
    }

    void finish() {
        std::size_t end = seq_.tokens.size();
        if (pending_) {
            if (strict()) throw DelinearizeError("relation '" + pending_->relation + "' has no target", pending_->token);
            diags_.push_back({Diagnostic::Kind::DroppedToken, pending_->token,
                              "dropped '" + pending_->relation + "': relation has no target"});
            pending_.reset();
        }
        if (!stack_.empty() && strict()) {
            const Provisional& p = nodes_[stack_.back()];
            throw DelinearizeError(std::to_string(stack_.size()) + " unclosed node(s), innermost '" +
                                       p.label + "' (opened at token " + std::to_string(p.open_token) + ")",
                                   end);
        }
        while (!stack_.empty()) implicit_close(end);
        if (nodes_.empty()) {
            if (strict()) throw DelinearizeError("empty sequence", 0);
            diags_.push_back({Diagnostic::Kind::EmptySequence, 0, "no node recovered; placeholder used"});
            nodes_.push_back({std::string(kUnkToken), 0});
        }
    }

    DelinearizeResult build() {
        std::vector<bool> constant(nodes_.size(), false);
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            constant[i] = nodes_[i].children == 0 && is_constant_token(nodes_[i].label);

        // Same-concept collapse onto the first node opened with that concept.
        std::vector<std::size_t> canon(nodes_.size());
        std::map<std::string, std::size_t> first_with;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            canon[i] = i;
            if (constant[i]) continue;
            auto [it, fresh] = first_with.emplace(nodes_[i].label, i);
            if (!fresh) {
                canon[i] = it->second;
                diags_.push_back({Diagnostic::Kind::NodeCollision, nodes_[i].open_token,
                                  "'" + nodes_[i].label + "' opened at token " +
                                      std::to_string(nodes_[i].open_token) +
                                      " collapsed into the node opened at token " +
                                      std::to_string(nodes_[it->second].open_token)});
            }
        }

        std::vector<Node> out_nodes;
        std::vector<NodeId> out_id(nodes_.size());
        std::size_t counter = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (canon[i] != i) continue;
            if (constant[i]) {
                out_nodes.push_back({{}, nodes_[i].label});
            } else {
                out_nodes.push_back({"x" + std::to_string(counter++), nodes_[i].label});
            }
            out_id[i] = out_nodes.size() - 1;
        }

        std::vector<Edge> out_edges;
        for (const ProvEdge& e : edges_) {
            Edge edge{out_id[canon[e.source]], e.relation, out_id[canon[e.target]]};
            if (!constant[e.target] &&
                std::find(out_edges.begin(), out_edges.end(), edge) != out_edges.end())
                continue;
            out_edges.push_back(std::move(edge));
        }

        std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return a.token_index < b.token_index;
        });
        return {AmrGraph(std::move(out_nodes), std::move(out_edges), out_id[canon[0]]),
                std::move(diags_)};
    }

    const TokenSeq& seq_;
    DelinearizeMode mode_;
    std::vector<Provisional> nodes_;
    std::vector<ProvEdge> edges_;
    std::vector<std::size_t> stack_;
    std::optional<Pending> pending_;
    bool rooted_ = false;
    std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Rebuilds a graph from a token sequence.
///
/// A token right after a relation opens a child node; a token equal to the
/// innermost open node's concept closes it. Afterwards all variable nodes
/// sharing a concept are merged (the first one opened wins) and variables
/// x0, x1, ... are assigned in opening order. Childless nodes whose concept
/// is a constant token ("-", numbers, quoted strings) become constants.
///
/// Strict mode throws DelinearizeError with the offending token index (the
/// sequence length for nodes left open at the end). Repair mode drops stray
/// tokens, closes intermediate nodes when a deeper open node is closed,
/// closes everything still open at the end, and reports each fix.
/// Node collisions are reported in both modes.
inline DelinearizeResult delinearize(const TokenSeq& seq,
                                     DelinearizeMode mode = DelinearizeMode::Strict) {
    return detail::Delinearizer(seq, mode).run();
}

}  // namespace amrlin
