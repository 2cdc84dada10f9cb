#pragma once

// PENMAN notation: "(p / permit-01 :polarity - :ARG1 (a / abuse-01))".

#include <cctype>
#include <cstddef>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "amrlin/graph.hpp"

namespace amrlin {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Tokens that look like AMR variables ("p", "a2", "x13"). An undefined
/// token of this shape in target position is a dangling reference rather
/// than a constant.
inline bool looks_like_variable(std::string_view tok) {
    static const std::regex shape("[a-z]|[a-z]+[0-9]+");
    return std::regex_match(tok.begin(), tok.end(), shape);
}

namespace detail {

enum class TokKind { LParen, RParen, Slash, Relation, Symbol, Quoted, End };

struct Tok {
    TokKind kind;
    std::string text;
    std::size_t offset;
};

class PenmanLexer {
public:
    explicit PenmanLexer(std::string_view src) : src_(src) {}

    Tok next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ >= src_.size()) return {TokKind::End, {}, pos_};
        std::size_t start = pos_;
        char c = src_[pos_];
        if (c == '(') return ++pos_, Tok{TokKind::LParen, "(", start};
        if (c == ')') return ++pos_, Tok{TokKind::RParen, ")", start};
        if (c == '/') return ++pos_, Tok{TokKind::Slash, "/", start};
        if (c == '"') {
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
                ++pos_;
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", start);
            ++pos_;
            return {TokKind::Quoted, std::string(src_.substr(start, pos_ - start)), start};
        }
        while (pos_ < src_.size() && !is_break(src_[pos_])) ++pos_;
        std::string text(src_.substr(start, pos_ - start));
        if (c == ':') {
            if (text.size() < 2) throw ParseError("empty relation label", start);
            return {TokKind::Relation, std::move(text), start};
        }
        return {TokKind::Symbol, std::move(text), start};
    }

private:
    static bool is_break(char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '/' ||
               c == '"';
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class PenmanParser {
public:
    explicit PenmanParser(std::string_view src) : lex_(src) { advance(); }

    AmrGraph parse() {
        if (cur_.kind == TokKind::End) throw ParseError("empty input", cur_.offset);
        if (cur_.kind != TokKind::LParen) throw ParseError("expected '('", cur_.offset);
        NodeId root = parse_node();
        if (cur_.kind == TokKind::RParen) throw ParseError("unbalanced ')'", cur_.offset);
        if (cur_.kind != TokKind::End)
            throw ParseError("unexpected content after graph", cur_.offset);
        return resolve(root);
    }

private:
    struct PendingTarget {
        std::string text;
        bool quoted;
        std::size_t offset;
    };
    struct RawEdge {
        NodeId source;
        std::string relation;
        std::variant<NodeId, PendingTarget> target;
    };

    void advance() { cur_ = lex_.next(); }

    NodeId parse_node() {
        std::size_t open_offset = cur_.offset;
        advance();  // '('
        if (cur_.kind != TokKind::Symbol) throw ParseError("expected variable", cur_.offset);
        Tok var = cur_;
        if (!is_valid_variable(var.text)) throw ParseError("invalid variable", var.offset);
        advance();
        if (cur_.kind != TokKind::Slash)
            throw ParseError("missing '/' after variable '" + var.text + "'", cur_.offset);
        advance();
        if (cur_.kind != TokKind::Symbol && cur_.kind != TokKind::Quoted)
            throw ParseError("missing concept", cur_.offset);
        auto [it, fresh] = defined_.emplace(var.text, nodes_.size());
        if (!fresh) throw ParseError("duplicate variable definition '" + var.text + "'", var.offset);
        nodes_.push_back({var.text, cur_.text});
        NodeId id = nodes_.size() - 1;
        advance();

        while (cur_.kind == TokKind::Relation) {
            Tok rel = cur_;
            advance();
            switch (cur_.kind) {
            case TokKind::LParen: {
                NodeId child = parse_node();
                edges_.push_back({id, rel.text, child});
                break;
            }
            case TokKind::Symbol:
            case TokKind::Quoted:
                edges_.push_back(
                    {id, rel.text, PendingTarget{cur_.text, cur_.kind == TokKind::Quoted, cur_.offset}});
                advance();
                break;
            default:
                throw ParseError("relation '" + rel.text + "' has no target", rel.offset);
            }
        }
        if (cur_.kind == TokKind::End)
            throw ParseError("unbalanced '(' opened at byte " + std::to_string(open_offset),
                             cur_.offset);
        if (cur_.kind != TokKind::RParen)
            throw ParseError("unexpected token '" + cur_.text + "'", cur_.offset);
        advance();
        return id;
    }

    AmrGraph resolve(NodeId root) {
        std::vector<Edge> edges;
        edges.reserve(edges_.size());
        for (RawEdge& raw : edges_) {
            NodeId target;
            if (auto* id = std::get_if<NodeId>(&raw.target)) {
                target = *id;
            } else {
                auto& p = std::get<PendingTarget>(raw.target);
                auto it = p.quoted ? defined_.end() : defined_.find(p.text);
                if (it != defined_.end()) {
                    target = it->second;
                } else if (!p.quoted && looks_like_variable(p.text)) {
                    throw ParseError("dangling variable reference '" + p.text + "'", p.offset);
                } else {
                    nodes_.push_back({{}, std::move(p.text)});
                    target = nodes_.size() - 1;
                }
            }
            edges.push_back({raw.source, std::move(raw.relation), target});
        }
        try {
            return AmrGraph(std::move(nodes_), std::move(edges), root);
        } catch (const GraphError& e) {
            throw ParseError(e.what(), 0);
        }
    }

    PenmanLexer lex_;
    Tok cur_{TokKind::End, {}, 0};
    std::vector<Node> nodes_;
    std::vector<RawEdge> edges_;
    std::unordered_map<std::string, NodeId> defined_;
};

}  // namespace detail

/// Parses one parenthesized AMR. Bare tokens after a relation refer to a
/// variable defined anywhere in the graph, otherwise they become constants.
/// Throws ParseError carrying the byte offset of the problem.
inline AmrGraph parse_penman(std::string_view text) { return detail::PenmanParser(text).parse(); }

/// Writes the graph in depth-first edge order. The first visit of a variable
/// prints "(var / concept ...)", later visits print the bare variable. With
/// indent, each relation starts a new line indented 6 spaces per depth.
inline std::string serialize_penman(const AmrGraph& g, bool indent = false) {
    struct Writer {
        const AmrGraph& g;
        bool indent;
        std::string out;
        int depth = 0;

        void sep() {
            if (indent)
                out += '\n' + std::string(6 * static_cast<std::size_t>(depth), ' ');
            else
                out += ' ';
        }
        void enter(NodeId id, const Edge* via) {
            if (via) {
                sep();
                out += via->relation + ' ';
            }
            const Node& n = g.node(id);
            out += '(' + n.variable + " / " + n.label;
            ++depth;
        }
        void leave(NodeId) {
            --depth;
            out += ')';
        }
        void constant(NodeId id, const Edge& via) {
            sep();
            out += via.relation + ' ' + g.node(id).label;
        }
        void reference(NodeId id, const Edge& via) {
            sep();
            out += via.relation + ' ' + g.node(id).variable;
        }
    } w{g, indent, {}};
    depth_first(g, w);
    return std::move(w.out);
}

}  // namespace amrlin
