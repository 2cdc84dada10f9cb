#pragma once

// Information loss of the linearization round trip, corpus statistics, and
// a synthetic corpus generator with controllable re-entrancy and
// concept-collision rates.
//
//   loss(G) = 1 - (1/n) * sum_i smatch_f1(G_i, delinearize(linearize(G_i)))

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amrlin/corpus.hpp"
#include "amrlin/graph.hpp"
#include "amrlin/linearize.hpp"
#include "amrlin/parallel.hpp"
#include "amrlin/smatch.hpp"

namespace amrlin {

struct LossReport {
    std::size_t n = 0;
    std::vector<std::pair<std::string, double>> per_graph;  // (id, f1)
    double mean_smatch = 0;
    double loss = 0;
};

/// Round-trips a single graph through linearize/delinearize (strict).
inline AmrGraph round_trip(const AmrGraph& g) {
    return delinearize(linearize(g), DelinearizeMode::Strict).graph;
}

inline LossReport information_loss(std::span<const CorpusRecord> corpus, const SmatchOptions& opt = {}) {
    if (corpus.empty()) throw std::invalid_argument("information_loss needs a nonempty corpus");
    LossReport rep;
    rep.n = corpus.size();
    rep.per_graph.resize(corpus.size());
    parallel_for(corpus.size(), opt.workers, [&](std::size_t i) {
        const AmrGraph& g = corpus[i].graph;
        rep.per_graph[i] = {corpus[i].id, score_pair(g, round_trip(g), opt, i).f1};
    });
    double sum = 0;
    for (const auto& [id, f1] : rep.per_graph) sum += f1;
    rep.mean_smatch = sum / static_cast<double>(rep.n);
    rep.loss = 1.0 - rep.mean_smatch;
    return rep;
}

struct CorpusStats {
    std::size_t records = 0;
    std::size_t sentence_tokens = 0;
    std::size_t variable_nodes = 0;
    std::size_t constant_nodes = 0;
    std::size_t edges = 0;
    std::size_t concept_vocabulary = 0;
    std::size_t linearized_tokens = 0;
    std::size_t reentrant_edges = 0;
    std::size_t graphs_with_reentrancy = 0;
    std::size_t graphs_with_duplicate_concepts = 0;

    double reentrancy_rate() const { return ratio(graphs_with_reentrancy); }
    double duplicate_concept_rate() const { return ratio(graphs_with_duplicate_concepts); }
    double mean_sentence_tokens() const { return ratio(sentence_tokens); }
    double mean_variable_nodes() const { return ratio(variable_nodes); }

private:
    double ratio(std::size_t x) const {
        return records ? static_cast<double>(x) / static_cast<double>(records) : 0.0;
    }
};

inline CorpusStats corpus_stats(std::span<const CorpusRecord> corpus) {
    CorpusStats s;
    std::set<std::string> concepts;
    for (const CorpusRecord& r : corpus) {
        ++s.records;
        s.sentence_tokens += TokenSeq::parse(r.sentence).size();
        const AmrGraph& g = r.graph;
        s.variable_nodes += g.variable_count();
        s.constant_nodes += g.constant_count();
        s.edges += g.edges().size();
        for (const Node& n : g.nodes())
            if (!n.is_constant()) concepts.insert(n.label);
        s.linearized_tokens += linearize(g).size();
        std::size_t re = reentrant_edge_count(g);
        s.reentrant_edges += re;
        s.graphs_with_reentrancy += re > 0;
        s.graphs_with_duplicate_concepts += has_duplicate_concepts(g);
    }
    s.concept_vocabulary = concepts.size();
    return s;
}

namespace detail {
// "want-01" -> "want"
inline std::string surface_word(const std::string& concept_label) {
    std::size_t dash = concept_label.find_last_of('-');
    if (dash == std::string::npos || dash + 1 == concept_label.size()) return concept_label;
    bool sense = std::all_of(concept_label.begin() + static_cast<std::ptrdiff_t>(dash) + 1,
                             concept_label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    return sense ? concept_label.substr(0, dash) : concept_label;
}
}  // namespace detail

struct SynthOptions {
    std::size_t max_nodes = 12;    // variable nodes per graph, drawn from [1, max_nodes]
    double constant_rate = 0.2;    // chance a node carries a constant attribute
};

/// n random rooted graphs, deterministic in `seed`. Every node draws the same
/// random numbers whatever the rates, so raising dup_concept_rate only turns
/// more nodes into duplicates of an earlier node's concept.
///   reentrancy_rate   chance a graph gets one extra edge into an existing node
///   dup_concept_rate  chance a non-root node copies an earlier node's concept
inline Corpus synthetic_corpus(std::size_t n, double reentrancy_rate, double dup_concept_rate,
                               std::uint64_t seed, const SynthOptions& opt = {}) {
    if (reentrancy_rate < 0 || reentrancy_rate > 1 || dup_concept_rate < 0 || dup_concept_rate > 1)
        throw std::invalid_argument("rates must lie in [0, 1]");
    if (opt.max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");

    static const std::array<const char*, 40> kConcepts = {
        "permit-01", "abuse-01",  "right-05",  "person",   "want-01",  "eat-01",   "dog",
        "bone",      "law",       "provide-01", "enjoy-01", "national", "foreign",  "private-02",
        "treaty",    "regulate-01", "or",      "and",      "adult",    "guardian", "appoint-01",
        "subject-01", "commence-01", "guard-01", "domicile", "location", "office",  "principal",
        "juridical", "apply-02",  "court",     "claim-01", "contract-01", "party",  "property",
        "own-01",    "sell-01",   "buy-01",    "debt",     "pay-01"};
    static const std::array<const char*, 8> kRelations = {":ARG0", ":ARG1", ":ARG2", ":mod",
                                                          ":poss", ":location", ":op1", ":domain"};

    Corpus out;
    out.reserve(n);
    for (std::size_t gi = 0; gi < n; ++gi) {
        std::mt19937_64 rng(derive_seed(seed, gi));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto pick = [&](std::size_t bound) {
            return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
        };

        std::size_t k = 1 + pick(opt.max_nodes);
        std::vector<std::size_t> pool(kConcepts.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        std::shuffle(pool.begin(), pool.end(), rng);

        std::vector<std::string> concept_of(k);
        std::vector<std::size_t> parent(k, 0);
        std::vector<std::string> rel(k);
        struct ConstDraw {
            bool present;
            bool polarity;
            std::size_t quant;
        };
        std::vector<ConstDraw> consts(k);
        for (std::size_t v = 0; v < k; ++v) {
            double u_dup = unit(rng);
            std::size_t dup_src = v ? pick(v) : 0;
            parent[v] = v ? pick(v) : 0;
            rel[v] = kRelations[pick(kRelations.size())];
            consts[v] = {unit(rng) < opt.constant_rate, unit(rng) < 0.5, 1 + pick(9)};
            concept_of[v] = (v > 0 && u_dup < dup_concept_rate) ? concept_of[dup_src]
                                                                : kConcepts[pool[v % pool.size()]];
        }
        double u_re = unit(rng);
        std::size_t re_from = pick(k), re_to = pick(k);
        std::string re_rel = kRelations[pick(kRelations.size())];

        GraphBuilder b;
        std::map<char, int> letter_uses;
        std::vector<NodeId> ids(k);
        std::string sentence;
        for (std::size_t v = 0; v < k; ++v) {
            char letter = concept_of[v][0];
            int uses = ++letter_uses[letter];
            std::string var(1, letter);
            if (uses > 1) var += std::to_string(uses);
            ids[v] = b.add_variable(var, concept_of[v]);
            sentence += (v ? " " : "") + detail::surface_word(concept_of[v]);
        }
        for (std::size_t v = 1; v < k; ++v) b.add_edge(ids[parent[v]], rel[v], ids[v]);
        for (std::size_t v = 0; v < k; ++v) {
            if (!consts[v].present) continue;
            if (consts[v].polarity)
                b.add_edge(ids[v], ":polarity", b.add_constant("-"));
            else
                b.add_edge(ids[v], ":quant", b.add_constant(std::to_string(consts[v].quant)));
        }
        if (u_re < reentrancy_rate && k > 2) {
            // Target must not be the root or an ancestor of the source.
            auto is_ancestor = [&](std::size_t anc, std::size_t v) {
                for (;;) {
                    if (v == anc) return true;
                    if (v == 0) return false;
                    v = parent[v];
                }
            };
            if (re_to != 0 && !is_ancestor(re_to, re_from) && parent[re_to] != re_from)
                b.add_edge(ids[re_from], re_rel, ids[re_to]);
        }

        AmrGraph g = std::move(b).build(ids[0]);
        out.push_back({"synth." + std::to_string(gi), sentence, {}, g, serialize_penman(g, true)});
    }
    return out;
}

}  // namespace amrlin
