#pragma once

// SMATCH: F1 over matched triples under the best injective variable
// alignment. Triples are instances (var, concept), attributes
// (var, relation, constant), relations (var, relation, var) and one top
// pseudo-triple that matches when the roots are aligned.
//
// Precision is measured against the second graph (system), recall against
// the first (gold).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "amrlin/graph.hpp"
#include "amrlin/parallel.hpp"
#include "amrlin/triples.hpp"

namespace amrlin {

/// Partial injective map from variables of graph A to variables of graph B.
struct Alignment {
    std::map<std::string, std::string> mapping;

    bool operator==(const Alignment&) const = default;
};

struct ScoreReport {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t matched = 0;
    std::size_t total_a = 0;
    std::size_t total_b = 0;
    Alignment alignment;
};

inline ScoreReport make_score(std::size_t matched, std::size_t total_a, std::size_t total_b) {
    ScoreReport r;
    r.matched = matched;
    r.total_a = total_a;
    r.total_b = total_b;
    r.precision = total_b ? static_cast<double>(matched) / static_cast<double>(total_b) : 0.0;
    r.recall = total_a ? static_cast<double>(matched) / static_cast<double>(total_a) : 0.0;
    double s = r.precision + r.recall;
    r.f1 = s > 0 ? 2 * r.precision * r.recall / s : 0.0;
    return r;
}

class SearchTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kExactSmatchMaxVariables = 8;

namespace detail {
inline std::vector<std::string> variables_of(const TripleSet& t) {
    std::vector<std::string> vars;
    for (const auto& i : t.instances) vars.push_back(i.variable);
    for (const auto& a : t.attributes) vars.push_back(a.variable);
    for (const auto& r : t.relations) {
        vars.push_back(r.source);
        vars.push_back(r.target);
    }
    if (!t.top.empty()) vars.push_back(t.top);
    sort_unique(vars);
    return vars;
}
}  // namespace detail

/// Number of triples of `a` that appear in `b` once variables are mapped
/// through `m`. Throws std::invalid_argument if m is not injective or
/// mentions unknown variables.
inline std::size_t matched_count(const TripleSet& a, const TripleSet& b, const Alignment& m) {
    auto vars_a = detail::variables_of(a);
    auto vars_b = detail::variables_of(b);
    std::unordered_set<std::string> images;
    for (const auto& [from, to] : m.mapping) {
        if (!std::binary_search(vars_a.begin(), vars_a.end(), from))
            throw std::invalid_argument("alignment maps unknown variable '" + from + "'");
        if (!std::binary_search(vars_b.begin(), vars_b.end(), to))
            throw std::invalid_argument("alignment targets unknown variable '" + to + "'");
        if (!images.insert(to).second)
            throw std::invalid_argument("alignment is not injective at '" + to + "'");
    }
    auto image = [&](const std::string& v) -> const std::string* {
        auto it = m.mapping.find(v);
        return it == m.mapping.end() ? nullptr : &it->second;
    };

    std::size_t n = 0;
    for (const auto& t : a.instances)
        if (auto* v = image(t.variable))
            n += std::binary_search(b.instances.begin(), b.instances.end(),
                                    InstanceTriple{*v, t.concept_label});
    for (const auto& t : a.attributes)
        if (auto* v = image(t.variable))
            n += std::binary_search(b.attributes.begin(), b.attributes.end(),
                                    AttributeTriple{*v, t.relation, t.value});
    for (const auto& t : a.relations) {
        auto* s = image(t.source);
        auto* d = image(t.target);
        if (s && d)
            n += std::binary_search(b.relations.begin(), b.relations.end(),
                                    RelationTriple{*s, t.relation, *d});
    }
    if (auto* v = image(a.top); v && *v == b.top) ++n;
    return n;
}

namespace detail {

/// Interned form of a pair of triple sets. Mappings are vectors indexed by
/// A-variable holding a B-variable index or -1.
class MatchProblem {
public:
    using Mapping = std::vector<int>;

    MatchProblem(const TripleSet& a, const TripleSet& b)
        : vars_a_(variables_of(a)), vars_b_(variables_of(b)) {
        na_ = static_cast<int>(vars_a_.size());
        nb_ = static_cast<int>(vars_b_.size());
        auto idx = [](const std::vector<std::string>& vars, const std::string& v) {
            return static_cast<int>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
        };

        unary_.assign(static_cast<std::size_t>(na_) * static_cast<std::size_t>(nb_), 0);
        for (const auto& ta : a.instances)
            for (const auto& tb : b.instances)
                if (ta.concept_label == tb.concept_label)
                    ++unary_at(idx(vars_a_, ta.variable), idx(vars_b_, tb.variable));
        std::map<std::pair<std::string, std::string>, std::vector<int>> attr_b;
        for (const auto& tb : b.attributes)
            attr_b[{tb.relation, tb.value}].push_back(idx(vars_b_, tb.variable));
        for (const auto& ta : a.attributes) {
            auto it = attr_b.find({ta.relation, ta.value});
            if (it == attr_b.end()) continue;
            int i = idx(vars_a_, ta.variable);
            for (int j : it->second) ++unary_at(i, j);
        }
        if (!a.top.empty() && !b.top.empty()) ++unary_at(idx(vars_a_, a.top), idx(vars_b_, b.top));

        std::unordered_map<std::string, int> rel_ids;
        auto rel_id = [&](const std::string& r) {
            return rel_ids.emplace(r, static_cast<int>(rel_ids.size())).first->second;
        };
        incident_.assign(static_cast<std::size_t>(na_), {});
        for (const auto& t : a.relations) {
            Rel r{idx(vars_a_, t.source), rel_id(t.relation), idx(vars_a_, t.target)};
            rels_a_.push_back(r);
            int k = static_cast<int>(rels_a_.size()) - 1;
            incident_[static_cast<std::size_t>(r.source)].push_back(k);
            if (r.target != r.source) incident_[static_cast<std::size_t>(r.target)].push_back(k);
        }
        for (const auto& t : b.relations) {
            auto it = rel_ids.find(t.relation);
            if (it == rel_ids.end()) continue;  // cannot match anything in A
            rels_b_.insert(key(idx(vars_b_, t.source), it->second, idx(vars_b_, t.target)));
        }
    }

    int size_a() const { return na_; }
    int size_b() const { return nb_; }
    const std::vector<std::string>& vars_a() const { return vars_a_; }
    const std::vector<std::string>& vars_b() const { return vars_b_; }

    int unary(int i, int j) const { return j < 0 ? 0 : unary_[static_cast<std::size_t>(i * nb_ + j)]; }

    int max_unary(int i) const {
        int best = 0;
        for (int j = 0; j < nb_; ++j) best = std::max(best, unary(i, j));
        return best;
    }

    struct Rel {
        int source, relation, target;
    };
    const std::vector<Rel>& relations_a() const { return rels_a_; }
    const std::vector<int>& incident(int i) const { return incident_[static_cast<std::size_t>(i)]; }

    bool rel_matches(const Rel& r, int mapped_source, int mapped_target) const {
        if (mapped_source < 0 || mapped_target < 0) return false;
        return rels_b_.contains(key(mapped_source, r.relation, mapped_target));
    }

    int score(const Mapping& m) const {
        int s = 0;
        for (int i = 0; i < na_; ++i) s += unary(i, m[static_cast<std::size_t>(i)]);
        for (const Rel& r : rels_a_)
            s += rel_matches(r, m[static_cast<std::size_t>(r.source)], m[static_cast<std::size_t>(r.target)]);
        return s;
    }

    /// Contribution of the unary and relation terms touching `vars`.
    int local_score(const Mapping& m, std::span<const int> vars) const {
        int s = 0;
        scratch_.clear();
        for (int v : vars) {
            s += unary(v, m[static_cast<std::size_t>(v)]);
            scratch_.insert(scratch_.end(), incident(v).begin(), incident(v).end());
        }
        std::sort(scratch_.begin(), scratch_.end());
        scratch_.erase(std::unique(scratch_.begin(), scratch_.end()), scratch_.end());
        for (int k : scratch_) {
            const Rel& r = rels_a_[static_cast<std::size_t>(k)];
            s += rel_matches(r, m[static_cast<std::size_t>(r.source)], m[static_cast<std::size_t>(r.target)]);
        }
        return s;
    }

    Alignment to_alignment(const Mapping& m) const {
        Alignment al;
        for (int i = 0; i < na_; ++i)
            if (int j = m[static_cast<std::size_t>(i)]; j >= 0)
                al.mapping.emplace(vars_a_[static_cast<std::size_t>(i)], vars_b_[static_cast<std::size_t>(j)]);
        return al;
    }

    /// Greedy by unary score, then fill remaining variables in order.
    Mapping smart_init() const {
        Mapping m(static_cast<std::size_t>(na_), -1);
        std::vector<bool> used(static_cast<std::size_t>(nb_), false);
        for (int i = 0; i < na_; ++i) {
            int best = -1, best_score = 0;
            for (int j = 0; j < nb_; ++j) {
                if (!used[static_cast<std::size_t>(j)] && unary(i, j) > best_score) {
                    best = j;
                    best_score = unary(i, j);
                }
            }
            if (best >= 0) {
                m[static_cast<std::size_t>(i)] = best;
                used[static_cast<std::size_t>(best)] = true;
            }
        }
        int j = 0;
        for (int i = 0; i < na_; ++i) {
            if (m[static_cast<std::size_t>(i)] >= 0) continue;
            while (j < nb_ && used[static_cast<std::size_t>(j)]) ++j;
            if (j == nb_) break;
            m[static_cast<std::size_t>(i)] = j;
            used[static_cast<std::size_t>(j)] = true;
        }
        return m;
    }

    template <class Rng>
    Mapping random_init(Rng& rng) const {
        std::vector<int> order_a(static_cast<std::size_t>(na_)), order_b(static_cast<std::size_t>(nb_));
        std::iota(order_a.begin(), order_a.end(), 0);
        std::iota(order_b.begin(), order_b.end(), 0);
        std::shuffle(order_a.begin(), order_a.end(), rng);
        std::shuffle(order_b.begin(), order_b.end(), rng);
        Mapping m(static_cast<std::size_t>(na_), -1);
        for (std::size_t k = 0; k < std::min(order_a.size(), order_b.size()); ++k)
            m[static_cast<std::size_t>(order_a[k])] = order_b[k];
        return m;
    }

    /// Steepest ascent over "remap one variable to a free image" and "swap
    /// two images" (either side may be unmapped). Only strictly improving
    /// moves are taken. Returns the local optimum's score.
    int climb(Mapping& m) const {
        int current = score(m);
        std::vector<int> owner(static_cast<std::size_t>(nb_), -1);
        for (;;) {
            std::fill(owner.begin(), owner.end(), -1);
            for (int i = 0; i < na_; ++i)
                if (int j = m[static_cast<std::size_t>(i)]; j >= 0) owner[static_cast<std::size_t>(j)] = i;

            int best_delta = 0, best_i = -1, best_j = -1;
            for (int i = 0; i < na_; ++i) {
                int mi = m[static_cast<std::size_t>(i)];
                for (int j = 0; j < nb_; ++j) {
                    if (j == mi) continue;
                    int k = owner[static_cast<std::size_t>(j)];
                    int delta = k < 0 ? move_delta(m, i, j) : swap_delta(m, i, k);
                    if (delta > best_delta) {
                        best_delta = delta;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
            if (best_i < 0) return current;
            int k = owner[static_cast<std::size_t>(best_j)];
            if (k >= 0) m[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(best_i)];
            m[static_cast<std::size_t>(best_i)] = best_j;
            current += best_delta;
        }
    }

private:
    static std::uint64_t key(int s, int r, int t) {
        return (static_cast<std::uint64_t>(s) << 42) | (static_cast<std::uint64_t>(t) << 21) |
               static_cast<std::uint64_t>(r);
    }

    int& unary_at(int i, int j) { return unary_[static_cast<std::size_t>(i * nb_ + j)]; }

    int move_delta(Mapping& m, int i, int j) const {
        int vars[] = {i};
        int before = local_score(m, vars);
        int saved = m[static_cast<std::size_t>(i)];
        m[static_cast<std::size_t>(i)] = j;
        int after = local_score(m, vars);
        m[static_cast<std::size_t>(i)] = saved;
        return after - before;
    }

    int swap_delta(Mapping& m, int i, int k) const {
        int vars[] = {i, k};
        int before = local_score(m, vars);
        std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(k)]);
        int after = local_score(m, vars);
        std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(k)]);
        return after - before;
    }

    std::vector<std::string> vars_a_, vars_b_;
    int na_ = 0, nb_ = 0;
    std::vector<int> unary_;
    std::vector<Rel> rels_a_;
    std::vector<std::vector<int>> incident_;
    std::unordered_set<std::uint64_t> rels_b_;
    mutable std::vector<int> scratch_;
};

// Branch and bound over full injections of A into B (requires |A| <= |B|;
// extending a partial injection never lowers the score, so unmapped
// variables need not be enumerated).
class ExactSearch {
public:
    explicit ExactSearch(const MatchProblem& p) : p_(p) {
        int na = p.size_a();
        order_.resize(static_cast<std::size_t>(na));
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) {
            auto weight = [&](int v) { return p.max_unary(v) + static_cast<int>(p.incident(v).size()); };
            return weight(x) > weight(y);
        });
        position_.assign(static_cast<std::size_t>(na), 0);
        for (int q = 0; q < na; ++q) position_[static_cast<std::size_t>(order_[static_cast<std::size_t>(q)])] = q;

        // Each relation triple is decided when its later endpoint is placed.
        closing_.assign(static_cast<std::size_t>(na), {});
        std::vector<int> closes_at(static_cast<std::size_t>(na) + 1, 0);
        for (std::size_t k = 0; k < p.relations_a().size(); ++k) {
            const auto& r = p.relations_a()[k];
            int q = std::max(position_[static_cast<std::size_t>(r.source)], position_[static_cast<std::size_t>(r.target)]);
            closing_[static_cast<std::size_t>(q)].push_back(static_cast<int>(k));
            ++closes_at[static_cast<std::size_t>(q)];
        }
        remaining_bound_.assign(static_cast<std::size_t>(na) + 1, 0);
        for (int q = na - 1; q >= 0; --q)
            remaining_bound_[static_cast<std::size_t>(q)] = remaining_bound_[static_cast<std::size_t>(q) + 1] +
                                                            p.max_unary(order_[static_cast<std::size_t>(q)]) +
                                                            closes_at[static_cast<std::size_t>(q)];

        candidates_.resize(static_cast<std::size_t>(na));
        for (int v = 0; v < na; ++v) {
            auto& c = candidates_[static_cast<std::size_t>(v)];
            c.resize(static_cast<std::size_t>(p.size_b()));
            std::iota(c.begin(), c.end(), 0);
            std::stable_sort(c.begin(), c.end(), [&](int x, int y) { return p.unary(v, x) > p.unary(v, y); });
        }
    }

    std::pair<MatchProblem::Mapping, int> run() {
        best_ = p_.smart_init();
        best_score_ = p_.score(best_);
        current_.assign(static_cast<std::size_t>(p_.size_a()), -1);
        used_.assign(static_cast<std::size_t>(p_.size_b()), false);
        descend(0, 0);
        return {best_, best_score_};
    }

private:
    void descend(int q, int score) {
        int na = p_.size_a();
        if (q == na) {
            if (score > best_score_) {
                best_score_ = score;
                best_ = current_;
            }
            return;
        }
        if (score + remaining_bound_[static_cast<std::size_t>(q)] <= best_score_) return;
        int v = order_[static_cast<std::size_t>(q)];
        for (int j : candidates_[static_cast<std::size_t>(v)]) {
            if (used_[static_cast<std::size_t>(j)]) continue;
            used_[static_cast<std::size_t>(j)] = true;
            current_[static_cast<std::size_t>(v)] = j;
            int gain = p_.unary(v, j);
            for (int k : closing_[static_cast<std::size_t>(q)]) {
                const auto& r = p_.relations_a()[static_cast<std::size_t>(k)];
                gain += p_.rel_matches(r, current_[static_cast<std::size_t>(r.source)],
                                       current_[static_cast<std::size_t>(r.target)]);
            }
            descend(q + 1, score + gain);
            current_[static_cast<std::size_t>(v)] = -1;
            used_[static_cast<std::size_t>(j)] = false;
            if (best_score_ == score + remaining_bound_[static_cast<std::size_t>(q)]) return;
        }
    }

    const MatchProblem& p_;
    std::vector<int> order_, position_;
    std::vector<std::vector<int>> closing_;
    std::vector<int> remaining_bound_;
    std::vector<std::vector<int>> candidates_;
    MatchProblem::Mapping best_, current_;
    std::vector<bool> used_;
    int best_score_ = 0;
};

}  // namespace detail

/// Hill-climbing SMATCH. Restart 0 starts from a greedy concept match, the
/// others from random injections; each restart draws from its own sub-seed,
/// so the result depends only on (restarts, seed).
inline ScoreReport smatch_hill_climb(const TripleSet& a, const TripleSet& b, int restarts = 4,
                                     std::uint64_t seed = 13) {
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    detail::MatchProblem p(a, b);
    detail::MatchProblem::Mapping best;
    int best_score = -1;
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto m = r == 0 ? p.smart_init() : p.random_init(rng);
        int s = p.climb(m);
        if (s > best_score) {
            best_score = s;
            best = std::move(m);
        }
    }
    ScoreReport rep = make_score(static_cast<std::size_t>(best_score), a.size(), b.size());
    rep.alignment = p.to_alignment(best);
    return rep;
}

inline ScoreReport smatch_hill_climb(const AmrGraph& a, const AmrGraph& b, int restarts = 4,
                                     std::uint64_t seed = 13) {
    return smatch_hill_climb(extract_triples(a), extract_triples(b), restarts, seed);
}

/// Global optimum by branch and bound. Throws SearchTooLarge when both
/// sides have more than kExactSmatchMaxVariables variables.
inline ScoreReport exact_smatch(const TripleSet& a, const TripleSet& b) {
    std::size_t va = detail::variables_of(a).size(), vb = detail::variables_of(b).size();
    if (std::min(va, vb) > kExactSmatchMaxVariables)
        throw SearchTooLarge("exact SMATCH limited to " + std::to_string(kExactSmatchMaxVariables) +
                             " variables (got " + std::to_string(std::min(va, vb)) +
                             "); use hill climbing");
    bool swapped = va > vb;
    detail::MatchProblem p = swapped ? detail::MatchProblem(b, a) : detail::MatchProblem(a, b);
    auto [mapping, score] = detail::ExactSearch(p).run();
    ScoreReport rep = make_score(static_cast<std::size_t>(score), a.size(), b.size());
    rep.alignment = p.to_alignment(mapping);
    if (swapped) {
        Alignment inv;
        for (const auto& [x, y] : rep.alignment.mapping) inv.mapping.emplace(y, x);
        rep.alignment = std::move(inv);
    }
    return rep;
}

inline ScoreReport exact_smatch(const AmrGraph& a, const AmrGraph& b) {
    return exact_smatch(extract_triples(a), extract_triples(b));
}

struct SmatchOptions {
    int restarts = 4;
    std::uint64_t seed = 13;
    /// Pairs where both graphs have at most this many variables are scored
    /// exactly; 0 forces hill climbing everywhere.
    std::size_t exact_max_variables = kExactSmatchMaxVariables;
    std::size_t workers = 1;
};

/// Scores one pair under `opt`. `index` selects the pair's sub-seed so that
/// corpus runs are reproducible independent of scheduling.
inline ScoreReport score_pair(const AmrGraph& a, const AmrGraph& b, const SmatchOptions& opt,
                              std::size_t index = 0) {
    std::size_t limit = std::min(opt.exact_max_variables, kExactSmatchMaxVariables);
    if (std::max(a.variable_count(), b.variable_count()) <= limit) return exact_smatch(a, b);
    return smatch_hill_climb(a, b, opt.restarts, derive_seed(opt.seed, index));
}

struct CorpusScore {
    ScoreReport aggregate;  // micro-averaged; alignment left empty
    std::vector<ScoreReport> per_pair;
    double mean_f1 = 0;  // macro average of per-pair F1
};

inline CorpusScore corpus_smatch(std::span<const std::pair<AmrGraph, AmrGraph>> pairs,
                                 const SmatchOptions& opt = {}) {
    if (pairs.empty()) throw std::invalid_argument("corpus_smatch needs at least one pair");
    CorpusScore out;
    out.per_pair.resize(pairs.size());
    parallel_for(pairs.size(), opt.workers, [&](std::size_t i) {
        out.per_pair[i] = score_pair(pairs[i].first, pairs[i].second, opt, i);
    });
    std::size_t matched = 0, ta = 0, tb = 0;
    double f1_sum = 0;
    for (const auto& r : out.per_pair) {
        matched += r.matched;
        ta += r.total_a;
        tb += r.total_b;
        f1_sum += r.f1;
    }
    out.aggregate = make_score(matched, ta, tb);
    out.mean_f1 = f1_sum / static_cast<double>(pairs.size());
    return out;
}

}  // namespace amrlin
