#pragma once

// Infrequent word replacement.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "amrlin/graph.hpp"
#include "amrlin/linearize.hpp"

namespace amrlin {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct VocabEntry {
    std::string token;
    std::size_t count;
};

/// Relation tokens and "<<unk>>" are always in vocabulary and do not count
/// against max_size; the cap bounds the remaining (concept/constant/word)
/// entries.
class VocabTable {
public:
    VocabTable() = default;
    VocabTable(std::vector<VocabEntry> kept, std::size_t min_count, std::size_t max_size)
        : kept_(std::move(kept)), min_count_(min_count), max_size_(max_size) {
        for (const auto& e : kept_) index_.insert(e.token);
    }

    bool contains(std::string_view tok) const {
        return tok == kUnkToken || is_relation(tok) || index_.contains(std::string(tok));
    }

    /// Kept entries, most frequent first. Relations appear here when seen.
    const std::vector<VocabEntry>& entries() const { return kept_; }
    std::size_t min_count() const { return min_count_; }
    std::size_t max_size() const { return max_size_; }

    /// Number of capped (non-relation) entries.
    std::size_t capped_size() const {
        return static_cast<std::size_t>(std::count_if(
            kept_.begin(), kept_.end(), [](const VocabEntry& e) { return !is_relation(e.token); }));
    }

    /// One "token<TAB>count" line per entry.
    void write(std::ostream& out) const {
        for (const auto& e : kept_) out << e.token << '\t' << e.count << '\n';
    }

private:
    std::vector<VocabEntry> kept_;
    std::unordered_set<std::string> index_;
    std::size_t min_count_ = 1;
    std::size_t max_size_ = kUnlimited;
};

/// Counts tokens, drops those seen fewer than min_count times, then keeps
/// the max_size most frequent (ties by first occurrence).
inline VocabTable build_vocab(std::span<const TokenSeq> corpus, std::size_t min_count = 1,
                              std::size_t max_size = kUnlimited) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    struct Stat {
        std::size_t count = 0;
        std::size_t first = 0;
    };
    std::unordered_map<std::string, Stat> stats;
    std::vector<std::string> order;
    for (const TokenSeq& s : corpus) {
        for (const std::string& t : s.tokens) {
            if (t == kUnkToken) continue;
            auto [it, fresh] = stats.try_emplace(t);
            if (fresh) {
                it->second.first = order.size();
                order.push_back(t);
            }
            ++it->second.count;
        }
    }

    std::vector<VocabEntry> relations, words;
    for (const std::string& t : order) {
        const Stat& st = stats[t];
        if (is_relation(t))
            relations.push_back({t, st.count});
        else if (st.count >= min_count)
            words.push_back({t, st.count});
    }
    // `order` is first-occurrence order, so a stable sort breaks ties by it.
    auto by_count = [](const VocabEntry& a, const VocabEntry& b) { return a.count > b.count; };
    std::stable_sort(words.begin(), words.end(), by_count);
    if (words.size() > max_size) words.resize(max_size);

    std::vector<VocabEntry> kept = std::move(words);
    kept.insert(kept.end(), relations.begin(), relations.end());
    std::stable_sort(kept.begin(), kept.end(), by_count);
    return VocabTable(std::move(kept), min_count, max_size);
}

/// Replaces out-of-vocabulary tokens with "<<unk>>"; length is preserved.
inline TokenSeq apply_vocab(const TokenSeq& seq, const VocabTable& v) {
    TokenSeq out = seq;
    for (std::string& t : out.tokens)
        if (!v.contains(t)) t = std::string(kUnkToken);
    return out;
}

}  // namespace amrlin
