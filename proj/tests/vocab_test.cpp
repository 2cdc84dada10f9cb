#include <gtest/gtest.h>

#include <random>

#include "amrlin/vocab.hpp"

using namespace amrlin;

namespace {
std::vector<TokenSeq> seqs(std::initializer_list<const char*> lines) {
    std::vector<TokenSeq> out;
    for (const char* l : lines) out.push_back(TokenSeq::parse(l));
    return out;
}
}  // namespace

TEST(BuildVocab, KeepsFrequentTokens) {
    VocabTable v = build_vocab(seqs({"dog dog", "dog dog"}), 2);
    EXPECT_TRUE(v.contains("dog"));
    ASSERT_EQ(v.entries().size(), 1u);
    EXPECT_EQ(v.entries()[0].count, 4u);
}

TEST(BuildVocab, DropsRareTokens) {
    VocabTable v = build_vocab(seqs({"dog cat dog"}), 2);
    EXPECT_TRUE(v.contains("dog"));
    EXPECT_FALSE(v.contains("cat"));
}

TEST(BuildVocab, RelationsAndUnkAlwaysKept) {
    VocabTable v = build_vocab(seqs({"dog :rare dog"}), 5);
    EXPECT_TRUE(v.contains(":rare"));
    EXPECT_TRUE(v.contains(":never-seen"));
    EXPECT_TRUE(v.contains(kUnkToken));
    EXPECT_FALSE(v.contains("dog"));
}

TEST(BuildVocab, CapKeepsMostFrequentThenFirstSeen) {
    // 3000 distinct concepts; concept i appears (i % 7) + 1 times.
    std::vector<TokenSeq> corpus(1);
    for (int i = 0; i < 3000; ++i)
        for (int k = 0; k <= i % 7; ++k) corpus[0].tokens.push_back("c" + std::to_string(i));
    VocabTable v = build_vocab(corpus, 1, 2000);
    ASSERT_EQ(v.capped_size(), 2000u);
    for (std::size_t i = 1; i < v.entries().size(); ++i)
        ASSERT_GE(v.entries()[i - 1].count, v.entries()[i].count);
    EXPECT_EQ(v.entries()[0].token, "c6");
    EXPECT_EQ(v.entries()[1].token, "c13");
    // Threshold count: the 2000 most frequent must include every token with a
    // count above that of the last kept entry.
    std::size_t last = v.entries().back().count;
    for (int i = 0; i < 3000; ++i) {
        std::size_t c = static_cast<std::size_t>(i % 7) + 1;
        if (c > last) { EXPECT_TRUE(v.contains("c" + std::to_string(i))) << i; }
        if (c < last) { EXPECT_FALSE(v.contains("c" + std::to_string(i))) << i; }
    }
}

TEST(BuildVocab, EmptyCorpus) {
    VocabTable v = build_vocab(std::vector<TokenSeq>{}, 2);
    EXPECT_TRUE(v.entries().empty());
    EXPECT_THROW(build_vocab(std::vector<TokenSeq>{}, 0), std::invalid_argument);
}

TEST(ApplyVocab, InVocabUnchanged) {
    VocabTable v = build_vocab(seqs({"a :x b b a"}), 1);
    TokenSeq s = TokenSeq::parse("a :x b b a");
    EXPECT_EQ(apply_vocab(s, v), s);
}

TEST(ApplyVocab, AllOutOfVocabulary) {
    VocabTable v = build_vocab(seqs({"a a"}), 1);
    EXPECT_EQ(apply_vocab(TokenSeq::parse("p q r"), v).str(), "<<unk>> <<unk>> <<unk>>");
}

TEST(ApplyVocab, ReplacementsAtOutOfVocabularyPositions) {
    std::mt19937_64 rng(3);
    std::vector<std::string> pool = {"a", "b", "c", "d", "e", ":r1", ":r2"};
    VocabTable v = build_vocab(seqs({"a b :r1"}), 1);
    for (int trial = 0; trial < 200; ++trial) {
        TokenSeq s;
        for (int k = 0; k < 12; ++k) s.tokens.push_back(pool[rng() % pool.size()]);
        TokenSeq out = apply_vocab(s, v);
        ASSERT_EQ(out.size(), s.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            bool oov = s.tokens[k] != "a" && s.tokens[k] != "b" && s.tokens[k][0] != ':';
            EXPECT_EQ(out.tokens[k] == kUnkToken, oov);
            if (!oov) { EXPECT_EQ(out.tokens[k], s.tokens[k]); }
        }
        EXPECT_EQ(apply_vocab(out, v), out);  // idempotent
    }
}
