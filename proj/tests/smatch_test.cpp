#include <gtest/gtest.h>

#include <random>

#include "amrlin/linearize.hpp"
#include "amrlin/penman.hpp"
#include "amrlin/smatch.hpp"
#include "support/random_graphs.hpp"

using namespace amrlin;

namespace {
constexpr const char* kPermit = "(p / permit-01 :polarity - :ARG1 (a / abuse-01 :ARG1 (r / right-05)))";

AmrGraph g(const char* s) { return parse_penman(s); }

testkit::RandomGraphSpec small_spec() {
    testkit::RandomGraphSpec spec;
    spec.max_vars = 5;
    spec.concept_pool = 3;
    spec.relation_pool = 2;
    spec.extra_edges = 1;
    return spec;
}
}  // namespace

TEST(MatchedCount, IdentityAlignment) {
    TripleSet t = extract_triples(g(kPermit));
    EXPECT_EQ(matched_count(t, t, {{{"p", "p"}, {"a", "a"}, {"r", "r"}}}), t.size());
}

TEST(MatchedCount, EmptyAlignment) {
    TripleSet t = extract_triples(g(kPermit));
    EXPECT_EQ(matched_count(t, t, {}), 0u);
}

TEST(MatchedCount, PermitAgainstRoundTrip) {
    // Brute force over all 3! full alignments of {p,a,r} onto {x0,x1,x2}.
    TripleSet gold = extract_triples(g(kPermit));
    TripleSet sys = extract_triples(delinearize(linearize(g(kPermit))).graph);
    std::vector<std::string> targets = {"x0", "x1", "x2"};
    std::size_t best = 0;
    do {
        best = std::max(best, matched_count(gold, sys, {{{"p", targets[0]}, {"a", targets[1]}, {"r", targets[2]}}}));
    } while (std::next_permutation(targets.begin(), targets.end()));
    EXPECT_EQ(best, 7u);
    EXPECT_EQ(gold.size(), 7u);
    EXPECT_EQ(exact_smatch(gold, sys).matched, 7u);
}

TEST(MatchedCount, RejectsInvalidAlignment) {
    TripleSet t = extract_triples(g(kPermit));
    EXPECT_THROW(matched_count(t, t, {{{"p", "a"}, {"a", "a"}}}), std::invalid_argument);
    EXPECT_THROW(matched_count(t, t, {{{"q", "a"}}}), std::invalid_argument);
    EXPECT_THROW(matched_count(t, t, {{{"p", "zz"}}}), std::invalid_argument);
}

TEST(HillClimb, SelfScoreIsOne) {
    ScoreReport r = smatch_hill_climb(g(kPermit), g(kPermit));
    EXPECT_EQ(r.f1, 1.0);
    EXPECT_EQ(r.matched, 7u);
}

TEST(HillClimb, DogVersusCat) {
    ScoreReport r = smatch_hill_climb(g("(x / dog)"), g("(y / cat)"));
    EXPECT_EQ(r.matched, 1u);
    EXPECT_DOUBLE_EQ(r.precision, 0.5);
    EXPECT_DOUBLE_EQ(r.recall, 0.5);
    EXPECT_DOUBLE_EQ(r.f1, 0.5);
    EXPECT_EQ(r.alignment.mapping.at("x"), "y");
}

TEST(HillClimb, DeterministicForSeed) {
    std::mt19937_64 rng(8);
    testkit::RandomGraphSpec spec = small_spec();
    spec.max_vars = 10;
    for (int i = 0; i < 50; ++i) {
        AmrGraph a = testkit::random_graph(rng, spec), b = testkit::random_graph(rng, spec);
        ScoreReport r1 = smatch_hill_climb(a, b, 4, 99), r2 = smatch_hill_climb(a, b, 4, 99);
        EXPECT_EQ(r1.matched, r2.matched);
        EXPECT_EQ(r1.alignment, r2.alignment);
    }
}

TEST(HillClimb, AlignmentReproducesMatchedCount) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        AmrGraph a = testkit::random_graph(rng, small_spec()), b = testkit::random_graph(rng, small_spec());
        ScoreReport r = smatch_hill_climb(a, b);
        EXPECT_EQ(matched_count(extract_triples(a), extract_triples(b), r.alignment), r.matched);
    }
}

TEST(HillClimb, RejectsZeroRestarts) {
    EXPECT_THROW(smatch_hill_climb(g("(d / dog)"), g("(d / dog)"), 0), std::invalid_argument);
}

TEST(ExactSmatch, AgreesWithBruteForce) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 400; ++i) {
        AmrGraph a = testkit::random_graph(rng, small_spec()), b = testkit::random_graph(rng, small_spec());
        testkit::OracleScore oracle = testkit::brute_force_smatch(a, b);
        ScoreReport r = exact_smatch(a, b);
        ASSERT_EQ(r.matched, oracle.matched) << serialize_penman(a) << " vs " << serialize_penman(b);
        EXPECT_EQ(r.total_a, oracle.total_a);
        EXPECT_EQ(r.total_b, oracle.total_b);
        EXPECT_EQ(matched_count(extract_triples(a), extract_triples(b), r.alignment), r.matched);
    }
}

TEST(ExactSmatch, UnequalSizesBothDirections) {
    std::mt19937_64 rng(41);
    testkit::RandomGraphSpec big = small_spec(), tiny = small_spec();
    big.min_vars = 6;
    big.max_vars = 7;
    tiny.max_vars = 3;
    for (int i = 0; i < 60; ++i) {
        AmrGraph a = testkit::random_graph(rng, big), b = testkit::random_graph(rng, tiny);
        EXPECT_EQ(exact_smatch(a, b).matched, testkit::brute_force_smatch(a, b).matched);
        ScoreReport rev = exact_smatch(b, a);
        EXPECT_EQ(rev.matched, testkit::brute_force_smatch(b, a).matched);
        EXPECT_EQ(matched_count(extract_triples(b), extract_triples(a), rev.alignment), rev.matched);
    }
}

TEST(ExactSmatch, SmallCases) {
    EXPECT_EQ(exact_smatch(g(kPermit), g(kPermit)).f1, 1.0);
    ScoreReport disjoint = exact_smatch(g("(a / x :ARG0 (b / y))"), g("(c / p :ARG1 (d / q))"));
    EXPECT_EQ(disjoint.matched, 1u);  // top only
}

TEST(ExactSmatch, SizeGuard) {
    std::string nine = "(v0 / c0";
    for (int i = 1; i < 9; ++i) nine += " :op" + std::to_string(i) + " (v" + std::to_string(i) + " / c" + std::to_string(i) + ")";
    nine += ")";
    AmrGraph big = parse_penman(nine);
    EXPECT_THROW(exact_smatch(big, big), SearchTooLarge);
    EXPECT_NO_THROW(exact_smatch(big, g("(d / dog)")));
}

TEST(ExactSmatch, MonotoneUnderTripleRemoval) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i) {
        AmrGraph a = testkit::random_graph(rng, small_spec()), b = testkit::random_graph(rng, small_spec());
        TripleSet ta = extract_triples(a), tb = extract_triples(b);
        std::size_t full = exact_smatch(ta, tb).matched;
        if (!tb.relations.empty()) {
            TripleSet less = tb;
            less.relations.pop_back();
            EXPECT_LE(exact_smatch(ta, less).matched, full);
        }
        if (!tb.attributes.empty()) {
            TripleSet less = tb;
            less.attributes.erase(less.attributes.begin());
            EXPECT_LE(exact_smatch(ta, less).matched, full);
        }
    }
}

TEST(CorpusSmatch, MicroAverage) {
    // (3,4,4) and (1,4,4): P = R = 4/8.
    AmrGraph a = g("(a / x :ARG0 (b / y))");      // 4 triples
    AmrGraph three = g("(a / x :ARG0 (b / z))");  // matches 3
    AmrGraph one = g("(a / p :ARG1 (b / q))");    // matches top only
    std::vector<std::pair<AmrGraph, AmrGraph>> pairs = {{a, three}, {a, one}};
    CorpusScore s = corpus_smatch(pairs);
    EXPECT_EQ(s.per_pair[0].matched, 3u);
    EXPECT_EQ(s.per_pair[1].matched, 1u);
    EXPECT_DOUBLE_EQ(s.aggregate.precision, 0.5);
    EXPECT_DOUBLE_EQ(s.aggregate.recall, 0.5);
    EXPECT_DOUBLE_EQ(s.aggregate.f1, 0.5);
}

TEST(CorpusSmatch, IdenticalPairsAndSingleton) {
    std::vector<std::pair<AmrGraph, AmrGraph>> same(5, {g(kPermit), g(kPermit)});
    EXPECT_EQ(corpus_smatch(same).aggregate.f1, 1.0);
    std::vector<std::pair<AmrGraph, AmrGraph>> one = {{g("(x / dog)"), g("(y / cat)")}};
    EXPECT_EQ(corpus_smatch(one).aggregate.f1, smatch_hill_climb(one[0].first, one[0].second).f1);
    EXPECT_THROW(corpus_smatch(std::span<const std::pair<AmrGraph, AmrGraph>>{}), std::invalid_argument);
}

TEST(CorpusSmatch, ParallelMatchesSerial) {
    std::mt19937_64 rng(5);
    testkit::RandomGraphSpec spec = small_spec();
    spec.max_vars = 14;
    std::vector<std::pair<AmrGraph, AmrGraph>> pairs;
    for (int i = 0; i < 40; ++i) pairs.emplace_back(testkit::random_graph(rng, spec), testkit::random_graph(rng, spec));
    SmatchOptions serial, parallel;
    parallel.workers = 4;
    CorpusScore s1 = corpus_smatch(pairs, serial), s2 = corpus_smatch(pairs, parallel);
    for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(s1.per_pair[i].matched, s2.per_pair[i].matched);
    EXPECT_EQ(s1.aggregate.f1, s2.aggregate.f1);
}
