#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "capreward/error.hpp"
#include "capreward/similarity.hpp"
#include "capreward/vector_table.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace capreward;

TEST(Exact, Examples) {
  ExactSimilarity s;
  EXPECT_EQ(s.similarity("red ball", "red ball"), 1.0);
  EXPECT_EQ(s.similarity("red ball", "blue car"), 0.0);
}

TEST(CharNgram, CatCartByHand) {
  // Padded trigrams: cat -> {#ca, cat, at#}, cart -> {#ca, car, art, rt#}.
  // One shared gram: 1 / sqrt(3 * 4).
  CharNgramSimilarity s(3);
  EXPECT_NEAR(s.similarity("cat", "cart"), 1.0 / std::sqrt(12.0), 1e-15);
}

TEST(CharNgram, RepeatedGramsCountTwice) {
  // aaaa -> {#aa, aaa x2, aa#}; aaa -> {#aa, aaa, aa#}: dot 4, squared norms 6 and 3.
  CharNgramSimilarity s(3);
  EXPECT_NEAR(s.similarity("aaaa", "aaa"), 4.0 / std::sqrt(18.0), 1e-15);
}

TEST(CharNgram, ShortPhrasesAndEmpty) {
  CharNgramSimilarity s(3);
  EXPECT_EQ(s.similarity("a", "a"), 1.0);
  EXPECT_EQ(s.similarity("", "ball"), 0.0);
  EXPECT_GE(s.similarity("a", "b"), 0.0);
  CharNgramSimilarity s5(5);
  EXPECT_EQ(s5.similarity("ab", "ab"), 1.0);
}

TEST(CharNgram, MatchesOracleOnVocabulary) {
  CharNgramSimilarity s(3);
  std::vector<std::string> words = gen::kNouns;
  words.insert(words.end(), gen::kAttributes.begin(), gen::kAttributes.end());
  for (const auto& a : words)
    for (const auto& b : words) EXPECT_EQ(s.similarity(a, b), oracle::ngram(a, b)) << a << " / " << b;
}

TEST(Properties, SymmetryAndSelfSimilarity) {
  gen::Rng rng(5);
  const std::string alphabet = "abcde fgh";
  ExactSimilarity exact;
  CharNgramSimilarity ngram2(2), ngram3(3);
  for (int i = 0; i < 2000; ++i) {
    std::string a, b;
    const auto la = 1 + rng() % 9, lb = 1 + rng() % 9;
    for (std::size_t k = 0; k < la; ++k) a += alphabet[rng() % alphabet.size()];
    for (std::size_t k = 0; k < lb; ++k) b += alphabet[rng() % alphabet.size()];
    for (const SimilarityBackend* s : {static_cast<const SimilarityBackend*>(&exact),
                                       static_cast<const SimilarityBackend*>(&ngram2),
                                       static_cast<const SimilarityBackend*>(&ngram3)}) {
      EXPECT_EQ(s->similarity(a, b), s->similarity(b, a));
      EXPECT_EQ(s->similarity(a, a), 1.0);
      const double v = s->similarity(a, b);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-15);
    }
  }
}

TEST(MaxSimilarity, Examples) {
  ExactSimilarity s;
  const std::vector<std::string> pool{"ball", "table"};
  auto m = max_similarity(s, "ball", pool);
  EXPECT_EQ(m.score, 1.0);
  EXPECT_EQ(m.phrase, "ball");

  m = max_similarity(s, "ball", {});
  EXPECT_EQ(m.score, 0.0);
  EXPECT_FALSE(m.phrase.has_value());

  const std::vector<std::string> animals{"cat", "cow"};
  m = max_similarity(s, "dog", animals);
  EXPECT_EQ(m.score, 0.0);
  EXPECT_EQ(m.phrase, "cat");
}

TEST(MaxSimilarity, TieGoesToSmallestEvenIfPoolUnsorted) {
  ExactSimilarity s;
  const std::vector<std::string> pool{"zebra", "cow", "cat"};
  EXPECT_EQ(max_similarity(s, "dog", pool).phrase, "cat");
}

TEST(MaxSimilarity, QueryInPoolAndMonotonicity) {
  gen::Rng rng(9);
  ExactSimilarity exact;
  CharNgramSimilarity ngram;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> pool;
    const auto n = rng() % 5;
    for (std::size_t k = 0; k < n; ++k) pool.push_back(gen::noun(rng));
    const std::string q = gen::noun(rng);
    const double before = max_similarity(ngram, q, pool).score;
    auto bigger = pool;
    bigger.push_back(gen::noun(rng));
    EXPECT_GE(max_similarity(ngram, q, bigger).score, before);
    bigger.push_back(q);
    const auto m = max_similarity(exact, q, bigger);
    EXPECT_EQ(m.score, 1.0);
    EXPECT_EQ(m.phrase, q);
  }
}

TEST(VectorBackend, DotProductMissAndClamp) {
  auto table = std::make_shared<VectorTable>(2);
  const std::vector<double> east{1.0, 0.0}, north{0.0, 3.0}, west{-2.0, 0.0}, diag{1.0, 1.0};
  table->insert("east", east);
  table->insert("north", north);
  table->insert("west", west);
  table->insert("north east", diag);
  VectorTableSimilarity s(table, MissPolicy::fallback, "mem");
  EXPECT_NEAR(s.similarity("east", "north east"), std::sqrt(0.5), 1e-12);
  EXPECT_EQ(s.similarity("east", "north"), 0.0);
  EXPECT_NEAR(s.similarity("east", "west"), -1.0, 1e-12);
  EXPECT_EQ(s.match("east", "west"), 0.0);
  EXPECT_NEAR(s.similarity("north", "north"), 1.0, 1e-9);
  EXPECT_EQ(s.similarity("east", "west"), s.similarity("west", "east"));

  EXPECT_EQ(s.misses(), 0u);
  EXPECT_EQ(s.similarity("cat", "cart"), CharNgramSimilarity(3).similarity("cat", "cart"));
  EXPECT_EQ(s.misses(), 1u);

  VectorTableSimilarity strict(table, MissPolicy::error, "mem");
  EXPECT_THROW(strict.similarity("cat", "east"), MissingPhraseError);
}

TEST(MakeBackend, Descriptors) {
  EXPECT_EQ(make_backend("exact")->kind(), BackendKind::exact);
  EXPECT_EQ(make_backend("ngram")->describe(), "ngram:3");
  EXPECT_EQ(make_backend("ngram:4")->describe(), "ngram:4");
  EXPECT_THROW(make_backend("ngram:0"), ConfigError);
  EXPECT_THROW(make_backend("ngram:x"), ConfigError);
  EXPECT_THROW(make_backend("bert"), ConfigError);
}
