#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "capreward/vector_table.hpp"

namespace capreward {

enum class BackendKind { exact, char_ngram, vector_table };

/// Semantic similarity s(a, b) between two normalized phrases. Backends are
/// immutable after construction and safe to share across threads.
class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;

  // Raw score: [0, 1] for exact/char_ngram, [-1, 1] for vector tables.
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
  virtual BackendKind kind() const = 0;
  // "exact", "ngram:3", "vectors:<path>" -- the --backend spelling.
  virtual std::string describe() const = 0;

  // Score clamped at 0; this is what reward and metric formulas consume.
  double match(std::string_view a, std::string_view b) const;
};

class ExactSimilarity final : public SimilarityBackend {
 public:
  double similarity(std::string_view a, std::string_view b) const override;
  BackendKind kind() const override { return BackendKind::exact; }
  std::string describe() const override { return "exact"; }
};

// Cosine over character n-gram count vectors. Each phrase is padded with
// one '#' on both sides before n-grams are taken.
class CharNgramSimilarity final : public SimilarityBackend {
 public:
  explicit CharNgramSimilarity(std::size_t n = 3);
  double similarity(std::string_view a, std::string_view b) const override;
  BackendKind kind() const override { return BackendKind::char_ngram; }
  std::string describe() const override;
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
};

enum class MissPolicy { fallback, error };

class VectorTableSimilarity final : public SimilarityBackend {
 public:
  VectorTableSimilarity(std::shared_ptr<const VectorTable> table, MissPolicy policy = MissPolicy::fallback,
                        std::string source = {}, std::size_t fallback_n = 3);

  // Throws MissingPhraseError on a miss under MissPolicy::error.
  double similarity(std::string_view a, std::string_view b) const override;
  BackendKind kind() const override { return BackendKind::vector_table; }
  std::string describe() const override { return "vectors:" + source_; }

  // Lookups that fell back to n-grams so far.
  std::size_t misses() const { return misses_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<const VectorTable> table_;
  MissPolicy policy_;
  std::string source_;
  CharNgramSimilarity fallback_;
  mutable std::atomic<std::size_t> misses_{0};
};

/// Parse a --backend descriptor: "exact", "ngram", "ngram:N", "vectors:PATH".
std::unique_ptr<SimilarityBackend> make_backend(std::string_view descriptor,
                                                MissPolicy policy = MissPolicy::fallback);

struct BestMatch {
  double score = 0.0;
  std::optional<std::string> phrase;
};

/// Maximum clamped similarity of `query` against `pool`. Ties go to the
/// lexicographically smallest phrase; an empty pool gives (0, none).
BestMatch max_similarity(const SimilarityBackend& backend, std::string_view query,
                         std::span<const std::string> pool);

}  // namespace capreward
