#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "capreward/error.hpp"
#include "capreward/similarity.hpp"

namespace capreward {

double SimilarityBackend::match(std::string_view a, std::string_view b) const {
  return std::max(0.0, similarity(a, b));
}

double ExactSimilarity::similarity(std::string_view a, std::string_view b) const { return a == b ? 1.0 : 0.0; }

CharNgramSimilarity::CharNgramSimilarity(std::size_t n) : n_(n) {
  if (n_ == 0) throw ConfigError("ngram", "n-gram size must be at least 1");
}

std::string CharNgramSimilarity::describe() const { return "ngram:" + std::to_string(n_); }

namespace {

std::map<std::string, double, std::less<>> ngram_counts(std::string_view phrase, std::size_t n) {
  std::map<std::string, double, std::less<>> counts;
  if (phrase.empty()) return counts;
  std::string padded = "#" + std::string(phrase) + "#";
  if (padded.size() < n) {
    counts[padded] += 1.0;
    return counts;
  }
  for (std::size_t i = 0; i + n <= padded.size(); ++i) counts[padded.substr(i, n)] += 1.0;
  return counts;
}

}  // namespace

double CharNgramSimilarity::similarity(std::string_view a, std::string_view b) const {
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  // Fixed argument order makes the floating-point result exactly symmetric.
  if (b < a) std::swap(a, b);
  auto ca = ngram_counts(a, n_);
  auto cb = ngram_counts(b, n_);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [gram, count] : ca) {
    na += count * count;
    if (auto it = cb.find(gram); it != cb.end()) dot += count * it->second;
  }
  for (const auto& [gram, count] : cb) nb += count * count;
  return dot / std::sqrt(na * nb);
}

VectorTableSimilarity::VectorTableSimilarity(std::shared_ptr<const VectorTable> table, MissPolicy policy,
                                             std::string source, std::size_t fallback_n)
    : table_(std::move(table)), policy_(policy), source_(std::move(source)), fallback_(fallback_n) {}

double VectorTableSimilarity::similarity(std::string_view a, std::string_view b) const {
  const auto* va = table_->find(a);
  const auto* vb = table_->find(b);
  if (va == nullptr || vb == nullptr) {
    if (policy_ == MissPolicy::error)
      throw MissingPhraseError("phrase '" + std::string(va == nullptr ? a : b) + "' not in vector table");
    misses_.fetch_add(1, std::memory_order_relaxed);
    return fallback_.similarity(a, b);
  }
  if (a == b) return 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < va->size(); ++i) dot += (*va)[i] * (*vb)[i];
  return std::clamp(dot, -1.0, 1.0);
}

std::unique_ptr<SimilarityBackend> make_backend(std::string_view descriptor, MissPolicy policy) {
  if (descriptor == "exact") return std::make_unique<ExactSimilarity>();
  if (descriptor == "ngram") return std::make_unique<CharNgramSimilarity>(3);
  if (descriptor.starts_with("ngram:")) {
    std::string n(descriptor.substr(6));
    std::size_t parsed = 0;
    int value = 0;
    try {
      value = std::stoi(n, &parsed);
    } catch (const std::exception&) {
      parsed = 0;
    }
    if (parsed != n.size() || value < 1) throw ConfigError("backend", "bad n-gram size '" + n + "'");
    return std::make_unique<CharNgramSimilarity>(static_cast<std::size_t>(value));
  }
  if (descriptor.starts_with("vectors:")) {
    std::string path(descriptor.substr(8));
    auto table = std::make_shared<const VectorTable>(VectorTable::load(path));
    return std::make_unique<VectorTableSimilarity>(std::move(table), policy, path);
  }
  throw ConfigError("backend", "unknown backend '" + std::string(descriptor) + "'");
}

BestMatch max_similarity(const SimilarityBackend& backend, std::string_view query,
                         std::span<const std::string> pool) {
  BestMatch best;
  for (const auto& candidate : pool) {
    double s = backend.match(query, candidate);
    if (!best.phrase || s > best.score || (s == best.score && candidate < *best.phrase)) {
      best.score = s;
      best.phrase = candidate;
    }
  }
  return best;
}

}  // namespace capreward
