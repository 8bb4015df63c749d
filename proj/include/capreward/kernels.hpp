#pragma once

// Batch kernels. Each has a plain serial loop, kept as the reference the
// OpenMP version is tested against, and an OpenMP loop over records.
// Output order always follows input order.

#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <vector>

#include "capreward/metrics.hpp"
#include "capreward/reward.hpp"

namespace capreward {

enum class Execution { serial, parallel };

namespace detail {
void rethrow_first(std::vector<std::exception_ptr>& errors);
}

// Runs body(i) for i in [0, n). Exceptions are collected per index and the
// lowest-index one is rethrown after the loop, since none may escape an
// OpenMP region.
template <typename Body>
void parallel_for(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  detail::rethrow_first(errors);
}

struct CaptionTriple {
  SceneGraph y1;
  SceneGraph y2;
  SceneGraph ref;
};

struct EvaluationRecord {
  ReferenceRecord ref;
  SceneGraph candidate;
  std::optional<std::string> candidate_caption;
  std::optional<std::string> initial_caption;  // enables edit statistics
};

std::vector<RewardBreakdown> score_reward_batch(std::span<const CaptionTriple> triples,
                                                const SimilarityBackend& backend, const RewardConfig& cfg,
                                                Execution exec = Execution::parallel);

// `qa` is either empty or one (possibly absent) tally per record.
std::vector<MetricReport> score_image_batch(std::span<const EvaluationRecord> records,
                                            const SimilarityBackend& backend, const AggregateWeights& weights,
                                            std::span<const std::optional<QaTally>> qa,
                                            Execution exec = Execution::parallel);

MetricReport score_image(const EvaluationRecord& record, const SimilarityBackend& backend,
                         const AggregateWeights& weights, const std::optional<QaTally>& qa);

int max_threads();

}  // namespace capreward
