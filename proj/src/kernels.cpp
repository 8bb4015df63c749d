#include <exception>

#include <omp.h>

#include "capreward/kernels.hpp"

namespace capreward {

void detail::rethrow_first(std::vector<std::exception_ptr>& errors) {
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<RewardBreakdown> score_reward_batch(std::span<const CaptionTriple> triples,
                                                const SimilarityBackend& backend, const RewardConfig& cfg,
                                                Execution exec) {
  std::vector<RewardBreakdown> out(triples.size());
  parallel_for(triples.size(), exec, [&](std::size_t i) {
    out[i] = total_reward(triples[i].y1, triples[i].y2, triples[i].ref, backend, cfg);
  });
  return out;
}

MetricReport score_image(const EvaluationRecord& record, const SimilarityBackend& backend,
                         const AggregateWeights& weights, const std::optional<QaTally>& qa) {
  MetricReport report;
  report.image_id = record.ref.image_id;
  report.objects = object_scores(record.candidate, record.ref, backend);
  report.attributes = attribute_scores(record.candidate, record.ref, backend);
  if (qa) report.relation_qa = qa->accuracy();
  report.aggregate = aggregate_score(report.objects.f1, report.attributes.f1, report.relation_qa, weights);
  if (record.initial_caption && record.candidate_caption)
    report.edits = edit_stats(*record.initial_caption, *record.candidate_caption);
  return report;
}

std::vector<MetricReport> score_image_batch(std::span<const EvaluationRecord> records,
                                            const SimilarityBackend& backend, const AggregateWeights& weights,
                                            std::span<const std::optional<QaTally>> qa, Execution exec) {
  std::vector<MetricReport> out(records.size());
  parallel_for(records.size(), exec, [&](std::size_t i) {
    static const std::optional<QaTally> none;
    out[i] = score_image(records[i], backend, weights, qa.empty() ? none : qa[i]);
  });
  return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace capreward
