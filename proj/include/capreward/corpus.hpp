#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capreward/kernels.hpp"

namespace capreward {

/// One evaluation JSONL line:
///   {"image_id", "candidate_caption" | "candidate_graph", "gt_graph",
///    "expanded_objects", "expanded_attributes", "qa": [{"q", "gold"}],
///    "initial_caption"?}
/// "gt_graph" may be a graph record or a caption string.
EvaluationRecord evaluation_record_from_json(const nlohmann::json& j, const ParserOptions& parser = {});

/// {"image_id", "q_index", "answer"}
QaAnswer qa_answer_from_json(const nlohmann::json& j);

/// A graph record, or a caption string that is parsed.
SceneGraph graph_or_caption(const nlohmann::json& j, const char* field, const ParserOptions& parser);

struct CorpusOptions {
  AggregateWeights weights;
  bool micro = false;  // pool numerators/denominators instead of averaging per image
  Execution execution = Execution::parallel;
};

struct CorpusReport {
  std::vector<MetricReport> images;
  MetricReport summary;
  std::optional<QaTally> qa;
  CorpusOptions options;
};

/// Per-image scores plus a corpus summary. With `answers` absent the QA
/// column is absent and the aggregate renormalizes over objects and
/// attributes. Absent per-image scores are left out of the averages.
CorpusReport evaluate_corpus(std::span<const EvaluationRecord> records,
                             const std::optional<std::vector<QaAnswer>>& answers,
                             const SimilarityBackend& backend, const CorpusOptions& options = {});

nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const CorpusReport& report);
std::string render_table(const CorpusReport& report);

}  // namespace capreward
