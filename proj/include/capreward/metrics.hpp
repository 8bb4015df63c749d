#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "capreward/scene_graph.hpp"
#include "capreward/similarity.hpp"

namespace capreward {

struct QaItem {
  std::string question;
  std::string gold;
};

/// Ground truth for one image. `expanded` holds the enlarged object and
/// attribute pool used for precision; it always contains every object and
/// attribute of `gt_graph`.
struct ReferenceRecord {
  std::string image_id;
  SceneGraph gt_graph{GraphSource::ingested};
  SceneGraph expanded{GraphSource::ingested};
  std::vector<QaItem> qa_items;  // empty, or exactly kQuestionsPerImage

  static constexpr std::size_t kQuestionsPerImage = 5;

  // Merges gt objects/attributes into the expanded pool and checks the QA
  // count. Expanded attributes must name expanded (or gt) objects.
  static ReferenceRecord make(std::string image_id, SceneGraph gt_graph,
                              const std::vector<std::string>& expanded_objects,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>& expanded_attributes,
                              std::vector<QaItem> qa_items);

  std::vector<std::string> expanded_objects() const { return expanded.object_names(); }
};

// numerator / denominator, absent when the denominator is zero.
struct Ratio {
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> value() const;
};

struct PrecisionRecall {
  Ratio precision_parts;
  Ratio recall_parts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;  // present only when both P and R are
};

std::optional<double> f1_score(std::optional<double> precision, std::optional<double> recall);
PrecisionRecall make_precision_recall(Ratio precision, Ratio recall);

PrecisionRecall object_scores(const SceneGraph& candidate, const ReferenceRecord& ref,
                              const SimilarityBackend& backend);

// Object-anchored attribute precision/recall: each candidate object is
// paired with its most similar expanded object (recall: each gt object
// with its most similar candidate object) and only their attributes are
// compared, weighted by the object similarity.
PrecisionRecall attribute_scores(const SceneGraph& candidate, const ReferenceRecord& ref,
                                 const SimilarityBackend& backend);

struct QaAnswer {
  std::string image_id;
  std::size_t question_index = 0;
  std::string answer;
};

using AnswerMatcher = std::function<bool(std::string_view answer, std::string_view gold)>;

/// Lowercase, strip punctuation and articles, collapse whitespace.
std::string normalize_answer(std::string_view text);
bool default_answer_match(std::string_view answer, std::string_view gold);

struct QaTally {
  std::size_t matched = 0;
  std::size_t total = 0;
  std::optional<double> accuracy() const;
};

/// Matched answers over all gold questions of `refs`. Throws InputError for
/// answers naming an unknown image or question index, or duplicates.
QaTally relation_qa_tally(std::span<const QaAnswer> answers, std::span<const ReferenceRecord> refs,
                          const AnswerMatcher& matcher = default_answer_match);
std::optional<double> relation_qa_accuracy(std::span<const QaAnswer> answers, std::span<const ReferenceRecord> refs,
                                           const AnswerMatcher& matcher = default_answer_match);

struct AggregateWeights {
  double objects = 5.0;
  double attributes = 5.0;
  double relations = 2.0;
};

/// Weighted mean of the present components; absent if none are present.
std::optional<double> aggregate_score(std::optional<double> object_f1, std::optional<double> attribute_f1,
                                      std::optional<double> relation_qa, const AggregateWeights& weights = {});

struct EditStats {
  std::size_t inserted = 0;
  std::size_t deleted = 0;
  long long length_delta = 0;
};

/// Word-level LCS alignment on whitespace tokens.
EditStats edit_stats(std::string_view initial, std::string_view revised);

struct MetricReport {
  std::string image_id;
  PrecisionRecall objects;
  PrecisionRecall attributes;
  std::optional<double> relation_qa;
  std::optional<double> aggregate;
  std::optional<EditStats> edits;
};

}  // namespace capreward
