#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "capreward/error.hpp"
#include "capreward/metrics.hpp"

namespace capreward {

std::optional<double> Ratio::value() const {
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

std::optional<double> f1_score(std::optional<double> precision, std::optional<double> recall) {
  if (!precision || !recall) return std::nullopt;
  const double sum = *precision + *recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * *precision * *recall / sum;
}

PrecisionRecall make_precision_recall(Ratio precision, Ratio recall) {
  PrecisionRecall out;
  out.precision_parts = precision;
  out.recall_parts = recall;
  out.precision = precision.value();
  out.recall = recall.value();
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

PrecisionRecall object_scores(const SceneGraph& candidate, const ReferenceRecord& ref,
                              const SimilarityBackend& backend) {
  const auto cand = candidate.object_names();
  const auto expanded = ref.expanded.object_names();
  const auto gt = ref.gt_graph.object_names();

  Ratio precision{0.0, static_cast<double>(cand.size())};
  for (const auto& o : cand) precision.numerator += max_similarity(backend, o, expanded).score;
  Ratio recall{0.0, static_cast<double>(gt.size())};
  for (const auto& o : gt) recall.numerator += max_similarity(backend, o, cand).score;
  return make_precision_recall(precision, recall);
}

namespace {

// One line of the anchored attribute formula: every object of `source` is
// anchored to its best match in `target`, and its attributes are scored
// against the anchor's attributes.
Ratio anchored_attribute_ratio(const SceneGraph& source, const SceneGraph& target,
                               const SimilarityBackend& backend) {
  const auto target_objects = target.object_names();
  Ratio r;
  if (target_objects.empty()) return r;
  for (const auto& obj : source.objects()) {
    auto attrs = source.attributes_of(obj.canonical);
    if (attrs.empty()) continue;
    const BestMatch anchor = max_similarity(backend, obj.canonical, target_objects);
    const auto anchor_attrs = target.attributes_of(*anchor.phrase);
    double inner = 0.0;
    for (const auto& a : attrs) inner += max_similarity(backend, a, anchor_attrs).score;
    r.numerator += anchor.score * inner;
    r.denominator += anchor.score * static_cast<double>(attrs.size());
  }
  return r;
}

}  // namespace

PrecisionRecall attribute_scores(const SceneGraph& candidate, const ReferenceRecord& ref,
                                 const SimilarityBackend& backend) {
  return make_precision_recall(anchored_attribute_ratio(candidate, ref.expanded, backend),
                               anchored_attribute_ratio(ref.gt_graph, candidate, backend));
}

std::string normalize_answer(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(u)));
  }
  std::istringstream in(cleaned);
  std::string word, out;
  while (in >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

bool default_answer_match(std::string_view answer, std::string_view gold) {
  return normalize_answer(answer) == normalize_answer(gold);
}

std::optional<double> QaTally::accuracy() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(matched) / static_cast<double>(total);
}

QaTally relation_qa_tally(std::span<const QaAnswer> answers, std::span<const ReferenceRecord> refs,
                          const AnswerMatcher& matcher) {
  std::map<std::string, const ReferenceRecord*, std::less<>> by_id;
  QaTally tally;
  for (const auto& r : refs) {
    by_id[r.image_id] = &r;
    tally.total += r.qa_items.size();
  }
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& a : answers) {
    auto it = by_id.find(a.image_id);
    if (it == by_id.end()) throw InputError("answer for unknown image '" + a.image_id + "'");
    const auto& items = it->second->qa_items;
    if (a.question_index >= items.size())
      throw InputError("answer for image '" + a.image_id + "' has question index " +
                       std::to_string(a.question_index) + " but the image has " +
                       std::to_string(items.size()) + " questions");
    if (!seen.emplace(a.image_id, a.question_index).second)
      throw InputError("duplicate answer for image '" + a.image_id + "' question " +
                       std::to_string(a.question_index));
    if (matcher(a.answer, items[a.question_index].gold)) ++tally.matched;
  }
  return tally;
}

std::optional<double> relation_qa_accuracy(std::span<const QaAnswer> answers, std::span<const ReferenceRecord> refs,
                                           const AnswerMatcher& matcher) {
  return relation_qa_tally(answers, refs, matcher).accuracy();
}

std::optional<double> aggregate_score(std::optional<double> object_f1, std::optional<double> attribute_f1,
                                      std::optional<double> relation_qa, const AggregateWeights& weights) {
  double sum = 0.0, weight = 0.0;
  auto add = [&](std::optional<double> v, double w) {
    if (!v) return;
    sum += w * *v;
    weight += w;
  };
  add(object_f1, weights.objects);
  add(attribute_f1, weights.attributes);
  add(relation_qa, weights.relations);
  if (weight == 0.0) return std::nullopt;
  return sum / weight;
}

EditStats edit_stats(std::string_view initial, std::string_view revised) {
  auto split = [](std::string_view text) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(text)};
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
  };
  const auto a = split(initial);
  const auto b = split(revised);
  // lcs[i][j] = LCS length of a[i..] and b[j..]
  std::vector<std::vector<std::size_t>> lcs(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;)
    for (std::size_t j = b.size(); j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  const std::size_t common = lcs[0][0];
  return EditStats{b.size() - common, a.size() - common,
                   static_cast<long long>(b.size()) - static_cast<long long>(a.size())};
}

}  // namespace capreward
