#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <vector>

#include "capreward/error.hpp"
#include "capreward/reward.hpp"

namespace capreward {

void RewardConfig::validate() const {
  auto unit = [](const char* key, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must lie in [0, 1], got " + std::to_string(v));
  };
  auto non_negative = [](const char* key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite value >= 0");
  };
  unit("tau_add_soft", tau_add_soft);
  unit("tau_remove_soft", tau_remove_soft);
  unit("tau_add_hard", tau_add_hard);
  unit("tau_remove_hard", tau_remove_hard);
  unit("membership_threshold", membership_threshold);
  unit("soft_hard_mix", soft_hard_mix);
  unit("attr_object_anchor_threshold", attr_object_anchor_threshold);
  non_negative("punish_weight", punish_weight);
  non_negative("category_weights", category_weights.objects);
  non_negative("category_weights", category_weights.attributes);
  non_negative("category_weights", category_weights.relations);
}

bool EditSets::empty() const {
  return added_objects.empty() && removed_objects.empty() && added_attributes.empty() &&
         removed_attributes.empty() && added_relations.empty() && removed_relations.empty();
}

namespace {

std::vector<std::string> difference(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  // Both inputs are sorted and unique.
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Attributes carried by objects of `graph` that are similar enough to `object`.
void append_anchored_attributes(const SceneGraph& graph, const std::string& object,
                                const SimilarityBackend& backend, double anchor,
                                std::vector<std::string>& pool) {
  for (const auto& binding : graph.attributes())
    if (backend.match(object, binding.object.canonical) >= anchor)
      pool.insert(pool.end(), binding.attributes.begin(), binding.attributes.end());
}

bool is_member(const SimilarityBackend& backend, const std::string& query, const std::vector<std::string>& pool,
               double threshold) {
  if (pool.empty()) return false;
  return max_similarity(backend, query, pool).score >= threshold;
}

std::vector<AttributeEdit> attributes_missing_from(const SceneGraph& from, const SceneGraph& other,
                                                   const SimilarityBackend& backend, const RewardConfig& cfg) {
  std::vector<AttributeEdit> out;
  for (const auto& binding : from.attributes()) {
    std::vector<std::string> pool;
    append_anchored_attributes(other, binding.object.canonical, backend, cfg.attr_object_anchor_threshold, pool);
    for (const auto& attr : binding.attributes)
      if (!is_member(backend, attr, pool, cfg.membership_threshold))
        out.push_back({binding.object.canonical, attr});
  }
  return out;
}

class BonusAccumulator {
 public:
  explicit BonusAccumulator(const RewardConfig& cfg) : cfg_(cfg) {}

  void added(double s) {
    terms_.soft_add += s - cfg_.tau_add_soft;
    if (s > cfg_.tau_add_hard) terms_.hard_add += 1.0;
  }
  void removed(double s) {
    terms_.soft_remove += cfg_.tau_remove_soft - s;
    if (s < cfg_.tau_remove_hard) terms_.hard_remove += 1.0;
  }
  BonusTerms finish() const {
    BonusTerms t = terms_;
    t.bonus = cfg_.soft_hard_mix * (t.soft_add + t.soft_remove) +
              (1.0 - cfg_.soft_hard_mix) * (t.hard_add + t.hard_remove);
    return t;
  }

 private:
  const RewardConfig& cfg_;
  BonusTerms terms_;
};

}  // namespace

EditSets edit_sets(const SceneGraph& y1, const SceneGraph& y2, const SimilarityBackend& backend,
                   const RewardConfig& cfg) {
  EditSets edits;
  const auto o1 = y1.object_names();
  const auto o2 = y2.object_names();
  edits.added_objects = difference(o2, o1);
  edits.removed_objects = difference(o1, o2);
  edits.added_attributes = attributes_missing_from(y2, y1, backend, cfg);
  edits.removed_attributes = attributes_missing_from(y1, y2, backend, cfg);
  const auto r1 = y1.relation_strings();
  const auto r2 = y2.relation_strings();
  edits.added_relations = difference(r2, r1);
  edits.removed_relations = difference(r1, r2);
  return edits;
}

PerCategory<BonusTerms> correctness_bonus(const EditSets& edits, const SceneGraph& ref,
                                          const SimilarityBackend& backend, const RewardConfig& cfg) {
  PerCategory<BonusTerms> out;

  const auto ref_objects = ref.object_names();
  BonusAccumulator objects(cfg);
  for (const auto& o : edits.added_objects) objects.added(max_similarity(backend, o, ref_objects).score);
  for (const auto& o : edits.removed_objects) objects.removed(max_similarity(backend, o, ref_objects).score);
  out.objects = objects.finish();

  BonusAccumulator attributes(cfg);
  auto attribute_score = [&](const AttributeEdit& e) {
    std::vector<std::string> pool;
    append_anchored_attributes(ref, e.object, backend, cfg.attr_object_anchor_threshold, pool);
    return max_similarity(backend, e.attribute, pool).score;
  };
  for (const auto& e : edits.added_attributes) attributes.added(attribute_score(e));
  for (const auto& e : edits.removed_attributes) attributes.removed(attribute_score(e));
  out.attributes = attributes.finish();

  const auto ref_relations = ref.relation_strings();
  BonusAccumulator relations(cfg);
  for (const auto& r : edits.added_relations) relations.added(max_similarity(backend, r, ref_relations).score);
  for (const auto& r : edits.removed_relations) relations.removed(max_similarity(backend, r, ref_relations).score);
  out.relations = relations.finish();
  return out;
}

PerCategory<PenaltyTerms> mistake_punishment(const EditSets& edits, const SceneGraph& y1, const SceneGraph& ref,
                                             const SimilarityBackend& backend, const RewardConfig& cfg) {
  PerCategory<PenaltyTerms> out;
  const double tau_m = cfg.membership_threshold;

  const auto ref_objects = ref.object_names();
  auto union_objects = y1.object_names();
  union_objects.insert(union_objects.end(), ref_objects.begin(), ref_objects.end());
  for (const auto& o : edits.added_objects)
    if (!is_member(backend, o, union_objects, tau_m)) ++out.objects.punished_add;
  for (const auto& o : edits.removed_objects)
    if (is_member(backend, o, ref_objects, tau_m)) ++out.objects.punished_remove;

  const double anchor = cfg.attr_object_anchor_threshold;
  for (const auto& e : edits.added_attributes) {
    std::vector<std::string> pool;
    append_anchored_attributes(y1, e.object, backend, anchor, pool);
    append_anchored_attributes(ref, e.object, backend, anchor, pool);
    if (!is_member(backend, e.attribute, pool, tau_m)) ++out.attributes.punished_add;
  }
  for (const auto& e : edits.removed_attributes) {
    std::vector<std::string> pool;
    append_anchored_attributes(ref, e.object, backend, anchor, pool);
    if (is_member(backend, e.attribute, pool, tau_m)) ++out.attributes.punished_remove;
  }

  for (PenaltyTerms* p : {&out.objects, &out.attributes})
    p->penalty = cfg.punish_weight * static_cast<double>(p->punished_add + p->punished_remove);
  return out;
}

double RewardBreakdown::recompute_total() const {
  return weights.objects * (bonus.objects.bonus - penalty.objects.penalty) +
         weights.attributes * (bonus.attributes.bonus - penalty.attributes.penalty) +
         weights.relations * (bonus.relations.bonus - penalty.relations.penalty);
}

RewardBreakdown total_reward(const SceneGraph& y1, const SceneGraph& y2, const SceneGraph& ref,
                             const SimilarityBackend& backend, const RewardConfig& cfg) {
  const EditSets edits = edit_sets(y1, y2, backend, cfg);
  RewardBreakdown out;
  out.bonus = correctness_bonus(edits, ref, backend, cfg);
  out.penalty = mistake_punishment(edits, y1, ref, backend, cfg);
  out.weights = cfg.category_weights;
  out.total = out.recompute_total();
  return out;
}

double capture_style_reward(double c1, double c2, double shaping_beta) {
  return c2 + c1 + shaping_beta * (c2 - c1);
}

nlohmann::json to_json(const RewardBreakdown& b) {
  auto category = [](const BonusTerms& bonus, const PenaltyTerms& penalty, double weight) {
    return nlohmann::json{{"soft_add", bonus.soft_add},
                          {"soft_remove", bonus.soft_remove},
                          {"hard_add", bonus.hard_add},
                          {"hard_remove", bonus.hard_remove},
                          {"bonus", bonus.bonus},
                          {"punish_add", penalty.punished_add},
                          {"punish_remove", penalty.punished_remove},
                          {"penalty", penalty.penalty},
                          {"weight", weight}};
  };
  return {{"objects", category(b.bonus.objects, b.penalty.objects, b.weights.objects)},
          {"attributes", category(b.bonus.attributes, b.penalty.attributes, b.weights.attributes)},
          {"relations", category(b.bonus.relations, b.penalty.relations, b.weights.relations)},
          {"total", b.total}};
}

}  // namespace capreward
