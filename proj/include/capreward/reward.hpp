#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capreward/scene_graph.hpp"
#include "capreward/similarity.hpp"

namespace capreward {

struct CategoryWeights {
  double objects = 1.0;
  double attributes = 1.0;
  double relations = 1.0;
};

struct RewardConfig {
  double tau_add_soft = 0.5;
  double tau_remove_soft = 0.5;
  double tau_add_hard = 0.85;
  double tau_remove_hard = 0.5;
  double membership_threshold = 0.85;
  double punish_weight = 1.0;
  CategoryWeights category_weights;
  // 1.0 = soft scores only, 0.0 = hard scores only.
  double soft_hard_mix = 0.5;
  double attr_object_anchor_threshold = 0.85;

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

template <typename T>
struct PerCategory {
  T objects{};
  T attributes{};
  T relations{};
};

struct AttributeEdit {
  std::string object;
  std::string attribute;
  friend bool operator==(const AttributeEdit&, const AttributeEdit&) = default;
};

/// Elements added (in y2 but not y1) and removed (in y1 but not y2).
struct EditSets {
  std::vector<std::string> added_objects;
  std::vector<std::string> removed_objects;
  std::vector<AttributeEdit> added_attributes;
  std::vector<AttributeEdit> removed_attributes;
  std::vector<std::string> added_relations;  // "subject predicate object"
  std::vector<std::string> removed_relations;

  bool empty() const;
};

struct BonusTerms {
  double soft_add = 0.0;     // sum over S_a of (s - tau_add_soft)
  double soft_remove = 0.0;  // sum over S_r of (tau_remove_soft - s)
  double hard_add = 0.0;     // count of s in S_a with s > tau_add_hard
  double hard_remove = 0.0;  // count of s in S_r with s < tau_remove_hard
  double bonus = 0.0;        // mix * soft + (1 - mix) * hard
};

struct PenaltyTerms {
  std::size_t punished_add = 0;
  std::size_t punished_remove = 0;
  double penalty = 0.0;  // punish_weight * (punished_add + punished_remove)
};

struct RewardBreakdown {
  PerCategory<BonusTerms> bonus;
  PerCategory<PenaltyTerms> penalty;  // relations are never punished
  CategoryWeights weights;
  double total = 0.0;

  // sum_c w_c * (bonus_c - penalty_c) from the stored fields.
  double recompute_total() const;
};

EditSets edit_sets(const SceneGraph& y1, const SceneGraph& y2, const SimilarityBackend& backend,
                   const RewardConfig& cfg);

PerCategory<BonusTerms> correctness_bonus(const EditSets& edits, const SceneGraph& ref,
                                          const SimilarityBackend& backend, const RewardConfig& cfg);

PerCategory<PenaltyTerms> mistake_punishment(const EditSets& edits, const SceneGraph& y1,
                                             const SceneGraph& ref, const SimilarityBackend& backend,
                                             const RewardConfig& cfg);

/// Correction reward R(y1, y2, ref).
RewardBreakdown total_reward(const SceneGraph& y1, const SceneGraph& y2, const SceneGraph& ref,
                             const SimilarityBackend& backend, const RewardConfig& cfg);

/// Metric-difference reward used as an ablation: c2 + c1 + beta * (c2 - c1).
double capture_style_reward(double c1, double c2, double shaping_beta);

nlohmann::json to_json(const RewardBreakdown& breakdown);

}  // namespace capreward
