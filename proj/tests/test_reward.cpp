#include <gtest/gtest.h>

#include "capreward/error.hpp"
#include "capreward/reward.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace capreward;

namespace {

SceneGraph objects(std::initializer_list<const char*> names) {
  SceneGraph g(GraphSource::ingested);
  for (auto n : names) g.add_object(n);
  return g;
}

const ExactSimilarity kExact;
const CharNgramSimilarity kNgram;

void expect_matches_oracle(const SceneGraph& y1, const SceneGraph& y2, const SceneGraph& ref,
                           const SimilarityBackend& backend, bool ngram, const RewardConfig& cfg) {
  const RewardBreakdown got = total_reward(y1, y2, ref, backend, cfg);
  const oracle::RewardResult want = oracle::reward(oracle::from(y1), oracle::from(y2), oracle::from(ref),
                                                   oracle::Sim{ngram}, cfg);
  EXPECT_NEAR(got.total, want.total, 1e-9);
  EXPECT_NEAR(got.bonus.objects.bonus, want.objects.bonus, 1e-9);
  EXPECT_NEAR(got.bonus.attributes.bonus, want.attributes.bonus, 1e-9);
  EXPECT_NEAR(got.bonus.relations.bonus, want.relations.bonus, 1e-9);
  EXPECT_EQ(got.penalty.objects.punished_add, static_cast<std::size_t>(want.objects.punished_add));
  EXPECT_EQ(got.penalty.objects.punished_remove, static_cast<std::size_t>(want.objects.punished_remove));
  EXPECT_EQ(got.penalty.attributes.punished_add, static_cast<std::size_t>(want.attributes.punished_add));
  EXPECT_EQ(got.penalty.attributes.punished_remove, static_cast<std::size_t>(want.attributes.punished_remove));
  EXPECT_EQ(got.penalty.relations.penalty, 0.0);
  EXPECT_NEAR(got.recompute_total(), got.total, 1e-12);
}

}  // namespace

TEST(EditSets, Examples) {
  RewardConfig cfg;
  auto e = edit_sets(objects({"ball"}), objects({"ball", "table"}), kExact, cfg);
  EXPECT_EQ(e.added_objects, std::vector<std::string>{"table"});
  EXPECT_TRUE(e.removed_objects.empty());

  SceneGraph g = objects({"ball"});
  g.add_attribute("ball", "red");
  EXPECT_TRUE(edit_sets(g, g, kExact, cfg).empty());

  cfg.attr_object_anchor_threshold = 1.0;
  SceneGraph y2 = g;
  y2.add_attribute("ball", "large");
  e = edit_sets(g, y2, kExact, cfg);
  ASSERT_EQ(e.added_attributes.size(), 1u);
  EXPECT_EQ(e.added_attributes[0], (AttributeEdit{"ball", "large"}));
  EXPECT_TRUE(e.removed_attributes.empty());
}

TEST(EditSets, AttributeMovedToDissimilarObjectIsAnEdit) {
  RewardConfig cfg;
  SceneGraph y1 = objects({"ball", "table"}), y2 = objects({"ball", "table"});
  y1.add_attribute("ball", "red");
  y2.add_attribute("table", "red");
  const auto e = edit_sets(y1, y2, kExact, cfg);
  EXPECT_EQ(e.added_attributes, (std::vector<AttributeEdit>{{"table", "red"}}));
  EXPECT_EQ(e.removed_attributes, (std::vector<AttributeEdit>{{"ball", "red"}}));
}

TEST(EditSets, AddedAndRemovedAreDisjoint) {
  gen::Rng rng(21);
  RewardConfig cfg;
  for (int i = 0; i < 300; ++i) {
    const auto y1 = gen::graph(rng), y2 = gen::perturb(rng, y1);
    const auto e = edit_sets(y1, y2, kNgram, cfg);
    for (const auto& a : e.added_objects)
      EXPECT_EQ(std::count(e.removed_objects.begin(), e.removed_objects.end(), a), 0);
    for (const auto& a : e.added_relations)
      EXPECT_EQ(std::count(e.removed_relations.begin(), e.removed_relations.end(), a), 0);
    for (const auto& a : e.added_attributes)
      EXPECT_EQ(std::count(e.removed_attributes.begin(), e.removed_attributes.end(), a), 0);
  }
}

TEST(Bonus, AddedObjectByHand) {
  RewardConfig cfg;  // tau_a 0.5, tau'_a 0.85, mix 0.5
  EditSets e;
  e.added_objects = {"table"};
  const auto b = correctness_bonus(e, objects({"ball", "table"}), kExact, cfg);
  EXPECT_DOUBLE_EQ(b.objects.soft_add, 0.5);
  EXPECT_DOUBLE_EQ(b.objects.hard_add, 1.0);
  EXPECT_DOUBLE_EQ(b.objects.bonus, 0.75);
}

TEST(Bonus, RemovedHallucinationPureSoft) {
  RewardConfig cfg;
  cfg.soft_hard_mix = 1.0;
  EditSets e;
  e.removed_objects = {"dragon"};
  const auto b = correctness_bonus(e, objects({"ball", "table"}), kExact, cfg);
  EXPECT_DOUBLE_EQ(b.objects.bonus, 0.5);
}

TEST(Bonus, EmptyEditsGiveZero) {
  const auto b = correctness_bonus(EditSets{}, objects({"ball"}), kExact, RewardConfig{});
  EXPECT_EQ(b.objects.bonus, 0.0);
  EXPECT_EQ(b.attributes.bonus, 0.0);
  EXPECT_EQ(b.relations.bonus, 0.0);
}

TEST(Bonus, RelationsMatchConcatenatedTriples) {
  SceneGraph ref = objects({"ball", "table"});
  ref.add_relation("ball", "on", "table");
  EditSets e;
  e.added_relations = {"ball on table"};
  e.removed_relations = {"ball under table"};
  RewardConfig cfg;
  cfg.soft_hard_mix = 1.0;
  const auto b = correctness_bonus(e, ref, kExact, cfg);
  EXPECT_DOUBLE_EQ(b.relations.soft_add, 0.5);
  EXPECT_DOUBLE_EQ(b.relations.soft_remove, 0.5);
}

TEST(Punishment, Examples) {
  RewardConfig cfg;
  EditSets added;
  added.added_objects = {"dragon"};
  auto p = mistake_punishment(added, objects({"ball"}), objects({"table"}), kExact, cfg);
  EXPECT_DOUBLE_EQ(p.objects.penalty, 1.0);

  EditSets removed;
  removed.removed_objects = {"ball"};
  p = mistake_punishment(removed, objects({"ball"}), objects({"ball", "table"}), kExact, cfg);
  EXPECT_DOUBLE_EQ(p.objects.penalty, 1.0);

  p = mistake_punishment(EditSets{}, objects({"ball"}), objects({"ball"}), kExact, cfg);
  EXPECT_EQ(p.objects.penalty + p.attributes.penalty + p.relations.penalty, 0.0);
}

TEST(Punishment, AddingSomethingAlreadyInY1IsNotAMistake) {
  // Only reachable through the attribute path: y2 restates an attribute of
  // a similar y1 object on a new object.
  RewardConfig cfg;
  cfg.attr_object_anchor_threshold = 0.0;
  EditSets e;
  e.added_attributes = {{"cart", "red"}};
  SceneGraph y1 = objects({"car"});
  y1.add_attribute("car", "red");
  const auto p = mistake_punishment(e, y1, objects({"ball"}), kExact, cfg);
  EXPECT_EQ(p.attributes.punished_add, 0u);
}

TEST(Punishment, RelationsAreNeverPunished) {
  SceneGraph y1 = objects({"ball", "table"});
  SceneGraph y2 = y1;
  y2.add_relation("ball", "under", "table");
  const auto r = total_reward(y1, y2, objects({"ball", "table"}), kExact, RewardConfig{});
  EXPECT_EQ(r.penalty.relations.penalty, 0.0);
  EXPECT_EQ(r.penalty.relations.punished_add, 0u);
}

TEST(Total, Examples) {
  RewardConfig cfg;
  const SceneGraph ref = objects({"ball", "table"});
  EXPECT_EQ(total_reward(ref, ref, ref, kExact, cfg).total, 0.0);
  EXPECT_GT(total_reward(objects({"ball"}), ref, ref, kExact, cfg).total, 0.0);
  EXPECT_LT(total_reward(ref, objects({"ball", "table", "dragon"}), ref, kExact, cfg).total, 0.0);
}

TEST(Total, IdentityIsZeroForAnyGraph) {
  gen::Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto g = gen::graph(rng), ref = gen::graph(rng);
    EXPECT_EQ(total_reward(g, g, ref, kNgram, RewardConfig{}).total, 0.0);
  }
}

TEST(Total, CategoryWeightLinearity) {
  gen::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto y1 = gen::graph(rng), y2 = gen::perturb(rng, y1), ref = gen::graph(rng);
    RewardConfig cfg;
    const auto base = total_reward(y1, y2, ref, kNgram, cfg);
    cfg.category_weights.objects = 3.5;
    const auto scaled = total_reward(y1, y2, ref, kNgram, cfg);
    const double obj = base.bonus.objects.bonus - base.penalty.objects.penalty;
    EXPECT_NEAR(scaled.total - base.total, 2.5 * obj, 1e-12);
  }
}

TEST(Total, MatchesExhaustiveOracle) {
  gen::Rng rng(99);
  for (int i = 0; i < 400; ++i) {
    const auto ref = gen::graph(rng);
    const auto y1 = gen::perturb(rng, ref);
    const auto y2 = i % 3 == 0 ? gen::graph(rng) : gen::perturb(rng, y1);
    RewardConfig cfg;
    if (i % 2) {
      cfg.soft_hard_mix = 0.3;
      cfg.attr_object_anchor_threshold = 0.4;
      cfg.membership_threshold = 0.6;
      cfg.punish_weight = 2.0;
    }
    expect_matches_oracle(y1, y2, ref, kExact, false, cfg);
    expect_matches_oracle(y1, y2, ref, kNgram, true, cfg);
  }
}

TEST(CaptureStyle, Examples) {
  EXPECT_DOUBLE_EQ(capture_style_reward(0.6, 0.6, 7.0), 1.2);
  EXPECT_DOUBLE_EQ(capture_style_reward(0.5, 0.7, 2.0), 1.6);
  EXPECT_EQ(capture_style_reward(0.0, 0.0, 5.0), 0.0);
}

TEST(Config, Validation) {
  RewardConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tau_add_soft = 1.5;
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "tau_add_soft");
  }
  cfg = RewardConfig{};
  cfg.punish_weight = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Json, BreakdownFields) {
  const auto r = total_reward(objects({"ball"}), objects({"ball", "table"}), objects({"ball", "table"}), kExact,
                              RewardConfig{});
  const auto j = to_json(r);
  EXPECT_DOUBLE_EQ(j["total"].get<double>(), r.total);
  EXPECT_DOUBLE_EQ(j["objects"]["bonus"].get<double>(), 0.75);
  EXPECT_EQ(j["objects"]["punish_add"].get<int>(), 0);
}
