#pragma once

// Random small graphs for property tests. The vocabulary is already in
// canonical form and full of near neighbours (ball/bell/bowl, red/reddish)
// so that n-gram similarities land on both sides of the thresholds.

#include <random>
#include <string>
#include <vector>

#include "capreward/metrics.hpp"
#include "capreward/scene_graph.hpp"

namespace gen {

inline const std::vector<std::string> kNouns = {"ball", "bell", "bowl", "table", "tablet", "cable",
                                                "cat",  "cart", "car",  "dog",   "dot"};
inline const std::vector<std::string> kAttributes = {"red",    "reddish", "blue",  "blur",
                                                     "wooden", "wood",    "large", "larger"};
inline const std::vector<std::string> kPredicates = {"on", "near", "next to", "under"};

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline const std::string& noun(Rng& rng) { return kNouns[pick(rng, kNouns.size())]; }
inline const std::string& attribute(Rng& rng) { return kAttributes[pick(rng, kAttributes.size())]; }

// Up to max_objects objects, up to max_attrs attributes each, up to
// max_relations relations among them.
inline capreward::SceneGraph graph(Rng& rng, std::size_t max_objects = 5, std::size_t max_attrs = 3,
                                   std::size_t max_relations = 3, std::size_t min_objects = 0) {
  capreward::SceneGraph g(capreward::GraphSource::ingested);
  const std::size_t n = min_objects + pick(rng, max_objects - min_objects + 1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(g.add_object(noun(rng)));
  if (names.empty()) return g;
  for (const auto& o : names) {
    const std::size_t k = pick(rng, max_attrs + 1);
    for (std::size_t j = 0; j < k; ++j) g.add_attribute(o, attribute(rng));
  }
  const std::size_t r = pick(rng, max_relations + 1);
  for (std::size_t j = 0; j < r; ++j)
    g.add_relation(names[pick(rng, names.size())], kPredicates[pick(rng, kPredicates.size())],
                   names[pick(rng, names.size())]);
  return g;
}

// A variant of `base`: some objects/attributes/relations dropped, some added.
inline capreward::SceneGraph perturb(Rng& rng, const capreward::SceneGraph& base) {
  capreward::SceneGraph g(capreward::GraphSource::ingested);
  for (const auto& o : base.objects())
    if (pick(rng, 4) != 0) g.add_object(o.canonical);
  for (const auto& b : base.attributes())
    if (g.has_object(b.object.canonical))
      for (const auto& a : b.attributes)
        if (pick(rng, 4) != 0) g.add_attribute(b.object.canonical, a);
  for (const auto& r : base.relations())
    if (g.has_object(r.subject.canonical) && g.has_object(r.object.canonical) && pick(rng, 3) != 0)
      g.add_relation(r.subject.canonical, r.predicate, r.object.canonical);
  const std::size_t extra = pick(rng, 3);
  for (std::size_t i = 0; i < extra; ++i) {
    const std::string o = g.add_object(noun(rng));
    if (pick(rng, 2) == 0) g.add_attribute(o, attribute(rng));
  }
  return g;
}

// Copy of `g` restricted to objects and their attributes.
inline capreward::SceneGraph objects_and_attributes(const capreward::SceneGraph& g) {
  capreward::SceneGraph out(capreward::GraphSource::ingested);
  for (const auto& o : g.objects()) out.add_object(o.canonical);
  for (const auto& b : g.attributes())
    for (const auto& a : b.attributes) out.add_attribute(b.object.canonical, a);
  return out;
}

// Reference record whose expanded pool is gt plus `expanded` extras.
inline capreward::ReferenceRecord reference(const capreward::SceneGraph& gt, const capreward::SceneGraph& expanded,
                                            std::string id = "img") {
  std::vector<std::string> objects;
  std::vector<std::pair<std::string, std::vector<std::string>>> attrs;
  for (const auto& o : expanded.objects()) objects.push_back(o.canonical);
  for (const auto& b : expanded.attributes()) attrs.emplace_back(b.object.canonical, b.attributes);
  return capreward::ReferenceRecord::make(std::move(id), gt, objects, attrs, {});
}

}  // namespace gen
