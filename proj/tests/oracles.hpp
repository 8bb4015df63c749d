#pragma once

// Test-only reference evaluators. They read graphs through the public
// accessors and otherwise share no code with the library: similarity,
// matching, pools and sums are rewritten with explicit loops.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "capreward/reward.hpp"
#include "capreward/scene_graph.hpp"

namespace oracle {

struct Graph {
  std::map<std::string, std::set<std::string>> objects;  // object -> attributes
  std::set<std::string> relations;                        // "subject predicate object"
};

inline Graph from(const capreward::SceneGraph& g) {
  Graph out;
  for (const auto& o : g.objects()) out.objects[o.canonical];
  for (const auto& b : g.attributes())
    for (const auto& a : b.attributes) out.objects[b.object.canonical].insert(a);
  for (const auto& r : g.relations()) out.relations.insert(r.subject.canonical + " " + r.predicate + " " + r.object.canonical);
  return out;
}

inline double exact(const std::string& a, const std::string& b) { return a == b ? 1.0 : 0.0; }

// Cosine of padded character n-gram count vectors. Counts are integers, so
// dot and squared norms are exact and only the final division rounds.
inline double ngram(const std::string& a, const std::string& b, std::size_t n = 3) {
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  auto grams = [n](const std::string& s) {
    const std::string padded = "#" + s + "#";
    std::vector<std::string> g;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) g.push_back(padded.substr(i, n));
    if (g.empty()) g.push_back(padded);
    std::sort(g.begin(), g.end());
    std::vector<std::pair<std::string, double>> counted;
    for (const auto& x : g) {
      if (!counted.empty() && counted.back().first == x)
        counted.back().second += 1.0;
      else
        counted.emplace_back(x, 1.0);
    }
    return counted;
  };
  const auto ga = grams(a), gb = grams(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [x, c] : ga) na += c * c;
  for (const auto& [x, c] : gb) nb += c * c;
  for (const auto& [x, c] : ga)
    for (const auto& [y, d] : gb)
      if (x == y) dot += c * d;
  return dot / std::sqrt(na * nb);
}

struct Sim {
  bool use_ngram = false;
  double operator()(const std::string& a, const std::string& b) const {
    return std::max(0.0, use_ngram ? ngram(a, b) : exact(a, b));
  }
};

// ---------------------------------------------------- attributes

// Attribute precision/recall, object-anchored. Anchor = most similar object
// on the other side, first in lexicographic order on ties.
inline std::pair<std::optional<double>, std::optional<double>> attribute_pr(const Graph& candidate,
                                                                            const Graph& gt,
                                                                            const Graph& expanded,
                                                                            const Sim& sim) {
  auto line = [&](const Graph& src, const Graph& dst) -> std::optional<double> {
    double num = 0.0, den = 0.0;
    if (dst.objects.empty()) return std::nullopt;
    for (const auto& [obj, attrs] : src.objects) {
      const std::string* anchor = nullptr;
      double best = -1.0;
      for (const auto& [other, unused] : dst.objects) {
        const double s = sim(obj, other);
        if (s > best) {
          best = s;
          anchor = &other;
        }
      }
      const auto& anchor_attrs = dst.objects.at(*anchor);
      double inner = 0.0;
      for (const auto& a : attrs) {
        double m = 0.0;
        for (const auto& b : anchor_attrs) m = std::max(m, sim(a, b));
        inner += m;
      }
      num += best * inner;
      den += best * static_cast<double>(attrs.size());
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
  };
  Graph pool = expanded;
  for (const auto& [o, attrs] : gt.objects) pool.objects[o].insert(attrs.begin(), attrs.end());
  return {line(candidate, pool), line(gt, candidate)};
}

// --------------------------------------------------------------- reward

struct CategoryResult {
  double bonus = 0.0;
  double penalty = 0.0;
  int punished_add = 0;
  int punished_remove = 0;
};

struct RewardResult {
  CategoryResult objects, attributes, relations;
  double total = 0.0;
};

inline RewardResult reward(const Graph& y1, const Graph& y2, const Graph& ref, const Sim& sim,
                           const capreward::RewardConfig& cfg) {
  const double mix = cfg.soft_hard_mix;
  auto bonus_of = [&](const std::vector<double>& added, const std::vector<double>& removed) {
    double soft = 0.0, hard = 0.0;
    for (double s : added) {
      soft += s - cfg.tau_add_soft;
      hard += s > cfg.tau_add_hard ? 1.0 : 0.0;
    }
    for (double s : removed) {
      soft += cfg.tau_remove_soft - s;
      hard += s < cfg.tau_remove_hard ? 1.0 : 0.0;
    }
    return mix * soft + (1.0 - mix) * hard;
  };
  auto best_of = [&](const std::string& q, const std::vector<std::string>& pool) {
    double m = 0.0;
    for (const auto& p : pool) m = std::max(m, sim(q, p));
    return m;
  };
  auto contains = [&](const std::string& q, const std::vector<std::string>& pool) {
    for (const auto& p : pool)
      if (sim(q, p) >= cfg.membership_threshold) return true;
    return false;
  };
  // Attributes of every object in g close enough to `object`.
  auto anchored = [&](const Graph& g, const std::string& object) {
    std::vector<std::string> pool;
    for (const auto& [o, attrs] : g.objects)
      if (sim(object, o) >= cfg.attr_object_anchor_threshold)
        for (const auto& a : attrs) pool.push_back(a);
    return pool;
  };
  auto keys = [](const Graph& g) {
    std::vector<std::string> k;
    for (const auto& [o, unused] : g.objects) k.push_back(o);
    return k;
  };

  RewardResult out;

  // Objects.
  std::vector<std::string> add_o, rem_o;
  for (const auto& [o, unused] : y2.objects)
    if (!y1.objects.count(o)) add_o.push_back(o);
  for (const auto& [o, unused] : y1.objects)
    if (!y2.objects.count(o)) rem_o.push_back(o);
  const auto ref_o = keys(ref);
  std::vector<std::string> union_o = keys(y1);
  union_o.insert(union_o.end(), ref_o.begin(), ref_o.end());
  std::vector<double> sa, sr;
  for (const auto& o : add_o) {
    sa.push_back(best_of(o, ref_o));
    if (!contains(o, union_o)) ++out.objects.punished_add;
  }
  for (const auto& o : rem_o) {
    sr.push_back(best_of(o, ref_o));
    if (contains(o, ref_o)) ++out.objects.punished_remove;
  }
  out.objects.bonus = bonus_of(sa, sr);

  // Attributes: an edit is an attribute with no close match on any close
  // object of the other caption.
  std::vector<std::pair<std::string, std::string>> add_a, rem_a;
  auto missing = [&](const Graph& from, const Graph& other, auto& sink) {
    for (const auto& [o, attrs] : from.objects)
      for (const auto& a : attrs)
        if (!contains(a, anchored(other, o))) sink.emplace_back(o, a);
  };
  missing(y2, y1, add_a);
  missing(y1, y2, rem_a);
  sa.clear();
  sr.clear();
  for (const auto& [o, a] : add_a) {
    sa.push_back(best_of(a, anchored(ref, o)));
    auto pool = anchored(y1, o);
    auto more = anchored(ref, o);
    pool.insert(pool.end(), more.begin(), more.end());
    if (!contains(a, pool)) ++out.attributes.punished_add;
  }
  for (const auto& [o, a] : rem_a) {
    sr.push_back(best_of(a, anchored(ref, o)));
    if (contains(a, anchored(ref, o))) ++out.attributes.punished_remove;
  }
  out.attributes.bonus = bonus_of(sa, sr);

  // Relations: bonus only.
  const std::vector<std::string> ref_r(ref.relations.begin(), ref.relations.end());
  sa.clear();
  sr.clear();
  for (const auto& r : y2.relations)
    if (!y1.relations.count(r)) sa.push_back(best_of(r, ref_r));
  for (const auto& r : y1.relations)
    if (!y2.relations.count(r)) sr.push_back(best_of(r, ref_r));
  out.relations.bonus = bonus_of(sa, sr);

  for (CategoryResult* c : {&out.objects, &out.attributes})
    c->penalty = cfg.punish_weight * (c->punished_add + c->punished_remove);
  const auto& w = cfg.category_weights;
  out.total = w.objects * (out.objects.bonus - out.objects.penalty) +
              w.attributes * (out.attributes.bonus - out.attributes.penalty) +
              w.relations * (out.relations.bonus - out.relations.penalty);
  return out;
}

}  // namespace oracle
