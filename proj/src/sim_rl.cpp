#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "capreward/error.hpp"
#include "capreward/sim_rl.hpp"

namespace capreward {

using nlohmann::json;

std::string SceneElement::key() const {
  switch (kind) {
    case ElementKind::object:
      return "o|" + subject;
    case ElementKind::attribute:
      return "a|" + subject + "|" + detail;
    case ElementKind::relation:
      return "r|" + subject + "|" + detail + "|" + object;
  }
  return {};
}

std::vector<SceneElement> elements_of(const SceneGraph& graph) {
  std::vector<SceneElement> out;
  for (const auto& o : graph.objects()) out.push_back({ElementKind::object, o.canonical, {}, {}});
  for (const auto& b : graph.attributes())
    for (const auto& a : b.attributes) out.push_back({ElementKind::attribute, b.object.canonical, a, {}});
  for (const auto& r : graph.relations())
    out.push_back({ElementKind::relation, r.subject.canonical, r.predicate, r.object.canonical});
  return out;
}

SceneGraph realize(std::span<const SceneElement> elements) {
  SceneGraph g(GraphSource::ingested);
  for (const auto& e : elements) {
    g.add_object(e.subject);
    if (e.kind == ElementKind::relation) g.add_object(e.object);
  }
  for (const auto& e : elements) {
    if (e.kind == ElementKind::attribute) g.add_attribute(e.subject, e.detail);
    if (e.kind == ElementKind::relation) g.add_relation(e.subject, e.detail, e.object);
  }
  return g;
}

SyntheticScene SyntheticScene::make(SceneGraph truth, std::vector<SceneElement> distractors) {
  std::set<std::string> truth_keys;
  for (const auto& e : elements_of(truth)) truth_keys.insert(e.key());
  std::set<std::string> seen;
  for (auto& d : distractors) {
    d.subject = normalize_phrase(d.subject);
    if (d.kind == ElementKind::attribute) d.detail = normalize_phrase(d.detail);
    if (d.kind == ElementKind::relation) {
      d.detail = normalize_predicate(d.detail);
      d.object = normalize_phrase(d.object);
    }
    if (d.subject.empty() || (d.kind != ElementKind::object && d.detail.empty()) ||
        (d.kind == ElementKind::relation && d.object.empty()))
      throw InputError("distractor with an empty phrase");
    if (truth_keys.contains(d.key())) throw InputError("distractor '" + d.key() + "' is also a truth element");
    if (!seen.insert(d.key()).second) throw InputError("duplicate distractor '" + d.key() + "'");
  }
  SyntheticScene scene;
  scene.truth = std::move(truth);
  scene.distractors = std::move(distractors);
  return scene;
}

SyntheticScene SyntheticScene::from_json(const json& j) {
  if (!j.is_object() || !j.contains("truth")) throw SchemaError("truth", "missing field");
  SceneGraph truth = ingest_graph(j["truth"]);
  std::vector<SceneElement> distractors;
  if (auto it = j.find("distractors"); it != j.end()) {
    const json& d = *it;
    if (!d.is_object()) throw SchemaError("distractors", "expected {objects, attributes, relations}");
    const json objects = d.value("objects", json::array());
    const json attributes = d.value("attributes", json::object());
    const json relations = d.value("relations", json::array());
    if (!objects.is_array() || !attributes.is_object() || !relations.is_array())
      throw SchemaError("distractors", "expected {objects: [], attributes: {}, relations: []}");
    for (const auto& o : objects) {
      if (!o.is_string()) throw SchemaError("distractors.objects", "expected strings");
      distractors.push_back({ElementKind::object, o.get<std::string>(), {}, {}});
    }
    for (const auto& [obj, attrs] : attributes.items()) {
      if (!attrs.is_array()) throw SchemaError("distractors.attributes", "expected string arrays");
      for (const auto& a : attrs) {
        if (!a.is_string()) throw SchemaError("distractors.attributes", "expected string arrays");
        distractors.push_back({ElementKind::attribute, obj, a.get<std::string>(), {}});
      }
    }
    for (const auto& r : relations) {
      if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() || !r[2].is_string())
        throw SchemaError("distractors.relations", "expected [subject, predicate, object]");
      distractors.push_back(
          {ElementKind::relation, r[0].get<std::string>(), r[1].get<std::string>(), r[2].get<std::string>()});
    }
  }
  return make(std::move(truth), std::move(distractors));
}

json SyntheticScene::to_json() const {
  json objects = json::array(), attributes = json::object(), relations = json::array();
  for (const auto& d : distractors) {
    switch (d.kind) {
      case ElementKind::object:
        objects.push_back(d.subject);
        break;
      case ElementKind::attribute:
        attributes[d.subject].push_back(d.detail);
        break;
      case ElementKind::relation:
        relations.push_back({d.subject, d.detail, d.object});
        break;
    }
  }
  return {{"truth", serialize_graph(truth)},
          {"distractors", {{"objects", objects}, {"attributes", attributes}, {"relations", relations}}}};
}

std::vector<SyntheticScene> make_synthetic_scenes(std::size_t count, std::size_t truth_elements,
                                                  std::size_t distractors, std::uint64_t seed) {
  static const std::vector<std::string> nouns = {
      "ball",  "table", "dog",   "cat",   "chair", "lamp",  "cup",   "plate", "tree",  "car",
      "bench", "kite",  "horse", "clock", "vase",  "book",  "phone", "bike",  "fence", "boat"};
  static const std::vector<std::string> adjectives = {"red",   "blue",   "wooden", "large", "small",
                                                      "green", "yellow", "old",    "round", "shiny"};
  if (truth_elements == 0) throw InputError("a synthetic scene needs at least one truth element");
  SimRng rng(seed);
  std::vector<SyntheticScene> scenes;
  for (std::size_t s = 0; s < count; ++s) {
    const std::string tag = std::to_string(s);
    std::vector<std::string> pool = nouns;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> adj = adjectives;
    std::shuffle(adj.begin(), adj.end(), rng);

    const std::size_t n_attr = truth_elements / 4;
    const std::size_t n_obj = truth_elements - n_attr;
    SceneGraph truth(GraphSource::ingested);
    std::size_t next_noun = 0, next_adj = 0;
    std::vector<std::string> objs;
    for (std::size_t i = 0; i < n_obj; ++i) objs.push_back(truth.add_object(pool[next_noun++ % pool.size()] + tag));
    for (std::size_t i = 0; i < n_attr; ++i) truth.add_attribute(objs[i % objs.size()], adj[next_adj++ % adj.size()]);

    std::vector<SceneElement> fakes;
    for (std::size_t i = 0; i < distractors; ++i) {
      if (i % 2 == 0)
        fakes.push_back({ElementKind::object, pool[next_noun++ % pool.size()] + tag, {}, {}});
      else
        fakes.push_back({ElementKind::attribute, objs[i % objs.size()], adj[next_adj++ % adj.size()], {}});
    }
    scenes.push_back(SyntheticScene::make(std::move(truth), std::move(fakes)));
  }
  return scenes;
}

void TrainConfig::validate() const {
  if (!(kl_beta >= 0.0) || !std::isfinite(kl_beta)) throw ConfigError("kl_beta", "must be finite and >= 0");
  // lr = 0 is accepted: it freezes the policy, which is how flat traces are produced.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate", "must be finite and >= 0");
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature", "must be > 0");
  if (!std::isfinite(init_edit_logit)) throw ConfigError("init_edit_logit", "must be finite");
  reward.validate();
}

std::vector<double> SimPolicy::flatten() const {
  std::vector<double> flat;
  flat.reserve(3 * size());
  flat.insert(flat.end(), turn1.begin(), turn1.end());
  flat.insert(flat.end(), turn2_add.begin(), turn2_add.end());
  flat.insert(flat.end(), turn2_remove.begin(), turn2_remove.end());
  return flat;
}

void SimPolicy::assign(std::span<const double> flat) {
  const std::size_t k = size();
  if (flat.size() != 3 * k) throw InputError("parameter vector has the wrong length");
  std::copy_n(flat.begin(), k, turn1.begin());
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(k), k, turn2_add.begin());
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(2 * k), k, turn2_remove.begin());
}

json SimPolicy::to_json() const {
  json elements = json::array();
  for (std::size_t k = 0; k < size(); ++k)
    elements.push_back({{"element", keys[k]},
                        {"turn1", turn1[k]},
                        {"turn2_add", turn2_add[k]},
                        {"turn2_remove", turn2_remove[k]}});
  return {{"elements", elements}};
}

SimEnvironment::SimEnvironment(std::vector<SyntheticScene> scenes) : scenes_(std::move(scenes)) {
  if (scenes_.empty()) throw InputError("the simulator needs at least one scene");
  std::map<std::string, std::size_t> index;
  for (const auto& scene : scenes_) {
    auto universe = elements_of(scene.truth);
    std::vector<char> truth(universe.size(), 1);
    universe.insert(universe.end(), scene.distractors.begin(), scene.distractors.end());
    truth.resize(universe.size(), 0);
    std::vector<std::size_t> ids;
    for (const auto& e : universe) {
      auto [it, inserted] = index.emplace(e.key(), keys_.size());
      if (inserted) keys_.push_back(e.key());
      ids.push_back(it->second);
    }
    universe_.push_back(std::move(universe));
    indices_.push_back(std::move(ids));
    truth_.push_back(std::move(truth));
  }
}

SimPolicy SimEnvironment::initial_policy(double inclusion_logit, double edit_logit) const {
  SimPolicy p;
  p.keys = keys_;
  p.turn1.assign(keys_.size(), inclusion_logit);
  p.turn2_add.assign(keys_.size(), edit_logit);
  p.turn2_remove.assign(keys_.size(), edit_logit);
  return p;
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log sigmoid(x) and log(1 - sigmoid(x)) = log sigmoid(-x), without overflow.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double bernoulli_logmass(bool decision, double z) { return decision ? log_sigmoid(z) : log_sigmoid(-z); }

double uniform01(SimRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Turn-2 edit logit (before temperature) for element k given turn 1.
double edit_logit(const SimPolicy& p, std::size_t k, bool included) {
  return included ? p.turn2_remove[k] - p.turn1[k] : p.turn1[k] + p.turn2_add[k];
}

SceneGraph select(std::span<const SceneElement> universe, const std::vector<char>& mask) {
  std::vector<SceneElement> chosen;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (mask[i]) chosen.push_back(universe[i]);
  return realize(chosen);
}

}  // namespace

SimRng make_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t sample) {
  return SimRng(splitmix64(splitmix64(splitmix64(seed) ^ step) ^ sample));
}

Rollout rollout(const SimEnvironment& env, const SimPolicy& policy, std::size_t scene, SimRng& rng,
                double temperature) {
  const auto universe = env.universe(scene);
  const auto ids = env.indices(scene);
  Rollout r;
  r.scene = scene;
  r.included.resize(universe.size());
  r.edited.resize(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const double z = policy.turn1[ids[i]] / temperature;
    r.included[i] = uniform01(rng) < sigmoid(z);
    r.logprob1 += bernoulli_logmass(r.included[i], z);
  }
  std::vector<char> final_mask(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const double z = edit_logit(policy, ids[i], r.included[i]) / temperature;
    r.edited[i] = uniform01(rng) < sigmoid(z);
    r.logprob2 += bernoulli_logmass(r.edited[i], z);
    final_mask[i] = r.included[i] != r.edited[i];
  }
  r.y1 = select(universe, r.included);
  r.y2 = select(universe, final_mask);
  return r;
}

double turn1_logprob(const SimEnvironment& env, const SimPolicy& policy, const Rollout& r, double temperature) {
  const auto ids = env.indices(r.scene);
  double lp = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) lp += bernoulli_logmass(r.included[i], policy.turn1[ids[i]] / temperature);
  return lp;
}

double turn2_logprob(const SimEnvironment& env, const SimPolicy& policy, const Rollout& r, double temperature) {
  const auto ids = env.indices(r.scene);
  double lp = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    lp += bernoulli_logmass(r.edited[i], edit_logit(policy, ids[i], r.included[i]) / temperature);
  return lp;
}

LossGradient loss_and_gradient(const SimEnvironment& env, const SimPolicy& policy, const SimPolicy& ref_policy,
                               std::span<const Rollout> rollouts, std::span<const double> rewards,
                               const TrainConfig& cfg) {
  if (rollouts.size() != rewards.size()) throw InputError("one reward per rollout is required");
  const std::size_t k = policy.size();
  const double t = cfg.temperature;
  LossGradient out;
  out.gradient.keys = policy.keys;
  out.gradient.turn1.assign(k, 0.0);
  out.gradient.turn2_add.assign(k, 0.0);
  out.gradient.turn2_remove.assign(k, 0.0);
  if (rollouts.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(rollouts.size());
  auto& g = out.gradient;

  for (std::size_t n = 0; n < rollouts.size(); ++n) {
    const Rollout& r = rollouts[n];
    const auto ids = env.indices(r.scene);
    const double reward = rewards[n];

    // -R * log pi(y2 | y1); d/dz log Bern(e; sigmoid(z/T)) = (e - p) / T
    double lp2 = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t id = ids[i];
      const double z = edit_logit(policy, id, r.included[i]) / t;
      lp2 += bernoulli_logmass(r.edited[i], z);
      const double dz = -reward * ((r.edited[i] ? 1.0 : 0.0) - sigmoid(z)) / t * inv_n;
      if (r.included[i]) {
        g.turn2_remove[id] += dz;
        g.turn1[id] -= dz;
      } else {
        g.turn2_add[id] += dz;
        g.turn1[id] += dz;
      }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t id = ids[i];
      const double z = policy.turn1[id] / t;
      const double z_ref = ref_policy.turn1[id] / t;
      const double p = sigmoid(z);
      if (cfg.kl_estimator == KlEstimator::sample) {
        kl += bernoulli_logmass(r.included[i], z) - bernoulli_logmass(r.included[i], z_ref);
        g.turn1[id] += cfg.kl_beta * ((r.included[i] ? 1.0 : 0.0) - p) / t * inv_n;
      } else {
        kl += p * (log_sigmoid(z) - log_sigmoid(z_ref)) + (1.0 - p) * (log_sigmoid(-z) - log_sigmoid(-z_ref));
        // dKL/dz = (logit p - logit q) * p (1 - p)
        g.turn1[id] += cfg.kl_beta * (z - z_ref) * p * (1.0 - p) / t * inv_n;
      }
    }
    out.loss += (-reward * lp2 + cfg.kl_beta * kl) * inv_n;
  }
  return out;
}

double element_f1(const SceneGraph& candidate, const SceneGraph& truth) {
  std::set<std::string> c, t;
  for (const auto& e : elements_of(candidate)) c.insert(e.key());
  for (const auto& e : elements_of(truth)) t.insert(e.key());
  if (c.empty() && t.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& key : c) common += t.contains(key);
  return 2.0 * static_cast<double>(common) / static_cast<double>(c.size() + t.size());
}

TrainResult train(const SimEnvironment& env, const TrainConfig& cfg, const SimilarityBackend& backend,
                  Execution exec) {
  cfg.validate();
  TrainResult result;
  result.policy = env.initial_policy(0.0, cfg.init_edit_logit);
  result.reference = result.policy;
  SimPolicy& policy = result.policy;

  const std::size_t n = env.scene_count() * cfg.batch_size;
  std::vector<Rollout> rollouts(n);
  std::vector<double> rewards(n), f1_first(n), f1_second(n);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    parallel_for(n, exec, [&](std::size_t i) {
      const std::size_t scene = i / cfg.batch_size;
      SimRng rng = make_rng(cfg.rng_seed, step, i);
      rollouts[i] = rollout(env, policy, scene, rng, cfg.temperature);
      const SceneGraph& truth = env.scene(scene).truth;
      rewards[i] = total_reward(rollouts[i].y1, rollouts[i].y2, truth, backend, cfg.reward).total;
      f1_first[i] = element_f1(rollouts[i].y1, truth);
      f1_second[i] = element_f1(rollouts[i].y2, truth);
    });

    TraceRow row;
    row.step = step;
    for (std::size_t i = 0; i < n; ++i) {
      row.mean_reward += rewards[i];
      row.f1_turn1 += f1_first[i];
      row.f1_turn2 += f1_second[i];
    }
    row.mean_reward /= static_cast<double>(n);
    row.f1_turn1 /= static_cast<double>(n);
    row.f1_turn2 /= static_cast<double>(n);
    result.trace.push_back(row);

    const LossGradient lg = loss_and_gradient(env, policy, result.reference, rollouts, rewards, cfg);
    if (!std::isfinite(lg.loss))
      throw DivergenceError("non-finite loss at step " + std::to_string(step));
    auto params = policy.flatten();
    const auto grad = lg.gradient.flatten();
    for (std::size_t j = 0; j < params.size(); ++j) {
      params[j] -= cfg.learning_rate * grad[j];
      if (!std::isfinite(params[j]))
        throw DivergenceError("non-finite parameter after step " + std::to_string(step));
    }
    policy.assign(params);
  }
  return result;
}

std::string trace_csv(std::span<const TraceRow> trace) {
  std::string out = "step,mean_reward,f1_turn1,f1_turn2\n";
  char buf[128];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", row.step, row.mean_reward, row.f1_turn1,
                  row.f1_turn2);
    out += buf;
  }
  return out;
}

double turn1_distance(const SimPolicy& a, const SimPolicy& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.turn1.size(); ++k) sq += (a.turn1[k] - b.turn1[k]) * (a.turn1[k] - b.turn1[k]);
  return std::sqrt(sq);
}

}  // namespace capreward
