#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capreward/kernels.hpp"
#include "capreward/reward.hpp"
#include "capreward/scene_graph.hpp"

namespace capreward {

enum class ElementKind { object, attribute, relation };

// One selectable caption element. Attributes use (subject=object,
// detail=attribute); relations use (subject, detail=predicate, object).
struct SceneElement {
  ElementKind kind = ElementKind::object;
  std::string subject;
  std::string detail;
  std::string object;

  std::string key() const;
  friend bool operator==(const SceneElement&, const SceneElement&) = default;
};

std::vector<SceneElement> elements_of(const SceneGraph& graph);

// Graph mentioning exactly `elements`; objects referenced by an attribute or
// relation are added implicitly.
SceneGraph realize(std::span<const SceneElement> elements);

struct SyntheticScene {
  SceneGraph truth{GraphSource::ingested};
  std::vector<SceneElement> distractors;

  // Throws InputError if a distractor coincides with a truth element.
  static SyntheticScene make(SceneGraph truth, std::vector<SceneElement> distractors);
  static SyntheticScene from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Deterministic scene generator: `truth_elements` truth elements (objects
/// first, then attributes on them) and `distractors` false elements.
std::vector<SyntheticScene> make_synthetic_scenes(std::size_t count, std::size_t truth_elements,
                                                  std::size_t distractors, std::uint64_t seed);

enum class KlEstimator { sample, closed_form };

struct TrainConfig {
  double kl_beta = 0.1;
  double learning_rate = 0.5;
  std::size_t steps = 500;
  std::size_t batch_size = 16;  // rollouts per scene per step
  std::uint64_t rng_seed = 0;
  double temperature = 1.0;
  KlEstimator kl_estimator = KlEstimator::closed_form;
  double init_edit_logit = -1.0;
  RewardConfig reward;

  void validate() const;
};

/// Factorized Bernoulli two-turn policy over the candidate universe.
///
/// Turn 1 includes element k with probability sigmoid(turn1[k] / T).
/// Turn 2 edits each element given turn 1: an included element is removed
/// with probability sigmoid((turn2_remove[k] - turn1[k]) / T), an absent
/// one is added with probability sigmoid((turn1[k] + turn2_add[k]) / T).
/// The turn-1 logit is the policy's belief that the element is true; both
/// turns read it, the way one captioner produces both captions.
struct SimPolicy {
  std::vector<std::string> keys;
  std::vector<double> turn1;
  std::vector<double> turn2_add;
  std::vector<double> turn2_remove;

  std::size_t size() const { return keys.size(); }
  // [turn1 | turn2_add | turn2_remove]
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  nlohmann::json to_json() const;
};

/// Scenes plus the mapping from each scene's candidate universe (truth
/// elements then distractors) into policy parameter indices.
class SimEnvironment {
 public:
  explicit SimEnvironment(std::vector<SyntheticScene> scenes);

  std::size_t scene_count() const { return scenes_.size(); }
  const SyntheticScene& scene(std::size_t s) const { return scenes_[s]; }
  std::span<const SceneElement> universe(std::size_t s) const { return universe_[s]; }
  std::span<const std::size_t> indices(std::size_t s) const { return indices_[s]; }
  std::span<const char> truth_mask(std::size_t s) const { return truth_[s]; }

  SimPolicy initial_policy(double inclusion_logit, double edit_logit) const;

 private:
  std::vector<SyntheticScene> scenes_;
  std::vector<std::vector<SceneElement>> universe_;
  std::vector<std::vector<std::size_t>> indices_;
  std::vector<std::vector<char>> truth_;
  std::vector<std::string> keys_;
};

struct Rollout {
  std::size_t scene = 0;
  std::vector<char> included;  // turn-1 decision per universe element
  std::vector<char> edited;    // turn-2 decision (add if absent, remove if present)
  SceneGraph y1;
  SceneGraph y2;
  double logprob1 = 0.0;
  double logprob2 = 0.0;
};

using SimRng = std::mt19937_64;

// Per-sample stream, independent of thread scheduling.
SimRng make_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t sample);

Rollout rollout(const SimEnvironment& env, const SimPolicy& policy, std::size_t scene, SimRng& rng,
                double temperature = 1.0);

// log pi(y1) and log pi(y2 | y1) of fixed decisions under `policy`.
double turn1_logprob(const SimEnvironment& env, const SimPolicy& policy, const Rollout& r, double temperature);
double turn2_logprob(const SimEnvironment& env, const SimPolicy& policy, const Rollout& r, double temperature);

struct LossGradient {
  double loss = 0.0;
  SimPolicy gradient;  // same shape as the policy, keys copied
};

/// Mean over rollouts of  -R * log pi(y2 | y1) + kl_beta * KL, where KL is
/// log pi(y1) - log pi_ref(y1) (sample) or the exact Bernoulli KL of turn 1
/// on the rollout's scene (closed_form). Rollout decisions are held fixed.
LossGradient loss_and_gradient(const SimEnvironment& env, const SimPolicy& policy, const SimPolicy& ref_policy,
                               std::span<const Rollout> rollouts, std::span<const double> rewards,
                               const TrainConfig& cfg);

double element_f1(const SceneGraph& candidate, const SceneGraph& truth);

struct TraceRow {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double f1_turn1 = 0.0;
  double f1_turn2 = 0.0;
};

struct TrainResult {
  SimPolicy policy;
  SimPolicy reference;
  std::vector<TraceRow> trace;
};

/// Plain SGD on loss_and_gradient. Each step draws batch_size rollouts per
/// scene from the current policy; trace row t describes those rollouts.
/// Throws DivergenceError on a non-finite loss or parameter.
TrainResult train(const SimEnvironment& env, const TrainConfig& cfg, const SimilarityBackend& backend,
                  Execution exec = Execution::parallel);

std::string trace_csv(std::span<const TraceRow> trace);

double turn1_distance(const SimPolicy& a, const SimPolicy& b);

}  // namespace capreward
