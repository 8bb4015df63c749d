#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "capreward/config.hpp"
#include "capreward/error.hpp"

namespace capreward {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

double parse_double(std::string_view key, std::string_view text) {
  std::string s = unquote(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError(std::string(key), "expected a number, got '" + s + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::string s = unquote(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" + s + "'");
  return v;
}

std::vector<double> parse_triple(std::string_view key, std::string_view text) {
  std::string s = unquote(text);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, item));
  if (out.size() != 3) throw ConfigError(std::string(key), "expected three comma-separated numbers");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> Settings::known_keys() {
  return {"tau_add_soft",   "tau_remove_soft", "tau_add_hard",       "tau_remove_hard",
          "membership_threshold", "punish_weight", "category_weights", "soft_hard_mix",
          "attr_object_anchor_threshold", "kl_beta", "learning_rate", "steps",
          "batch_size",     "rng_seed",        "temperature",        "kl_estimator",
          "init_edit_logit", "max_caption_length", "aggregate_weights"};
}

void Settings::set(std::string_view raw_key, std::string_view value) {
  const std::string key(trim(raw_key));
  auto& r = reward;
  if (key == "tau_add_soft") r.tau_add_soft = parse_double(key, value);
  else if (key == "tau_remove_soft") r.tau_remove_soft = parse_double(key, value);
  else if (key == "tau_add_hard") r.tau_add_hard = parse_double(key, value);
  else if (key == "tau_remove_hard") r.tau_remove_hard = parse_double(key, value);
  else if (key == "membership_threshold") r.membership_threshold = parse_double(key, value);
  else if (key == "punish_weight") r.punish_weight = parse_double(key, value);
  else if (key == "soft_hard_mix") r.soft_hard_mix = parse_double(key, value);
  else if (key == "attr_object_anchor_threshold") r.attr_object_anchor_threshold = parse_double(key, value);
  else if (key == "category_weights") {
    auto w = parse_triple(key, value);
    r.category_weights = {w[0], w[1], w[2]};
  } else if (key == "kl_beta") train.kl_beta = parse_double(key, value);
  else if (key == "learning_rate") train.learning_rate = parse_double(key, value);
  else if (key == "steps") train.steps = parse_unsigned(key, value);
  else if (key == "batch_size") train.batch_size = parse_unsigned(key, value);
  else if (key == "rng_seed") train.rng_seed = parse_unsigned(key, value);
  else if (key == "temperature") train.temperature = parse_double(key, value);
  else if (key == "init_edit_logit") train.init_edit_logit = parse_double(key, value);
  else if (key == "kl_estimator") {
    const std::string v = unquote(value);
    if (v == "sample") train.kl_estimator = KlEstimator::sample;
    else if (v == "closed_form") train.kl_estimator = KlEstimator::closed_form;
    else throw ConfigError(key, "expected 'sample' or 'closed_form', got '" + v + "'");
  } else if (key == "max_caption_length") parser.max_length = parse_unsigned(key, value);
  else if (key == "aggregate_weights") {
    auto w = parse_triple(key, value);
    aggregate_weights = {w[0], w[1], w[2]};
  } else {
    throw ConfigError(key, "unknown config key");
  }
  train.reward = reward;
}

void Settings::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(trim(assignment)), "expected key=value");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::string line;
  while (std::getline(in, line)) {
    // '#' starts a comment unless it sits inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const auto body = trim(line);
    if (body.empty() || body.front() == '[') continue;
    set_assignment(body);
  }
}

void Settings::validate() const {
  reward.validate();
  train.validate();
  if (parser.max_length == 0) throw ConfigError("max_caption_length", "must be >= 1");
  for (double w : {aggregate_weights.objects, aggregate_weights.attributes, aggregate_weights.relations})
    if (!(w >= 0.0)) throw ConfigError("aggregate_weights", "weights must be >= 0");
}

std::map<std::string, std::string> Settings::snapshot() const {
  const auto& r = reward;
  const auto& t = train;
  auto triple = [](double a, double b, double c) {
    return "[" + format_double(a) + ", " + format_double(b) + ", " + format_double(c) + "]";
  };
  return {
      {"tau_add_soft", format_double(r.tau_add_soft)},
      {"tau_remove_soft", format_double(r.tau_remove_soft)},
      {"tau_add_hard", format_double(r.tau_add_hard)},
      {"tau_remove_hard", format_double(r.tau_remove_hard)},
      {"membership_threshold", format_double(r.membership_threshold)},
      {"punish_weight", format_double(r.punish_weight)},
      {"category_weights",
       triple(r.category_weights.objects, r.category_weights.attributes, r.category_weights.relations)},
      {"soft_hard_mix", format_double(r.soft_hard_mix)},
      {"attr_object_anchor_threshold", format_double(r.attr_object_anchor_threshold)},
      {"kl_beta", format_double(t.kl_beta)},
      {"learning_rate", format_double(t.learning_rate)},
      {"steps", std::to_string(t.steps)},
      {"batch_size", std::to_string(t.batch_size)},
      {"rng_seed", std::to_string(t.rng_seed)},
      {"temperature", format_double(t.temperature)},
      {"kl_estimator", t.kl_estimator == KlEstimator::sample ? "sample" : "closed_form"},
      {"init_edit_logit", format_double(t.init_edit_logit)},
      {"max_caption_length", std::to_string(parser.max_length)},
      {"aggregate_weights",
       triple(aggregate_weights.objects, aggregate_weights.attributes, aggregate_weights.relations)},
  };
}

std::string Settings::to_config_text() const {
  std::string out;
  for (const auto& [k, v] : snapshot()) {
    out += k + " = ";
    out += k == "kl_estimator" ? "\"" + v + "\"" : v;
    out += "\n";
  }
  return out;
}

}  // namespace capreward
