#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "capreward/scene_graph.hpp"

namespace capreward {
namespace {

constexpr std::array<std::string_view, 3> kDeterminers = {"a", "an", "the"};

// Words whose trailing "s" is not a plural marker.
constexpr std::array<std::string_view, 24> kUninflected = {
    "glass", "grass",  "bus",     "gas",    "lens",   "news",
    "series", "species", "canvas", "dress",  "moss",   "chess",
    "sheep", "fish",   "deer",    "pants",  "jeans",  "scissors",
    "shorts", "glasses", "plus",  "atlas",  "iris",   "cactus",
};

struct Irregular {
  std::string_view plural;
  std::string_view singular;
};

constexpr std::array<Irregular, 14> kIrregular = {{
    {"men", "man"},
    {"women", "woman"},
    {"children", "child"},
    {"people", "person"},
    {"feet", "foot"},
    {"teeth", "tooth"},
    {"mice", "mouse"},
    {"geese", "goose"},
    {"buses", "bus"},
    {"leaves", "leaf"},
    {"knives", "knife"},
    {"shelves", "shelf"},
    {"wolves", "wolf"},
    {"loaves", "loaf"},
}};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> lowercase_tokens(std::string_view phrase) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  std::erase_if(tokens, [](const std::string& t) {
    return std::find(kDeterminers.begin(), kDeterminers.end(), t) != kDeterminers.end();
  });
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string singularize_once(std::string_view word) {
  for (auto w : kUninflected)
    if (word == w) return std::string(word);
  for (const auto& irr : kIrregular)
    if (word == irr.plural) return std::string(irr.singular);

  if (word.size() > 4 && ends_with(word, "ies"))
    return std::string(word.substr(0, word.size() - 3)) + "y";
  if (ends_with(word, "sses") || ends_with(word, "ches") || ends_with(word, "shes") ||
      ends_with(word, "xes") || ends_with(word, "zzes"))
    return std::string(word.substr(0, word.size() - 2));
  if (word.size() > 2 && ends_with(word, "s") && !ends_with(word, "ss") &&
      !ends_with(word, "us") && !ends_with(word, "is"))
    return std::string(word.substr(0, word.size() - 1));
  return std::string(word);
}

}  // namespace

// Iterated to a fixed point: "mens" -> "men" -> "man".
std::string singularize(std::string_view word) {
  std::string current(word);
  for (int i = 0; i < 8; ++i) {
    std::string next = singularize_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::string normalize_phrase(std::string_view phrase) {
  auto tokens = lowercase_tokens(phrase);
  while (!tokens.empty()) {
    tokens.back() = singularize(tokens.back());
    // "thes" singularizes to a determiner, which must not survive.
    if (std::find(kDeterminers.begin(), kDeterminers.end(), tokens.back()) == kDeterminers.end())
      break;
    tokens.pop_back();
  }
  return join(tokens);
}

std::string normalize_predicate(std::string_view phrase) { return join(lowercase_tokens(phrase)); }

}  // namespace capreward
