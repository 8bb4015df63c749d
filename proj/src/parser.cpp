// Rule-based caption parser.
//
// Grammar, per comma/period-delimited chunk:
//   chunk   := clause ("and" clause)*
//   clause  := "there" COP np_list [ prep np_list chain ]
//            | np_list [ tail ]
//   tail    := verb_group np_list chain
//            | COP verb_group np_list chain
//            | COP prep np_list chain
//            | prep np_list chain
//            | COP adj ("and" adj)*
//   chain   := (prep np_list)*          relations from the previous heads
//   np_list := np ("and" np)*
//   np      := [det] word* head         words before the head are attributes,
//                                       "red and white ball" coordinates them
// Chunks that do not derive from `chunk` are dropped as a whole.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "capreward/error.hpp"
#include "capreward/scene_graph.hpp"

namespace capreward {
namespace {

enum class Kind { det, cop, conj, there, verb, word };

struct Token {
  std::string surface;
  std::string lower;
  Kind kind = Kind::word;
};

const std::unordered_set<std::string_view>& verbs() {
  static const std::unordered_set<std::string_view> v = {
      "sit",     "sits",     "sat",      "stand",    "stands",   "stood",    "lie",
      "lies",    "lay",      "lays",     "hold",     "holds",    "held",     "hang",
      "hangs",   "ride",     "rides",    "wear",     "wears",    "eat",      "eats",
      "carry",   "carries",  "walk",     "walks",    "run",      "runs",     "play",
      "plays",   "look",     "looks",    "watch",    "watches",  "cover",    "covers",
      "covered", "contain",  "contains", "chase",    "chases",   "touch",    "touches",
      "lean",    "leans",    "rest",     "rests",    "face",     "faces",    "parked",
      "placed",  "filled",   "surrounded", "attached", "mounted", "stacked", "perched",
      "seated",  "has",      "have",     "pull",     "pulls",    "push",     "pushes",
      "fly",     "flies",    "float",    "floats",   "grow",     "grows",    "swim",
      "swims",   "drink",    "drinks",   "read",     "reads",    "throw",    "throws",
      "catch",   "catches",  "kick",     "kicks",    "jump",     "jumps",    "sleep",
      "sleeps",  "surround", "surrounds", "support", "supports", "overlook", "overlooks",
      "feed",    "feeds",    "use",      "uses",     "show",     "shows",    "fill",
      "fills",   "reach",    "reaches",  "hit",      "hits",     "drive",    "drives",
      "cross",   "crosses",  "block",    "blocks",   "guard",    "guards",   "wait",
      "waits",   "point",    "points",   "stare",    "stares",   "lead",     "leads",
      "follow",  "follows",  "sniff",    "sniffs",   "climb",    "climbs",   "graze",
      "grazes",  "drag",     "drags",    "bite",     "bites",    "lick",     "licks",
  };
  return v;
}

// Nouns with an "-ing" ending, which would otherwise read as participles.
const std::unordered_set<std::string_view>& ing_nouns() {
  static const std::unordered_set<std::string_view> v = {
      "building", "ceiling", "painting", "clothing", "railing", "wedding", "evening",
      "morning",  "string",  "thing",    "something", "nothing", "everything", "lighting",
      "awning",   "stuffing", "frosting", "icing",   "pudding", "dumpling", "sibling",
      "duckling", "herring", "ring",     "king",     "wing",     "swing",    "spring",
      "ceiling",  "sling",   "filling",  "wiring",   "opening",  "landing",  "parking",
  };
  return v;
}

const std::unordered_set<std::string_view>& adjectives() {
  static const std::unordered_set<std::string_view> v = {
      "red",     "blue",    "green",   "yellow",   "white",   "black",   "brown",
      "gray",    "grey",    "orange",  "pink",     "purple",  "gold",    "golden",
      "silver",  "beige",   "tan",     "dark",     "light",   "bright",  "pale",
      "big",     "small",   "large",   "little",   "tall",    "short",   "long",
      "tiny",    "huge",    "giant",   "wide",     "narrow",  "thick",   "thin",
      "wooden",  "metal",   "metallic", "plastic", "glass",   "stone",   "brick",
      "leather", "paper",   "ceramic", "concrete", "cotton",  "wool",    "old",
      "new",     "young",   "round",   "square",   "empty",   "full",    "open",
      "closed",  "wet",     "dry",     "clean",    "dirty",   "shiny",   "fluffy",
      "striped", "spotted", "happy",   "sleepy",   "fresh",   "ripe",    "cloudy",
      "sunny",   "soft",    "hard",    "smooth",   "rough",   "busy",    "quiet",
      "modern",  "ancient", "heavy",   "hot",      "cold",    "warm",    "pretty",
      "cute",    "one",     "two",     "three",    "four",    "five",    "six",
      "seven",   "eight",   "nine",    "ten",      "several", "many",    "few",
      "some",    "furry",   "sandy",   "grassy",   "rusty",   "wet",     "calm",
  };
  return v;
}

// Longest match wins, so multi-word entries must be listed.
const std::vector<std::vector<std::string_view>>& prepositions() {
  static const std::vector<std::vector<std::string_view>> v = {
      {"in", "front", "of"}, {"on", "top", "of"}, {"in", "the", "middle", "of"},
      {"next", "to"},        {"close", "to"},     {"out", "of"},
      {"away", "from"},      {"on"},              {"in"},
      {"at"},                {"under"},           {"above"},
      {"below"},             {"behind"},          {"beside"},
      {"near"},              {"with"},            {"by"},
      {"inside"},            {"over"},            {"across"},
      {"along"},             {"against"},         {"between"},
      {"beneath"},           {"around"},          {"through"},
      {"into"},              {"onto"},            {"toward"},
      {"towards"},           {"of"},              {"from"},
      {"underneath"},        {"atop"},            {"outside"},
      {"down"},              {"up"},              {"past"},
      {"among"},             {"within"},
  };
  return v;
}

bool is_prep_start(std::string_view w) {
  for (const auto& p : prepositions())
    if (p.front() == w) return true;
  return false;
}

Kind classify(const std::string& w) {
  if (w == "a" || w == "an" || w == "the") return Kind::det;
  if (w == "is" || w == "are" || w == "was" || w == "were") return Kind::cop;
  if (w == "and") return Kind::conj;
  if (w == "there") return Kind::there;
  if (verbs().contains(w)) return Kind::verb;
  if (w.size() >= 5 && w.ends_with("ing") && !ing_nouns().contains(w)) return Kind::verb;
  return Kind::word;
}

bool is_delimiter(char c) { return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?'; }
bool is_stripped(char c) { return c == '"' || c == '(' || c == ')' || c == '[' || c == ']'; }

std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> chunks(1);
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    Token t;
    t.surface = current;
    for (char c : current) t.lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    t.kind = classify(t.lower);
    chunks.back().push_back(std::move(t));
    current.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_delimiter(c)) {
      flush();
      if (!chunks.back().empty()) chunks.emplace_back();
    } else if (!is_stripped(c)) {
      current.push_back(c);
    }
  }
  flush();
  if (chunks.back().empty()) chunks.pop_back();
  return chunks;
}

struct NounPhrase {
  std::size_t head;
  std::vector<std::size_t> modifiers;
};

struct Action {
  enum class Type { object, attribute, relation } type;
  std::string a, b, c;
};

using Actions = std::vector<Action>;

struct Alternative {
  Actions actions;
  std::size_t end;
};

class ChunkParser {
 public:
  explicit ChunkParser(const std::vector<Token>& tokens)
      : t_(tokens), failed_(tokens.size() + 1, false) {}

  std::optional<Actions> parse() {
    std::size_t start = 0;
    if (!t_.empty() && t_[0].kind == Kind::conj) start = 1;
    if (start == t_.size()) return std::nullopt;
    return sequence(start);
  }

 private:
  bool is(std::size_t i, Kind k) const { return i < t_.size() && t_[i].kind == k; }
  bool content(std::size_t i) const {
    return is(i, Kind::word) && !is_prep_start(t_[i].lower);
  }

  std::optional<Actions> sequence(std::size_t pos) {
    if (failed_[pos]) return std::nullopt;
    for (auto& alt : clause(pos)) {
      if (alt.end == t_.size()) return std::move(alt.actions);
      if (is(alt.end, Kind::conj)) {
        if (auto rest = sequence(alt.end + 1)) {
          alt.actions.insert(alt.actions.end(), rest->begin(), rest->end());
          return std::move(alt.actions);
        }
      }
    }
    failed_[pos] = true;
    return std::nullopt;
  }

  std::optional<std::pair<NounPhrase, std::size_t>> noun_phrase(std::size_t pos) const {
    if (is(pos, Kind::det)) ++pos;
    std::vector<std::size_t> words;
    while (true) {
      std::size_t run_start = words.size();
      while (content(pos)) words.push_back(pos++);
      if (words.size() == run_start) return std::nullopt;
      // "red and white ball": every word of the run is an adjective and
      // the conjunct continues without a determiner.
      bool adjective_run = std::all_of(words.begin() + static_cast<std::ptrdiff_t>(run_start), words.end(),
                                       [&](std::size_t i) { return adjectives().contains(t_[i].lower); });
      if (adjective_run && is(pos, Kind::conj) && content(pos + 1)) {
        ++pos;
        continue;
      }
      break;
    }
    NounPhrase np{words.back(), {words.begin(), words.end() - 1}};
    return std::make_pair(std::move(np), pos);
  }

  // All NP-list parses starting at pos, longest first.
  std::vector<std::pair<std::vector<NounPhrase>, std::size_t>> noun_phrase_list(std::size_t pos) const {
    std::vector<std::pair<std::vector<NounPhrase>, std::size_t>> out;
    std::vector<NounPhrase> list;
    auto np = noun_phrase(pos);
    while (np) {
      list.push_back(np->first);
      pos = np->second;
      out.emplace_back(list, pos);
      if (!is(pos, Kind::conj)) break;
      np = noun_phrase(pos + 1);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::optional<std::pair<std::string, std::size_t>> preposition(std::size_t pos) const {
    const std::vector<std::string_view>* best = nullptr;
    for (const auto& p : prepositions()) {
      if (pos + p.size() > t_.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < p.size() && match; ++k) match = t_[pos + k].lower == p[k];
      if (match && (best == nullptr || p.size() > best->size())) best = &p;
    }
    if (best == nullptr) return std::nullopt;
    std::string text;
    for (auto w : *best) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    return std::make_pair(std::move(text), pos + best->size());
  }

  std::optional<std::pair<std::string, std::size_t>> verb_group(std::size_t pos) const {
    if (!is(pos, Kind::verb)) return std::nullopt;
    std::string text;
    while (is(pos, Kind::verb)) {
      if (!text.empty()) text.push_back(' ');
      text += t_[pos++].lower;
    }
    if (auto prep = preposition(pos)) {
      text += " " + prep->first;
      pos = prep->second;
    }
    return std::make_pair(std::move(text), pos);
  }

  void emit(const std::vector<NounPhrase>& nps, Actions& actions) const {
    for (const auto& np : nps) {
      actions.push_back({Action::Type::object, t_[np.head].surface, {}, {}});
      for (auto m : np.modifiers)
        actions.push_back({Action::Type::attribute, t_[np.head].surface, t_[m].surface, {}});
    }
  }

  void relate(const std::vector<NounPhrase>& subjects, const std::string& predicate,
              const std::vector<NounPhrase>& objects, Actions& actions) const {
    for (const auto& s : subjects)
      for (const auto& o : objects)
        actions.push_back({Action::Type::relation, t_[s.head].surface, predicate, t_[o.head].surface});
  }

  // Relation to an NP list followed by any number of prepositional phrases.
  void relation_tail(const std::vector<NounPhrase>& subjects, const std::string& predicate,
                     std::size_t pos, const Actions& base, std::vector<Alternative>& out) const {
    for (const auto& [objects, end] : noun_phrase_list(pos)) {
      Actions actions = base;
      emit(objects, actions);
      relate(subjects, predicate, objects, actions);
      if (auto prep = preposition(end)) relation_tail(objects, prep->first, prep->second, actions, out);
      out.push_back({std::move(actions), end});
    }
  }

  std::vector<Alternative> clause(std::size_t pos) const {
    std::vector<Alternative> out;
    if (is(pos, Kind::there) && is(pos + 1, Kind::cop)) {
      for (const auto& [nps, end] : noun_phrase_list(pos + 2)) {
        Actions actions;
        emit(nps, actions);
        if (auto prep = preposition(end)) relation_tail(nps, prep->first, prep->second, actions, out);
        out.push_back({std::move(actions), end});
      }
    } else {
      for (const auto& [subjects, p] : noun_phrase_list(pos)) {
        Actions base;
        emit(subjects, base);
        std::size_t q = p;
        bool copula = is(q, Kind::cop);
        if (copula) ++q;
        if (auto vg = verb_group(q)) {
          relation_tail(subjects, vg->first, vg->second, base, out);
        } else if (auto prep = preposition(q)) {
          relation_tail(subjects, prep->first, prep->second, base, out);
        } else if (copula && content(q)) {
          Actions actions = base;
          while (true) {
            for (const auto& s : subjects)
              actions.push_back({Action::Type::attribute, t_[s.head].surface, t_[q].surface, {}});
            ++q;
            if (is(q, Kind::conj) && content(q + 1)) {
              ++q;
              continue;
            }
            break;
          }
          out.push_back({std::move(actions), q});
        }
        out.push_back({std::move(base), p});
      }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Alternative& a, const Alternative& b) { return a.end > b.end; });
    return out;
  }

  const std::vector<Token>& t_;
  std::vector<bool> failed_;
};

}  // namespace

SceneGraph parse_caption(std::string_view caption, const ParserOptions& options,
                         ParseDiagnostics* diagnostics) {
  if (caption.size() > options.max_length)
    throw LengthLimitError("caption of " + std::to_string(caption.size()) +
                           " bytes exceeds the limit of " + std::to_string(options.max_length));
  SceneGraph graph(GraphSource::parsed);
  ParseDiagnostics local;
  for (const auto& chunk : tokenize(caption)) {
    ++local.sentences;
    auto actions = ChunkParser(chunk).parse();
    if (!actions) {
      ++local.skipped_clauses;
      continue;
    }
    for (const auto& a : *actions) {
      switch (a.type) {
        case Action::Type::object:
          graph.add_object(a.a);
          break;
        case Action::Type::attribute:
          graph.add_attribute(a.a, a.b);
          break;
        case Action::Type::relation:
          graph.add_relation(a.a, a.b, a.c);
          break;
      }
    }
  }
  if (diagnostics != nullptr) *diagnostics = local;
  return graph;
}

}  // namespace capreward
