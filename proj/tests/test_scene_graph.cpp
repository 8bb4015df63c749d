#include <gtest/gtest.h>

#include <random>

#include "capreward/error.hpp"
#include "capreward/scene_graph.hpp"
#include "generators.hpp"

using namespace capreward;
using nlohmann::json;

TEST(Normalize, ExampleFromContract) { EXPECT_EQ(normalize_phrase("The Red Balls"), "red ball"); }

TEST(Normalize, DeterminersAndWhitespace) {
  EXPECT_EQ(normalize_phrase("  a   Big\tDog "), "big dog");
  EXPECT_EQ(normalize_phrase("an apple"), "apple");
  EXPECT_EQ(normalize_phrase("the"), "");
  EXPECT_EQ(normalize_phrase(""), "");
}

TEST(Normalize, PluralRule) {
  EXPECT_EQ(normalize_phrase("boxes"), "box");
  EXPECT_EQ(normalize_phrase("benches"), "bench");
  EXPECT_EQ(normalize_phrase("puppies"), "puppy");
  EXPECT_EQ(normalize_phrase("dogs"), "dog");
  EXPECT_EQ(normalize_phrase("glass"), "glass");
  EXPECT_EQ(normalize_phrase("grass"), "grass");
  EXPECT_EQ(normalize_phrase("bus"), "bus");
  EXPECT_EQ(normalize_phrase("buses"), "bus");
  EXPECT_EQ(normalize_phrase("men"), "man");
  EXPECT_EQ(normalize_phrase("cactus"), "cactus");
}

TEST(Normalize, OnlyHeadNounIsSingularized) { EXPECT_EQ(normalize_phrase("Sports Cars"), "sports car"); }

TEST(Normalize, PredicateKeepsPlurals) { EXPECT_EQ(normalize_predicate("  Sits  ON "), "sits on"); }

TEST(Normalize, IdempotentOnRandomStrings) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "aeiousxyhnmcz THE";
  const std::vector<std::string> words = {"the", "a",    "an",   "mens", "thes", "buses", "glasses", "ies",
                                          "s",   "ss",   "boxes", "flies", "geese", "A",   "The",    "ANS"};
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) {
      if (rng() % 2) {
        s += words[rng() % words.size()];
      } else {
        const int len = 1 + static_cast<int>(rng() % 6);
        for (int c = 0; c < len; ++c) s += alphabet[rng() % alphabet.size()];
      }
      s += rng() % 3 ? " " : "  ";
    }
    const std::string once = normalize_phrase(s);
    EXPECT_EQ(normalize_phrase(once), once) << "input: '" << s << "'";
  }
}

TEST(SceneGraph, DuplicateObjectsMergeAndAttributesUnion) {
  SceneGraph g;
  g.add_object("Dogs");
  g.add_object("the dog");
  g.add_attribute("dog", "Brown");
  g.add_attribute("dogs", "small");
  g.add_attribute("dog", "brown");
  ASSERT_EQ(g.objects().size(), 1u);
  const auto attrs = g.attributes_of("dog");
  ASSERT_EQ(attrs.size(), 2u);
  EXPECT_EQ(attrs[0], "brown");
  EXPECT_EQ(attrs[1], "small");
}

TEST(SceneGraph, ReferentialIntegrity) {
  SceneGraph g;
  g.add_object("ball");
  EXPECT_THROW(g.add_relation("ball", "on", "table"), ReferentialIntegrityError);
  EXPECT_THROW(g.add_attribute("table", "red"), ReferentialIntegrityError);
  EXPECT_THROW(g.add_object("the"), SchemaError);
}

TEST(SceneGraph, EqualityIgnoresSurfaceAndSource) {
  SceneGraph a(GraphSource::parsed), b(GraphSource::ingested);
  a.add_object("The Balls");
  b.add_object("ball");
  EXPECT_TRUE(a == b);
  b.add_object("table");
  EXPECT_FALSE(a == b);
}

TEST(SceneGraph, RelationStringsAreJoined) {
  SceneGraph g;
  g.add_object("ball");
  g.add_object("table");
  g.add_relation("ball", "Sits On", "tables");
  ASSERT_EQ(g.relation_strings().size(), 1u);
  EXPECT_EQ(g.relation_strings()[0], "ball sits on table");
}

TEST(Ingest, SimpleRecord) {
  const auto g = ingest_graph(json::parse(R"({"objects": ["ball"], "attributes": {"ball": ["red"]}, "relations": []})"));
  EXPECT_EQ(g.source(), GraphSource::ingested);
  EXPECT_EQ(g.objects().size(), 1u);
  EXPECT_EQ(g.attributes().size(), 1u);
}

TEST(Ingest, NormalizesObjects) {
  const auto g = ingest_graph(json::parse(R"({"objects": ["The Dogs"]})"));
  ASSERT_EQ(g.object_names().size(), 1u);
  EXPECT_EQ(g.object_names()[0], "dog");
}

TEST(Ingest, UndeclaredRelationObject) {
  EXPECT_THROW(ingest_graph(json::parse(R"({"objects": ["ball"], "relations": [["ball", "on", "table"]]})")),
               ReferentialIntegrityError);
}

TEST(Ingest, SchemaErrorsNameTheField) {
  try {
    ingest_graph(json::parse(R"({"objects": "ball"})"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "objects");
  }
  try {
    ingest_graph(json::parse(R"({"objects": ["ball"], "relations": [["ball", "on"]]})"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.field().find("relations"), std::string::npos);
  }
  EXPECT_THROW(ingest_graph(json::parse("[1, 2]")), SchemaError);
}

TEST(Ingest, RoundTripOnRandomGraphs) {
  gen::Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const SceneGraph g = gen::graph(rng);
    const json once = serialize_graph(g);
    const SceneGraph back = ingest_graph(once);
    EXPECT_TRUE(back == g);
    EXPECT_EQ(serialize_graph(back), once);
  }
}
