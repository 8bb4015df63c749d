#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace capreward {

/// Canonical form used for all set membership: lowercase, whitespace
/// collapsed, determiners (a/an/the) removed, and the last token
/// singularized. Idempotent.
std::string normalize_phrase(std::string_view phrase);

/// Lowercase + whitespace collapse + determiner removal, no plural rule.
/// Used for relation predicates ("sits on" must stay "sits on").
std::string normalize_predicate(std::string_view phrase);

/// Plural-to-singular rule for a single lowercase word.
std::string singularize(std::string_view word);

enum class GraphSource { parsed, ingested };

struct ObjectNode {
  std::string surface;
  std::string canonical;
};

struct AttributeBinding {
  ObjectNode object;
  std::vector<std::string> attributes;
};

struct RelationTriple {
  ObjectNode subject;
  std::string predicate;
  ObjectNode object;

  /// "subject predicate object", the form relations are matched in.
  std::string joined() const;
};

// Objects, attribute bindings and relations are kept sorted by canonical
// form, so iteration order is deterministic and doubles as the
// lexicographic tie-break order used by matching.
class SceneGraph {
 public:
  explicit SceneGraph(GraphSource source = GraphSource::parsed) : source_(source) {}

  // Adds (or merges into) the object with this phrase's canonical form and
  // returns the canonical key. Throws SchemaError if it normalizes to "".
  std::string add_object(std::string_view surface);

  // The object must already be present (ReferentialIntegrityError otherwise).
  void add_attribute(std::string_view object, std::string_view attribute);
  void add_relation(std::string_view subject, std::string_view predicate,
                    std::string_view object);

  std::span<const ObjectNode> objects() const { return objects_; }
  std::span<const AttributeBinding> attributes() const { return attributes_; }
  std::span<const RelationTriple> relations() const { return relations_; }
  GraphSource source() const { return source_; }

  bool has_object(std::string_view canonical) const;
  const ObjectNode* find_object(std::string_view canonical) const;
  // Attribute list of a canonical object, or an empty span.
  std::span<const std::string> attributes_of(std::string_view canonical) const;

  std::vector<std::string> object_names() const;
  std::vector<std::string> relation_strings() const;
  std::size_t attribute_count() const;
  bool empty() const { return objects_.empty(); }

  // Content equality over canonical forms; surfaces and source are ignored.
  friend bool operator==(const SceneGraph& a, const SceneGraph& b);

 private:
  const ObjectNode& require_object(std::string_view phrase, const char* field) const;

  std::vector<ObjectNode> objects_;
  std::vector<AttributeBinding> attributes_;
  std::vector<RelationTriple> relations_;
  GraphSource source_;
};

struct ParserOptions {
  std::size_t max_length = 10000;  // bytes
};

struct ParseDiagnostics {
  std::size_t sentences = 0;
  std::size_t skipped_clauses = 0;
};

/// Rule-based caption parser. Clauses outside the grammar are skipped and
/// counted in `diagnostics`. Throws LengthLimitError for oversized input.
SceneGraph parse_caption(std::string_view caption, const ParserOptions& options = {},
                         ParseDiagnostics* diagnostics = nullptr);

/// Build a graph from {"objects": [...], "attributes": {obj: [...]},
/// "relations": [[s, p, o], ...]}. Missing keys are treated as empty.
SceneGraph ingest_graph(const nlohmann::json& record);

nlohmann::json serialize_graph(const SceneGraph& graph);

}  // namespace capreward
