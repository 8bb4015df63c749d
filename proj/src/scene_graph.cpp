#include <algorithm>
#include <string>
#include <tuple>

#include "capreward/error.hpp"
#include "capreward/scene_graph.hpp"

namespace capreward {

using nlohmann::json;

std::string RelationTriple::joined() const {
  return subject.canonical + " " + predicate + " " + object.canonical;
}

namespace {

template <typename Vec, typename Key>
auto lower_bound_by(Vec& v, const Key& key, auto proj) {
  return std::lower_bound(v.begin(), v.end(), key,
                          [&](const auto& elem, const Key& k) { return proj(elem) < k; });
}

auto relation_key(const RelationTriple& r) {
  return std::tie(r.subject.canonical, r.predicate, r.object.canonical);
}

}  // namespace

std::string SceneGraph::add_object(std::string_view surface) {
  std::string canonical = normalize_phrase(surface);
  if (canonical.empty()) throw SchemaError("objects", "phrase '" + std::string(surface) + "' is empty after normalization");
  auto it = lower_bound_by(objects_, canonical, [](const ObjectNode& n) -> const std::string& { return n.canonical; });
  if (it == objects_.end() || it->canonical != canonical)
    objects_.insert(it, ObjectNode{std::string(surface), canonical});
  return canonical;
}

const ObjectNode& SceneGraph::require_object(std::string_view phrase, const char* field) const {
  const std::string canonical = normalize_phrase(phrase);
  const ObjectNode* node = find_object(canonical);
  if (node == nullptr)
    throw ReferentialIntegrityError(std::string(field) + " references undeclared object '" +
                                    std::string(phrase) + "'");
  return *node;
}

void SceneGraph::add_attribute(std::string_view object, std::string_view attribute) {
  const ObjectNode& node = require_object(object, "attributes");
  std::string attr = normalize_phrase(attribute);
  if (attr.empty()) throw SchemaError("attributes", "attribute of '" + node.canonical + "' is empty after normalization");

  auto it = lower_bound_by(attributes_, node.canonical,
                           [](const AttributeBinding& b) -> const std::string& { return b.object.canonical; });
  if (it == attributes_.end() || it->object.canonical != node.canonical)
    it = attributes_.insert(it, AttributeBinding{node, {}});
  if (std::find(it->attributes.begin(), it->attributes.end(), attr) == it->attributes.end())
    it->attributes.push_back(std::move(attr));
}

void SceneGraph::add_relation(std::string_view subject, std::string_view predicate,
                              std::string_view object) {
  RelationTriple triple{require_object(subject, "relations"), normalize_predicate(predicate),
                        require_object(object, "relations")};
  if (triple.predicate.empty()) throw SchemaError("relations", "empty predicate");
  auto it = std::lower_bound(relations_.begin(), relations_.end(), triple,
                             [](const RelationTriple& a, const RelationTriple& b) {
                               return relation_key(a) < relation_key(b);
                             });
  if (it == relations_.end() || relation_key(*it) != relation_key(triple))
    relations_.insert(it, std::move(triple));
}

const ObjectNode* SceneGraph::find_object(std::string_view canonical) const {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), canonical,
                             [](const ObjectNode& n, std::string_view k) { return n.canonical < k; });
  if (it == objects_.end() || it->canonical != canonical) return nullptr;
  return &*it;
}

bool SceneGraph::has_object(std::string_view canonical) const { return find_object(canonical) != nullptr; }

std::span<const std::string> SceneGraph::attributes_of(std::string_view canonical) const {
  auto it = std::lower_bound(attributes_.begin(), attributes_.end(), canonical,
                             [](const AttributeBinding& b, std::string_view k) { return b.object.canonical < k; });
  if (it == attributes_.end() || it->object.canonical != canonical) return {};
  return it->attributes;
}

std::vector<std::string> SceneGraph::object_names() const {
  std::vector<std::string> out;
  out.reserve(objects_.size());
  for (const auto& o : objects_) out.push_back(o.canonical);
  return out;
}

std::vector<std::string> SceneGraph::relation_strings() const {
  std::vector<std::string> out;
  out.reserve(relations_.size());
  for (const auto& r : relations_) out.push_back(r.joined());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t SceneGraph::attribute_count() const {
  std::size_t n = 0;
  for (const auto& b : attributes_) n += b.attributes.size();
  return n;
}

bool operator==(const SceneGraph& a, const SceneGraph& b) {
  if (a.object_names() != b.object_names()) return false;
  if (a.attributes_.size() != b.attributes_.size()) return false;
  for (std::size_t i = 0; i < a.attributes_.size(); ++i) {
    if (a.attributes_[i].object.canonical != b.attributes_[i].object.canonical) return false;
    if (a.attributes_[i].attributes != b.attributes_[i].attributes) return false;
  }
  if (a.relations_.size() != b.relations_.size()) return false;
  for (std::size_t i = 0; i < a.relations_.size(); ++i)
    if (relation_key(a.relations_[i]) != relation_key(b.relations_[i])) return false;
  return true;
}

SceneGraph ingest_graph(const json& record) {
  if (!record.is_object()) throw SchemaError("record", "expected a JSON object");
  SceneGraph graph(GraphSource::ingested);

  if (auto it = record.find("objects"); it != record.end()) {
    if (!it->is_array()) throw SchemaError("objects", "expected an array of strings");
    for (const auto& o : *it) {
      if (!o.is_string()) throw SchemaError("objects", "expected an array of strings");
      graph.add_object(o.get<std::string>());
    }
  }
  if (auto it = record.find("attributes"); it != record.end()) {
    if (!it->is_object()) throw SchemaError("attributes", "expected an object of string arrays");
    for (const auto& [obj, attrs] : it->items()) {
      if (!attrs.is_array()) throw SchemaError("attributes." + obj, "expected an array of strings");
      for (const auto& a : attrs) {
        if (!a.is_string()) throw SchemaError("attributes." + obj, "expected an array of strings");
        graph.add_attribute(obj, a.get<std::string>());
      }
    }
  }
  if (auto it = record.find("relations"); it != record.end()) {
    if (!it->is_array()) throw SchemaError("relations", "expected an array of triples");
    for (const auto& r : *it) {
      if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() || !r[2].is_string())
        throw SchemaError("relations", "each relation must be [subject, predicate, object]");
      graph.add_relation(r[0].get<std::string>(), r[1].get<std::string>(), r[2].get<std::string>());
    }
  }
  return graph;
}

json serialize_graph(const SceneGraph& graph) {
  json out;
  out["objects"] = graph.object_names();
  json attrs = json::object();
  for (const auto& b : graph.attributes()) attrs[b.object.canonical] = b.attributes;
  out["attributes"] = std::move(attrs);
  json rels = json::array();
  for (const auto& r : graph.relations())
    rels.push_back({r.subject.canonical, r.predicate, r.object.canonical});
  out["relations"] = std::move(rels);
  return out;
}

}  // namespace capreward
