#include <cstdio>
#include <sstream>

#include "capreward/corpus.hpp"
#include "capreward/error.hpp"

namespace capreward {

using nlohmann::json;

ReferenceRecord ReferenceRecord::make(
    std::string image_id, SceneGraph gt_graph, const std::vector<std::string>& expanded_objects,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& expanded_attributes,
    std::vector<QaItem> qa_items) {
  if (!qa_items.empty() && qa_items.size() != kQuestionsPerImage)
    throw InputError("image '" + image_id + "' has " + std::to_string(qa_items.size()) + " QA items, expected 0 or " +
                     std::to_string(kQuestionsPerImage));
  ReferenceRecord r;
  r.image_id = std::move(image_id);
  SceneGraph expanded(GraphSource::ingested);
  for (const auto& o : gt_graph.objects()) expanded.add_object(o.canonical);
  for (const auto& o : expanded_objects) expanded.add_object(o);
  for (const auto& b : gt_graph.attributes())
    for (const auto& a : b.attributes) expanded.add_attribute(b.object.canonical, a);
  for (const auto& [obj, attrs] : expanded_attributes)
    for (const auto& a : attrs) expanded.add_attribute(obj, a);
  r.gt_graph = std::move(gt_graph);
  r.expanded = std::move(expanded);
  r.qa_items = std::move(qa_items);
  return r;
}

namespace {

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError(field, "missing field");
  return *it;
}

std::string require_string(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_string()) throw SchemaError(field, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(field, "expected a string");
  return it->get<std::string>();
}

}  // namespace

SceneGraph graph_or_caption(const json& j, const char* field, const ParserOptions& parser) {
  if (j.is_string()) return parse_caption(j.get<std::string>(), parser);
  if (j.is_object()) {
    try {
      return ingest_graph(j);
    } catch (const SchemaError& e) {
      throw SchemaError(std::string(field) + "." + e.field(), e.what());
    }
  }
  throw SchemaError(field, "expected a caption string or a graph object");
}

EvaluationRecord evaluation_record_from_json(const json& j, const ParserOptions& parser) {
  if (!j.is_object()) throw SchemaError("record", "expected a JSON object");
  EvaluationRecord rec;
  std::string image_id = require_string(j, "image_id");

  if (j.contains("candidate_graph")) {
    rec.candidate = graph_or_caption(j["candidate_graph"], "candidate_graph", parser);
    rec.candidate_caption = optional_string(j, "candidate_caption");
  } else if (j.contains("candidate_caption")) {
    rec.candidate_caption = require_string(j, "candidate_caption");
    rec.candidate = parse_caption(*rec.candidate_caption, parser);
  } else {
    throw SchemaError("candidate_caption", "missing field (or candidate_graph)");
  }
  rec.initial_caption = optional_string(j, "initial_caption");

  SceneGraph gt = graph_or_caption(require(j, "gt_graph"), "gt_graph", parser);

  std::vector<std::string> expanded_objects;
  if (auto it = j.find("expanded_objects"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("expanded_objects", "expected an array of strings");
    for (const auto& o : *it) {
      if (!o.is_string()) throw SchemaError("expanded_objects", "expected an array of strings");
      expanded_objects.push_back(o.get<std::string>());
    }
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> expanded_attributes;
  if (auto it = j.find("expanded_attributes"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("expanded_attributes", "expected an object of string arrays");
    for (const auto& [obj, attrs] : it->items()) {
      if (!attrs.is_array()) throw SchemaError("expanded_attributes." + obj, "expected an array of strings");
      std::vector<std::string> list;
      for (const auto& a : attrs) {
        if (!a.is_string()) throw SchemaError("expanded_attributes." + obj, "expected an array of strings");
        list.push_back(a.get<std::string>());
      }
      expanded_attributes.emplace_back(obj, std::move(list));
    }
  }
  std::vector<QaItem> qa;
  if (auto it = j.find("qa"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("qa", "expected an array");
    for (const auto& item : *it) {
      if (!item.is_object()) throw SchemaError("qa", "expected {\"q\", \"gold\"} objects");
      qa.push_back({require_string(item, "q"), require_string(item, "gold")});
    }
  }
  rec.ref = ReferenceRecord::make(std::move(image_id), std::move(gt), expanded_objects, expanded_attributes,
                                  std::move(qa));
  return rec;
}

QaAnswer qa_answer_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("answer", "expected a JSON object");
  QaAnswer a;
  a.image_id = require_string(j, "image_id");
  const json& idx = require(j, "q_index");
  if (!idx.is_number_unsigned() && !(idx.is_number_integer() && idx.get<long long>() >= 0))
    throw SchemaError("q_index", "expected a non-negative integer");
  a.question_index = idx.get<std::size_t>();
  a.answer = require_string(j, "answer");
  return a;
}

namespace {

struct Mean {
  double sum = 0.0;
  std::size_t count = 0;
  void add(std::optional<double> v) {
    if (!v) return;
    sum += *v;
    ++count;
  }
  std::optional<double> value() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

PrecisionRecall macro_average(const std::vector<MetricReport>& images, PrecisionRecall MetricReport::*field) {
  Mean p, r, f;
  PrecisionRecall out;
  for (const auto& img : images) {
    const auto& pr = img.*field;
    p.add(pr.precision);
    r.add(pr.recall);
    f.add(pr.f1);
    out.precision_parts.numerator += pr.precision_parts.numerator;
    out.precision_parts.denominator += pr.precision_parts.denominator;
    out.recall_parts.numerator += pr.recall_parts.numerator;
    out.recall_parts.denominator += pr.recall_parts.denominator;
  }
  out.precision = p.value();
  out.recall = r.value();
  out.f1 = f.value();
  return out;
}

PrecisionRecall micro_average(const std::vector<MetricReport>& images, PrecisionRecall MetricReport::*field) {
  Ratio p, r;
  for (const auto& img : images) {
    const auto& pr = img.*field;
    p.numerator += pr.precision_parts.numerator;
    p.denominator += pr.precision_parts.denominator;
    r.numerator += pr.recall_parts.numerator;
    r.denominator += pr.recall_parts.denominator;
  }
  return make_precision_recall(p, r);
}

}  // namespace

CorpusReport evaluate_corpus(std::span<const EvaluationRecord> records,
                             const std::optional<std::vector<QaAnswer>>& answers, const SimilarityBackend& backend,
                             const CorpusOptions& options) {
  CorpusReport report;
  report.options = options;

  std::vector<std::optional<QaTally>> per_image;
  if (answers) {
    std::vector<ReferenceRecord> refs;
    refs.reserve(records.size());
    for (const auto& r : records) refs.push_back(r.ref);
    report.qa = relation_qa_tally(*answers, refs);  // validates every answer

    per_image.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      std::vector<QaAnswer> mine;
      for (const auto& a : *answers)
        if (a.image_id == records[i].ref.image_id) mine.push_back(a);
      per_image[i] = relation_qa_tally(mine, std::span(&records[i].ref, 1));
    }
  }

  report.images = score_image_batch(records, backend, options.weights, per_image, options.execution);

  // Reduced serially in input order so the result does not depend on the
  // thread count.
  MetricReport& s = report.summary;
  s.image_id = "corpus";
  if (options.micro) {
    s.objects = micro_average(report.images, &MetricReport::objects);
    s.attributes = micro_average(report.images, &MetricReport::attributes);
  } else {
    s.objects = macro_average(report.images, &MetricReport::objects);
    s.attributes = macro_average(report.images, &MetricReport::attributes);
  }
  if (report.qa) s.relation_qa = report.qa->accuracy();
  s.aggregate = aggregate_score(s.objects.f1, s.attributes.f1, s.relation_qa, options.weights);

  EditStats total;
  bool any_edits = false;
  for (const auto& img : report.images) {
    if (!img.edits) continue;
    any_edits = true;
    total.inserted += img.edits->inserted;
    total.deleted += img.edits->deleted;
    total.length_delta += img.edits->length_delta;
  }
  if (any_edits) s.edits = total;
  return report;
}

namespace {

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json to_json(const PrecisionRecall& pr) {
  return {{"precision", optional_number(pr.precision)},
          {"recall", optional_number(pr.recall)},
          {"f1", optional_number(pr.f1)}};
}

}  // namespace

json to_json(const MetricReport& r) {
  json out{{"image_id", r.image_id},
           {"objects", to_json(r.objects)},
           {"attributes", to_json(r.attributes)},
           {"relation_qa_accuracy", optional_number(r.relation_qa)},
           {"aggregate", optional_number(r.aggregate)}};
  if (r.edits)
    out["edit_stats"] = {{"inserted", r.edits->inserted},
                         {"deleted", r.edits->deleted},
                         {"length_delta", r.edits->length_delta}};
  return out;
}

json to_json(const CorpusReport& report) {
  json images = json::array();
  for (const auto& img : report.images) images.push_back(to_json(img));
  json out = to_json(report.summary);
  out["averaging"] = report.options.micro ? "micro" : "macro";
  out["weights"] = {report.options.weights.objects, report.options.weights.attributes,
                    report.options.weights.relations};
  if (report.qa) out["qa_matched"] = report.qa->matched, out["qa_total"] = report.qa->total;
  out["images"] = std::move(images);
  return out;
}

std::string render_table(const CorpusReport& report) {
  auto cell = [](std::optional<double> v) {
    char buf[16];
    if (!v) return std::string("     -");
    std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * *v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "             Objects               Attributes            Relations\n";
  out << "image        P      R      F1      P      R      F1      QA     Aggregate\n";
  auto row = [&](const MetricReport& r) {
    std::string id = r.image_id.substr(0, 10);
    id.resize(10, ' ');
    out << id << " " << cell(r.objects.precision) << " " << cell(r.objects.recall) << " " << cell(r.objects.f1)
        << "  " << cell(r.attributes.precision) << " " << cell(r.attributes.recall) << " "
        << cell(r.attributes.f1) << "  " << cell(r.relation_qa) << "  " << cell(r.aggregate) << "\n";
  };
  for (const auto& img : report.images) row(img);
  row(report.summary);
  return out.str();
}

}  // namespace capreward
