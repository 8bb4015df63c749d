#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "capreward/config.hpp"
#include "capreward/corpus.hpp"
#include "capreward/error.hpp"
#include "capreward/kernels.hpp"
#include "capreward/sim_rl.hpp"
#include "manifest.hpp"

namespace capreward::cli {

using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::string backend = "exact";
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::vector<std::string> sets;
  int threads = 0;
};

struct Context {
  GlobalOptions global;
  Settings settings;
  std::unique_ptr<SimilarityBackend> backend;
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;

  RunManifest manifest(std::string command, std::vector<std::string> inputs) const {
    RunManifest m;
    m.command = std::move(command);
    m.argv = argv;
    m.inputs = std::move(inputs);
    m.config = settings.snapshot();
    m.backend = backend ? backend->describe() : global.backend;
    m.rng_seed = global.seed;
    return m;
  }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// Writes to `path`, or to `fallback` when path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }
  bool is_file() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------- parse

struct ParseArgs {
  std::string input;
  std::string output;
};

int cmd_parse(Context& ctx, const ParseArgs& args) {
  const auto lines = read_lines(args.input);
  std::vector<std::optional<json>> records(lines.size());
  std::vector<std::string> errors(lines.size());
  std::vector<ParseDiagnostics> diagnostics(lines.size());

  parallel_for(lines.size(), Execution::parallel, [&](std::size_t i) {
    if (blank(lines[i])) return;
    try {
      json j = json::parse(lines[i]);
      std::string caption;
      json id;
      if (j.is_string()) {
        caption = j.get<std::string>();
      } else if (j.is_object() && j.contains("caption") && j["caption"].is_string()) {
        caption = j["caption"].get<std::string>();
        if (j.contains("id")) id = j["id"];
      } else {
        throw SchemaError("caption", "expected a caption string or {\"caption\": ...}");
      }
      json g = serialize_graph(parse_caption(caption, ctx.settings.parser, &diagnostics[i]));
      if (!id.is_null()) g["id"] = id;
      records[i] = std::move(g);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  Output out(args.output, ctx.out);
  std::size_t written = 0, bad = 0, skipped_clauses = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    skipped_clauses += diagnostics[i].skipped_clauses;
    if (records[i]) {
      *out << records[i]->dump() << "\n";
      ++written;
    } else if (!errors[i].empty()) {
      ++bad;
      ctx.err << args.input << ":" << i + 1 << ": skipped: " << errors[i] << "\n";
    }
  }
  if (out.is_file()) ctx.manifest("parse", {args.input}).write_sidecar(out.path());
  ctx.err << "parsed " << written << " captions, " << bad << " malformed lines, " << skipped_clauses
          << " clauses outside the grammar\n";
  return bad > 0 && ctx.global.strict ? kInputError : kSuccess;
}

// --------------------------------------------------------------- reward

struct RewardArgs {
  std::string input;
  std::string output;
  std::string summary;
};

int cmd_reward(Context& ctx, const RewardArgs& args) {
  const auto lines = read_lines(args.input);
  std::vector<CaptionTriple> triples;
  std::vector<std::size_t> line_of;
  std::vector<json> ids;
  std::vector<std::pair<std::size_t, std::string>> errors;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      json j = json::parse(lines[i]);
      if (!j.is_object()) throw SchemaError("record", "expected a JSON object");
      for (const char* f : {"y1", "y2", "gt"})
        if (!j.contains(f)) throw SchemaError(f, "missing field");
      const auto& p = ctx.settings.parser;
      triples.push_back({graph_or_caption(j["y1"], "y1", p), graph_or_caption(j["y2"], "y2", p),
                         graph_or_caption(j["gt"], "gt", p)});
      line_of.push_back(i);
      ids.push_back(j.value("id", json()));
    } catch (const std::exception& e) {
      errors.emplace_back(i, e.what());
    }
  }

  const auto breakdowns = score_reward_batch(triples, *ctx.backend, ctx.settings.reward);

  Output out(args.output, ctx.out);
  std::size_t next_error = 0, next_ok = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (next_ok < line_of.size() && line_of[next_ok] == i) {
      json rec{{"line", i + 1}, {"reward", to_json(breakdowns[next_ok])}};
      if (!ids[next_ok].is_null()) rec["id"] = ids[next_ok];
      *out << rec.dump() << "\n";
      sum += breakdowns[next_ok].total;
      ++next_ok;
    } else if (next_error < errors.size() && errors[next_error].first == i) {
      *out << json{{"line", i + 1}, {"error", errors[next_error].second}}.dump() << "\n";
      ctx.err << args.input << ":" << i + 1 << ": " << errors[next_error].second << "\n";
      ++next_error;
    }
  }

  json summary{{"records", triples.size()},
               {"errors", errors.size()},
               {"mean_total", triples.empty() ? json(nullptr) : json(sum / static_cast<double>(triples.size()))},
               {"manifest", ctx.manifest("reward", {args.input}).to_json()}};
  if (out.is_file()) ctx.manifest("reward", {args.input}).write_sidecar(out.path());
  if (!args.summary.empty()) {
    std::ofstream s(args.summary);
    if (!s) throw InputError("cannot write " + args.summary);
    s << summary.dump(2) << "\n";
  } else {
    ctx.err << "scored " << triples.size() << " pairs, " << errors.size() << " errors, mean reward "
            << summary["mean_total"].dump() << "\n";
  }
  return !errors.empty() && ctx.global.strict ? kInputError : kSuccess;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string corpus;
  std::string answers;
  std::string output;
  std::string weights;
  bool micro = false;
};

int cmd_evaluate(Context& ctx, const EvaluateArgs& args) {
  if (!args.weights.empty()) ctx.settings.set("aggregate_weights", args.weights);
  ctx.settings.validate();

  const auto lines = read_lines(args.corpus);
  std::vector<EvaluationRecord> records;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      records.push_back(evaluation_record_from_json(json::parse(lines[i]), ctx.settings.parser));
    } catch (const std::exception& e) {
      ++bad;
      ctx.err << args.corpus << ":" << i + 1 << ": skipped: " << e.what() << "\n";
    }
  }
  if (bad > 0 && ctx.global.strict) return kInputError;

  std::optional<std::vector<QaAnswer>> answers;
  std::vector<std::string> inputs{args.corpus};
  if (!args.answers.empty()) {
    inputs.push_back(args.answers);
    answers.emplace();
    const auto answer_lines = read_lines(args.answers);
    for (std::size_t i = 0; i < answer_lines.size(); ++i) {
      if (blank(answer_lines[i])) continue;
      try {
        answers->push_back(qa_answer_from_json(json::parse(answer_lines[i])));
      } catch (const json::exception& e) {
        throw InputError(args.answers + ":" + std::to_string(i + 1) + ": " + e.what());
      } catch (const SchemaError& e) {
        throw InputError(args.answers + ":" + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }

  CorpusOptions options;
  options.weights = ctx.settings.aggregate_weights;
  options.micro = args.micro;
  const CorpusReport report = evaluate_corpus(records, answers, *ctx.backend, options);

  json j = to_json(report);
  j["manifest"] = ctx.manifest("evaluate", inputs).to_json();
  if (!args.output.empty()) {
    std::ofstream o(args.output);
    if (!o) throw InputError("cannot write " + args.output);
    o << j.dump(2) << "\n";
  }
  ctx.out << render_table(report);
  char buf[96];
  std::snprintf(buf, sizeof buf, "weights (objects, attributes, relations) = (%g, %g, %g), %s averaging\n",
                options.weights.objects, options.weights.attributes, options.weights.relations,
                options.micro ? "micro" : "macro");
  ctx.out << buf;
  return kSuccess;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenes;
  std::string synthetic;
  std::string trace;
  std::string policy;
};

std::vector<SyntheticScene> synthetic_from_spec(const std::string& spec, std::uint64_t seed) {
  unsigned long count = 0, truth = 0, distractors = 0;
  char x1 = 0, x2 = 0;
  std::istringstream in(spec);
  if (!(in >> count >> x1 >> truth >> x2 >> distractors) || x1 != 'x' || x2 != 'x' || !in.eof())
    throw ConfigError("synthetic", "expected COUNTxTRUTHxDISTRACTORS, e.g. 10x4x2");
  return make_synthetic_scenes(count, truth, distractors, seed);
}

int cmd_simulate(Context& ctx, const SimulateArgs& args) {
  if (!ctx.global.seed) {
    ctx.err << "simulate: --seed is required\n";
    return kConfigError;
  }
  if (args.scenes.empty() == args.synthetic.empty()) {
    ctx.err << "simulate: give exactly one of SCENES or --synthetic\n";
    return kConfigError;
  }
  std::vector<SyntheticScene> scenes;
  std::vector<std::string> inputs;
  if (!args.synthetic.empty()) {
    scenes = synthetic_from_spec(args.synthetic, *ctx.global.seed);
    inputs.push_back("synthetic:" + args.synthetic);
  } else {
    inputs.push_back(args.scenes);
    const auto lines = read_lines(args.scenes);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (blank(lines[i])) continue;
      try {
        scenes.push_back(SyntheticScene::from_json(json::parse(lines[i])));
      } catch (const json::exception& e) {
        throw InputError(args.scenes + ":" + std::to_string(i + 1) + ": " + e.what());
      } catch (const SchemaError& e) {
        throw InputError(args.scenes + ":" + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }

  const SimEnvironment env(std::move(scenes));
  const TrainResult result = train(env, ctx.settings.train, *ctx.backend);

  Output trace(args.trace, ctx.out);
  *trace << trace_csv(result.trace);
  const auto manifest = ctx.manifest("simulate", inputs);
  if (trace.is_file()) manifest.write_sidecar(trace.path());
  if (!args.policy.empty()) {
    std::ofstream p(args.policy);
    if (!p) throw InputError("cannot write " + args.policy);
    json j = result.policy.to_json();
    j["turn1_distance_from_reference"] = turn1_distance(result.policy, result.reference);
    j["manifest"] = manifest.to_json();
    p << j.dump(2) << "\n";
  }
  const TraceRow& first = result.trace.front();
  const TraceRow& last = result.trace.back();
  char buf[160];
  std::snprintf(buf, sizeof buf, "f1_turn2 %.4f -> %.4f, f1_turn1 %.4f -> %.4f over %zu steps\n", first.f1_turn2,
                last.f1_turn2, first.f1_turn1, last.f1_turn1, result.trace.size());
  ctx.err << buf;
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caption scene-graph correction reward and evaluation tool", "capreward"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Key-value config file");
  app.add_option("--backend", g.backend, "Similarity backend: exact | ngram[:N] | vectors:PATH");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every random draw");
  app.add_flag("--strict", g.strict, "Fail on the first malformed record");
  app.add_option("--set", g.sets, "Override a config key (key=value), repeatable");
  app.add_option("--threads", g.threads, "OpenMP thread count (0 = runtime default)");

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse captions JSONL into scene-graph JSONL");
  parse->add_option("input", parse_args.input, "Captions JSONL")->required();
  parse->add_option("-o,--output", parse_args.output, "Graphs JSONL (default: stdout)");

  RewardArgs reward_args;
  auto* reward = app.add_subcommand("reward", "Score {y1, y2, gt} pairs with the correction reward");
  reward->add_option("input", reward_args.input, "Pairs JSONL")->required();
  reward->add_option("-o,--output", reward_args.output, "Breakdown JSONL (default: stdout)");
  reward->add_option("--summary", reward_args.summary, "Summary JSON path");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Object/attribute/relation metrics over a corpus");
  evaluate->add_option("corpus", eval_args.corpus, "Evaluation JSONL")->required();
  evaluate->add_option("--answers", eval_args.answers, "Relation QA answers JSONL");
  evaluate->add_option("-o,--output", eval_args.output, "Report JSON path");
  evaluate->add_option("--weights", eval_args.weights, "Aggregate weights objects,attributes,relations");
  evaluate->add_flag("--micro", eval_args.micro, "Pool counts across images instead of averaging");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Train the two-turn toy policy with the reward");
  simulate->add_option("scenes", sim_args.scenes, "Scenes JSONL");
  simulate->add_option("--synthetic", sim_args.synthetic, "Generate scenes: COUNTxTRUTHxDISTRACTORS");
  simulate->add_option("--trace", sim_args.trace, "Trace CSV path (default: stdout)");
  simulate->add_option("--policy", sim_args.policy, "Final policy JSON path");

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kConfigError;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  Context ctx{g, Settings{}, nullptr, args, out, err};
  try {
    if (!g.config.empty()) ctx.settings.load_file(g.config);
    for (const auto& s : g.sets) ctx.settings.set_assignment(s);
    if (g.seed) ctx.settings.set("rng_seed", std::to_string(*g.seed));
    ctx.settings.validate();
    ctx.backend = make_backend(g.backend);

    if (parse->parsed()) return cmd_parse(ctx, parse_args);
    if (reward->parsed()) return cmd_reward(ctx, reward_args);
    if (evaluate->parsed()) return cmd_evaluate(ctx, eval_args);
    if (simulate->parsed()) return cmd_simulate(ctx, sim_args);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    err << "numeric divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kInputError;
  }
  return kConfigError;
}

}  // namespace capreward::cli
