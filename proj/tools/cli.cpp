#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include "tokext/tokext.hpp"

namespace tokext::cli {
namespace {

namespace fs = std::filesystem;
using Params = std::vector<std::pair<std::string, std::string>>;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIncompatibleModels:
    case ErrorCode::kKindConflict: return kExitIncompatible;
    case ErrorCode::kJoinFailure: return kExitJoin;
    case ErrorCode::kDuplicateSeries: return kExitDuplicateSeries;
    default: return kExitInput;
  }
}

std::vector<std::string> normalize_lines(std::vector<std::string> lines, bool nfc) {
  if (nfc) {
    for (auto& line : lines) line = utf8::nfc(line);
  }
  return lines;
}

std::string unescape(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out.push_back(text[i]);
      continue;
    }
    switch (text[++i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(text[i]);
    }
  }
  return out;
}

std::string escape_for_manifest(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Writes `<out>.manifest.json` next to a command's primary output.
void write_manifest(const std::string& command, const std::string& out_path,
                    const std::vector<std::string>& inputs, Params params) {
  std::vector<std::string> contents;
  contents.reserve(inputs.size());
  for (const auto& path : inputs) contents.push_back(io::read_file(path));
  RunManifest m;
  m.command = command;
  m.input_paths = inputs;
  m.config_digest = config_digest(command, params, contents);
  m.parameters = std::move(params);
  m.tool_version = std::string(tool_version());
  m.timestamp = manifest_timestamp();
  io::write_file(out_path + ".manifest.json", serialize_manifest(m));
}

template <typename T, typename Fn>
std::vector<T> parse_file(const std::string& path, Fn&& parse) {
  std::istringstream in(io::read_file(path));
  try {
    return parse(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) out += line + "\n";
  return out;
}

struct TrainArgs {
  std::string corpus, out;
  std::size_t vocab_size = 0;
  std::uint64_t min_pair_freq = 2;
  bool nfc = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto lines = normalize_lines(io::read_lines(a.corpus), a.nfc);
  TrainerConfig config;
  config.target_vocab_size = a.vocab_size;
  config.min_pair_frequency = a.min_pair_freq;
  const TokenizerModel model = train(lines, config);
  save_tokenizer(model, a.out);
  write_manifest("train", a.out, {a.corpus},
                 {{"vocab_size", std::to_string(a.vocab_size)},
                  {"min_pair_freq", std::to_string(a.min_pair_freq)},
                  {"nfc", a.nfc ? "true" : "false"}});
  out << "trained " << model.size() << " tokens, " << model.merges().size() << " merges -> "
      << a.out << "\n";
  return kExitOk;
}

struct ExtendArgs {
  std::string base, addon, out;
};

int cmd_extend(const ExtendArgs& a, std::ostream& out) {
  const TokenizerModel base = load_tokenizer(a.base);
  const TokenizerModel addon = load_tokenizer(a.addon);
  const TokenizerModel extended = extend(base, addon);
  save_tokenizer(extended, a.out);
  write_manifest("extend", a.out, {a.base, a.addon}, {});
  out << "extended " << base.size() << " -> " << extended.size() << " tokens, "
      << base.merges().size() << " -> " << extended.merges().size() << " merges -> " << a.out
      << "\n";
  return kExitOk;
}

struct StatsArgs {
  std::vector<std::string> tokenizers, labels;
  std::string sentences, out;
  bool nfc = false;
  unsigned threads = 1;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  if (!a.labels.empty() && a.labels.size() != a.tokenizers.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--label must be given once per --tokenizer");
  }
  std::vector<TokenizerModel> models;
  for (const auto& path : a.tokenizers) models.push_back(load_tokenizer(path));
  std::vector<LabeledModel> labeled;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string label =
        a.labels.empty() ? fs::path(a.tokenizers[i]).stem().string() : a.labels[i];
    labeled.push_back({label, std::cref(models[i])});
  }
  const auto sentences = normalize_lines(io::read_lines(a.sentences), a.nfc);
  const std::string table = comparison_csv(compare(labeled, sentences, a.threads));
  if (a.out.empty()) {
    out << table;
    return kExitOk;
  }
  io::write_file(a.out, table);
  std::vector<std::string> inputs = a.tokenizers;
  inputs.push_back(a.sentences);
  Params params{{"nfc", a.nfc ? "true" : "false"}};
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    params.emplace_back("label." + std::to_string(i), labeled[i].label);
  }
  write_manifest("stats", a.out, inputs, std::move(params));
  return kExitOk;
}

struct TasksArgs {
  std::string sentences, base, ext, out;
  std::string separator = "\\n";
  bool nfc = false;
};

int cmd_tasks(const TasksArgs& a, std::ostream& out) {
  auto sentences = parse_file<TestSentence>(a.sentences, parse_test_sentences);
  if (a.nfc) {
    for (auto& s : sentences) {
      s.prefix = utf8::nfc(s.prefix);
      s.target = utf8::nfc(s.target);
      s.suffix = utf8::nfc(s.suffix);
    }
  }
  const TokenizerModel base = load_tokenizer(a.base);
  const TokenizerModel ext = load_tokenizer(a.ext);
  const std::string separator = unescape(a.separator);
  const TaskBuild build = build_tasks(sentences, base, ext, separator);

  std::vector<std::string> lines;
  for (const auto& item : build.items) lines.push_back(serialize_task_item(item));
  io::write_file(a.out, join_lines(lines));
  lines.clear();
  for (const auto& ex : build.exclusions) lines.push_back(serialize_exclusion(ex));
  io::write_file(a.out + ".exclusions.jsonl", join_lines(lines));
  write_manifest("tasks", a.out, {a.sentences, a.base, a.ext},
                 {{"separator", escape_for_manifest(separator)},
                  {"nfc", a.nfc ? "true" : "false"}});
  out << build.items.size() << " task items, " << build.exclusions.size()
      << " excluded sentences -> " << a.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string tasks, tokenizer, model, out;
  bool nfc = false;
  unsigned threads = 1;
};

struct ModelSpec {
  std::string kind;
  std::string path;
  std::size_t order = 0;
  double k = 0.0;
};

ModelSpec parse_model_spec(const std::string& spec) {
  ModelSpec m;
  const auto colon = spec.find(':');
  m.kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kInvalidArgument, "--model '" + spec + "': " + why);
  };
  if (m.kind == "uniform") {
    if (colon != std::string::npos) throw bad("uniform takes no arguments");
  } else if (m.kind == "ngram") {
    const auto second = rest.rfind(',');
    const auto first = second == std::string::npos ? second : rest.rfind(',', second - 1);
    if (first == std::string::npos || second == 0) throw bad("expected ngram:<corpus>,<order>,<k>");
    m.path = rest.substr(0, first);
    try {
      std::size_t used = 0;
      const std::string order = rest.substr(first + 1, second - first - 1);
      m.order = std::stoul(order, &used);
      if (used != order.size()) throw bad("order is not an integer");
      const std::string k = rest.substr(second + 1);
      m.k = std::stod(k, &used);
      if (used != k.size()) throw bad("k is not a number");
    } catch (const std::logic_error&) {
      throw bad("order and k must be numbers");
    }
    if (m.path.empty()) throw bad("missing corpus path");
  } else if (m.kind == "suffix" || m.kind == "offline") {
    if (colon == std::string::npos) throw bad("missing path");
    m.path = rest;
    if (m.kind == "offline" && m.path.empty()) throw bad("missing scores path");
  } else {
    throw bad("expected uniform | ngram:<corpus,order,k> | suffix:<corpus> | offline:<scores>");
  }
  return m;
}

std::vector<TokenSequence> encode_corpus(const TokenizerModel& tokenizer,
                                         const std::string& path, bool nfc,
                                         unsigned threads) {
  const auto lines = normalize_lines(io::read_lines(path), nfc);
  return encode_batch(tokenizer, lines, threads);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto items = parse_file<TaskItem>(a.tasks, parse_task_items);
  const TokenizerModel tokenizer = load_tokenizer(a.tokenizer);
  const ModelSpec spec = parse_model_spec(a.model);

  EvaluationRun run;
  if (spec.kind == "offline") {
    const OfflineScores scores(load_offline_scores(spec.path));
    run = evaluate_all(scores, tokenizer, items);
  } else {
    std::unique_ptr<LanguageModel> model;
    if (spec.kind == "uniform") {
      model = std::make_unique<UniformModel>(tokenizer.size());
    } else if (spec.kind == "ngram") {
      const auto seqs = encode_corpus(tokenizer, spec.path, a.nfc, a.threads);
      model = std::make_unique<NGramModel>(ngram_train(seqs, spec.order, spec.k, tokenizer.size()));
    } else {
      std::vector<TokenSequence> seqs;
      if (!spec.path.empty()) seqs = encode_corpus(tokenizer, spec.path, a.nfc, a.threads);
      model = std::make_unique<SuffixModel>(std::move(seqs), tokenizer.size());
    }
    run = evaluate_all(*model, tokenizer, items, a.threads);
  }

  std::vector<ItemResult> results;
  std::vector<std::string> lines;
  for (const auto& ev : run.evaluations) {
    for (const auto& step : ev.steps) lines.push_back(serialize_step_record(step));
    results.push_back(ev.result);
  }
  io::write_file(a.out + ".steps.jsonl", join_lines(lines));
  const auto aggregates = aggregate(results, items);
  io::write_file(a.out + ".aggregates.csv", aggregates_csv(aggregates));
  lines.clear();
  for (const auto& ex : run.exclusions) lines.push_back(serialize_exclusion(ex));
  io::write_file(a.out + ".exclusions.jsonl", join_lines(lines));

  std::vector<std::string> inputs{a.tasks, a.tokenizer};
  if (!spec.path.empty()) inputs.push_back(spec.path);
  write_manifest("eval", a.out, inputs,
                 {{"model", a.model},
                  {"nfc", a.nfc ? "true" : "false"},
                  {"teacher_forcing", "true"},
                  {"normalization_baseline", "all earlier scored positions from input token 2"},
                  {"cross_entropy_units", "nats"}});
  out << run.evaluations.size() << " items scored, " << run.exclusions.size()
      << " excluded, " << aggregates.size() << " task aggregates -> " << a.out
      << ".aggregates.csv\n";
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> aggregates, labels;
  std::vector<std::uint64_t> steps;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.steps.size() != a.aggregates.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--step must be given once per aggregate file");
  }
  if (!a.labels.empty() && a.labels.size() != a.aggregates.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--label must be given once per aggregate file");
  }
  std::vector<CheckpointAggregates> checkpoints;
  for (std::size_t i = 0; i < a.aggregates.size(); ++i) {
    CheckpointAggregates cp;
    cp.label = a.labels.empty() ? fs::path(a.aggregates[i]).stem().string() : a.labels[i];
    cp.training_step = a.steps[i];
    try {
      cp.aggregates = parse_aggregates_csv(io::read_file(a.aggregates[i]));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      throw Error(e.code(), a.aggregates[i] + ": " + e.what());
    }
    checkpoints.push_back(std::move(cp));
  }
  const auto points = build_series(checkpoints);
  const std::string table = series_csv(points);
  if (a.out.empty()) {
    out << table;
    return kExitOk;
  }
  io::write_file(a.out, table);
  Params params;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    params.emplace_back("checkpoint." + std::to_string(i),
                        checkpoints[i].label + "@" + std::to_string(checkpoints[i].training_step));
  }
  write_manifest("report", a.out, a.aggregates, std::move(params));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tokenizer extension and next-token-prediction evaluation toolkit", "tokext"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a byte-fallback BPE tokenizer");
  train->add_option("--corpus", train_args.corpus, "UTF-8 text, one sentence per line")->required();
  train->add_option("--vocab-size", train_args.vocab_size, "Target vocabulary size")->required();
  train->add_option("--min-pair-freq", train_args.min_pair_freq, "Minimum pair count to merge")
      ->capture_default_str();
  train->add_option("--out", train_args.out, "Output tokenizer file")->required();
  train->add_flag("--nfc", train_args.nfc, "NFC-normalize the corpus first");

  ExtendArgs extend_args;
  auto* ext = app.add_subcommand("extend", "Append addon vocabulary and merges to a base tokenizer");
  ext->add_option("--base", extend_args.base)->required();
  ext->add_option("--addon", extend_args.addon)->required();
  ext->add_option("--out", extend_args.out)->required();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Unknown-token rate and tokens per sentence");
  stats->add_option("--tokenizer", stats_args.tokenizers, "Tokenizer file (repeatable)")
      ->required()
      ->allow_extra_args(false);
  stats->add_option("--label", stats_args.labels, "Row label per tokenizer (repeatable)")
      ->allow_extra_args(false);
  stats->add_option("--sentences", stats_args.sentences, "UTF-8 text, one sentence per line")
      ->required();
  stats->add_option("--out", stats_args.out, "CSV output (default: stdout)");
  stats->add_option("--threads", stats_args.threads)->capture_default_str();
  stats->add_flag("--nfc", stats_args.nfc);

  TasksArgs tasks_args;
  auto* tasks = app.add_subcommand("tasks", "Build easy/hard x token/character/word NTP tasks");
  tasks->add_option("--sentences", tasks_args.sentences, "Test sentences (JSON Lines)")->required();
  tasks->add_option("--base", tasks_args.base, "Base tokenizer")->required();
  tasks->add_option("--tokenizer,--ext", tasks_args.ext, "Extended tokenizer")->required();
  tasks->add_option("--out", tasks_args.out, "Task file (JSON Lines)")->required();
  tasks->add_option("--separator", tasks_args.separator,
                    "Joiner between the full sentence and the prefix in easy inputs")
      ->capture_default_str();
  tasks->add_flag("--nfc", tasks_args.nfc);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score task items and aggregate the metrics");
  eval->add_option("--tasks", eval_args.tasks)->required();
  eval->add_option("--tokenizer", eval_args.tokenizer)->required();
  eval->add_option("--model", eval_args.model,
                   "uniform | ngram:<corpus>,<order>,<k> | suffix:<corpus> | offline:<scores>")
      ->required();
  eval->add_option("--out", eval_args.out, "Output prefix")->required();
  eval->add_option("--threads", eval_args.threads)->capture_default_str();
  eval->add_flag("--nfc", eval_args.nfc, "NFC-normalize model corpora");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Merge checkpoint aggregates into a long-format series");
  report->add_option("aggregates", report_args.aggregates, "Aggregate CSV files")->required();
  report->add_option("--label", report_args.labels, "Checkpoint label per file (repeatable)")
      ->allow_extra_args(false);
  report->add_option("--step", report_args.steps, "Training step per file (repeatable)")
      ->required()
      ->allow_extra_args(false);
  report->add_option("--out", report_args.out, "CSV output (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*train) return cmd_train(train_args, out);
    if (*ext) return cmd_extend(extend_args, out);
    if (*stats) return cmd_stats(stats_args, out);
    if (*tasks) return cmd_tasks(tasks_args, out);
    if (*eval) return cmd_eval(eval_args, out);
    if (*report) return cmd_report(report_args, out);
  } catch (const Error& e) {
    err << "tokext: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "tokext: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace tokext::cli
