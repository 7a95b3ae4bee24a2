#include "lexmemm/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexmemm/corpus.hpp"
#include "lexmemm/decoder.hpp"
#include "lexmemm/error.hpp"
#include "lexmemm/eval.hpp"
#include "lexmemm/model.hpp"
#include "lexmemm/persistence.hpp"
#include "lexmemm/text.hpp"

namespace lexmemm::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string file_hash(const std::string& path) { return text::hex64(text::fnv1a64(read_file(path))); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Appends one manifest line for a finished run.
void write_manifest(const std::string& path, const std::string& command, json config, json inputs,
                    Clock::time_point start) {
  json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["config"] = std::move(config);
  m["inputs"] = std::move(inputs);
  m["timestamp"] = utc_timestamp();
  m["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot append manifest '" + path + "'");
  out << m.dump() << '\n';
}

class OutputSink {
 public:
  OutputSink(const std::optional<std::string>& path, std::ostream& fallback) : stream_(&fallback) {
    if (path) {
      file_.open(*path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open '" + *path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  void finish(const std::optional<std::string>& path) {
    stream_->flush();
    if (!*stream_) throw IoError("failed to write " + (path ? "'" + *path + "'" : std::string("output")));
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// Loads a model and attaches the lexicon it needs.
TaggerModel load_tagger(const std::string& model_path, const std::optional<std::string>& lexicon_path,
                        bool allow_mismatch, json& inputs) {
  auto model = load_model_file(model_path);
  inputs["model"] = {{"path", model_path}, {"hash", file_hash(model_path)}};
  if (lexicon_path) {
    auto lexicon = std::make_shared<const Lexicon>(prepare_lexicon_file(*lexicon_path, model.lexicon_prep));
    inputs["lexicon"] = {{"path", *lexicon_path}, {"hash", file_hash(*lexicon_path)}};
    attach_lexicon(model, std::move(lexicon), allow_mismatch);
  } else if (model.features.lexical && !model.embed_lexicon) {
    throw ConfigError("model was trained with lexical features; pass --lexicon");
  }
  return model;
}

DecodeConfig decode_config(const TaggerModel& model, const std::optional<int>& beam) {
  DecodeConfig cfg = model.decode;
  if (beam) cfg.beam_width = *beam;
  cfg.validate();
  return cfg;
}

std::vector<std::vector<std::string>> tag_strings(const TaggerModel& model, const Corpus& corpus,
                                                  const DecodeConfig& cfg, unsigned threads) {
  const auto ids = tag_corpus(model, corpus, cfg, threads);
  std::vector<std::vector<std::string>> out(ids.size());
  for (std::size_t s = 0; s < ids.size(); ++s) {
    for (auto t : ids[s]) out[s].push_back(model.tagset.name(t));
  }
  return out;
}

std::string label_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

std::string escape_form(const std::string& form) {
  std::string out;
  out.reserve(form.size());
  for (char c : form) {
    if (c == '_' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string unescape_form(const std::string& escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == '\\' && i + 1 < escaped.size()) ++i;
    out.push_back(escaped[i]);
  }
  return out;
}

void cmd_train(const TrainOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  json inputs;
  auto corpus = parse_conllu_file(opts.train_path);
  if (!corpus.has_gold_tags()) throw ConfigError("training corpus has untagged tokens");
  inputs["train"] = {{"path", opts.train_path}, {"hash", file_hash(opts.train_path)}};

  FeatureConfig features;
  features.lexical = opts.lexicon.path.has_value();
  features.case_fallback = !opts.lexicon.no_case_fallback;
  TrainConfig train_cfg{opts.sigma2, opts.cutoff, opts.tolerance, opts.max_iterations};
  DecodeConfig decode{opts.beam, !opts.no_merge_states};
  LexiconPreparation prep{opts.lexicon.project, opts.lexicon.separators, opts.lexicon.punct_tag};

  auto lexicon = std::make_shared<const Lexicon>();
  if (opts.lexicon.path) {
    lexicon = std::make_shared<const Lexicon>(prepare_lexicon_file(*opts.lexicon.path, prep));
    inputs["lexicon"] = {{"path", *opts.lexicon.path}, {"hash", file_hash(*opts.lexicon.path)}};
  }
  auto model = train_tagger(corpus, lexicon, features, train_cfg, decode);
  model.lexicon_prep = prep;
  model.embed_lexicon = opts.embed_lexicon && features.lexical;
  const auto bytes = save_model_file(opts.model_path, model);

  const auto& st = model.train_stats;
  out << "trained on " << corpus.token_count() << " tokens, " << model.tagset.size() << " tags, "
      << model.index.size() << " predicates; lexical=" << (features.lexical ? "on" : "off") << "\n"
      << "objective " << st.initial_objective << " -> " << st.final_objective << " after " << st.iterations
      << " iterations (" << (st.converged ? "converged" : "stopped before tolerance") << ", max |grad| "
      << st.gradient_max_norm << ")\n"
      << "wrote " << bytes << " bytes to " << opts.model_path << "\n";

  json config = {{"model", opts.model_path},
                 {"lexical", features.lexical},
                 {"case_fallback", features.case_fallback},
                 {"prefix_max", features.prefix_max},
                 {"suffix_max", features.suffix_max},
                 {"next_affix_max", features.next_affix_max},
                 {"project", prep.project},
                 {"separators", prep.separators},
                 {"punct_tag", prep.punct_tag},
                 {"embed_lexicon", model.embed_lexicon},
                 {"lexicon_fingerprint", model.lexicon_fingerprint},
                 {"cutoff", train_cfg.cutoff},
                 {"sigma2", train_cfg.sigma2},
                 {"max_iter", train_cfg.max_iterations},
                 {"tol", train_cfg.tolerance},
                 {"beam", decode.beam_width},
                 {"merge_states", decode.merge_states},
                 {"seed", opts.seed},
                 {"iterations", st.iterations},
                 {"converged", st.converged},
                 {"final_objective", st.final_objective}};
  inputs["model_hash"] = file_hash(opts.model_path);
  write_manifest(opts.manifest_path, "train", std::move(config), std::move(inputs), start);
}

void cmd_tag(const TagOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  if (opts.format != "raw" && opts.format != "conllu") throw ConfigError("--format must be raw or conllu");
  json inputs;
  const auto model = load_tagger(opts.model_path, opts.lexicon_path, opts.allow_lexicon_mismatch, inputs);
  const auto cfg = decode_config(model, opts.beam);
  const auto content = read_file(opts.input_path);
  inputs["input"] = {{"path", opts.input_path}, {"hash", text::hex64(text::fnv1a64(content))}};

  OutputSink sink(opts.output_path, out);
  auto& os = sink.stream();
  std::istringstream in(content);
  if (opts.format == "raw") {
    std::vector<std::size_t> line_numbers;
    const auto corpus = parse_raw(in, opts.input_path, &line_numbers);
    const auto tags = tag_strings(model, corpus, cfg, opts.threads);
    std::size_t total_lines = 0;
    {
      std::istringstream count(content);
      std::string line;
      while (std::getline(count, line)) ++total_lines;
    }
    std::size_t next = 0;
    for (std::size_t line = 1; line <= total_lines; ++line) {
      if (next < line_numbers.size() && line_numbers[next] == line) {
        const auto& sent = corpus.sentences[next];
        for (std::size_t i = 0; i < sent.size(); ++i) {
          if (i) os << ' ';
          os << escape_form(sent.tokens[i].form) << '_' << tags[next][i];
        }
        ++next;
      }
      os << '\n';
    }
  } else {
    const auto corpus = parse_conllu(in, opts.input_path);
    const auto tags = tag_strings(model, corpus, cfg, opts.threads);
    // Second pass over the original lines, replacing UPOS on token lines.
    std::istringstream lines(content);
    std::string raw;
    std::size_t sent = 0, tok = 0;
    bool in_sentence = false;
    while (std::getline(lines, raw)) {
      const bool cr = !raw.empty() && raw.back() == '\r';
      std::string_view line = text::chomp_cr(raw);
      if (line.find_first_not_of(" \t") == std::string_view::npos) {
        if (in_sentence) {
          ++sent;
          tok = 0;
          in_sentence = false;
        }
        os << raw << '\n';
        continue;
      }
      if (line.front() == '#') {
        os << raw << '\n';
        continue;
      }
      auto cols = text::split(line, '\t');
      if (cols[0].find('-') != std::string_view::npos || cols[0].find('.') != std::string_view::npos) {
        os << raw << '\n';
        continue;
      }
      in_sentence = true;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) os << '\t';
        if (c == 3) {
          os << tags[sent][tok];
        } else {
          os << cols[c];
        }
      }
      ++tok;
      os << (cr ? "\r\n" : "\n");
    }
  }
  sink.finish(opts.output_path);

  json config = {{"format", opts.format},
                 {"beam", cfg.beam_width},
                 {"merge_states", cfg.merge_states},
                 {"threads", opts.threads},
                 {"allow_lexicon_mismatch", opts.allow_lexicon_mismatch},
                 {"output", opts.output_path ? *opts.output_path : std::string("-")}};
  write_manifest(opts.manifest_path, "tag", std::move(config), std::move(inputs), start);
}

void cmd_eval(const EvalOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  json inputs;
  const auto model = load_tagger(opts.model_path, opts.lexicon_path, opts.allow_lexicon_mismatch, inputs);
  const auto cfg = decode_config(model, opts.beam);
  const auto gold = parse_conllu_file(opts.gold_path);
  const auto train = parse_conllu_file(opts.train_path);
  inputs["gold"] = {{"path", opts.gold_path}, {"hash", file_hash(opts.gold_path)}};
  inputs["train"] = {{"path", opts.train_path}, {"hash", file_hash(opts.train_path)}};

  const auto predicted = tag_strings(model, gold, cfg, opts.threads);
  const auto label = opts.label.empty() ? label_of(opts.gold_path) : opts.label;
  auto report = evaluate(gold, predicted, vocabulary(train), label);
  report.ratio_norm = normalized_type_token_ratio(train, opts.window).ratio;

  print_report(out, report);
  if (opts.report_path) {
    std::ofstream rf(*opts.report_path, std::ios::binary | std::ios::trunc);
    if (!rf) throw IoError("cannot open '" + *opts.report_path + "' for writing");
    write_report(rf, report);
    if (!rf) throw IoError("failed to write '" + *opts.report_path + "'");
  } else {
    write_report(out, report);
  }

  json config = {{"beam", cfg.beam_width},
                 {"merge_states", cfg.merge_states},
                 {"threads", opts.threads},
                 {"window", opts.window},
                 {"label", label},
                 {"vocab_match", "case-sensitive"},
                 {"report", opts.report_path ? *opts.report_path : std::string("-")}};
  write_manifest(opts.manifest_path, "eval", std::move(config), std::move(inputs), start);
}

void cmd_analyze(const AnalyzeOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  if (opts.train_paths.empty()) throw ConfigError("analyze needs at least one corpus");
  json inputs = json::array();
  std::vector<Corpus> corpora;
  corpora.reserve(opts.train_paths.size());
  for (const auto& path : opts.train_paths) {
    corpora.push_back(parse_conllu_file(path));
    inputs.push_back({{"path", path}, {"hash", file_hash(path)}});
  }
  std::vector<VariabilityInput> rows_in;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    rows_in.push_back({label_of(opts.train_paths[i]), &corpora[i], std::nullopt});
  }
  const auto rows = lexical_variability_table(rows_in, opts.window);
  OutputSink sink(opts.output_path, out);
  write_variability_table(sink.stream(), rows);
  sink.finish(opts.output_path);
  write_manifest(opts.manifest_path, "analyze", {{"window", opts.window}}, std::move(inputs), start);
}

void cmd_merge(const MergeOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  if (opts.report_paths.empty()) throw ConfigError("merge needs at least one report");
  json inputs = json::array();
  std::vector<EvalReport> reports;
  for (const auto& path : opts.report_paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    reports.push_back(read_report(in, path));
    inputs.push_back({{"path", path}, {"hash", file_hash(path)}});
  }
  const auto macro = macro_average(reports);
  OutputSink sink(opts.output_path, out);
  auto& os = sink.stream();
  const auto pct = [](std::optional<double> v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *v);
    return std::string(buf);
  };
  os << "corpus\toverall\toov\n";
  for (const auto& r : reports) os << r.corpus_label << '\t' << pct(r.overall_accuracy()) << '\t' << pct(r.oov_accuracy()) << '\n';
  os << "macro-avg\t" << pct(macro.overall) << '\t' << pct(macro.oov) << '\n';
  sink.finish(opts.output_path);
  write_manifest(opts.manifest_path, "merge", json::object(), std::move(inputs), start);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicon-augmented MEMM part-of-speech tagger"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a CoNLL-U corpus");
  train_cmd->add_option("corpus", train.train_path, "Training corpus (CoNLL-U)")->required();
  train_cmd->add_option("-o,--model", train.model_path, "Output model file")->required();
  train_cmd->add_option("--lexicon", train.lexicon.path, "External lexicon (form<TAB>tag); enables lexical features");
  train_cmd->add_flag("--no-case-fallback", train.lexicon.no_case_fallback, "Disable lowercase lexicon fallback");
  train_cmd->add_flag("--project", train.lexicon.project, "Project lexicon tags to their coarsest category");
  train_cmd->add_option("--separators", train.lexicon.separators, "Projection separator characters")
      ->capture_default_str();
  train_cmd->add_option("--punct-tag", train.lexicon.punct_tag, "Add missing punctuation entries with this tag");
  train_cmd->add_flag("--embed-lexicon", train.embed_lexicon, "Store the lexicon inside the model file");
  train_cmd->add_option("--cutoff", train.cutoff, "Minimum predicate count")->capture_default_str();
  train_cmd->add_option("--sigma2", train.sigma2, "Gaussian prior variance")->capture_default_str();
  train_cmd->add_option("--max-iter", train.max_iterations, "Maximum optimizer iterations")->capture_default_str();
  train_cmd->add_option("--tol", train.tolerance, "Gradient max-norm tolerance")->capture_default_str();
  train_cmd->add_option("--beam", train.beam, "Default beam width stored in the model")->capture_default_str();
  train_cmd->add_flag("--no-merge-states", train.no_merge_states, "Disable beam state merging");
  train_cmd->add_option("--seed", train.seed, "Reserved; training is deterministic")->capture_default_str();
  train_cmd->add_option("--manifest", train.manifest_path, "Manifest file (appended)")->capture_default_str();

  TagOptions tag;
  unsigned tag_threads = 1;
  auto* tag_cmd = app.add_subcommand("tag", "Tag raw or CoNLL-U text");
  tag_cmd->add_option("model", tag.model_path, "Model file")->required();
  tag_cmd->add_option("input", tag.input_path, "Input file")->required();
  tag_cmd->add_option("-o,--output", tag.output_path, "Output file (default stdout)");
  tag_cmd->add_option("--format", tag.format, "Input/output format")
      ->check(CLI::IsMember({"raw", "conllu"}))
      ->capture_default_str();
  tag_cmd->add_option("--lexicon", tag.lexicon_path, "Lexicon file for lexical models");
  tag_cmd->add_flag("--allow-lexicon-mismatch", tag.allow_lexicon_mismatch, "Skip the lexicon fingerprint check");
  tag_cmd->add_option("--beam", tag.beam, "Beam width (default: model's)");
  tag_cmd->add_option("--threads", tag_threads, "Worker threads")->capture_default_str();
  tag_cmd->add_option("--manifest", tag.manifest_path, "Manifest file (appended)")->capture_default_str();

  EvalOptions ev;
  unsigned eval_threads = 1;
  auto* eval_cmd = app.add_subcommand("eval", "Tag a gold corpus and report overall/OOV accuracy");
  eval_cmd->add_option("model", ev.model_path, "Model file")->required();
  eval_cmd->add_option("gold", ev.gold_path, "Gold corpus (CoNLL-U)")->required();
  eval_cmd->add_option("--train", ev.train_path, "Training corpus, defines the OOV vocabulary")->required();
  eval_cmd->add_option("-o,--report", ev.report_path, "Report file (key<TAB>value)");
  eval_cmd->add_option("--label", ev.label, "Corpus label (default: gold file stem)");
  eval_cmd->add_option("--lexicon", ev.lexicon_path, "Lexicon file for lexical models");
  eval_cmd->add_flag("--allow-lexicon-mismatch", ev.allow_lexicon_mismatch, "Skip the lexicon fingerprint check");
  eval_cmd->add_option("--beam", ev.beam, "Beam width (default: model's)");
  eval_cmd->add_option("--threads", eval_threads, "Worker threads")->capture_default_str();
  eval_cmd->add_option("--window", ev.window, "Type/token ratio window")->capture_default_str();
  eval_cmd->add_option("--manifest", ev.manifest_path, "Manifest file (appended)")->capture_default_str();

  AnalyzeOptions an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Normalized type/token ratio table");
  analyze_cmd->add_option("corpora", an.train_paths, "Training corpora (CoNLL-U)")->required();
  analyze_cmd->add_option("--window", an.window, "Tokens read per corpus")->capture_default_str();
  analyze_cmd->add_option("-o,--output", an.output_path, "Output file (default stdout)");
  analyze_cmd->add_option("--manifest", an.manifest_path, "Manifest file (appended)")->capture_default_str();

  MergeOptions mg;
  auto* merge_cmd = app.add_subcommand("merge", "Macro-average evaluation reports");
  merge_cmd->add_option("reports", mg.report_paths, "Report files")->required();
  merge_cmd->add_option("-o,--output", mg.output_path, "Output file (default stdout)");
  merge_cmd->add_option("--manifest", mg.manifest_path, "Manifest file (appended)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*train_cmd) {
      cmd_train(train, out);
    } else if (*tag_cmd) {
      tag.threads = tag_threads;
      cmd_tag(tag, out);
    } else if (*eval_cmd) {
      ev.threads = eval_threads;
      cmd_eval(ev, out);
    } else if (*analyze_cmd) {
      cmd_analyze(an, out);
    } else if (*merge_cmd) {
      cmd_merge(mg, out);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ModelFormatError& e) {
    err << "model file error: " << e.what() << '\n';
    return kModelFormatError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FingerprintMismatchError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CapacityError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kOk;
}

}  // namespace lexmemm::cli
