#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lexmemm::cli {

inline constexpr const char* kToolVersion = "lexmemm 1.0.0";

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kConfigError = 3,
  kInternalError = 4,
  kIoError = 5,
  kModelFormatError = 6,
  kNumericError = 7,
};

struct LexiconFlags {
  std::optional<std::string> path;
  bool no_case_fallback = false;
  bool project = false;
  std::string separators = ":+.-";
  std::string punct_tag;
};

struct TrainOptions {
  std::string train_path;
  std::string model_path;
  LexiconFlags lexicon;
  bool embed_lexicon = false;
  int cutoff = 1;
  double sigma2 = 1.0;
  int max_iterations = 200;
  double tolerance = 1e-5;
  int beam = 3;
  bool no_merge_states = false;
  unsigned long long seed = 0;  // reserved: training is deterministic
  std::string manifest_path = "lexmemm.manifest.jsonl";
};

struct TagOptions {
  std::string model_path;
  std::string input_path;
  std::optional<std::string> output_path;  // stdout when absent
  std::string format = "raw";              // raw | conllu
  std::optional<std::string> lexicon_path;
  bool allow_lexicon_mismatch = false;
  std::optional<int> beam;
  unsigned threads = 1;
  std::string manifest_path = "lexmemm.manifest.jsonl";
};

struct EvalOptions {
  std::string model_path;
  std::string gold_path;
  std::string train_path;
  std::optional<std::string> report_path;
  std::string label;
  std::optional<std::string> lexicon_path;
  bool allow_lexicon_mismatch = false;
  std::optional<int> beam;
  unsigned threads = 1;
  std::size_t window = 60000;
  std::string manifest_path = "lexmemm.manifest.jsonl";
};

struct AnalyzeOptions {
  std::vector<std::string> train_paths;
  std::size_t window = 60000;
  std::optional<std::string> output_path;
  std::string manifest_path = "lexmemm.manifest.jsonl";
};

struct MergeOptions {
  std::vector<std::string> report_paths;
  std::optional<std::string> output_path;
  std::string manifest_path = "lexmemm.manifest.jsonl";
};

// Each command writes its human-readable output to `out` and appends one
// JSON manifest line. Errors propagate as lexmemm exceptions.
void cmd_train(const TrainOptions& opts, std::ostream& out);
void cmd_tag(const TagOptions& opts, std::ostream& out);
void cmd_eval(const EvalOptions& opts, std::ostream& out);
void cmd_analyze(const AnalyzeOptions& opts, std::ostream& out);
void cmd_merge(const MergeOptions& opts, std::ostream& out);

// Raw-format token rendering: '_' and '\' in forms are backslash-escaped.
std::string escape_form(const std::string& form);
std::string unescape_form(const std::string& escaped);

// Parses argv and dispatches; returns a process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lexmemm::cli
