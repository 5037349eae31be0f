#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcsel/corpus.hpp"
#include "tcsel/evaluation.hpp"
#include "tcsel/retrieval.hpp"
#include "tcsel/textprep.hpp"

namespace tcsel::cli {

enum class Model { Vsm, Lsa };

std::string_view to_string(Model m);
Model parse_model(std::string_view text);

// Settings of one pipeline run. Paths are absolute once loaded.
struct RunConfig {
  std::filesystem::path base_tree;
  std::optional<std::filesystem::path> build_output_tree;
  std::vector<std::filesystem::path> chains;
  std::filesystem::path test_cases;
  std::vector<std::string> include{"**"};
  std::vector<std::string> exclude;

  bool lowercase = true;
  int min_token_len = 1;
  std::vector<std::string> stoplists{"english", "html_js"};
  bool stemming = false;
  bool fact_extraction = false;

  std::vector<Model> models{Model::Vsm};
  std::optional<int> k;
  Weighting weighting = Weighting::RawTf;
  std::vector<SummaryStatistic> statistics{SummaryStatistic::Max, SummaryStatistic::Mean};
  std::vector<TestContentVariant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
  std::vector<CorpusKind> corpora;

  std::uint64_t seed = 0;
  int iterations = 10000;
  std::filesystem::path output_dir;
  int workers = 1;

  // Resolves named or file stoplists into a text pipeline configuration.
  PipelineConfig pipeline() const;
};

// Raw key/value settings, each remembering the directory its relative paths
// resolve against.
class RawConfig {
 public:
  struct Setting {
    std::string value;
    std::filesystem::path base_dir;
    std::string origin;
  };

  // `key = value` lines; '#' starts a comment line. Throws ConfigError with
  // the file name and line on malformed input or unknown keys.
  static RawConfig parse(std::string_view text, const std::filesystem::path& base_dir,
                         const std::string& origin);
  static RawConfig load(const std::filesystem::path& file);

  // Applies `key=value` on top of the current settings.
  void set(const std::string& assignment, const std::filesystem::path& base_dir,
           const std::string& origin);
  void set(const std::string& key, std::string value, const std::filesystem::path& base_dir,
           const std::string& origin);
  // Every known key K may be overridden by the environment variable TCSEL_K
  // (upper case). `getenv` is injectable for tests.
  void apply_environment(const std::function<const char*(const char*)>& getenv);

  const std::map<std::string, Setting>& values() const { return values_; }

 private:
  std::map<std::string, Setting> values_;
};

const std::vector<std::string>& known_config_keys();

// Typed view. Validates the run invariants; errors name the offending key.
RunConfig resolve(const RawConfig& raw);

// Creates the output directory and checks it is writable.
void prepare_output_dir(const RunConfig& config);

// Every key except output_dir and workers, in a fixed order with absolute
// paths. Used for the config hash.
std::string canonical_text(const RunConfig& config);

// A complete config file that re-executes the run in the directory holding
// it. `notes` are written as leading comment lines.
std::string manifest_text(const RunConfig& config,
                          const std::vector<std::pair<std::string, std::string>>& notes);

}  // namespace tcsel::cli
