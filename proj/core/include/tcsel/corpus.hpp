#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tcsel/error.hpp"

namespace tcsel {

// Activation states of the configurable features selecting one product variant.
class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(std::vector<std::string> feature_ids, std::vector<int> states);

  const std::vector<std::string>& feature_ids() const { return feature_ids_; }
  const std::vector<int>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }

  // Returns the activation bit of a feature, or nullopt when the feature is not
  // part of the vector.
  std::optional<int> state_of(std::string_view feature_id) const;

 private:
  std::vector<std::string> feature_ids_;
  std::vector<int> states_;
};

enum class ImpactAction { AddFile, RemoveFile, AddLines, RemoveLines };

std::string_view to_string(ImpactAction action);
ImpactAction parse_impact_action(std::string_view text);
inline bool is_line_action(ImpactAction a) {
  return a == ImpactAction::AddLines || a == ImpactAction::RemoveLines;
}

// Inclusive, 1-based.
struct LineRange {
  int start = 1;
  int end = 1;

  int length() const { return end - start + 1; }
  friend bool operator==(const LineRange&, const LineRange&) = default;
  friend auto operator<=>(const LineRange&, const LineRange&) = default;
};

struct ArtifactImpact {
  std::string path;
  ImpactAction action = ImpactAction::AddFile;
  std::optional<LineRange> lines;
  // Content added by add-file / add-lines.
  std::string payload;

  // Throws DataError naming the violated field.
  void validate() const;
};

// Links one feature to the artifacts its activation changes and to the test
// cases that verify it (the ground truth).
struct FeatureChain {
  std::string feature_id;
  std::vector<ArtifactImpact> impacts;
  std::set<std::string> relevant_test_cases;

  void validate() const;
  // Paths touched by any impact.
  std::set<std::string> targets() const;
};

enum class DocumentDomain { Implementation, Test };

struct Document {
  std::string id;
  std::string path;
  DocumentDomain domain = DocumentDomain::Implementation;
  std::string text;
  bool configured = false;
};

enum class CorpusKind { Manual, Minimal, Automatic };

std::string_view to_string(CorpusKind kind);

struct Corpus {
  std::string label;
  CorpusKind kind = CorpusKind::Manual;
  FeatureVector feature_vector;
  std::vector<Document> documents;

  void validate() const;
  const Document* find(std::string_view id) const;
  std::size_t configured_count() const;
};

struct TestCase {
  std::string id;
  std::string name;
  std::string module_name;
  std::string module_info;
  std::string assumptions;
  std::string initialization;
  std::string acceptance_criteria;
  std::string objective;
  std::vector<std::string> steps;

  bool has_content() const;
};

// Text helpers shared with the variant machinery.
std::vector<std::string> split_lines(std::string_view text, bool* trailing_newline = nullptr);
std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline);

// Lossy UTF-8 decode: invalid sequences become U+FFFD.
std::string decode_utf8_lossy(std::string_view bytes);
// True when the first 8192 bytes contain a NUL byte.
bool looks_binary(std::string_view bytes);

// Glob over forward-slash relative paths. `*` and `?` do not cross '/', `**`
// does. A pattern without '/' is matched against the file name only.
bool glob_match(std::string_view pattern, std::string_view path);

struct IngestOptions {
  std::vector<std::string> include_globs{"**"};
  std::vector<std::string> exclude_globs;
  std::string label;
  CorpusKind kind = CorpusKind::Manual;
};

// One document per matching regular text file, ordered by id. Binary and
// unreadable files are skipped with a warning.
Corpus ingest_tree(const std::filesystem::path& root, const IngestOptions& options,
                   Warnings* warnings = nullptr);

// Realizes the feature-activated (activated = true) or feature-deactivated
// product variant of `base` for one chain.
Corpus apply_variant(const Corpus& base, const FeatureChain& chain, bool activated);

// Undoes the additions of an activated variant. Used to check the round trip.
Corpus revert_variant(const Corpus& activated, const FeatureChain& chain);

// Restricts an activated corpus to its configured documents.
Corpus minimal_corpus(const Corpus& activated);

FeatureChain parse_chain(std::string_view json_text, const std::string& origin);
FeatureChain load_chain(const std::filesystem::path& path);
std::string chain_to_json(const FeatureChain& chain);

TestCase parse_test_case(std::string_view json_text, const std::string& origin);
// Loads every *.json file in `dir`, sorted by file name.
std::vector<TestCase> load_test_cases(const std::filesystem::path& dir);
std::string test_case_to_json(const TestCase& tc);

}  // namespace tcsel
