#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tcsel/corpus.hpp"
#include "tcsel/error.hpp"
#include "tcsel/facts.hpp"

namespace tcsel {

struct Stoplist {
  std::string name;
  std::unordered_set<std::string> terms;

  bool contains(const std::string& term) const { return terms.contains(term); }
};

// One lowercase term per line; '#' starts a comment.
Stoplist parse_stoplist(std::string name, std::string_view text);
Stoplist load_stoplist(const std::filesystem::path& path);

// Lists bundled with the library: "english" (SMART-style) and "html_js"
// (HTML tag/attribute names and JavaScript keywords).
Stoplist builtin_stoplist(std::string_view name);
std::vector<std::string> builtin_stoplist_names();

// Resolves a builtin name or a stoplist file path.
Stoplist resolve_stoplist(const std::string& name_or_path);

struct PipelineConfig {
  bool lowercase = true;
  int min_token_len = 1;
  std::vector<Stoplist> stoplists;
  bool stemming = false;
  bool fact_extraction = false;

  void validate() const;
};

struct ProcessedDocument {
  std::string doc_id;
  std::vector<std::string> terms;
};

enum class TestContentVariant { V1Full, V2NoSteps, V3AcceptanceObjective };

std::string_view to_string(TestContentVariant v);
TestContentVariant parse_variant(std::string_view text);
inline constexpr TestContentVariant kAllVariants[] = {
    TestContentVariant::V1Full, TestContentVariant::V2NoSteps,
    TestContentVariant::V3AcceptanceObjective};

// Splits on characters outside [A-Za-z0-9_]. Purely numeric tokens and tokens
// starting with a digit are dropped.
std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& cfg);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& terms,
                                          const std::vector<Stoplist>& stoplists);

std::vector<std::string> stem(const std::vector<std::string>& terms);

// Non-empty fields joined by single spaces in the fixed field order.
std::string test_case_text(const TestCase& tc, TestContentVariant variant);

ProcessedDocument preprocess(const Document& doc, const PipelineConfig& cfg,
                             Warnings* warnings = nullptr);
ProcessedDocument preprocess_text(std::string doc_id, std::string_view text,
                                  const PipelineConfig& cfg);

}  // namespace tcsel
