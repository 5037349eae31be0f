#include "tcsel/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stoplists_data.hpp"
#include "tcsel/porter.hpp"

namespace tcsel {

Stoplist parse_stoplist(std::string name, std::string_view text) {
  Stoplist list;
  list.name = std::move(name);
  for (const auto& raw : split_lines(text)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string term(line.substr(first, last - first + 1));
    if (std::any_of(term.begin(), term.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
      throw ConfigError("stoplist " + list.name + ": entry '" + term + "' is not lowercase");
    }
    list.terms.insert(std::move(term));
  }
  return list;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read stoplist " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stoplist(path.stem().string(), ss.str());
}

Stoplist builtin_stoplist(std::string_view name) {
  for (const auto& entry : detail::kBuiltinStoplists) {
    if (entry.name == name) return parse_stoplist(std::string(name), entry.text);
  }
  throw ConfigError("unknown builtin stoplist '" + std::string(name) + "'");
}

std::vector<std::string> builtin_stoplist_names() {
  std::vector<std::string> names;
  for (const auto& entry : detail::kBuiltinStoplists) names.emplace_back(entry.name);
  return names;
}

Stoplist resolve_stoplist(const std::string& name_or_path) {
  for (const auto& entry : detail::kBuiltinStoplists) {
    if (entry.name == name_or_path) return builtin_stoplist(name_or_path);
  }
  return load_stoplist(name_or_path);
}

void PipelineConfig::validate() const {
  if (min_token_len < 1) throw ConfigError("min_token_len must be >= 1");
  for (const auto& list : stoplists) {
    for (const auto& term : list.terms) {
      if (std::any_of(term.begin(), term.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
        throw ConfigError("stoplist " + list.name + ": entry '" + term + "' is not lowercase");
      }
    }
  }
}

std::string_view to_string(TestContentVariant v) {
  switch (v) {
    case TestContentVariant::V1Full: return "V1";
    case TestContentVariant::V2NoSteps: return "V2";
    case TestContentVariant::V3AcceptanceObjective: return "V3";
  }
  return "?";
}

TestContentVariant parse_variant(std::string_view text) {
  if (text == "V1" || text == "v1" || text == "V1-full") return TestContentVariant::V1Full;
  if (text == "V2" || text == "v2" || text == "V2-no-steps") return TestContentVariant::V2NoSteps;
  if (text == "V3" || text == "v3" || text == "V3-acceptance-objective") {
    return TestContentVariant::V3AcceptanceObjective;
  }
  throw ConfigError("unknown test content variant '" + std::string(text) + "'");
}

std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& cfg) {
  auto token_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!token_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && token_char(text[j])) ++j;
    std::string token(text.substr(i, j - i));
    i = j;
    if (token.front() >= '0' && token.front() <= '9') continue;
    if (static_cast<int>(token.size()) < cfg.min_token_len) continue;
    if (cfg.lowercase) {
      std::transform(token.begin(), token.end(), token.begin(),
                     [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; });
    }
    out.push_back(std::move(token));
  }
  return out;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& terms,
                                          const std::vector<Stoplist>& stoplists) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    bool stop = std::any_of(stoplists.begin(), stoplists.end(),
                            [&](const Stoplist& s) { return s.contains(term); });
    if (!stop) out.push_back(term);
  }
  return out;
}

std::vector<std::string> stem(const std::vector<std::string>& terms) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& term : terms) out.push_back(porter_stem(term));
  return out;
}

std::string test_case_text(const TestCase& tc, TestContentVariant variant) {
  std::vector<const std::string*> fields;
  if (variant != TestContentVariant::V3AcceptanceObjective) {
    fields = {&tc.name, &tc.module_name, &tc.module_info, &tc.assumptions, &tc.initialization};
  }
  fields.push_back(&tc.acceptance_criteria);
  fields.push_back(&tc.objective);
  if (variant == TestContentVariant::V1Full) {
    for (const auto& step : tc.steps) fields.push_back(&step);
  }
  std::string out;
  for (const auto* field : fields) {
    if (field->empty()) continue;
    if (!out.empty()) out += ' ';
    out += *field;
  }
  return out;
}

ProcessedDocument preprocess_text(std::string doc_id, std::string_view text,
                                  const PipelineConfig& cfg) {
  ProcessedDocument out;
  out.doc_id = std::move(doc_id);
  out.terms = remove_stopwords(tokenize(text, cfg), cfg.stoplists);
  if (cfg.stemming) out.terms = stem(out.terms);
  return out;
}

ProcessedDocument preprocess(const Document& doc, const PipelineConfig& cfg, Warnings* warnings) {
  if (cfg.fact_extraction && doc.domain == DocumentDomain::Implementation) {
    std::string facts = extract_facts(doc.text, language_for_path(doc.path), warnings);
    return preprocess_text(doc.id, facts, cfg);
  }
  return preprocess_text(doc.id, doc.text, cfg);
}

}  // namespace tcsel
