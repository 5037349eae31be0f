#include "tcsel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace tcsel {
namespace fs = std::filesystem;
using nlohmann::json;

FeatureVector::FeatureVector(std::vector<std::string> feature_ids, std::vector<int> states)
    : feature_ids_(std::move(feature_ids)), states_(std::move(states)) {
  if (feature_ids_.size() != states_.size()) {
    throw DataError("feature vector: states.length != feature_ids.length");
  }
  for (int s : states_) {
    if (s != 0 && s != 1) throw DataError("feature vector: state must be 0 or 1");
  }
}

std::optional<int> FeatureVector::state_of(std::string_view feature_id) const {
  for (std::size_t i = 0; i < feature_ids_.size(); ++i) {
    if (feature_ids_[i] == feature_id) return states_[i];
  }
  return std::nullopt;
}

std::string_view to_string(ImpactAction action) {
  switch (action) {
    case ImpactAction::AddFile: return "add-file";
    case ImpactAction::RemoveFile: return "remove-file";
    case ImpactAction::AddLines: return "add-lines";
    case ImpactAction::RemoveLines: return "remove-lines";
  }
  return "?";
}

ImpactAction parse_impact_action(std::string_view text) {
  if (text == "add-file") return ImpactAction::AddFile;
  if (text == "remove-file") return ImpactAction::RemoveFile;
  if (text == "add-lines") return ImpactAction::AddLines;
  if (text == "remove-lines") return ImpactAction::RemoveLines;
  throw DataError("unknown impact action '" + std::string(text) + "'");
}

std::string_view to_string(CorpusKind kind) {
  switch (kind) {
    case CorpusKind::Manual: return "manual";
    case CorpusKind::Minimal: return "minimal";
    case CorpusKind::Automatic: return "automatic";
  }
  return "?";
}

std::vector<std::string> split_lines(std::string_view text, bool* trailing_newline) {
  std::vector<std::string> lines;
  bool trailing = !text.empty() && text.back() == '\n';
  if (trailing) text.remove_suffix(1);
  if (trailing_newline) *trailing_newline = trailing;
  if (text.empty() && !trailing) return lines;
  std::size_t pos = 0;
  while (true) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i != 0) out += '\n';
    out += lines[i];
  }
  if (trailing_newline && !lines.empty()) out += '\n';
  return out;
}

std::string decode_utf8_lossy(std::string_view bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) {
      out += static_cast<char>(c);
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
      cp = c & 0x1F;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len != 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    if (ok) {
      // Reject overlongs, surrogates and out-of-range code points.
      if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
          (cp >= 0xD800 && cp <= 0xDFFF)) {
        ok = false;
      }
    }
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      ++i;
    }
  }
  return out;
}

bool looks_binary(std::string_view bytes) {
  return bytes.substr(0, 8192).find('\0') != std::string_view::npos;
}

namespace {

bool glob_match_impl(std::string_view p, std::string_view s) {
  while (!p.empty()) {
    if (p.starts_with("**")) {
      std::string_view rest = p.substr(2);
      if (rest.starts_with('/') && glob_match_impl(rest.substr(1), s)) return true;
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (glob_match_impl(rest, s.substr(i))) return true;
      }
      return false;
    }
    if (p.front() == '*') {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (glob_match_impl(p.substr(1), s.substr(i))) return true;
        if (i < s.size() && s[i] == '/') break;
      }
      return false;
    }
    if (s.empty()) return false;
    if (p.front() == '?') {
      if (s.front() == '/') return false;
    } else if (p.front() != s.front()) {
      return false;
    }
    p.remove_prefix(1);
    s.remove_prefix(1);
  }
  return s.empty();
}

std::string normalize_path(std::string path) {
  std::replace(path.begin(), path.end(), '\\', '/');
  while (path.starts_with("./")) path.erase(0, 2);
  return path;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
  if (pattern.find('/') == std::string_view::npos && pattern != "**") {
    auto slash = path.rfind('/');
    std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
    return glob_match_impl(pattern, name);
  }
  return glob_match_impl(pattern, path);
}

void ArtifactImpact::validate() const {
  if (path.empty()) throw DataError("impact: path is empty");
  if (path.front() == '/') throw DataError("impact " + path + ": path must be relative");
  if (is_line_action(action) != lines.has_value()) {
    throw DataError("impact " + path + ": lines must be present iff action is " +
                    "add-lines or remove-lines");
  }
  if (lines) {
    if (lines->start < 1 || lines->start > lines->end) {
      throw DataError("impact " + path + ": line range [" + std::to_string(lines->start) +
                      "," + std::to_string(lines->end) + "] requires 1 <= start <= end");
    }
    if (action == ImpactAction::AddLines) {
      auto n = static_cast<int>(split_lines(payload).size());
      if (n != lines->length()) {
        throw DataError("impact " + path + ": payload has " + std::to_string(n) +
                        " lines but range [" + std::to_string(lines->start) + "," +
                        std::to_string(lines->end) + "] expects " +
                        std::to_string(lines->length()));
      }
    }
  }
}

void FeatureChain::validate() const {
  if (feature_id.empty()) throw DataError("chain: feature_id is empty");
  if (impacts.empty()) throw DataError("chain " + feature_id + ": impacts is non-empty");
  if (relevant_test_cases.empty()) {
    throw DataError("chain " + feature_id + ": relevant_test_cases is non-empty");
  }
  using Key = std::tuple<std::string, ImpactAction, std::optional<LineRange>>;
  std::set<Key> seen;
  for (const auto& impact : impacts) {
    impact.validate();
    if (!seen.emplace(impact.path, impact.action, impact.lines).second) {
      throw DataError("chain " + feature_id + ": duplicate impact on " + impact.path);
    }
  }
}

std::set<std::string> FeatureChain::targets() const {
  std::set<std::string> out;
  for (const auto& impact : impacts) out.insert(impact.path);
  return out;
}

void Corpus::validate() const {
  if (documents.empty()) throw DataError("corpus " + label + ": empty corpus");
  std::set<std::string_view> ids;
  for (const auto& doc : documents) {
    if (!ids.insert(doc.id).second) {
      throw DataError("corpus " + label + ": duplicate document id " + doc.id);
    }
    if (doc.text.find('\0') != std::string::npos) {
      throw DataError("corpus " + label + ": document " + doc.id + " contains NUL bytes");
    }
    if (kind == CorpusKind::Minimal && !doc.configured) {
      throw DataError("corpus " + label + ": minimal corpus holds unconfigured " + doc.id);
    }
  }
}

const Document* Corpus::find(std::string_view id) const {
  auto it = std::lower_bound(documents.begin(), documents.end(), id,
                             [](const Document& d, std::string_view v) { return d.id < v; });
  if (it != documents.end() && it->id == id) return &*it;
  // Corpora assembled by hand are not necessarily sorted.
  for (const auto& d : documents) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::size_t Corpus::configured_count() const {
  return static_cast<std::size_t>(
      std::count_if(documents.begin(), documents.end(), [](const Document& d) { return d.configured; }));
}

bool TestCase::has_content() const {
  if (!name.empty() || !module_name.empty() || !module_info.empty() || !assumptions.empty() ||
      !initialization.empty() || !acceptance_criteria.empty() || !objective.empty()) {
    return true;
  }
  return std::any_of(steps.begin(), steps.end(), [](const std::string& s) { return !s.empty(); });
}

Corpus ingest_tree(const fs::path& root, const IngestOptions& options, Warnings* warnings) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw DataError("cannot read corpus root " + root.string());
  }
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw DataError("cannot read corpus root " + root.string() + ": " + ec.message());

  Corpus corpus;
  corpus.label = options.label.empty() ? root.filename().string() : options.label;
  corpus.kind = options.kind;
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      if (warnings) warnings->add("ingest: " + ec.message());
      ec.clear();
      continue;
    }
    if (!it->is_regular_file(ec)) continue;
    std::string rel = normalize_path(fs::relative(it->path(), root, ec).generic_string());
    bool included = std::any_of(options.include_globs.begin(), options.include_globs.end(),
                                [&](const std::string& g) { return glob_match(g, rel); });
    bool excluded = std::any_of(options.exclude_globs.begin(), options.exclude_globs.end(),
                                [&](const std::string& g) { return glob_match(g, rel); });
    if (!included || excluded) continue;

    std::ifstream in(it->path(), std::ios::binary);
    std::ostringstream buf;
    if (in) buf << in.rdbuf();
    if (!in || in.bad()) {
      if (warnings) warnings->add("ingest: skipped unreadable file " + rel);
      continue;
    }
    std::string bytes = buf.str();
    if (looks_binary(bytes)) {
      if (warnings) warnings->add("ingest: skipped binary file " + rel);
      continue;
    }
    Document doc;
    doc.id = rel;
    doc.path = rel;
    doc.text = decode_utf8_lossy(bytes);
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) throw DataError("empty corpus: " + root.string());
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return corpus;
}

namespace {

std::string range_text(const std::string& path, LineRange r) {
  return path + " [" + std::to_string(r.start) + "," + std::to_string(r.end) + "]";
}

struct PathEdits {
  std::vector<const ArtifactImpact*> add_lines;
  std::vector<LineRange> remove_lines;
  bool remove_file = false;
};

// Checks every precondition of apply_variant against `base` and groups the
// line edits per path. Throws DataError on dangling impacts or bad ranges.
std::map<std::string, PathEdits> plan_edits(const Corpus& base, const FeatureChain& chain) {
  chain.validate();
  std::map<std::string, PathEdits> edits;
  for (const auto& impact : chain.impacts) {
    const Document* doc = base.find(impact.path);
    if (impact.action == ImpactAction::AddFile) {
      if (doc) throw DataError("add-file target already exists: " + impact.path);
      continue;
    }
    if (!doc) {
      throw DataError("dangling impact: " + std::string(to_string(impact.action)) + " " +
                      impact.path + " does not resolve in corpus " + base.label);
    }
    auto& e = edits[impact.path];
    if (impact.action == ImpactAction::RemoveFile) e.remove_file = true;
    if (impact.action == ImpactAction::AddLines) e.add_lines.push_back(&impact);
    if (impact.action == ImpactAction::RemoveLines) e.remove_lines.push_back(*impact.lines);
  }
  for (auto& [path, e] : edits) {
    int count = static_cast<int>(split_lines(base.find(path)->text).size());

    std::sort(e.remove_lines.begin(), e.remove_lines.end());
    for (std::size_t i = 0; i < e.remove_lines.size(); ++i) {
      const auto& r = e.remove_lines[i];
      if (r.end > count) {
        throw DataError("line range out of bounds: remove-lines " + range_text(path, r) +
                        " exceeds " + std::to_string(count) + " lines");
      }
      if (i > 0 && r.start <= e.remove_lines[i - 1].end) {
        throw DataError("overlapping remove-lines ranges on " + path);
      }
    }

    std::sort(e.add_lines.begin(), e.add_lines.end(),
              [](const ArtifactImpact* a, const ArtifactImpact* b) { return *a->lines < *b->lines; });
    int current = count;
    int prev_end = 0;
    for (const auto* impact : e.add_lines) {
      const auto& r = *impact->lines;
      if (r.start > current + 1) {
        throw DataError("line range out of bounds: add-lines " + range_text(path, r) +
                        " starts past line " + std::to_string(current + 1));
      }
      if (r.start <= prev_end) throw DataError("overlapping add-lines ranges on " + path);
      current += r.length();
      prev_end = r.end;
    }
  }
  return edits;
}

FeatureVector with_feature(const FeatureVector& fv, const std::string& feature, int state) {
  auto ids = fv.feature_ids();
  auto states = fv.states();
  auto it = std::find(ids.begin(), ids.end(), feature);
  if (it == ids.end()) {
    ids.push_back(feature);
    states.push_back(state);
  } else {
    states[static_cast<std::size_t>(it - ids.begin())] = state;
  }
  return FeatureVector(std::move(ids), std::move(states));
}

void sort_documents(Corpus& corpus) {
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
}

}  // namespace

Corpus apply_variant(const Corpus& base, const FeatureChain& chain, bool activated) {
  auto edits = plan_edits(base, chain);
  auto targets = chain.targets();

  Corpus out;
  out.label = base.label + (activated ? "+" : "-") + chain.feature_id;
  out.kind = CorpusKind::Manual;
  out.feature_vector = with_feature(base.feature_vector, chain.feature_id, activated ? 1 : 0);

  for (const auto& src : base.documents) {
    Document doc = src;
    doc.configured = false;
    auto it = edits.find(doc.id);
    if (activated) {
      doc.configured = targets.contains(doc.id);
      if (it != edits.end() && !it->second.add_lines.empty()) {
        bool trailing = false;
        auto lines = split_lines(doc.text, &trailing);
        for (const auto* impact : it->second.add_lines) {
          auto payload = split_lines(impact->payload);
          lines.insert(lines.begin() + (impact->lines->start - 1), payload.begin(), payload.end());
        }
        doc.text = join_lines(lines, trailing);
      }
    } else if (it != edits.end()) {
      if (it->second.remove_file) continue;
      if (!it->second.remove_lines.empty()) {
        bool trailing = false;
        auto lines = split_lines(doc.text, &trailing);
        for (auto r = it->second.remove_lines.rbegin(); r != it->second.remove_lines.rend(); ++r) {
          lines.erase(lines.begin() + (r->start - 1), lines.begin() + r->end);
        }
        doc.text = join_lines(lines, trailing);
      }
    }
    out.documents.push_back(std::move(doc));
  }
  if (activated) {
    for (const auto& impact : chain.impacts) {
      if (impact.action != ImpactAction::AddFile) continue;
      Document doc;
      doc.id = impact.path;
      doc.path = impact.path;
      doc.text = decode_utf8_lossy(impact.payload);
      doc.configured = true;
      out.documents.push_back(std::move(doc));
    }
  }
  sort_documents(out);
  out.validate();
  return out;
}

Corpus revert_variant(const Corpus& activated, const FeatureChain& chain) {
  Corpus out = activated;
  out.label = activated.label + "~";
  std::set<std::string> added_files;
  std::map<std::string, std::vector<LineRange>> added_lines;
  for (const auto& impact : chain.impacts) {
    if (impact.action == ImpactAction::AddFile) added_files.insert(impact.path);
    if (impact.action == ImpactAction::AddLines) added_lines[impact.path].push_back(*impact.lines);
  }
  std::erase_if(out.documents, [&](const Document& d) { return added_files.contains(d.id); });
  for (auto& doc : out.documents) {
    doc.configured = false;
    auto it = added_lines.find(doc.id);
    if (it == added_lines.end()) continue;
    auto ranges = it->second;
    std::sort(ranges.rbegin(), ranges.rend());
    bool trailing = false;
    auto lines = split_lines(doc.text, &trailing);
    for (const auto& r : ranges) {
      lines.erase(lines.begin() + (r.start - 1), lines.begin() + r.end);
    }
    doc.text = join_lines(lines, trailing);
  }
  return out;
}

Corpus minimal_corpus(const Corpus& activated) {
  Corpus out;
  out.label = activated.label;
  out.kind = CorpusKind::Minimal;
  out.feature_vector = activated.feature_vector;
  for (const auto& doc : activated.documents) {
    if (doc.configured) out.documents.push_back(doc);
  }
  if (out.documents.empty()) {
    throw DataError("no configured artifacts in activated corpus " + activated.label);
  }
  return out;
}

namespace {

json parse_json(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": " + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(where + ": missing field '" + key + "'");
  if (!it->is_string()) throw DataError(where + "." + key + ": expected a string");
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw DataError(where + "." + key + ": expected a string");
  return it->get<std::string>();
}

}  // namespace

FeatureChain parse_chain(std::string_view json_text, const std::string& origin) {
  json doc = parse_json(json_text, origin);
  if (!doc.is_object()) throw DataError(origin + ": expected a JSON object");
  FeatureChain chain;
  chain.feature_id = require_string(doc, "feature_id", origin);

  auto impacts = doc.find("impacts");
  if (impacts == doc.end() || !impacts->is_array()) {
    throw DataError(origin + ": field 'impacts' must be an array");
  }
  for (std::size_t i = 0; i < impacts->size(); ++i) {
    const json& item = (*impacts)[i];
    std::string where = origin + ": impacts[" + std::to_string(i) + "]";
    if (!item.is_object()) throw DataError(where + ": expected an object");
    ArtifactImpact impact;
    impact.path = normalize_path(require_string(item, "path", where));
    try {
      impact.action = parse_impact_action(require_string(item, "action", where));
    } catch (const DataError& e) {
      throw DataError(where + ".action: " + e.what());
    }
    if (auto lines = item.find("lines"); lines != item.end() && !lines->is_null()) {
      if (!lines->is_array() || lines->size() != 2 || !(*lines)[0].is_number_integer() ||
          !(*lines)[1].is_number_integer()) {
        throw DataError(where + ".lines: expected [int, int]");
      }
      impact.lines = LineRange{(*lines)[0].get<int>(), (*lines)[1].get<int>()};
    }
    impact.payload = optional_string(item, "payload", where);
    try {
      impact.validate();
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    chain.impacts.push_back(std::move(impact));
  }

  auto relevant = doc.find("relevant_test_cases");
  if (relevant == doc.end() || !relevant->is_array()) {
    throw DataError(origin + ": field 'relevant_test_cases' must be an array");
  }
  for (const auto& id : *relevant) {
    if (!id.is_string()) throw DataError(origin + ": relevant_test_cases: expected strings");
    chain.relevant_test_cases.insert(id.get<std::string>());
  }
  try {
    chain.validate();
  } catch (const DataError& e) {
    throw DataError(origin + ": " + e.what());
  }
  return chain;
}

FeatureChain load_chain(const fs::path& path) {
  return parse_chain(read_file(path), path.string());
}

std::string chain_to_json(const FeatureChain& chain) {
  json doc;
  doc["feature_id"] = chain.feature_id;
  doc["impacts"] = json::array();
  for (const auto& impact : chain.impacts) {
    json item;
    item["path"] = impact.path;
    item["action"] = std::string(to_string(impact.action));
    if (impact.lines) item["lines"] = {impact.lines->start, impact.lines->end};
    if (!impact.payload.empty()) item["payload"] = impact.payload;
    doc["impacts"].push_back(std::move(item));
  }
  doc["relevant_test_cases"] = chain.relevant_test_cases;
  return doc.dump(2) + "\n";
}

TestCase parse_test_case(std::string_view json_text, const std::string& origin) {
  json doc = parse_json(json_text, origin);
  if (!doc.is_object()) throw DataError(origin + ": expected a JSON object");
  TestCase tc;
  tc.id = require_string(doc, "id", origin);
  if (tc.id.empty()) throw DataError(origin + ": id is empty");
  tc.name = optional_string(doc, "name", origin);
  tc.module_name = optional_string(doc, "module_name", origin);
  tc.module_info = optional_string(doc, "module_info", origin);
  tc.assumptions = optional_string(doc, "assumptions", origin);
  tc.initialization = optional_string(doc, "initialization", origin);
  tc.acceptance_criteria = optional_string(doc, "acceptance_criteria", origin);
  tc.objective = optional_string(doc, "objective", origin);
  if (auto steps = doc.find("steps"); steps != doc.end() && !steps->is_null()) {
    if (!steps->is_array()) throw DataError(origin + ".steps: expected an array of strings");
    for (const auto& s : *steps) {
      if (!s.is_string()) throw DataError(origin + ".steps: expected an array of strings");
      tc.steps.push_back(s.get<std::string>());
    }
  }
  if (!tc.has_content()) throw DataError(origin + ": test case " + tc.id + " has no text fields");
  return tc;
}

std::vector<TestCase> load_test_cases(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("cannot read test case directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no test case files in " + dir.string());

  std::vector<TestCase> out;
  std::map<std::string, fs::path> origin_of;
  for (const auto& file : files) {
    TestCase tc = parse_test_case(read_file(file), file.string());
    auto [it, inserted] = origin_of.emplace(tc.id, file);
    if (!inserted) {
      throw DataError("duplicate test case id " + tc.id + " in " + it->second.string() +
                      " and " + file.string());
    }
    out.push_back(std::move(tc));
  }
  return out;
}

std::string test_case_to_json(const TestCase& tc) {
  json doc;
  doc["id"] = tc.id;
  doc["name"] = tc.name;
  doc["module_name"] = tc.module_name;
  doc["module_info"] = tc.module_info;
  doc["assumptions"] = tc.assumptions;
  doc["initialization"] = tc.initialization;
  doc["acceptance_criteria"] = tc.acceptance_criteria;
  doc["objective"] = tc.objective;
  doc["steps"] = tc.steps;
  return doc.dump(2) + "\n";
}

}  // namespace tcsel
