#include "tcsel/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tcsel/error.hpp"

namespace tcsel::cli {
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string_view rest = value;
  while (true) {
    const auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ",";
    out += item;
  }
  return out;
}

template <typename T, typename Fn>
std::string join_map(const std::vector<T>& items, Fn&& fn) {
  std::vector<std::string> names;
  for (const auto& item : items) names.emplace_back(fn(item));
  return join(names);
}

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw ConfigError(key + ": " + message);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

long long parse_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) fail(key, "expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) fail(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

fs::path absolute_path(const RawConfig::Setting& s) {
  fs::path p(s.value);
  if (p.is_relative()) p = s.base_dir / p;
  p = p.lexically_normal();
  // "dir/." normalizes to "dir/"
  if (!p.has_filename() && p.has_relative_path()) p = p.parent_path();
  return p;
}

CorpusKind parse_corpus_kind(const std::string& key, const std::string& v) {
  if (v == "manual") return CorpusKind::Manual;
  if (v == "minimal") return CorpusKind::Minimal;
  if (v == "automatic") return CorpusKind::Automatic;
  fail(key, "unknown corpus type '" + v + "'");
}

template <typename T, typename Fn>
std::vector<T> parse_enum_list(const std::string& key, const std::string& value, Fn&& parse) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) {
    T v;
    try {
      v = parse(item);
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
    if (std::find(out.begin(), out.end(), v) != out.end()) fail(key, "duplicate entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "list is empty");
  return out;
}

}  // namespace

std::string_view to_string(Model m) { return m == Model::Vsm ? "vsm" : "lsa"; }

Model parse_model(std::string_view text) {
  if (text == "vsm") return Model::Vsm;
  if (text == "lsa") return Model::Lsa;
  throw ConfigError("unknown model '" + std::string(text) + "'");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "base_tree", "build_output_tree", "chains",     "test_cases", "include",
      "exclude",   "lowercase",         "min_token_len", "stoplists", "stemming",
      "fact_extraction", "model",       "k",          "weighting",  "statistics",
      "variants",  "corpora",           "seed",       "iterations", "output_dir",
      "workers"};
  return keys;
}

RawConfig RawConfig::parse(std::string_view text, const fs::path& base_dir, const std::string& origin) {
  RawConfig raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const std::string where = origin + ":" + std::to_string(number);
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    raw.set(trim(std::string_view(content).substr(0, eq)), trim(std::string_view(content).substr(eq + 1)),
            base_dir, where);
  }
  return raw;
}

RawConfig RawConfig::load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path dir = fs::absolute(file).parent_path();
  return parse(ss.str(), dir, file.string());
}

void RawConfig::set(const std::string& assignment, const fs::path& base_dir, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value, got '" + assignment + "'");
  set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)),
      base_dir, origin);
}

void RawConfig::set(const std::string& key, std::string value, const fs::path& base_dir,
                    const std::string& origin) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError(origin + ": unknown key '" + key + "'");
  }
  values_[key] = Setting{std::move(value), base_dir, origin};
}

void RawConfig::apply_environment(const std::function<const char*(const char*)>& getenv) {
  const fs::path cwd = fs::current_path();
  for (const auto& key : known_config_keys()) {
    std::string name = "TCSEL_" + key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* v = getenv(name.c_str())) set(key, v, cwd, "environment " + name);
  }
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig cfg;
  cfg.lowercase = lowercase;
  cfg.min_token_len = min_token_len;
  cfg.stemming = stemming;
  cfg.fact_extraction = fact_extraction;
  for (const auto& name : stoplists) cfg.stoplists.push_back(resolve_stoplist(name));
  cfg.validate();
  return cfg;
}

RunConfig resolve(const RawConfig& raw) {
  RunConfig c;
  const auto& v = raw.values();
  auto get = [&](const std::string& key) -> const RawConfig::Setting* {
    auto it = v.find(key);
    return it == v.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const RawConfig::Setting& {
    const auto* s = get(key);
    if (!s || s->value.empty()) fail(key, "required");
    return *s;
  };

  c.base_tree = absolute_path(require("base_tree"));
  if (const auto* s = get("build_output_tree"); s && !s->value.empty()) c.build_output_tree = absolute_path(*s);
  {
    const auto& s = require("chains");
    for (const auto& item : split_list(s.value)) {
      c.chains.push_back(absolute_path({item, s.base_dir, s.origin}));
    }
    if (c.chains.empty()) fail("chains", "list is empty");
  }
  c.test_cases = absolute_path(require("test_cases"));
  if (const auto* s = get("include")) c.include = split_list(s->value);
  if (c.include.empty()) fail("include", "list is empty");
  if (const auto* s = get("exclude")) c.exclude = split_list(s->value);

  if (const auto* s = get("lowercase")) c.lowercase = parse_bool("lowercase", s->value);
  if (const auto* s = get("min_token_len")) {
    const auto n = parse_integer("min_token_len", s->value);
    if (n < 1 || n > 1000) fail("min_token_len", "must be >= 1");
    c.min_token_len = static_cast<int>(n);
  }
  if (const auto* s = get("stoplists")) {
    c.stoplists.clear();
    const auto builtins = builtin_stoplist_names();
    for (const auto& item : split_list(s->value)) {
      if (std::find(builtins.begin(), builtins.end(), item) != builtins.end()) {
        c.stoplists.push_back(item);
      } else {
        const fs::path p = absolute_path({item, s->base_dir, s->origin});
        if (!fs::is_regular_file(p)) fail("stoplists", "'" + item + "' is neither a builtin list nor a file");
        c.stoplists.push_back(p.string());
      }
    }
  }
  if (const auto* s = get("stemming")) c.stemming = parse_bool("stemming", s->value);
  if (const auto* s = get("fact_extraction")) c.fact_extraction = parse_bool("fact_extraction", s->value);

  if (const auto* s = get("model")) c.models = parse_enum_list<Model>("model", s->value, parse_model);
  if (const auto* s = get("k"); s && !s->value.empty()) {
    const auto k = parse_integer("k", s->value);
    if (k < 1 || k > 1'000'000) fail("k", "must be >= 1");
    c.k = static_cast<int>(k);
  }
  if (std::find(c.models.begin(), c.models.end(), Model::Lsa) != c.models.end() && !c.k) {
    fail("k", "required when model includes lsa");
  }
  if (const auto* s = get("weighting")) {
    try {
      c.weighting = parse_weighting(s->value);
    } catch (const ConfigError& e) {
      fail("weighting", e.what());
    }
  }
  if (const auto* s = get("statistics")) {
    c.statistics = parse_enum_list<SummaryStatistic>("statistics", s->value, parse_statistic);
  }
  if (const auto* s = get("variants")) {
    c.variants = parse_enum_list<TestContentVariant>("variants", s->value, parse_variant);
  }
  if (const auto* s = get("corpora")) {
    c.corpora = parse_enum_list<CorpusKind>("corpora", s->value,
                                            [](const std::string& x) { return parse_corpus_kind("corpora", x); });
  } else {
    c.corpora = {CorpusKind::Manual, CorpusKind::Minimal};
    if (c.build_output_tree) c.corpora.push_back(CorpusKind::Automatic);
  }
  if (std::find(c.corpora.begin(), c.corpora.end(), CorpusKind::Automatic) != c.corpora.end() &&
      !c.build_output_tree) {
    fail("build_output_tree", "required when corpora includes automatic");
  }

  if (const auto* s = get("seed")) c.seed = parse_seed("seed", s->value);
  if (const auto* s = get("iterations")) {
    const auto n = parse_integer("iterations", s->value);
    if (n < 1 || n > 100'000'000) fail("iterations", "must be >= 1");
    c.iterations = static_cast<int>(n);
  }
  c.output_dir = absolute_path(require("output_dir"));
  if (const auto* s = get("workers")) {
    const auto n = parse_integer("workers", s->value);
    if (n < 1 || n > 1024) fail("workers", "must be >= 1");
    c.workers = static_cast<int>(n);
  }
  return c;
}

void prepare_output_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) fail("output_dir", "cannot create " + config.output_dir.string() + ": " + ec.message());
  const fs::path probe = config.output_dir / ".tcsel-write-probe";
  {
    std::ofstream out(probe);
    if (!out) fail("output_dir", config.output_dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

namespace {

std::vector<std::pair<std::string, std::string>> canonical_pairs(const RunConfig& c) {
  auto path_list = [](const std::vector<fs::path>& paths) {
    std::vector<std::string> s;
    for (const auto& p : paths) s.push_back(p.string());
    return join(s);
  };
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {
      {"base_tree", c.base_tree.string()},
      {"build_output_tree", c.build_output_tree ? c.build_output_tree->string() : ""},
      {"chains", path_list(c.chains)},
      {"test_cases", c.test_cases.string()},
      {"include", join(c.include)},
      {"exclude", join(c.exclude)},
      {"lowercase", b(c.lowercase)},
      {"min_token_len", std::to_string(c.min_token_len)},
      {"stoplists", join(c.stoplists)},
      {"stemming", b(c.stemming)},
      {"fact_extraction", b(c.fact_extraction)},
      {"model", join_map(c.models, [](Model m) { return to_string(m); })},
      {"k", c.k ? std::to_string(*c.k) : ""},
      {"weighting", std::string(to_string(c.weighting))},
      {"statistics", join_map(c.statistics, [](SummaryStatistic s) { return to_string(s); })},
      {"variants", join_map(c.variants, [](TestContentVariant v) { return to_string(v); })},
      {"corpora", join_map(c.corpora, [](CorpusKind k) { return to_string(k); })},
      {"seed", std::to_string(c.seed)},
      {"iterations", std::to_string(c.iterations)},
  };
}

}  // namespace

std::string canonical_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : canonical_pairs(config)) out += key + " = " + value + "\n";
  return out;
}

std::string manifest_text(const RunConfig& config,
                          const std::vector<std::pair<std::string, std::string>>& notes) {
  std::string out = "# tcsel run manifest\n";
  for (const auto& [key, value] : notes) out += "# " + key + " = " + value + "\n";
  out += canonical_text(config);
  out += "output_dir = .\n";
  return out;
}

}  // namespace tcsel::cli
