#include "tcsel/cli/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "tcsel/corpus.hpp"
#include "tcsel/error.hpp"
#include "tcsel/facts.hpp"
#include "tcsel/seed.hpp"
#include "tcsel/textprep.hpp"

namespace tcsel::cli {
namespace fs = std::filesystem;

Signal parse_signal(std::string_view text) {
  if (text == "strong") return Signal::Strong;
  if (text == "none") return Signal::None;
  throw ConfigError("unknown signal '" + std::string(text) + "' (expected strong or none)");
}

namespace {

constexpr int kFeatureTerms = 8;
constexpr int kAbsentTerms = 24;
constexpr int kMinGeneralTerms = 40;
constexpr const char* kMarker = ".tcsel-fixture";

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(derive_seed(seed, "fixture")) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(int percent) { return static_cast<int>(rng_() % 100) < percent; }

  const std::string& word(const std::vector<std::string>& pool) { return pool[pick(pool.size())]; }

  std::string words(const std::vector<std::string>& pool, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += word(pool);
    }
    return out;
  }

  // Pronounceable lowercase pseudowords that are neither stop words nor
  // reserved words.
  std::vector<std::string> vocabulary(int n) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    const Stoplist english = builtin_stoplist("english");
    const Stoplist markup = builtin_stoplist("html_js");
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (static_cast<int>(out.size()) < n) {
      std::string w;
      const int syllables = 2 + static_cast<int>(pick(2));
      for (int s = 0; s < syllables; ++s) {
        w += consonants[pick(consonants.size())];
        w += vowels[pick(vowels.size())];
      }
      if (chance(40)) w += consonants[pick(consonants.size())];
      if (english.contains(w) || markup.contains(w) || is_reserved_word(w) || !seen.insert(w).second) continue;
      out.push_back(w);
    }
    return out;
  }

  std::vector<std::string> c_function(const std::vector<std::string>& pool) {
    const std::string fn = word(pool);
    const std::string arg = word(pool);
    std::vector<std::string> lines = {
        "/* " + words(pool, 6) + " */",
        "static int " + fn + "(int " + arg + ")",
        "{",
        "\t/* " + words(pool, 5) + " */",
    };
    if (chance(50)) lines.push_back("\tlog_msg(\"" + words(pool, 4) + "\");");
    lines.push_back("\treturn " + arg + " + " + std::to_string(pick(100)) + ";");
    lines.push_back("}");
    lines.push_back("");
    return lines;
  }

  std::vector<std::string> c_file(const std::vector<std::string>& pool) {
    std::vector<std::string> lines = {"/*", " * " + words(pool, 8), " */", "#include \"common.h\"", ""};
    const int functions = 3 + static_cast<int>(pick(3));
    for (int f = 0; f < functions; ++f) {
      auto fn = c_function(pool);
      lines.insert(lines.end(), fn.begin(), fn.end());
    }
    return lines;
  }

  std::vector<std::string> header_file(const std::vector<std::string>& pool, const std::string& guard) {
    std::vector<std::string> lines = {"#ifndef " + guard, "#define " + guard, "", "/* " + words(pool, 6) + " */"};
    const int decls = 3 + static_cast<int>(pick(4));
    for (int d = 0; d < decls; ++d) lines.push_back("int " + word(pool) + "(int " + word(pool) + ");");
    lines.insert(lines.end(), {"", "#endif"});
    return lines;
  }

  std::vector<std::string> html_file(const std::vector<std::string>& pool) {
    std::vector<std::string> lines = {"<html>", "<body>", "<h1>" + words(pool, 3) + "</h1>"};
    const int paragraphs = 2 + static_cast<int>(pick(3));
    for (int p = 0; p < paragraphs; ++p) lines.push_back("<p class=\"note\">" + words(pool, 10) + "</p>");
    lines.insert(lines.end(), {"</body>", "</html>"});
    return lines;
  }

 private:
  std::mt19937_64 rng_;
};

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void write(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw ConfigError("cannot write fixture file " + path.string());
}

// Test case whose text draws on `topic` for the feature-specific fields and
// on `context` elsewhere.
TestCase make_test_case(Generator& g, const std::string& id, const std::vector<std::string>& topic,
                        const std::vector<std::string>& context) {
  TestCase tc;
  tc.id = id;
  tc.name = "Verify " + g.words(topic, 2);
  tc.module_name = g.word(topic);
  tc.module_info = g.words(topic, 2) + " " + g.word(context);
  tc.assumptions = "The " + g.word(context) + " unit is ready";
  tc.initialization = "Power on the " + g.word(context) + " board";
  tc.acceptance_criteria = "The " + g.word(topic) + " and " + g.word(topic) + " respond";
  tc.objective = "Check " + g.words(topic, 3);
  tc.steps = {"Enable " + g.word(topic), "Trigger " + g.word(topic) + " and observe " + g.word(topic),
              "Verify " + g.word(context)};
  return tc;
}

}  // namespace

FixtureLayout make_fixture(const FixtureParams& p) {
  if (p.chains < 1 || p.files < 1 || p.test_cases < 1 || p.vocabulary < 1) {
    throw ConfigError("make-fixture: chains, files, test cases and vocabulary must be positive");
  }
  if (p.test_cases < p.chains) throw ConfigError("make-fixture: need at least one test case per chain");
  const int needed_vocab = p.chains * kFeatureTerms + kAbsentTerms + kMinGeneralTerms;
  if (p.vocabulary < needed_vocab) {
    throw ConfigError("make-fixture: vocabulary must be >= " + std::to_string(needed_vocab) + " for " +
                      std::to_string(p.chains) + " chains");
  }
  if (p.signals.empty()) throw ConfigError("make-fixture: signal list is empty");

  std::error_code ec;
  fs::create_directories(p.out, ec);
  if (ec) throw ConfigError("make-fixture: cannot create " + p.out.string() + ": " + ec.message());
  if (fs::exists(p.out / kMarker)) {
    for (const char* sub : {"product", "build", "chains", "testcases"}) fs::remove_all(p.out / sub);
  } else if (!fs::is_empty(p.out)) {
    throw ConfigError("make-fixture: " + p.out.string() + " is not empty and holds no earlier fixture");
  }
  write(p.out / kMarker, "generated by tcsel make-fixture\n");

  Generator g(p.seed);
  const auto vocab = g.vocabulary(p.vocabulary);
  std::vector<std::vector<std::string>> feature_terms;
  std::size_t next = 0;
  for (int c = 0; c < p.chains; ++c) {
    feature_terms.emplace_back(vocab.begin() + static_cast<std::ptrdiff_t>(next),
                               vocab.begin() + static_cast<std::ptrdiff_t>(next + kFeatureTerms));
    next += kFeatureTerms;
  }
  const std::vector<std::string> absent(vocab.begin() + static_cast<std::ptrdiff_t>(next),
                                        vocab.begin() + static_cast<std::ptrdiff_t>(next + kAbsentTerms));
  next += kAbsentTerms;
  const std::vector<std::string> general(vocab.begin() + static_cast<std::ptrdiff_t>(next), vocab.end());

  // Product files: mostly C sources, some headers and HTML pages.
  struct File {
    std::string id;
    std::vector<std::string> lines;
  };
  std::vector<File> files;
  std::vector<std::size_t> c_sources;
  for (int i = 0; i < p.files; ++i) {
    char num[16];
    std::snprintf(num, sizeof(num), "%02d", i);
    const std::string stem = std::string("m") + num + "_" + g.word(general);
    if (i % 5 == 4) {
      files.push_back({"include/" + stem + ".h", g.header_file(general, "M" + std::string(num) + "_H")});
    } else if (i % 7 == 6) {
      files.push_back({"web/" + stem + ".html", g.html_file(general)});
    } else {
      c_sources.push_back(files.size());
      files.push_back({"src/" + stem + ".c", g.c_file(general)});
    }
  }
  if (c_sources.size() < static_cast<std::size_t>(2 * p.chains)) {
    throw ConfigError("make-fixture: " + std::to_string(p.files) + " files leave too few C sources for " +
                      std::to_string(p.chains) + " chains");
  }
  // Seeded assignment of host files, two per chain.
  for (std::size_t i = c_sources.size(); i > 1; --i) std::swap(c_sources[i - 1], c_sources[g.pick(i)]);

  FixtureLayout layout;
  layout.product = p.out / "product";
  layout.build = p.out / "build";
  layout.test_cases = p.out / "testcases";
  layout.config = p.out / "pipeline.cfg";

  std::vector<FeatureChain> chains;
  for (int c = 0; c < p.chains; ++c) {
    const auto& terms = feature_terms[static_cast<std::size_t>(c)];
    FeatureChain chain;
    chain.feature_id = "chain" + std::to_string(c + 1);

    std::vector<std::string> added;
    added.push_back("/* " + g.words(terms, 8) + " */");
    for (int f = 0; f < 4; ++f) {
      auto fn = g.c_function(terms);
      added.insert(added.end(), fn.begin(), fn.end());
    }
    chain.impacts.push_back({"src/" + terms[0] + "_" + chain.feature_id + ".c", ImpactAction::AddFile, std::nullopt,
                             join(added)});

    File& append_host = files[c_sources[static_cast<std::size_t>(2 * c)]];
    const std::vector<std::string> appended = {"/* " + g.words(terms, 5) + " */", "static int " + terms[1] + ";",
                                               "\tlog_msg(\"" + g.words(terms, 3) + "\");",
                                               "/* " + g.words(terms, 4) + " */"};
    const int start = static_cast<int>(append_host.lines.size()) + 1;
    chain.impacts.push_back({append_host.id, ImpactAction::AddLines,
                             LineRange{start, start + static_cast<int>(appended.size()) - 1}, join(appended)});

    // A guarded block that exists in the base tree and is dropped when the
    // feature is off.
    File& block_host = files[c_sources[static_cast<std::size_t>(2 * c + 1)]];
    const std::vector<std::string> block = {"/* " + g.words(terms, 3) + " */", "int " + terms[2] + "_enabled = 1;",
                                            "/* " + g.words(terms, 2) + " */"};
    const int at = 5;  // after the file banner and include
    block_host.lines.insert(block_host.lines.begin() + (at - 1), block.begin(), block.end());
    chain.impacts.push_back({block_host.id, ImpactAction::RemoveLines,
                             LineRange{at, at + static_cast<int>(block.size()) - 1}, ""});
    chains.push_back(std::move(chain));
  }

  Corpus base;
  base.label = "fixture";
  for (const auto& f : files) {
    base.documents.push_back({f.id, f.id, DocumentDomain::Implementation, join(f.lines), false});
    write(layout.product / f.id, join(f.lines));
  }
  std::sort(base.documents.begin(), base.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  write(layout.product / "assets" / "logo.bin", std::string("\x89PNG\r\n\x1a\n\0\0\0\rIHDR\0\0\0\x10", 24));
  write(layout.product / "include" / "common.h", "#ifndef COMMON_H\n#define COMMON_H\nvoid log_msg(const char *s);\n#endif\n");

  // Test cases: one relevant per chain at seeded positions, distractors elsewhere.
  std::vector<int> slots(static_cast<std::size_t>(p.test_cases));
  for (int i = 0; i < p.test_cases; ++i) slots[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[g.pick(i)]);
  std::vector<TestCase> cases(static_cast<std::size_t>(p.test_cases));
  std::vector<bool> taken(static_cast<std::size_t>(p.test_cases), false);
  auto test_id = [](int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "TC-%03d", i + 1);
    return std::string(buf);
  };
  for (int c = 0; c < p.chains; ++c) {
    const int slot = slots[static_cast<std::size_t>(c)];
    const Signal signal = p.signals[std::min(static_cast<std::size_t>(c), p.signals.size() - 1)];
    const std::string id = test_id(slot);
    cases[static_cast<std::size_t>(slot)] =
        signal == Signal::Strong ? make_test_case(g, id, feature_terms[static_cast<std::size_t>(c)], general)
                                 : make_test_case(g, id, absent, absent);
    taken[static_cast<std::size_t>(slot)] = true;
    chains[static_cast<std::size_t>(c)].relevant_test_cases = {id};
    layout.relevant.emplace_back(chains[static_cast<std::size_t>(c)].feature_id, id);
  }
  for (int i = 0; i < p.test_cases; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) cases[static_cast<std::size_t>(i)] = make_test_case(g, test_id(i), general, general);
  }
  for (const auto& tc : cases) write(layout.test_cases / (tc.id + ".json"), test_case_to_json(tc));

  // Chain specs and deployed trees: every C source and header of the
  // feature-activated product except a seeded share of untouched files.
  for (const auto& chain : chains) {
    const fs::path chain_file = p.out / "chains" / (chain.feature_id + ".json");
    write(chain_file, chain_to_json(chain));
    layout.chains.push_back(chain_file);

    const Corpus activated = apply_variant(base, chain, true);
    const auto targets = chain.targets();
    for (const auto& doc : activated.documents) {
      if (doc.id.ends_with(".html")) continue;
      if (!targets.contains(doc.id) && g.chance(30)) continue;
      write(layout.build / chain.feature_id / doc.id, doc.text);
    }
  }

  std::string chain_list;
  for (const auto& chain : chains) {
    if (!chain_list.empty()) chain_list += ",";
    chain_list += "chains/" + chain.feature_id + ".json";
  }
  write(layout.config, "# Generated by tcsel make-fixture\n"
                       "base_tree = product\n"
                       "build_output_tree = build\n"
                       "chains = " + chain_list + "\n"
                       "test_cases = testcases\n"
                       "stoplists = english,html_js\n"
                       "model = vsm\n"
                       "weighting = raw-tf\n"
                       "statistics = max,mean\n"
                       "variants = V1,V2,V3\n"
                       "corpora = manual,minimal,automatic\n"
                       "seed = " + std::to_string(p.seed) + "\n"
                       "iterations = 2000\n"
                       "output_dir = results\n");
  return layout;
}

}  // namespace tcsel::cli
