#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tcsel/facts.hpp"
#include "tcsel/porter.hpp"
#include "tcsel/textprep.hpp"

using namespace tcsel;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

const Pairs& porter_vocabulary() {
  static const Pairs pairs = [] {
    Pairs out;
    std::ifstream in(testing::data_dir() / "porter_vocabulary.tsv");
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
  }();
  return pairs;
}

PipelineConfig default_config() { return PipelineConfig{}; }

// Random c-like source built from identifiers, keywords, comments, literals,
// numbers and punctuation.
std::string random_c_source(std::mt19937_64& rng) {
  static const std::vector<std::string> idents = {"led_cdev", "trigger", "IRQ4", "count_", "x",
                                                  "brightness", "dev", "_priv", "Reset", "hw2"};
  static const std::vector<std::string> keywords = {"int", "if", "return", "static", "struct",
                                                    "const", "while", "void", "unsigned", "NULL"};
  static const std::vector<std::string> puncts = {";", "(", ")", "->", "=", "{", "}", ",", "*", "+",
                                                  "\n", " ", "#include <linux/leds.h>\n", "#define"};
  std::string out;
  const int pieces = 5 + static_cast<int>(rng() % 40);
  for (int i = 0; i < pieces; ++i) {
    switch (rng() % 8) {
      case 0: case 1: out += idents[rng() % idents.size()]; break;
      case 2: out += keywords[rng() % keywords.size()]; break;
      case 3: out += std::to_string(rng() % 1000); break;
      case 4: out += "/* " + idents[rng() % idents.size()] + " " + keywords[rng() % keywords.size()] + " */"; break;
      case 5: out += "\"" + idents[rng() % idents.size()] + " if ok\\n\""; break;
      case 6: out += "// note " + keywords[rng() % keywords.size()] + "\n"; break;
      default: out += puncts[rng() % puncts.size()]; break;
    }
    out += (rng() % 2) ? " " : "";
  }
  return out;
}

std::string random_text(std::mt19937_64& rng) {
  static const std::string alphabet = "abcXYZ019_ -;.,\n\t()THEtheand";
  std::string s;
  const auto n = rng() % 80;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

}  // namespace

TEST_CASE("tokenize examples") {
  PipelineConfig cfg = default_config();
  CHECK(tokenize("led_classdev->trigger = NULL; /* 42 */", cfg) ==
        std::vector<std::string>{"led_classdev", "trigger", "null"});
  CHECK(tokenize("", cfg).empty());
  cfg.min_token_len = 2;
  CHECK(tokenize("IRQ4 100 x", cfg) == std::vector<std::string>{"irq4"});
  cfg.lowercase = false;
  CHECK(tokenize("IRQ4 Led", cfg) == std::vector<std::string>{"IRQ4", "Led"});
}

TEST_CASE("tokenize alphabet property") {
  tcsel::testing::PropertyRun prop("textprep", "token alphabet and length");
  std::mt19937_64 rng(11);
  PipelineConfig cfg = default_config();
  for (int i = 0; i < 200; ++i) {
    prop.instance();
    cfg.min_token_len = 1 + static_cast<int>(rng() % 3);
    for (const auto& t : tokenize(random_text(rng), cfg)) {
      CHECK(t.size() >= static_cast<std::size_t>(cfg.min_token_len));
      CHECK(t.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") == std::string::npos);
      CHECK_FALSE(std::isdigit(static_cast<unsigned char>(t[0])));
    }
  }
}

TEST_CASE("remove_stopwords") {
  Stoplist english = builtin_stoplist("english");
  Stoplist js = builtin_stoplist("html_js");
  CHECK(english.contains("the"));
  CHECK(js.contains("function"));
  CHECK(remove_stopwords({"the", "trigger", "function"}, {english, js}) == std::vector<std::string>{"trigger"});
  CHECK(remove_stopwords({}, {english}).empty());
  CHECK(remove_stopwords({"led", "driver"}, {english, js}) == std::vector<std::string>{"led", "driver"});
}

TEST_CASE("stoplist parsing") {
  Stoplist s = parse_stoplist("custom", "# header\nfoo\n\n  bar  # trailing\n");
  CHECK(s.terms.size() == 2);
  CHECK(s.contains("bar"));
  CHECK_THROWS_AS(parse_stoplist("bad", "Foo\n"), ConfigError);
  CHECK_THROWS_AS(builtin_stoplist("klingon"), ConfigError);
  for (const auto& name : builtin_stoplist_names()) {
    for (const auto& term : builtin_stoplist(name).terms) {
      CHECK(term.find_first_of("ABCDEFGHIJKLMNOPQRSTUVWXYZ") == std::string::npos);
    }
  }
}

TEST_CASE("porter examples") {
  CHECK(porter_stem("testing") == "test");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("driver") == "driver");
  CHECK(porter_stem("irq4") == "irq4");
  CHECK(stem({"caresses", "ponies", "led"}) == std::vector<std::string>{"caress", "poni", "led"});
}

TEST_CASE("porter reference vocabulary") {
  const auto& pairs = porter_vocabulary();
  REQUIRE(pairs.size() > 10000);
  std::size_t mismatches = 0;
  for (const auto& [word, expected] : pairs) {
    if (porter_stem(word) != expected) {
      if (++mismatches <= 10) MESSAGE(word << " -> " << porter_stem(word) << " expected " << expected);
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("stem and remove_stopwords are idempotent") {
  std::vector<std::string> stems;
  for (const auto& p : porter_vocabulary()) stems.push_back(p.second);
  // Porter is not idempotent on every word; the property is asserted on the
  // stems whose re-stemming is stable in the reference itself.
  std::map<std::string, std::string> reference(porter_vocabulary().begin(), porter_vocabulary().end());
  {
    tcsel::testing::PropertyRun prop("textprep", "porter idempotent on stable stems");
    for (const auto& s : stems) {
      auto it = reference.find(s);
      if (it == reference.end() || it->second != s) continue;
      CHECK(porter_stem(s) == s);
      prop.instance();
    }
    CHECK(prop.count() >= 100);
  }

  std::mt19937_64 rng(5);
  const std::vector<Stoplist> lists = {builtin_stoplist("english"), builtin_stoplist("html_js")};
  tcsel::testing::PropertyRun prop("textprep", "stopword removal idempotent");
  for (int i = 0; i < 150; ++i) {
    prop.instance();
    auto terms = tokenize(random_text(rng) + " the function of a div", default_config());
    auto once = remove_stopwords(terms, lists);
    CHECK(remove_stopwords(once, lists) == once);
  }
}

TEST_CASE("extract_facts examples") {
  CHECK(extract_facts("if (led_cdev->trigger) led_trigger_set(led_cdev, NULL);", SourceLanguage::CLike) ==
        "led_cdev trigger led_trigger_set led_cdev NULL");
  CHECK(extract_facts("/* resets HW */ int i = 0;", SourceLanguage::CLike) == "resets HW\ni");
  CHECK(extract_facts("hello world", SourceLanguage::Plain) == "hello world");
  CHECK(extract_facts("<p class=\"x\">LED &amp; trigger</p><!-- hidden -->", SourceLanguage::Markup)
            .find("LED & trigger") != std::string::npos);
}

TEST_CASE("extract_facts warns on unterminated input") {
  Warnings w;
  CHECK(extract_facts("x = 1; /* open comment", SourceLanguage::CLike, &w) == "x\nopen comment");
  CHECK(w.messages().size() == 1);
  Warnings w2;
  extract_facts("s = \"never closed", SourceLanguage::CLike, &w2);
  CHECK(w2.messages().size() == 1);
}

TEST_CASE("language_for_path") {
  CHECK(language_for_path("drivers/leds.c") == SourceLanguage::CLike);
  CHECK(language_for_path("inc/a.hpp") == SourceLanguage::CLike);
  CHECK(language_for_path("web/index.html") == SourceLanguage::Markup);
  CHECK(language_for_path("README") == SourceLanguage::Plain);
}

TEST_CASE("extract_facts properties on random c-like sources") {
  tcsel::testing::PropertyRun prop("textprep", "fact extraction shrinks and drops reserved words");
  std::mt19937_64 rng(77);
  PipelineConfig cfg = default_config();
  cfg.lowercase = false;
  for (int i = 0; i < 300; ++i) {
    prop.instance();
    const std::string src = random_c_source(rng);
    const std::string facts = extract_facts(src, SourceLanguage::CLike);
    const auto fact_tokens = tokenize(facts, cfg);
    CHECK(fact_tokens.size() <= tokenize(src, cfg).size());
    for (const auto& t : fact_tokens) CHECK_FALSE(is_reserved_word(t));
  }
}

TEST_CASE("test_case_text variants") {
  TestCase tc;
  tc.id = "T";
  tc.steps = {"s1"};
  tc.objective = "obj";
  tc.acceptance_criteria = "acc";
  CHECK(test_case_text(tc, TestContentVariant::V3AcceptanceObjective) == "acc obj");
  CHECK(test_case_text(tc, TestContentVariant::V2NoSteps) == "acc obj");
  CHECK(test_case_text(tc, TestContentVariant::V1Full) == "acc obj s1");
  tc.name = "boot";
  tc.initialization = "power";
  CHECK(test_case_text(tc, TestContentVariant::V1Full) == "boot power acc obj s1");
  CHECK(parse_variant("V2") == TestContentVariant::V2NoSteps);
  CHECK_THROWS_AS(parse_variant("V9"), ConfigError);
}

TEST_CASE("preprocess examples") {
  PipelineConfig cfg = default_config();
  cfg.stoplists = {parse_stoplist("tiny", "the\n")};
  cfg.stemming = true;
  CHECK(preprocess_text("d", "the LED driver", cfg).terms == std::vector<std::string>{"led", "driver"});
  CHECK(preprocess_text("d", "", cfg).terms.empty());

  PipelineConfig facts_cfg = default_config();
  facts_cfg.fact_extraction = true;
  facts_cfg.stoplists = {builtin_stoplist("english")};
  Document doc{"a.c", "a.c", DocumentDomain::Implementation, "int the_count = 3;", false};
  CHECK(preprocess(doc, facts_cfg).terms == std::vector<std::string>{"the_count"});
  doc.domain = DocumentDomain::Test;
  CHECK(preprocess(doc, facts_cfg).terms == std::vector<std::string>{"int", "the_count"});
}

TEST_CASE("preprocess equals staged composition") {
  tcsel::testing::PropertyRun prop("textprep", "preprocess equals staged composition");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    prop.instance();
    PipelineConfig cfg;
    cfg.lowercase = rng() % 4 != 0;
    cfg.min_token_len = 1 + static_cast<int>(rng() % 3);
    cfg.stemming = rng() % 2;
    cfg.fact_extraction = rng() % 2;
    if (rng() % 2) cfg.stoplists.push_back(builtin_stoplist("english"));
    if (rng() % 2) cfg.stoplists.push_back(builtin_stoplist("html_js"));
    const std::string src = (rng() % 2) ? random_c_source(rng) : random_text(rng);
    Document doc{"f.c", "f.c", DocumentDomain::Implementation, src, false};

    std::string text = cfg.fact_extraction ? extract_facts(src, SourceLanguage::CLike) : src;
    auto staged = remove_stopwords(tokenize(text, cfg), cfg.stoplists);
    if (cfg.stemming) staged = stem(staged);
    CHECK(preprocess(doc, cfg).terms == staged);
  }
}

TEST_CASE("pipeline config validation") {
  PipelineConfig cfg;
  cfg.min_token_len = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
