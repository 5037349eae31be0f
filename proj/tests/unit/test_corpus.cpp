#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tcsel/corpus.hpp"

using namespace tcsel;
using tcsel::testing::TempDir;
using tcsel::testing::write_text;

namespace {

std::string numbered_lines(int n, const std::string& prefix = "line") {
  std::string out;
  for (int i = 1; i <= n; ++i) out += prefix + std::to_string(i) + "\n";
  return out;
}

Corpus single_file_corpus(const std::string& id, const std::string& text) {
  Corpus c;
  c.label = "base";
  c.documents.push_back({id, id, DocumentDomain::Implementation, text, false});
  return c;
}

ArtifactImpact impact(std::string path, ImpactAction action, std::optional<LineRange> lines = {},
                      std::string payload = {}) {
  return {std::move(path), action, lines, std::move(payload)};
}

}  // namespace

TEST_CASE("ingest_tree skips binary files and orders by path") {
  TempDir dir("ingest");
  write_text(dir.path() / "c.txt", "hello\n");
  write_text(dir.path() / "a.c", "int x;\n");
  write_text(dir.path() / "b.png", std::string("\x89PNG\0\0\x01", 7));
  Warnings warnings;
  Corpus corpus = ingest_tree(dir.path(), {}, &warnings);
  REQUIRE(corpus.documents.size() == 2);
  CHECK(corpus.documents[0].id == "a.c");
  CHECK(corpus.documents[1].id == "c.txt");
  CHECK_FALSE(corpus.documents[0].configured);
  REQUIRE(warnings.messages().size() == 1);
  CHECK(warnings.messages()[0].find("b.png") != std::string::npos);
}

TEST_CASE("ingest_tree honours exclude globs") {
  TempDir dir("exclude");
  write_text(dir.path() / "a.c", "a\n");
  write_text(dir.path() / "docs/readme.md", "b\n");
  write_text(dir.path() / "x.h", "c\n");
  IngestOptions options;
  options.exclude_globs = {"*.md"};
  Corpus corpus = ingest_tree(dir.path(), options);
  REQUIRE(corpus.documents.size() == 2);
  CHECK(corpus.find("docs/readme.md") == nullptr);
}

TEST_CASE("ingest_tree rejects empty and missing roots") {
  TempDir dir("empty");
  CHECK_THROWS_WITH_AS(ingest_tree(dir.path(), {}), doctest::Contains("empty corpus"), DataError);
  CHECK_THROWS_AS(ingest_tree(dir.path() / "missing", {}), DataError);
}

TEST_CASE("ingest_tree decodes invalid UTF-8 lossily") {
  TempDir dir("utf8");
  write_text(dir.path() / "a.txt", "caf\xC3\xA9 \xFF ok");
  Corpus corpus = ingest_tree(dir.path(), {});
  CHECK(corpus.documents[0].text == "caf\xC3\xA9 \xEF\xBF\xBD ok");
}

TEST_CASE("ingest_tree is deterministic") {
  TempDir dir("determinism");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    write_text(dir.path() / ("d" + std::to_string(rng() % 5)) / ("f" + std::to_string(i) + ".txt"),
               "text " + std::to_string(i));
  }
  Corpus a = ingest_tree(dir.path(), {});
  Corpus b = ingest_tree(dir.path(), {});
  REQUIRE(a.documents.size() == b.documents.size());
  for (std::size_t i = 0; i < a.documents.size(); ++i) {
    CHECK(a.documents[i].id == b.documents[i].id);
    CHECK(a.documents[i].text == b.documents[i].text);
    if (i > 0) CHECK(a.documents[i - 1].id < a.documents[i].id);
  }
}

TEST_CASE("glob matching") {
  CHECK(glob_match("**", "a/b/c.txt"));
  CHECK(glob_match("*.md", "docs/readme.md"));
  CHECK_FALSE(glob_match("src/*.c", "src/sub/a.c"));
  CHECK(glob_match("src/**/*.c", "src/sub/a.c"));
  CHECK(glob_match("src/**/*.c", "src/a.c"));
  CHECK(glob_match("?.h", "include/x.h"));
  CHECK_FALSE(glob_match("*.c", "a.cc"));
}

TEST_CASE("apply_variant splices added lines when activated") {
  Corpus base = single_file_corpus("f1", numbered_lines(10));
  FeatureChain chain{"feat", {impact("f1", ImpactAction::AddLines, LineRange{11, 13}, "p1\np2\np3\n")}, {"tc1"}};

  Corpus on = apply_variant(base, chain, true);
  REQUIRE(on.documents.size() == 1);
  CHECK(split_lines(on.documents[0].text).size() == 13);
  CHECK(on.documents[0].configured);
  CHECK(on.feature_vector.state_of("feat") == 1);

  Corpus off = apply_variant(base, chain, false);
  CHECK(off.documents[0].text == base.documents[0].text);
  CHECK_FALSE(off.documents[0].configured);
  CHECK(off.feature_vector.state_of("feat") == 0);
}

TEST_CASE("apply_variant error paths") {
  Corpus base = single_file_corpus("f1", numbered_lines(10));
  SUBCASE("remove-file on a missing path is dangling") {
    FeatureChain chain{"feat", {impact("nope.c", ImpactAction::RemoveFile)}, {"tc1"}};
    CHECK_THROWS_WITH_AS(apply_variant(base, chain, true), doctest::Contains("dangling impact"), DataError);
  }
  SUBCASE("remove-lines past the end") {
    FeatureChain chain{"feat", {impact("f1", ImpactAction::RemoveLines, LineRange{9, 12})}, {"tc1"}};
    CHECK_THROWS_WITH_AS(apply_variant(base, chain, false), doctest::Contains("f1 [9,12]"), DataError);
  }
  SUBCASE("add-lines starting beyond the insertion point") {
    FeatureChain chain{"feat", {impact("f1", ImpactAction::AddLines, LineRange{13, 13}, "x")}, {"tc1"}};
    CHECK_THROWS_AS(apply_variant(base, chain, true), DataError);
  }
  SUBCASE("add-file over an existing document") {
    FeatureChain chain{"feat", {impact("f1", ImpactAction::AddFile, {}, "x")}, {"tc1"}};
    CHECK_THROWS_AS(apply_variant(base, chain, true), DataError);
  }
}

TEST_CASE("apply_variant handles files and removals") {
  Corpus base;
  base.label = "base";
  base.documents = {{"a.c", "a.c", DocumentDomain::Implementation, numbered_lines(5, "a"), false},
                    {"b.c", "b.c", DocumentDomain::Implementation, numbered_lines(3, "b"), false},
                    {"c.c", "c.c", DocumentDomain::Implementation, "untouched\n", false}};
  FeatureChain chain{"feat",
                     {impact("new.c", ImpactAction::AddFile, {}, "feature code\n"),
                      impact("a.c", ImpactAction::RemoveLines, LineRange{2, 3}),
                      impact("b.c", ImpactAction::RemoveFile)},
                     {"tc1"}};
  Corpus on = apply_variant(base, chain, true);
  Corpus off = apply_variant(base, chain, false);
  CHECK(on.documents.size() == 4);
  CHECK(on.find("new.c")->configured);
  CHECK(on.find("a.c")->configured);
  CHECK_FALSE(on.find("c.c")->configured);
  CHECK(off.documents.size() == 2);
  CHECK(off.find("a.c")->text == "a1\na4\na5\n");
  CHECK(off.find("b.c") == nullptr);
  CHECK(off.find("new.c") == nullptr);
}

TEST_CASE("minimal corpus keeps configured documents only") {
  Corpus base = single_file_corpus("f1", "x\n");
  base.documents.push_back({"f2", "f2", DocumentDomain::Implementation, "y\n", false});
  FeatureChain chain{"feat", {impact("f1", ImpactAction::AddLines, LineRange{2, 2}, "z")}, {"tc"}};
  Corpus minimal = minimal_corpus(apply_variant(base, chain, true));
  CHECK(minimal.kind == CorpusKind::Minimal);
  REQUIRE(minimal.documents.size() == 1);
  CHECK(minimal.documents[0].id == "f1");
  CHECK_THROWS_AS(minimal_corpus(apply_variant(base, chain, false)), DataError);
}

// Random chains over random corpora: round trip, symmetric difference and
// configured-implies-target properties.
TEST_CASE("apply_variant properties on random chains") {
  tcsel::testing::PropertyRun prop("corpus", "activate/deactivate round trip and target sets");
  std::mt19937_64 rng(20240611);
  for (int instance = 0; instance < 150; ++instance) {
    Corpus base;
    base.label = "base";
    const int files = 2 + static_cast<int>(rng() % 6);
    for (int f = 0; f < files; ++f) {
      int lines = static_cast<int>(rng() % 8);
      std::string text = numbered_lines(lines, "f" + std::to_string(f) + "_");
      if (lines > 0 && rng() % 3 == 0) text.pop_back();  // no trailing newline
      std::string id = "src/f" + std::to_string(f) + ".c";
      base.documents.push_back({id, id, DocumentDomain::Implementation, text, false});
    }
    FeatureChain chain;
    chain.feature_id = "feat" + std::to_string(instance);
    chain.relevant_test_cases = {"tc"};
    std::vector<bool> used(static_cast<std::size_t>(files), false);
    const int impacts = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < impacts; ++i) {
      // the last file is never touched so the deactivated corpus stays non-empty
      const auto f = static_cast<std::size_t>(rng() % static_cast<unsigned>(files - 1));
      if (used[f]) continue;
      used[f] = true;
      const auto& doc = base.documents[f];
      const int count = static_cast<int>(split_lines(doc.text).size());
      switch (rng() % 4) {
        case 0: {
          int start = 1 + static_cast<int>(rng() % static_cast<unsigned>(count + 1));
          int len = 1 + static_cast<int>(rng() % 3);
          std::string payload;
          for (int l = 0; l < len; ++l) payload += "added" + std::to_string(l) + "\n";
          chain.impacts.push_back(impact(doc.id, ImpactAction::AddLines, LineRange{start, start + len - 1}, payload));
          break;
        }
        case 1:
          if (count == 0) continue;
          {
            int start = 1 + static_cast<int>(rng() % static_cast<unsigned>(count));
            int end = start + static_cast<int>(rng() % static_cast<unsigned>(count - start + 1));
            chain.impacts.push_back(impact(doc.id, ImpactAction::RemoveLines, LineRange{start, end}));
          }
          break;
        case 2:
          chain.impacts.push_back(impact(doc.id, ImpactAction::RemoveFile));
          break;
        default:
          chain.impacts.push_back(impact("src/new" + std::to_string(i) + ".c", ImpactAction::AddFile, {},
                                         "new feature " + std::to_string(i) + "\n"));
          break;
      }
    }
    if (chain.impacts.empty()) continue;
    prop.instance();

    Corpus on = apply_variant(base, chain, true);
    Corpus off = apply_variant(base, chain, false);

    Corpus reverted = revert_variant(on, chain);
    REQUIRE(reverted.documents.size() == base.documents.size());
    for (std::size_t d = 0; d < base.documents.size(); ++d) {
      CHECK(reverted.documents[d].id == base.documents[d].id);
      CHECK(reverted.documents[d].text == base.documents[d].text);
    }

    std::set<std::string> differing;
    std::set<std::string> ids;
    for (const auto& d : on.documents) ids.insert(d.id);
    for (const auto& d : off.documents) ids.insert(d.id);
    for (const auto& id : ids) {
      const Document* a = on.find(id);
      const Document* b = off.find(id);
      if (!a || !b || a->text != b->text) differing.insert(id);
    }
    CHECK(differing == chain.targets());

    for (const auto& d : on.documents) {
      if (d.configured) CHECK(chain.targets().contains(d.id));
    }
  }
}

TEST_CASE("load_chain validates the schema") {
  TempDir dir("chain");
  auto good = dir.path() / "good.json";
  write_text(good, R"({"feature_id": "led", "impacts": [
      {"path": "drivers/leds.c", "action": "add-lines", "lines": [3, 4], "payload": "a\nb"},
      {"path": "drivers/led-trig.c", "action": "add-file", "payload": "x"}],
    "relevant_test_cases": ["TC-1"]})");
  FeatureChain chain = load_chain(good);
  CHECK(chain.feature_id == "led");
  CHECK(chain.impacts.size() == 2);
  CHECK(chain.relevant_test_cases == std::set<std::string>{"TC-1"});
  CHECK(parse_chain(chain_to_json(chain), "roundtrip").impacts.size() == 2);

  auto empty = dir.path() / "empty.json";
  write_text(empty, R"({"feature_id": "x", "impacts": [], "relevant_test_cases": ["t"]})");
  CHECK_THROWS_WITH_AS(load_chain(empty), doctest::Contains("impacts is non-empty"), DataError);

  auto dup = dir.path() / "dup.json";
  write_text(dup, R"({"feature_id": "x", "impacts": [{"path": "a", "action": "remove-file"},
      {"path": "a", "action": "remove-file"}], "relevant_test_cases": ["t"]})");
  CHECK_THROWS_WITH_AS(load_chain(dup), doctest::Contains("duplicate impact"), DataError);

  auto no_tc = dir.path() / "notc.json";
  write_text(no_tc, R"({"feature_id": "x", "impacts": [{"path": "a", "action": "remove-file"}],
      "relevant_test_cases": []})");
  CHECK_THROWS_WITH_AS(load_chain(no_tc), doctest::Contains("relevant_test_cases is non-empty"), DataError);

  auto bad_lines = dir.path() / "bad.json";
  write_text(bad_lines, R"({"feature_id": "x", "impacts": [{"path": "a", "action": "remove-lines"}],
      "relevant_test_cases": ["t"]})");
  CHECK_THROWS_WITH_AS(load_chain(bad_lines), doctest::Contains("impacts[0]"), DataError);

  auto broken = dir.path() / "broken.json";
  write_text(broken, "{not json");
  CHECK_THROWS_WITH_AS(load_chain(broken), doctest::Contains("broken.json"), DataError);
}

TEST_CASE("load_test_cases") {
  TempDir dir("tcs");
  write_text(dir.path() / "t1.json", R"({"id": "T1", "name": "boot", "steps": ["power on"]})");
  write_text(dir.path() / "t2.json", R"({"id": "T2", "objective": "only objective"})");
  write_text(dir.path() / "t3.json", R"({"id": "T3", "acceptance_criteria": "led lit"})");
  auto cases = load_test_cases(dir.path());
  REQUIRE(cases.size() == 3);
  CHECK(cases[1].objective == "only objective");
  CHECK(cases[0].steps == std::vector<std::string>{"power on"});

  SUBCASE("duplicate ids are fatal") {
    write_text(dir.path() / "t4.json", R"({"id": "T1", "name": "again"})");
    CHECK_THROWS_WITH_AS(load_test_cases(dir.path()), doctest::Contains("duplicate test case id T1"), DataError);
  }
  SUBCASE("a test case without text is fatal") {
    write_text(dir.path() / "t5.json", R"({"id": "T5", "name": "", "steps": []})");
    CHECK_THROWS_WITH_AS(load_test_cases(dir.path()), doctest::Contains("no text fields"), DataError);
  }
}

TEST_CASE("feature vector invariants") {
  CHECK_THROWS_AS(FeatureVector({"a", "b"}, {1}), DataError);
  CHECK_THROWS_AS(FeatureVector({"a"}, {2}), DataError);
  FeatureVector fv({"a", "b"}, {1, 0});
  CHECK(fv.state_of("b") == 0);
  CHECK_FALSE(fv.state_of("c").has_value());
}
