#include "tcsel/cli/app.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "tcsel/cli/config.hpp"
#include "tcsel/cli/fixture.hpp"
#include "tcsel/cli/pipeline.hpp"
#include "tcsel/cli/reports.hpp"
#include "tcsel/csv.hpp"
#include "tcsel/error.hpp"
#include "tcsel/lsa.hpp"

namespace tcsel::cli {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Writes to the file when a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw DataError("cannot write " + path);
}

struct PipelineArgs {
  std::string config;
  std::vector<std::string> sets;
  int workers = 0;
  std::string output_dir;
};

int cmd_pipeline(const PipelineArgs& a) {
  RawConfig raw = RawConfig::load(a.config);
  raw.apply_environment([](const char* name) { return std::getenv(name); });
  const fs::path cwd = fs::current_path();
  for (const auto& s : a.sets) raw.set(s, cwd, "--set");
  if (!a.output_dir.empty()) raw.set("output_dir", a.output_dir, cwd, "--output-dir");
  if (a.workers > 0) raw.set("workers", std::to_string(a.workers), cwd, "--workers");
  const RunConfig config = resolve(raw);
  const PipelineSummary summary = run_pipeline(config);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "wrote reports to " << config.output_dir.string() << "\n";
  return kExitOk;
}

struct FixtureArgs {
  FixtureParams params;
  std::string out;
  std::string signals = "strong";
};

int cmd_make_fixture(FixtureArgs a) {
  a.params.out = a.out;
  a.params.signals.clear();
  for (const auto& s : split_commas(a.signals)) a.params.signals.push_back(parse_signal(s));
  const FixtureLayout layout = make_fixture(a.params);
  std::cout << "fixture written to " << a.params.out.string() << "\n";
  for (const auto& [chain, tc] : layout.relevant) std::cout << chain << " relevant " << tc << "\n";
  std::cout << "run: tcsel pipeline " << layout.config.string() << "\n";
  return kExitOk;
}

struct PlotArgs {
  std::vector<std::string> scores;
  std::string ranking;
  std::string out = ".";
  std::size_t top = 30;
};

int cmd_plot_data(const PlotArgs& a) {
  if (a.scores.empty() && a.ranking.empty()) throw ConfigError("plot-data: give --scores and/or --ranking");
  fs::create_directories(a.out);
  for (const auto& path : a.scores) {
    std::ostringstream out;
    write_score_series(out, csv::Table::load(path), a.top);
    const fs::path target = fs::path(a.out) / (fs::path(path).stem().string() + "_series.csv");
    emit(target.string(), out.str());
  }
  if (!a.ranking.empty()) {
    std::ostringstream out;
    write_rank_quartiles(out, csv::Table::load(a.ranking));
    const fs::path target = fs::path(a.out) / (fs::path(a.ranking).stem().string() + "_quartiles.csv");
    emit(target.string(), out.str());
  }
  return kExitOk;
}

struct DsimArgs {
  std::string activated;
  std::string deactivated;
  std::string chain = "chain";
  std::string variant = "V1";
  std::string model = "vsm";
  std::string out;
};

int cmd_dsim(const DsimArgs& a) {
  std::vector<bool> configured;
  const auto act = read_scores(csv::Table::load(a.activated), &configured);
  const auto deact = read_scores(csv::Table::load(a.deactivated), nullptr);
  DsimResult d = dsim(act, configured, deact);
  d.chain_id = a.chain;
  d.variant = parse_variant(a.variant);
  d.model = a.model;
  std::ostringstream out;
  write_dsim_header(out);
  write_dsim_row(out, d);
  emit(a.out, out.str());
  return kExitOk;
}

struct RankArgs {
  std::string scores;
  std::string statistic = "max";
  std::string label;
  std::string variant = "V1";
  std::string relevant;
  std::string out;
};

// Long-format input: test_case_id,doc_id,score (one row per pair).
int cmd_rank(const RankArgs& a) {
  const auto table = csv::Table::load(a.scores);
  if (table.empty()) throw DataError("empty report: " + a.scores);
  const auto tc_col = table.column("test_case_id");
  const auto doc_col = table.column("doc_id");
  const auto score_col = table.column("score");
  std::map<std::string, std::map<std::string, double>> grid;
  std::set<std::string> docs;
  std::size_t line = 1;
  for (const auto& row : table.rows()) {
    ++line;
    grid[row.at(tc_col)][row.at(doc_col)] = csv::parse_double(row.at(score_col), a.scores + ":" + std::to_string(line));
    docs.insert(row.at(doc_col));
  }
  std::map<std::string, std::vector<double>> per_test;
  for (const auto& [tc, by_doc] : grid) {
    for (const auto& doc : docs) {
      auto it = by_doc.find(doc);
      if (it == by_doc.end()) throw DataError("test case " + tc + " has no score for document " + doc);
      per_test[tc].push_back(it->second);
    }
  }
  const auto ranking = rank_test_cases(per_test, parse_statistic(a.statistic), a.label, parse_variant(a.variant));
  std::ostringstream out;
  write_ranking_header(out);
  write_ranking_rows(out, ranking);
  emit(a.out, out.str());
  if (!a.relevant.empty()) {
    const auto ids = split_commas(a.relevant);
    const std::set<std::string> relevant(ids.begin(), ids.end());
    std::cerr << "average_precision " << csv::format_double(average_precision(ranking.relevance(relevant))) << "\n";
  }
  return kExitOk;
}

struct StatsArgs {
  std::string design;
  int iterations = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
};

int cmd_stats(const StatsArgs& a) {
  const auto rows = read_design_csv(csv::Table::load(a.design));
  const auto report = compute_stats(rows, a.iterations, a.seed, a.workers);
  std::ostringstream csv_out, text_out;
  write_stats_csv(csv_out, report);
  write_stats_text(text_out, report);
  if (a.out_dir.empty()) {
    std::cout << csv_out.str();
    std::cerr << text_out.str();
  } else {
    fs::create_directories(a.out_dir);
    emit((fs::path(a.out_dir) / "stats.csv").string(), csv_out.str());
    emit((fs::path(a.out_dir) / "stats.txt").string(), text_out.str());
  }
  return kExitOk;
}

struct ProbeArgs {
  int terms = 2000;
  int docs = 1000;
  std::string ks = "8,16,32,64";
  int repetitions = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_svd_probe(const ProbeArgs& a) {
  std::vector<ProbeSize> sizes;
  for (const auto& k : split_commas(a.ks)) {
    sizes.push_back({a.terms, a.docs, static_cast<int>(csv::parse_int(k, "--k"))});
  }
  const auto probe = svd_runtime_probe(sizes, a.seed, a.repetitions);
  std::ostringstream out;
  out << "terms,docs,k,seconds\n";
  for (const auto& row : probe.rows) {
    csv::write_row(out, {std::to_string(row.size.terms), std::to_string(row.size.docs), std::to_string(row.size.k),
                         csv::format_double(row.seconds)});
  }
  emit(a.out, out.str());
  std::cerr << "fit: seconds = " << probe.fit.a << " + " << probe.fit.b << " k + " << probe.fit.c
            << " k^2 (R^2 = " << probe.fit.r_squared << ")\n";
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"tcsel: information-retrieval based test case selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TCSEL_VERSION);

  PipelineArgs pipeline;
  auto* p = app.add_subcommand("pipeline", "Run the full experiment described by a config file");
  p->add_option("config", pipeline.config, "Config file (key = value lines)")->required();
  p->add_option("--set", pipeline.sets, "Override a config key: key=value");
  p->add_option("--workers", pipeline.workers, "Worker threads (does not change outputs)")->check(CLI::Range(1, 1024));
  p->add_option("--output-dir", pipeline.output_dir, "Override output_dir");

  FixtureArgs fixture;
  auto* f = app.add_subcommand("make-fixture", "Generate a synthetic product, chains and test cases");
  f->add_option("--out", fixture.out, "Target directory")->required();
  f->add_option("--chains", fixture.params.chains, "Number of feature chains");
  f->add_option("--files", fixture.params.files, "Number of product text files");
  f->add_option("--test-cases", fixture.params.test_cases, "Number of test cases");
  f->add_option("--vocab", fixture.params.vocabulary, "Pseudoword vocabulary size");
  f->add_option("--seed", fixture.params.seed, "Root seed");
  f->add_option("--signal", fixture.signals, "Per-chain planted signal: strong|none, comma separated");

  PlotArgs plot;
  auto* pd = app.add_subcommand("plot-data", "Emit plot-ready series and box-plot summaries");
  pd->add_option("--scores", plot.scores, "Scores CSV files (doc_id,score,rank,configured)");
  pd->add_option("--ranking", plot.ranking, "Ranking CSV (e.g. relevant_ranking.csv)");
  pd->add_option("--out", plot.out, "Output directory");
  pd->add_option("--top", plot.top, "Rows kept per scores series");

  DsimArgs ds;
  auto* d = app.add_subcommand("dsim", "Differential similarity from two scores CSVs");
  d->add_option("--activated", ds.activated, "Scores against the feature-activated corpus")->required();
  d->add_option("--deactivated", ds.deactivated, "Scores against the feature-deactivated corpus")->required();
  d->add_option("--chain", ds.chain, "Chain id for the report");
  d->add_option("--variant", ds.variant, "Test content variant for the report");
  d->add_option("--model", ds.model, "Model tag for the report");
  d->add_option("--out", ds.out, "Output CSV (default stdout)");

  RankArgs rk;
  auto* r = app.add_subcommand("rank", "Rank test cases from long-format scores");
  r->add_option("--scores", rk.scores, "CSV with test_case_id,doc_id,score")->required();
  r->add_option("--statistic", rk.statistic, "max or mean");
  r->add_option("--corpus-label", rk.label, "Label written to the report");
  r->add_option("--variant", rk.variant, "Variant written to the report");
  r->add_option("--relevant", rk.relevant, "Relevant ids; prints average precision to stderr");
  r->add_option("--out", rk.out, "Output CSV (default stdout)");

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "Randomization tests on a rank design");
  s->add_option("--design", st.design, "CSV with subject,corpus,model,variant,statistic,rank")->required();
  s->add_option("--iterations", st.iterations, "Permutations per test")->check(CLI::PositiveNumber);
  s->add_option("--seed", st.seed, "Root seed");
  s->add_option("--workers", st.workers, "Worker threads")->check(CLI::Range(1, 1024));
  s->add_option("--out-dir", st.out_dir, "Write stats.csv and stats.txt here (default stdout)");

  ProbeArgs pr;
  auto* sv = app.add_subcommand("svd-probe", "Time truncated SVD against k and fit a quadratic");
  sv->add_option("--terms", pr.terms, "Rows of the random matrix");
  sv->add_option("--docs", pr.docs, "Columns of the random matrix");
  sv->add_option("--k", pr.ks, "Comma-separated k values");
  sv->add_option("--repetitions", pr.repetitions, "Timed runs per k (median reported)");
  sv->add_option("--seed", pr.seed, "Matrix seed");
  sv->add_option("--out", pr.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (p->parsed()) return cmd_pipeline(pipeline);
    if (f->parsed()) return cmd_make_fixture(fixture);
    if (pd->parsed()) return cmd_plot_data(plot);
    if (d->parsed()) return cmd_dsim(ds);
    if (r->parsed()) return cmd_rank(rk);
    if (s->parsed()) return cmd_stats(st);
    if (sv->parsed()) return cmd_svd_probe(pr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace tcsel::cli
