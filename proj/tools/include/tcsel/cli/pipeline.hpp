#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tcsel/cli/config.hpp"
#include "tcsel/evaluation.hpp"

namespace tcsel::cli {

struct PipelineSummary {
  std::vector<DsimResult> dsim;
  // Chain id -> test case used as the Dsim query.
  std::map<std::string, std::string> dsim_queries;
  std::vector<TestCaseRanking> rankings;
  std::string config_hash;
  std::vector<std::string> warnings;
};

// Runs corpus construction, preprocessing, indexing, scoring and evaluation
// and writes every report into config.output_dir:
//   ranking.csv, relevant_ranking.csv, ranks_design.csv, map.csv, dsim.csv,
//   dsim_grid.txt, stats.csv, stats.txt, manifest.cfg, scores/*.csv
PipelineSummary run_pipeline(const RunConfig& config);

}  // namespace tcsel::cli
