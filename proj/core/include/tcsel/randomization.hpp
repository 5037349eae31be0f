#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tcsel {

// Two-way fully crossed repeated-measures design: every subject is observed
// under every (factor A level, factor B level) cell.
class RmDesign {
 public:
  RmDesign(std::vector<std::string> subjects, std::vector<std::string> a_levels,
           std::vector<std::string> b_levels);

  void set(std::size_t subject, std::size_t a, std::size_t b, double value);
  void set(std::string_view subject, std::string_view a, std::string_view b, double value);
  double at(std::size_t subject, std::size_t a, std::size_t b) const;

  const std::vector<std::string>& subjects() const { return subjects_; }
  const std::vector<std::string>& a_levels() const { return a_levels_; }
  const std::vector<std::string>& b_levels() const { return b_levels_; }

  bool complete() const;
  // Throws DataError naming the first missing cell.
  void validate() const;

 private:
  std::size_t index(std::size_t s, std::size_t a, std::size_t b) const {
    return (s * a_levels_.size() + a) * b_levels_.size() + b;
  }
  static std::size_t find(const std::vector<std::string>& v, std::string_view key, const char* what);

  std::vector<std::string> subjects_;
  std::vector<std::string> a_levels_;
  std::vector<std::string> b_levels_;
  std::vector<double> values_;  // NaN marks a missing cell
};

enum class Effect { FactorA, FactorB, BetweenDesigns };

std::string_view to_string(Effect e);

// Repeated-measures F ratio of one main effect: MS_effect / MS_(effect x subject).
// Returns 0 when the effect has no variation and +inf when only the error term
// vanishes. Effect::BetweenDesigns is treated as FactorA.
double rm_f_ratio(const RmDesign& design, Effect effect);

struct RandomizationResult {
  Effect effect = Effect::FactorA;
  std::string label;
  double statistic = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  double p_value = 1.0;
};

// Monte Carlo randomization test of one main effect. The null distribution
// permutes the effect's level labels independently within each subject (one
// permutation per subject, shared across the other factor's levels).
// p = (#{permuted F >= observed F} + 1) / (iterations + 1). Iterations are
// processed in fixed seeded blocks, so the result does not depend on workers.
RandomizationResult randomization_test(const RmDesign& design, Effect effect, int iterations,
                                       std::uint64_t seed, int workers = 1);

// Merges two designs over the same subjects into one whose factor A is the
// design (two levels) and whose factor B enumerates the (a, b) cells.
RmDesign merge_designs(const RmDesign& first, const RmDesign& second,
                       const std::string& first_label, const std::string& second_label);

// Tests whether the two designs (e.g. corpus types) differ.
RandomizationResult randomization_test_between(const RmDesign& first, const RmDesign& second,
                                               const std::string& first_label,
                                               const std::string& second_label, int iterations,
                                               std::uint64_t seed, int workers = 1);

// Tie rule shared by the Monte Carlo count: permuted >= observed up to a
// relative tolerance of 1e-12.
bool at_least_as_extreme(double permuted, double observed);

void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, const RandomizationResult& r);

}  // namespace tcsel
