#include "tcsel/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "tcsel/csv.hpp"
#include "tcsel/error.hpp"
#include "tcsel/parallel.hpp"
#include "tcsel/seed.hpp"

namespace tcsel {
namespace {

constexpr int kBlockSize = 1024;

// Subject x level means of the tested factor, averaged over the other factor.
struct Marginals {
  std::size_t subjects = 0;
  std::size_t levels = 0;
  std::vector<double> means;  // subjects x levels, row-major

  double at(std::size_t s, std::size_t l) const { return means[s * levels + l]; }
};

Marginals marginals(const RmDesign& d, Effect effect) {
  const bool on_a = effect != Effect::FactorB;
  Marginals m;
  m.subjects = d.subjects().size();
  m.levels = on_a ? d.a_levels().size() : d.b_levels().size();
  const std::size_t other = on_a ? d.b_levels().size() : d.a_levels().size();
  m.means.assign(m.subjects * m.levels, 0.0);
  for (std::size_t s = 0; s < m.subjects; ++s) {
    for (std::size_t l = 0; l < m.levels; ++l) {
      double sum = 0.0;
      for (std::size_t o = 0; o < other; ++o) sum += on_a ? d.at(s, l, o) : d.at(s, o, l);
      m.means[s * m.levels + l] = sum / static_cast<double>(other);
    }
  }
  return m;
}

// F ratio from subject x level means; `perm` maps each subject's level
// position to the source level (identity when empty).
double f_ratio(const Marginals& m, const std::vector<std::size_t>& perm) {
  const std::size_t S = m.subjects;
  const std::size_t L = m.levels;
  auto value = [&](std::size_t s, std::size_t l) {
    return perm.empty() ? m.at(s, l) : m.at(s, perm[s * L + l]);
  };
  std::vector<double> level_mean(L, 0.0);
  std::vector<double> subject_mean(S, 0.0);
  double grand = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t l = 0; l < L; ++l) {
      double v = value(s, l);
      level_mean[l] += v;
      subject_mean[s] += v;
      grand += v;
    }
  }
  for (auto& x : level_mean) x /= static_cast<double>(S);
  for (auto& x : subject_mean) x /= static_cast<double>(L);
  grand /= static_cast<double>(S * L);

  double ss_effect = 0.0;
  for (double x : level_mean) ss_effect += (x - grand) * (x - grand);
  ss_effect *= static_cast<double>(S);
  double ss_error = 0.0;
  double ss_total = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t l = 0; l < L; ++l) {
      double v = value(s, l);
      double r = v - subject_mean[s] - level_mean[l] + grand;
      ss_error += r * r;
      ss_total += (v - grand) * (v - grand);
    }
  }
  const double tiny = 1e-12 * ss_total;
  if (ss_total <= std::numeric_limits<double>::min() || ss_effect <= tiny) return 0.0;
  if (ss_error <= tiny) return std::numeric_limits<double>::infinity();
  const double df_effect = static_cast<double>(L - 1);
  const double df_error = static_cast<double>((L - 1) * (S - 1));
  return (ss_effect / df_effect) / (ss_error / df_error);
}

void require_testable(const RmDesign& design, Effect effect) {
  design.validate();
  if (design.subjects().size() < 2) throw ConfigError("randomization test needs >= 2 subjects");
  const auto levels = effect == Effect::FactorB ? design.b_levels().size() : design.a_levels().size();
  if (levels < 2) throw ConfigError("randomization test needs >= 2 levels of the tested factor");
}

}  // namespace

RmDesign::RmDesign(std::vector<std::string> subjects, std::vector<std::string> a_levels,
                   std::vector<std::string> b_levels)
    : subjects_(std::move(subjects)), a_levels_(std::move(a_levels)), b_levels_(std::move(b_levels)) {
  if (subjects_.empty() || a_levels_.empty() || b_levels_.empty()) {
    throw ConfigError("repeated-measures design needs subjects and levels on both factors");
  }
  values_.assign(subjects_.size() * a_levels_.size() * b_levels_.size(),
                 std::numeric_limits<double>::quiet_NaN());
}

std::size_t RmDesign::find(const std::vector<std::string>& v, std::string_view key, const char* what) {
  auto it = std::find(v.begin(), v.end(), key);
  if (it == v.end()) throw DataError(std::string("unknown ") + what + " '" + std::string(key) + "'");
  return static_cast<std::size_t>(it - v.begin());
}

void RmDesign::set(std::size_t subject, std::size_t a, std::size_t b, double value) {
  if (subject >= subjects_.size() || a >= a_levels_.size() || b >= b_levels_.size()) {
    throw DataError("design cell out of range");
  }
  if (!std::isfinite(value)) throw DataError("design values must be finite");
  values_[index(subject, a, b)] = value;
}

void RmDesign::set(std::string_view subject, std::string_view a, std::string_view b, double value) {
  set(find(subjects_, subject, "subject"), find(a_levels_, a, "factor A level"),
      find(b_levels_, b, "factor B level"), value);
}

double RmDesign::at(std::size_t subject, std::size_t a, std::size_t b) const {
  return values_[index(subject, a, b)];
}

bool RmDesign::complete() const {
  return std::none_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

void RmDesign::validate() const {
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    for (std::size_t a = 0; a < a_levels_.size(); ++a) {
      for (std::size_t b = 0; b < b_levels_.size(); ++b) {
        if (std::isnan(at(s, a, b))) {
          throw DataError("missing cell (" + subjects_[s] + ", " + a_levels_[a] + ", " +
                          b_levels_[b] + ")");
        }
      }
    }
  }
}

std::string_view to_string(Effect e) {
  switch (e) {
    case Effect::FactorA: return "factor_a";
    case Effect::FactorB: return "factor_b";
    case Effect::BetweenDesigns: return "between-designs";
  }
  return "?";
}

double rm_f_ratio(const RmDesign& design, Effect effect) {
  design.validate();
  return f_ratio(marginals(design, effect), {});
}

bool at_least_as_extreme(double permuted, double observed) {
  if (std::isinf(observed)) return std::isinf(permuted);
  return permuted >= observed - 1e-12 * std::abs(observed);
}

RandomizationResult randomization_test(const RmDesign& design, Effect effect, int iterations,
                                       std::uint64_t seed, int workers) {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  require_testable(design, effect);
  const Marginals m = marginals(design, effect);
  const double observed = f_ratio(m, {});

  const auto total = static_cast<std::size_t>(iterations);
  const std::size_t blocks = (total + kBlockSize - 1) / kBlockSize;
  std::vector<std::size_t> counts(blocks, 0);
  parallel_blocks(blocks, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> perm(m.subjects * m.levels);
    for (std::size_t block = begin; block < end; ++block) {
      std::mt19937_64 rng(derive_seed(seed, "permutation-block", block));
      const std::size_t first = block * kBlockSize;
      const std::size_t last = std::min(total, first + kBlockSize);
      std::size_t count = 0;
      for (std::size_t it = first; it < last; ++it) {
        for (std::size_t s = 0; s < m.subjects; ++s) {
          auto row = perm.begin() + static_cast<std::ptrdiff_t>(s * m.levels);
          std::iota(row, row + static_cast<std::ptrdiff_t>(m.levels), std::size_t{0});
          std::shuffle(row, row + static_cast<std::ptrdiff_t>(m.levels), rng);
        }
        if (at_least_as_extreme(f_ratio(m, perm), observed)) ++count;
      }
      counts[block] = count;
    }
  });

  RandomizationResult result;
  result.effect = effect;
  result.label = std::string(to_string(effect));
  result.statistic = observed;
  result.iterations = iterations;
  result.seed = seed;
  const auto exceed = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  result.p_value = static_cast<double>(exceed + 1) / static_cast<double>(total + 1);
  return result;
}

RmDesign merge_designs(const RmDesign& first, const RmDesign& second,
                       const std::string& first_label, const std::string& second_label) {
  first.validate();
  second.validate();
  if (first.subjects() != second.subjects() || first.a_levels() != second.a_levels() ||
      first.b_levels() != second.b_levels()) {
    throw ConfigError("designs to compare must share subjects and factor levels");
  }
  std::vector<std::string> cells;
  for (const auto& a : first.a_levels()) {
    for (const auto& b : first.b_levels()) cells.push_back(a + "/" + b);
  }
  RmDesign merged(first.subjects(), {first_label, second_label}, cells);
  const std::size_t nb = first.b_levels().size();
  for (std::size_t s = 0; s < first.subjects().size(); ++s) {
    for (std::size_t a = 0; a < first.a_levels().size(); ++a) {
      for (std::size_t b = 0; b < nb; ++b) {
        merged.set(s, 0, a * nb + b, first.at(s, a, b));
        merged.set(s, 1, a * nb + b, second.at(s, a, b));
      }
    }
  }
  return merged;
}

RandomizationResult randomization_test_between(const RmDesign& first, const RmDesign& second,
                                               const std::string& first_label,
                                               const std::string& second_label, int iterations,
                                               std::uint64_t seed, int workers) {
  RmDesign merged = merge_designs(first, second, first_label, second_label);
  RandomizationResult r = randomization_test(merged, Effect::FactorA, iterations, seed, workers);
  r.effect = Effect::BetweenDesigns;
  r.label = std::string(to_string(Effect::BetweenDesigns));
  return r;
}

void write_stats_header(std::ostream& out) {
  out << "effect,statistic_value,iterations,seed,p_value\n";
}

void write_stats_row(std::ostream& out, const RandomizationResult& r) {
  csv::write_row(out, {r.label, csv::format_double(r.statistic), std::to_string(r.iterations),
                       std::to_string(r.seed), csv::format_double(r.p_value)});
}

}  // namespace tcsel
