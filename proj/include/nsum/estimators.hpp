#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsum/survey.hpp"

namespace nsum {

// Both composition steps pool per-unit ratios either as a ratio of averages
// (RoA) or an average of ratios (AoR).
enum class Mean { roa, aor };

struct EstimatorKind {
  Mean degree_method;
  Mean prevalence_method;

  bool operator==(const EstimatorKind&) const = default;
};

// The four compositions: named by degree method then prevalence method.
inline constexpr EstimatorKind kDRpR{Mean::roa, Mean::roa};
inline constexpr EstimatorKind kDRpA{Mean::roa, Mean::aor};
inline constexpr EstimatorKind kDApA{Mean::aor, Mean::aor};
inline constexpr EstimatorKind kDApR{Mean::aor, Mean::roa};

std::string estimator_name(EstimatorKind kind);          // "drpr", "drpa", ...
EstimatorKind estimator_from_name(const std::string& s);  // throws on unknown

enum class EstimateFlag : std::uint8_t {
  ok,                // finite value
  nan_all_excluded,  // every term was 0/0 (or both pooled sums were zero)
  inf,               // some respondent had a positive count over a zero degree
  zero_denominator,  // pooled degree sum was zero with a positive numerator
};

std::string flag_name(EstimateFlag flag);

struct EstimateOutcome {
  double value = 0.0;
  EstimateFlag flag = EstimateFlag::ok;
  std::uint32_t n_used = 0;

  bool ok() const { return flag == EstimateFlag::ok; }
};

// How a 0/0 respondent term is handled inside the AoR prevalence estimator:
// dropped from the average (default) or spoiling the whole survey estimate.
enum class ZeroTermPolicy { drop_term, spoil_survey };

// N * (sum_j y_ij) / (sum_j N_j)
double degree_roa(std::span<const std::uint32_t> y_probe_row,
                  std::span<const std::uint32_t> probe_sizes,
                  double n_population);

// N * (1/K) * sum_j y_ij / N_j
double degree_aor(std::span<const std::uint32_t> y_probe_row,
                  std::span<const std::uint32_t> probe_sizes,
                  double n_population);

// sum_i y_i / sum_i d_i
EstimateOutcome prevalence_roa(std::span<const double> y_hidden, std::span<const double> degrees);

// mean of y_i/d_i over respondents with d_i > 0; 0/0 terms follow the policy
// and a positive count over a zero degree flags the survey as inf.
EstimateOutcome prevalence_aor(std::span<const double> y_hidden, std::span<const double> degrees,
                               ZeroTermPolicy policy = ZeroTermPolicy::drop_term);

// Per-respondent degree estimates for the requested method.
std::vector<double> estimate_degrees(const ArdSample& sample,
                                     std::span<const std::uint32_t> probe_sizes,
                                     double n_population, Mean method);

// Composes the designated degree estimator with the designated prevalence
// estimator over one survey sample.
EstimateOutcome estimate(const ArdSample& sample, std::span<const std::uint32_t> probe_sizes,
                         double n_population, EstimatorKind kind,
                         ZeroTermPolicy policy = ZeroTermPolicy::drop_term);

}  // namespace nsum
