#include "nsum/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nsum {

std::string estimator_name(EstimatorKind kind) {
  return kind.degree_method == Mean::roa
             ? (kind.prevalence_method == Mean::roa ? "drpr" : "drpa")
             : (kind.prevalence_method == Mean::roa ? "dapr" : "dapa");
}

EstimatorKind estimator_from_name(const std::string& s) {
  if (s == "drpr") return kDRpR;
  if (s == "drpa") return kDRpA;
  if (s == "dapa") return kDApA;
  if (s == "dapr") return kDApR;
  throw std::invalid_argument("unknown estimator '" + s + "'");
}

std::string flag_name(EstimateFlag flag) {
  switch (flag) {
    case EstimateFlag::ok: return "ok";
    case EstimateFlag::nan_all_excluded: return "nan";
    case EstimateFlag::inf: return "inf";
    case EstimateFlag::zero_denominator: return "zero_den";
  }
  return "?";
}

namespace {

void check_probe_args(std::span<const std::uint32_t> y, std::span<const std::uint32_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("probe group list is empty");
  if (y.size() != sizes.size())
    throw std::invalid_argument("probe response row and size list differ in length");
  for (std::uint32_t s : sizes)
    if (s == 0) throw std::invalid_argument("probe group sizes must be positive");
}

}  // namespace

double degree_roa(std::span<const std::uint32_t> y_probe_row,
                  std::span<const std::uint32_t> probe_sizes,
                  double n_population) {
  check_probe_args(y_probe_row, probe_sizes);
  double sum_y = 0.0, sum_n = 0.0;
  for (std::size_t j = 0; j < probe_sizes.size(); ++j) {
    sum_y += y_probe_row[j];
    sum_n += probe_sizes[j];
  }
  return n_population * (sum_y / sum_n);
}

double degree_aor(std::span<const std::uint32_t> y_probe_row,
                  std::span<const std::uint32_t> probe_sizes,
                  double n_population) {
  check_probe_args(y_probe_row, probe_sizes);
  double sum_ratio = 0.0;
  for (std::size_t j = 0; j < probe_sizes.size(); ++j)
    sum_ratio += static_cast<double>(y_probe_row[j]) / probe_sizes[j];
  return n_population * (sum_ratio / static_cast<double>(probe_sizes.size()));
}

EstimateOutcome prevalence_roa(std::span<const double> y_hidden, std::span<const double> degrees) {
  if (y_hidden.empty()) throw std::invalid_argument("no respondents");
  if (y_hidden.size() != degrees.size())
    throw std::invalid_argument("response and degree vectors differ in length");
  double sum_y = 0.0, sum_d = 0.0;
  for (std::size_t i = 0; i < y_hidden.size(); ++i) {
    sum_y += y_hidden[i];
    sum_d += degrees[i];
  }
  if (sum_d > 0.0)
    return {sum_y / sum_d, EstimateFlag::ok, static_cast<std::uint32_t>(y_hidden.size())};
  if (sum_y > 0.0)
    return {std::numeric_limits<double>::infinity(), EstimateFlag::zero_denominator, 0};
  return {std::numeric_limits<double>::quiet_NaN(), EstimateFlag::nan_all_excluded, 0};
}

EstimateOutcome prevalence_aor(std::span<const double> y_hidden, std::span<const double> degrees,
                               ZeroTermPolicy policy) {
  if (y_hidden.empty()) throw std::invalid_argument("no respondents");
  if (y_hidden.size() != degrees.size())
    throw std::invalid_argument("response and degree vectors differ in length");
  double sum_ratio = 0.0;
  std::uint32_t used = 0;
  bool inf_hit = false, zero_term = false;
  for (std::size_t i = 0; i < y_hidden.size(); ++i) {
    if (degrees[i] > 0.0) {
      sum_ratio += y_hidden[i] / degrees[i];
      ++used;
    } else if (y_hidden[i] > 0.0) {
      inf_hit = true;
    } else {
      zero_term = true;  // 0/0 term
    }
  }
  if (inf_hit) return {std::numeric_limits<double>::infinity(), EstimateFlag::inf, used};
  if (policy == ZeroTermPolicy::spoil_survey && zero_term)
    return {std::numeric_limits<double>::quiet_NaN(), EstimateFlag::nan_all_excluded, used};
  if (used == 0) return {std::numeric_limits<double>::quiet_NaN(), EstimateFlag::nan_all_excluded, 0};
  return {sum_ratio / used, EstimateFlag::ok, used};
}

std::vector<double> estimate_degrees(const ArdSample& sample,
                                     std::span<const std::uint32_t> probe_sizes,
                                     double n_population, Mean method) {
  std::vector<double> d(sample.n_respondents());
  for (std::uint32_t i = 0; i < sample.n_respondents(); ++i) {
    std::span<const std::uint32_t> row(sample.y_probe[i]);
    d[i] = method == Mean::roa ? degree_roa(row, probe_sizes, n_population)
                               : degree_aor(row, probe_sizes, n_population);
  }
  return d;
}

EstimateOutcome estimate(const ArdSample& sample, std::span<const std::uint32_t> probe_sizes,
                         double n_population, EstimatorKind kind, ZeroTermPolicy policy) {
  if (sample.n_respondents() == 0) throw std::invalid_argument("sample has no respondents");
  if (sample.n_probes() != probe_sizes.size())
    throw std::invalid_argument("probe size list does not match the sample");
  std::vector<double> degrees = estimate_degrees(sample, probe_sizes, n_population,
                                                 kind.degree_method);
  std::vector<double> y(sample.y_hidden.begin(), sample.y_hidden.end());
  return kind.prevalence_method == Mean::roa ? prevalence_roa(y, degrees)
                                             : prevalence_aor(y, degrees, policy);
}

}  // namespace nsum
