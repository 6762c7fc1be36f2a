#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nsum/analytic.hpp"
#include "nsum/estimators.hpp"
#include "nsum/ingest.hpp"
#include "nsum/netgen.hpp"
#include "nsum/survey.hpp"

namespace nsum {

// Runs fn(0..n-1) across up to `threads` workers. Output written by index
// stays deterministic for any thread count.
void parallel_for(std::uint32_t n, int threads, const std::function<void(std::uint32_t)>& fn);

struct EstimatorStats {
  EstimatorKind kind;
  double mean = 0, sd = 0, bias = 0, rmse = 0;
  double rel_bias = 0, rel_se = 0, rel_rmse = 0;
  std::uint32_t n_valid = 0, n_nan = 0, n_inf = 0;
};

// Aggregate of one case's replicate surveys, plus the per-survey estimates
// that produced it. Surveys flagged inf or zero-denominator count as n_inf,
// all-excluded surveys as n_nan, so the three buckets always sum to the
// survey count.
struct CaseResult {
  int case_id = -1;
  double true_prevalence = 0;
  double degree_ratio = 0;
  std::string band;
  double assortativity = 0;
  std::vector<EstimatorStats> stats;
  std::vector<std::vector<EstimateOutcome>> survey_log;  // [survey][estimator]
  std::vector<EstimatorKind> estimators;
};

struct RunCaseOptions {
  std::vector<EstimatorKind> estimators = {kDRpR, kDRpA, kDApA};
  int threads = 1;
  DegreeRatioBaseline baseline = DegreeRatioBaseline::whole_population;
  ZeroTermPolicy policy = ZeroTermPolicy::drop_term;
};

// Replicate surveys over one network/case: SRS sample, graph ARD, all
// requested estimators. Survey seeds are case seed + survey index.
CaseResult run_case(const Network& net, const CaseSpec& spec, const RunCaseOptions& opts = {});

void write_survey_log_csv(const CaseResult& result, const std::string& path);
void append_survey_log_csv(const CaseResult& result, std::string& out);
void write_case_results_csv(std::span<const CaseResult> results, const std::string& path);

enum class ValidationMode { model, graph_fresh, graph_fixed };

struct ValidateConfig {
  double a = 1.0;
  double p = 0.01;
  double r = 0.25;
  std::uint32_t n_population = 20000;
  std::uint32_t n_probe = 2000;
  std::uint32_t n_sample = 500;
  std::uint32_t n_reps = 2000;
  ValidationMode mode = ValidationMode::model;
  Composition composition = Composition::conditioned;
  std::uint64_t seed = 1;
  int threads = 1;
  double mean_z_tol = 3.0;      // |z| bound for the MC mean vs the formula
  double var_tol_er = 0.10;     // relative variance tolerance at a = 1
  double var_tol_general = 0.25;  // and elsewhere
};

struct ValidationPoint {
  std::string estimator;
  double mc_mean = 0, mc_var = 0;
  double analytic_mean = 0, analytic_var = 0;
  double mean_z = 0;     // (mc_mean - analytic_mean) / se(mc_mean)
  double var_ratio = 0;  // mc_var / analytic_var
  std::uint32_t n_ok = 0;
  bool mean_ok = false, var_ok = false;
};

struct ValidationReport {
  ValidateConfig config;
  ValidationPoint drpr, drpa;
  double cross_var_ratio = 0;  // mc var drpr / mc var drpa
  bool cross_ok = false;       // gated only at a = 1
  bool pass = false;
};

// Monte Carlo moments of dRpR and dRpA on shared draws, compared against the
// closed forms at the stated tolerances.
ValidationReport validate_analytic(const ValidateConfig& cfg);

std::string validation_report_json(const ValidationReport& report);

struct HypergeomCheckResult {
  double tv_distance = 0;
  std::uint64_t n_conditional = 0;  // draws that hit the conditioning degree
  std::uint64_t n_reps = 0;
};

// Simulates one node's (y, d) under the Erdos-Renyi response model and
// measures the total-variation distance between the empirical law of
// y | d = d_condition and the matching hypergeometric distribution.
HypergeomCheckResult hypergeom_check(std::uint32_t n_total, std::uint32_t n_hidden, double p,
                                     std::uint32_t d_condition, std::uint64_t n_reps,
                                     std::uint64_t seed, bool respondent_hidden = false);

struct S1CheckResult {
  double emp_var_roa = 0, emp_var_aor = 0;
  double closed_var_roa = 0, closed_var_aor = 0;
  double z_roa = 0, z_aor = 0;  // empirical vs closed, in MC standard errors
  bool closed_forms_equal = false;
  bool ordering_ok = false;  // strict RoA < AoR (or no detectable gap when equal)
  bool match_ok = false;     // |z| <= 3 for both
};

// Prevalence estimators with known integer degrees.
S1CheckResult s1_prevalence_mc_check(std::span<const std::uint32_t> degrees, double r,
                                     std::uint64_t n_reps, std::uint64_t seed);

// Degree estimators for one respondent of true degree d_i.
S1CheckResult s1_degree_mc_check(std::uint32_t d_i, std::uint32_t n_population,
                                 std::span<const std::uint32_t> probe_sizes,
                                 std::uint64_t n_reps, std::uint64_t seed);

}  // namespace nsum
