#include "nsum/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "nsum/csvio.hpp"
#include "nsum/rng.hpp"

namespace nsum {

void parallel_for(std::uint32_t n, int threads, const std::function<void(std::uint32_t)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (std::uint32_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::uint32_t workers = std::min<std::uint32_t>(static_cast<std::uint32_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint32_t w = 0; w < workers; ++w) {
    std::uint32_t lo = static_cast<std::uint32_t>(std::uint64_t(n) * w / workers);
    std::uint32_t hi = static_cast<std::uint32_t>(std::uint64_t(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint32_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

namespace {

struct Aggregate {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  std::uint32_t n = 0;
};

Aggregate aggregate_valid(const std::vector<double>& values) {
  Aggregate a;
  a.n = static_cast<std::uint32_t>(values.size());
  if (a.n == 0) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / a.n;
  if (a.n == 1) {
    a.sd = 0.0;
    return a;
  }
  double ss = 0.0;
  for (double v : values) {
    double d = v - a.mean;
    ss += d * d;
  }
  a.sd = std::sqrt(ss / (a.n - 1));
  return a;
}

}  // namespace

CaseResult run_case(const Network& net, const CaseSpec& spec, const RunCaseOptions& opts) {
  const NodeSet& hidden = net.group(spec.hidden_group_id);
  if (hidden.size() == 0) throw std::invalid_argument("hidden group is empty");
  if (hidden.size() >= net.n_nodes)
    throw std::invalid_argument("hidden group equals the whole population");
  if (spec.probe_group_ids.empty()) throw std::invalid_argument("case has no probe groups");
  if (spec.sample_size == 0 || spec.sample_size > net.n_nodes)
    throw std::invalid_argument("sample size must be in [1, n_nodes]");
  if (opts.estimators.empty()) throw std::invalid_argument("no estimators requested");

  std::vector<std::uint32_t> probe_sizes = net.group_sizes(spec.probe_group_ids);

  CaseResult result;
  result.case_id = spec.case_id;
  result.true_prevalence = static_cast<double>(hidden.size()) / net.n_nodes;
  result.degree_ratio = degree_ratio(net, hidden, opts.baseline);
  result.band = degree_ratio_band(result.degree_ratio);
  std::vector<std::uint8_t> partition(net.n_nodes, 0);
  for (std::uint32_t i : hidden.members) partition[i] = 1;
  result.assortativity = assortativity(net, partition);
  result.estimators = opts.estimators;
  result.survey_log.assign(spec.n_surveys, std::vector<EstimateOutcome>(opts.estimators.size()));

  parallel_for(spec.n_surveys, opts.threads, [&](std::uint32_t s) {
    auto respondents = srs_without_replacement(net.n_nodes, spec.sample_size, spec.seed + s);
    ArdSample sample = ard_from_graph(net, respondents, hidden, spec.probe_group_ids);
    for (std::size_t e = 0; e < opts.estimators.size(); ++e)
      result.survey_log[s][e] =
          estimate(sample, probe_sizes, net.n_nodes, opts.estimators[e], opts.policy);
  });

  for (std::size_t e = 0; e < opts.estimators.size(); ++e) {
    EstimatorStats st;
    st.kind = opts.estimators[e];
    std::vector<double> valid;
    valid.reserve(spec.n_surveys);
    for (std::uint32_t s = 0; s < spec.n_surveys; ++s) {
      const EstimateOutcome& o = result.survey_log[s][e];
      switch (o.flag) {
        case EstimateFlag::ok:
          valid.push_back(o.value);
          break;
        case EstimateFlag::nan_all_excluded:
          ++st.n_nan;
          break;
        case EstimateFlag::inf:
        case EstimateFlag::zero_denominator:
          ++st.n_inf;
          break;
      }
    }
    Aggregate a = aggregate_valid(valid);
    st.n_valid = a.n;
    st.mean = a.mean;
    st.sd = a.sd;
    st.bias = a.mean - result.true_prevalence;
    st.rmse = std::sqrt(st.bias * st.bias + st.sd * st.sd);
    st.rel_bias = st.bias / result.true_prevalence;
    st.rel_se = st.sd / result.true_prevalence;
    st.rel_rmse = st.rmse / result.true_prevalence;
    result.stats.push_back(st);
  }
  return result;
}

void append_survey_log_csv(const CaseResult& result, std::string& out) {
  std::ostringstream os;
  for (std::size_t s = 0; s < result.survey_log.size(); ++s)
    for (std::size_t e = 0; e < result.estimators.size(); ++e) {
      const EstimateOutcome& o = result.survey_log[s][e];
      os << s << ',' << estimator_name(result.estimators[e]) << ',' << format_double(o.value)
         << ',' << flag_name(o.flag) << ',' << o.n_used << '\n';
    }
  out += os.str();
}

void write_survey_log_csv(const CaseResult& result, const std::string& path) {
  std::string out = "survey_id,estimator,value,flag,n_used\n";
  append_survey_log_csv(result, out);
  write_text_file(path, out);
}

void write_case_results_csv(std::span<const CaseResult> results, const std::string& path) {
  std::ostringstream out;
  out << "case_id,estimator,mean,sd,bias,rmse,rel_bias,rel_se,rel_rmse,"
         "n_valid,n_nan,n_inf,true_R,degree_ratio,band,assortativity\n";
  for (const CaseResult& r : results)
    for (const EstimatorStats& st : r.stats)
      out << r.case_id << ',' << estimator_name(st.kind) << ',' << format_double(st.mean) << ','
          << format_double(st.sd) << ',' << format_double(st.bias) << ','
          << format_double(st.rmse) << ',' << format_double(st.rel_bias) << ','
          << format_double(st.rel_se) << ',' << format_double(st.rel_rmse) << ',' << st.n_valid
          << ',' << st.n_nan << ',' << st.n_inf << ',' << format_double(r.true_prevalence) << ','
          << format_double(r.degree_ratio) << ',' << r.band << ','
          << format_double(r.assortativity) << '\n';
  write_text_file(path, out.str());
}

namespace {

// One replicate of the single-probe survey in graph mode; respondents are
// stratified when the composition is conditioned.
void graph_replicate(const Network& net, const NodeSet& hidden,
                     const std::vector<int>& probe_ids,
                     const std::vector<std::uint32_t>& probe_sizes,
                     const ValidateConfig& cfg, std::uint64_t seed,
                     EstimateOutcome& out_drpr, EstimateOutcome& out_drpa) {
  std::vector<std::uint32_t> respondents;
  if (cfg.composition == Composition::conditioned) {
    std::uint32_t n_h = static_cast<std::uint32_t>(std::llround(cfg.r * cfg.n_sample));
    Rng rng(seed);
    auto h_part = srs_without_replacement(net.n_hidden, n_h, rng.next_u64());
    auto l_part =
        srs_without_replacement(net.n_nodes - net.n_hidden, cfg.n_sample - n_h, rng.next_u64());
    respondents.reserve(cfg.n_sample);
    for (std::uint32_t v : h_part) respondents.push_back(v);
    for (std::uint32_t v : l_part) respondents.push_back(net.n_hidden + v);
  } else {
    respondents = srs_without_replacement(net.n_nodes, cfg.n_sample, seed);
  }
  ArdSample sample = ard_from_graph(net, respondents, hidden, probe_ids);
  out_drpr = estimate(sample, probe_sizes, net.n_nodes, kDRpR);
  out_drpa = estimate(sample, probe_sizes, net.n_nodes, kDRpA);
}

ValidationPoint make_point(const std::string& name, const std::vector<double>& values,
                           double analytic_mean, double analytic_var, const ValidateConfig& cfg) {
  ValidationPoint pt;
  pt.estimator = name;
  pt.analytic_mean = analytic_mean;
  pt.analytic_var = analytic_var;
  Aggregate a = aggregate_valid(values);
  pt.n_ok = a.n;
  pt.mc_mean = a.mean;
  pt.mc_var = a.sd * a.sd;
  double se = a.n > 0 ? a.sd / std::sqrt(static_cast<double>(a.n)) : 0.0;
  pt.mean_z = se > 0.0 ? (a.mean - analytic_mean) / se : std::numeric_limits<double>::infinity();
  pt.var_ratio = pt.mc_var / analytic_var;
  pt.mean_ok = std::fabs(pt.mean_z) <= cfg.mean_z_tol;
  double var_tol = cfg.a == 1.0 ? cfg.var_tol_er : cfg.var_tol_general;
  pt.var_ok = std::fabs(pt.var_ratio - 1.0) <= var_tol;
  return pt;
}

}  // namespace

ValidationReport validate_analytic(const ValidateConfig& cfg) {
  if (!(cfg.a > 0.0) || cfg.a * cfg.p > 1.0)
    throw std::invalid_argument("need a > 0 and a*p <= 1");
  if (!(cfg.r > 0.0 && cfg.r < 1.0)) throw std::invalid_argument("R must be in (0,1)");
  if (cfg.n_reps < 2) throw std::invalid_argument("need at least 2 replicates");

  const double p_hh = cfg.a * cfg.p, p_hl = cfg.p, p_ll = cfg.a * cfg.p;
  BlockParams params;
  params.n_total = cfg.n_population;
  params.n_hidden = static_cast<std::uint32_t>(std::llround(cfg.r * cfg.n_population));
  params.p_hh = p_hh;
  params.p_hl = p_hl;
  params.p_ll = p_ll;
  params.validate();
  if (cfg.n_probe == 0 || cfg.n_probe > params.n_total - params.n_hidden)
    throw std::invalid_argument("probe size must fit inside L");

  std::vector<EstimateOutcome> drpr_out(cfg.n_reps), drpa_out(cfg.n_reps);

  if (cfg.mode == ValidationMode::model) {
    std::vector<std::uint32_t> probe_sizes{cfg.n_probe};
    parallel_for(cfg.n_reps, cfg.threads, [&](std::uint32_t rep) {
      ArdSample sample = ard_from_model(params, cfg.n_sample, cfg.n_probe, cfg.composition,
                                        cfg.r, cfg.seed + rep);
      drpr_out[rep] = estimate(sample, probe_sizes, params.n_total, kDRpR);
      drpa_out[rep] = estimate(sample, probe_sizes, params.n_total, kDRpA);
    });
  } else if (cfg.mode == ValidationMode::graph_fixed) {
    Network net = generate_sbm(params, cfg.seed);
    std::vector<int> probe_ids{assign_probe_group(net, cfg.n_probe, true, cfg.seed + 1)};
    auto probe_sizes = net.group_sizes(probe_ids);
    const NodeSet hidden = [&] {
      std::vector<std::uint32_t> m(params.n_hidden);
      for (std::uint32_t i = 0; i < params.n_hidden; ++i) m[i] = i;
      return NodeSet::from_members(std::move(m), net.n_nodes);
    }();
    parallel_for(cfg.n_reps, cfg.threads, [&](std::uint32_t rep) {
      graph_replicate(net, hidden, probe_ids, probe_sizes, cfg, cfg.seed + 2 + rep,
                      drpr_out[rep], drpa_out[rep]);
    });
  } else {  // graph_fresh: a new network per replicate (superpopulation target)
    parallel_for(cfg.n_reps, cfg.threads, [&](std::uint32_t rep) {
      std::uint64_t net_seed = cfg.seed + 2ULL * rep;
      Network net = generate_sbm(params, net_seed);
      std::vector<int> probe_ids{assign_probe_group(net, cfg.n_probe, true, net_seed + 1)};
      auto probe_sizes = net.group_sizes(probe_ids);
      std::vector<std::uint32_t> m(params.n_hidden);
      for (std::uint32_t i = 0; i < params.n_hidden; ++i) m[i] = i;
      NodeSet hidden = NodeSet::from_members(std::move(m), net.n_nodes);
      graph_replicate(net, hidden, probe_ids, probe_sizes, cfg, splitmix64(net_seed) + rep,
                      drpr_out[rep], drpa_out[rep]);
    });
  }

  std::vector<double> drpr_vals, drpa_vals;
  drpr_vals.reserve(cfg.n_reps);
  drpa_vals.reserve(cfg.n_reps);
  for (std::uint32_t i = 0; i < cfg.n_reps; ++i) {
    if (drpr_out[i].ok()) drpr_vals.push_back(drpr_out[i].value);
    if (drpa_out[i].ok()) drpa_vals.push_back(drpa_out[i].value);
  }

  ValidationReport report;
  report.config = cfg;
  double n = cfg.n_sample;
  report.drpr = make_point("drpr", drpr_vals,
                           expect_general(RatioKind::drpr, p_hh, p_hl, p_ll, cfg.r),
                           var_general(RatioKind::drpr, p_hh, p_hl, p_ll, cfg.r, n,
                                       cfg.n_population, cfg.n_probe),
                           cfg);
  report.drpa = make_point("drpa", drpa_vals,
                           expect_general(RatioKind::drpa, p_hh, p_hl, p_ll, cfg.r),
                           var_general(RatioKind::drpa, p_hh, p_hl, p_ll, cfg.r, n,
                                       cfg.n_population, cfg.n_probe),
                           cfg);
  report.cross_var_ratio = report.drpr.mc_var / report.drpa.mc_var;
  report.cross_ok =
      cfg.a != 1.0 || (report.cross_var_ratio >= 0.9 && report.cross_var_ratio <= 1.1);
  report.pass = report.drpr.mean_ok && report.drpr.var_ok && report.drpa.mean_ok &&
                report.drpa.var_ok && report.cross_ok;
  return report;
}

std::string validation_report_json(const ValidationReport& r) {
  nlohmann::json j;
  j["config"] = {{"a", r.config.a},
                 {"p", r.config.p},
                 {"r", r.config.r},
                 {"n_population", r.config.n_population},
                 {"n_probe", r.config.n_probe},
                 {"n_sample", r.config.n_sample},
                 {"n_reps", r.config.n_reps},
                 {"mode", r.config.mode == ValidationMode::model
                              ? "model"
                              : r.config.mode == ValidationMode::graph_fresh ? "graph_fresh"
                                                                             : "graph_fixed"},
                 {"composition",
                  r.config.composition == Composition::conditioned ? "conditioned" : "random"},
                 {"seed", r.config.seed}};
  for (const ValidationPoint* pt : {&r.drpr, &r.drpa}) {
    j[pt->estimator] = {{"mc_mean", pt->mc_mean},         {"mc_var", pt->mc_var},
                        {"analytic_mean", pt->analytic_mean}, {"analytic_var", pt->analytic_var},
                        {"mean_z", pt->mean_z},           {"var_ratio", pt->var_ratio},
                        {"n_ok", pt->n_ok},               {"mean_ok", pt->mean_ok},
                        {"var_ok", pt->var_ok}};
  }
  j["cross_var_ratio"] = r.cross_var_ratio;
  j["cross_ok"] = r.cross_ok;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

HypergeomCheckResult hypergeom_check(std::uint32_t n_total, std::uint32_t n_hidden, double p,
                                     std::uint32_t d_condition, std::uint64_t n_reps,
                                     std::uint64_t seed, bool respondent_hidden) {
  if (n_total < 2 || n_total > 100)
    throw std::invalid_argument("population size must be in [2, 100] for this check");
  if (n_hidden == 0 || n_hidden >= n_total)
    throw std::invalid_argument("n_hidden must satisfy 0 < n_hidden < n_total");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  if (d_condition > n_total - 1)
    throw std::invalid_argument("conditioning degree exceeds the maximum degree");

  const std::uint32_t nh_star = respondent_hidden ? n_hidden - 1 : n_hidden;
  const std::uint32_t nl_star = n_total - 1 - nh_star;

  std::vector<std::uint64_t> hist(nh_star + 1, 0);
  std::uint64_t hits = 0;
  Rng rng(seed);
  for (std::uint64_t rep = 0; rep < n_reps; ++rep) {
    std::uint32_t y = static_cast<std::uint32_t>(rng.binomial(nh_star, p));
    std::uint32_t z = static_cast<std::uint32_t>(rng.binomial(nl_star, p));
    if (y + z == d_condition) {
      ++hist[y];
      ++hits;
    }
  }
  if (hits == 0)
    throw std::runtime_error("conditioning degree never observed in " + std::to_string(n_reps) +
                             " draws");

  // Exact conditional law: hypergeometric over N-1 alters with nh_star
  // successes and d draws.
  const std::uint32_t d = d_condition;
  const std::uint32_t y_lo = d > nl_star ? d - nl_star : 0;
  const std::uint32_t y_hi = std::min(d, nh_star);
  double log_den = log_choose(n_total - 1, d);
  double tv = 0.0;
  for (std::uint32_t y = y_lo; y <= y_hi; ++y) {
    double pmf = std::exp(log_choose(nh_star, y) + log_choose(nl_star, d - y) - log_den);
    double emp = static_cast<double>(hist[y]) / hits;
    tv += std::fabs(emp - pmf);
  }
  return {0.5 * tv, hits, n_reps};
}

namespace {

struct VarWithSe {
  double var = 0;
  double se = 0;
};

VarWithSe sample_variance_with_se(const std::vector<double>& x) {
  const std::size_t m = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m);
  double s2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - mean;
    s2 += d * d;
    m4 += d * d * d * d;
  }
  double md = static_cast<double>(m);
  s2 /= (md - 1.0);
  m4 /= md;
  double se2 = (m4 - s2 * s2 * (md - 3.0) / (md - 1.0)) / md;
  return {s2, std::sqrt(std::max(se2, 0.0))};
}

// t statistic for the AoR-minus-RoA variance gap from batch re-estimates;
// used when the closed forms coincide and strict ordering is not expected.
double batch_variance_diff_t(const std::vector<double>& roa, const std::vector<double>& aor) {
  const std::size_t n_batches = 50;
  const std::size_t m = roa.size() / n_batches;
  if (m < 2) return 0.0;
  std::vector<double> diffs;
  diffs.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    std::vector<double> ra(roa.begin() + b * m, roa.begin() + (b + 1) * m);
    std::vector<double> aa(aor.begin() + b * m, aor.begin() + (b + 1) * m);
    diffs.push_back(sample_variance_with_se(aa).var - sample_variance_with_se(ra).var);
  }
  Aggregate a = aggregate_valid(diffs);
  if (a.sd == 0.0) return 0.0;
  return a.mean / (a.sd / std::sqrt(static_cast<double>(n_batches)));
}

S1CheckResult finish_s1_check(const std::vector<double>& roa, const std::vector<double>& aor,
                              double closed_roa, double closed_aor) {
  S1CheckResult r;
  r.closed_var_roa = closed_roa;
  r.closed_var_aor = closed_aor;
  VarWithSe vr = sample_variance_with_se(roa);
  VarWithSe va = sample_variance_with_se(aor);
  r.emp_var_roa = vr.var;
  r.emp_var_aor = va.var;
  r.z_roa = vr.se > 0.0 ? (vr.var - closed_roa) / vr.se : 0.0;
  r.z_aor = va.se > 0.0 ? (va.var - closed_aor) / va.se : 0.0;
  r.match_ok = std::fabs(r.z_roa) <= 3.0 && std::fabs(r.z_aor) <= 3.0;
  r.closed_forms_equal =
      std::fabs(closed_aor - closed_roa) <= 1e-12 * std::max(closed_aor, closed_roa);
  if (r.closed_forms_equal)
    r.ordering_ok = std::fabs(batch_variance_diff_t(roa, aor)) <= 3.5;
  else
    r.ordering_ok = r.emp_var_roa < r.emp_var_aor && closed_roa < closed_aor;
  return r;
}

}  // namespace

S1CheckResult s1_prevalence_mc_check(std::span<const std::uint32_t> degrees, double r,
                                     std::uint64_t n_reps, std::uint64_t seed) {
  if (degrees.empty()) throw std::invalid_argument("degree vector is empty");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("R must be in (0,1)");
  std::vector<double> d_real(degrees.begin(), degrees.end());
  auto [closed_roa, closed_aor] = s1_prevalence_variances(d_real, r);

  double sum_d = 0.0;
  for (double d : d_real) sum_d += d;
  const double n = static_cast<double>(degrees.size());

  std::vector<double> roa(n_reps), aor(n_reps);
  Rng rng(seed);
  for (std::uint64_t rep = 0; rep < n_reps; ++rep) {
    double sum_y = 0.0, sum_ratio = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      double y = static_cast<double>(rng.binomial(degrees[i], r));
      sum_y += y;
      sum_ratio += y / d_real[i];
    }
    roa[rep] = sum_y / sum_d;
    aor[rep] = sum_ratio / n;
  }
  return finish_s1_check(roa, aor, closed_roa, closed_aor);
}

S1CheckResult s1_degree_mc_check(std::uint32_t d_i, std::uint32_t n_population,
                                 std::span<const std::uint32_t> probe_sizes,
                                 std::uint64_t n_reps, std::uint64_t seed) {
  auto [closed_roa, closed_aor] =
      s1_degree_variances(static_cast<double>(d_i), n_population, probe_sizes);

  double sum_n = 0.0;
  for (std::uint32_t s : probe_sizes) sum_n += s;
  const double big_n = static_cast<double>(n_population);
  const double k = static_cast<double>(probe_sizes.size());

  std::vector<double> roa(n_reps), aor(n_reps);
  Rng rng(seed);
  for (std::uint64_t rep = 0; rep < n_reps; ++rep) {
    double sum_y = 0.0, sum_ratio = 0.0;
    for (std::uint32_t sz : probe_sizes) {
      double y = static_cast<double>(rng.binomial(d_i, sz / big_n));
      sum_y += y;
      sum_ratio += y / sz;
    }
    roa[rep] = big_n * (sum_y / sum_n);
    aor[rep] = big_n * (sum_ratio / k);
  }
  return finish_s1_check(roa, aor, closed_roa, closed_aor);
}

}  // namespace nsum
