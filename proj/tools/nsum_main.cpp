// Command-line front end: reproducible generation, ingestion, simulation,
// analytic grids, and validation runs. Every run writes a manifest.json with
// the fully resolved configuration; rerunning with --config <manifest> (plus
// run-local --out/--threads) reproduces the outputs byte for byte.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsum/analytic.hpp"
#include "nsum/csvio.hpp"
#include "nsum/estimators.hpp"
#include "nsum/ingest.hpp"
#include "nsum/montecarlo.hpp"
#include "nsum/netgen.hpp"
#include "nsum/rng.hpp"
#include "nsum/survey.hpp"
#include "nsum/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nsum;

namespace {

struct CommonOpts {
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = auto
  std::string config_path;
  bool seed_flag_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "base seed")->each([&c](const std::string&) {
    c.seed_flag_given = true;
  });
  cmd->add_option("--threads", c.threads, "worker threads (0 = auto)");
  cmd->add_option("--config", c.config_path,
                  "JSON config (or a manifest.json); overrides flags key by key");
}

// Seed precedence: config file, then --seed, then NSUM_SEED, then default.
void apply_env_seed(CommonOpts& c) {
  if (c.seed_flag_given) return;
  if (const char* env = std::getenv("NSUM_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("NSUM_SEED is not an integer");
    }
  }
}

json load_config(const std::string& path) {
  auto lines = read_lines(path);
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  json j = json::parse(text);
  if (j.contains("config")) return j["config"];
  return j;
}

template <class T>
void overlay(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

void write_manifest(const CommonOpts& c, const std::string& command, const json& config) {
  json m;
  m["tool"] = "nsum";
  m["version"] = NSUM_VERSION;
  m["command"] = command;
  m["seed"] = config.contains("seed") ? config["seed"].get<std::uint64_t>() : c.seed;
  m["threads"] = c.threads;
  m["output_dir"] = c.out;
  m["config"] = config;
  write_text_file((fs::path(c.out) / "manifest.json").string(), m.dump(2) + "\n");
}

void ensure_out(const CommonOpts& c) { fs::create_directories(c.out); }

std::string out_path(const CommonOpts& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

std::vector<EstimatorKind> parse_estimators(const std::string& csv) {
  std::vector<EstimatorKind> kinds;
  for (const auto& name : split_csv_line(csv)) kinds.push_back(estimator_from_name(name));
  if (kinds.empty()) throw std::invalid_argument("no estimators selected");
  return kinds;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  CommonOpts common;
  std::uint32_t n = 2000, nh = 100;
  double a = 1.0, p = 0.01;
  double phh = -1, phl = -1, pll = -1;  // explicit probabilities win over (a, p)
  std::vector<std::uint32_t> probe_sizes;
  bool probe_anywhere = false;

  BlockParams block_params() const {
    BlockParams b;
    b.n_total = n;
    b.n_hidden = nh;
    if (phh >= 0 || phl >= 0 || pll >= 0) {
      if (phh < 0 || phl < 0 || pll < 0)
        throw std::invalid_argument("--phh/--phl/--pll must be given together");
      b.p_hh = phh;
      b.p_hl = phl;
      b.p_ll = pll;
    } else {
      if (a * p > 1.0) throw std::invalid_argument("a*p exceeds 1");
      b.p_hh = a * p;
      b.p_hl = p;
      b.p_ll = a * p;
    }
    b.validate();
    return b;
  }

  json to_json() const {
    json j{{"n", n},     {"nh", nh},   {"a", a},   {"p", p},
           {"phh", phh}, {"phl", phl}, {"pll", pll},
           {"probe_sizes", probe_sizes}, {"probe_anywhere", probe_anywhere},
           {"seed", common.seed}};
    return j;
  }
  void from_json(const json& j) {
    overlay(j, "n", n);
    overlay(j, "nh", nh);
    overlay(j, "a", a);
    overlay(j, "p", p);
    overlay(j, "phh", phh);
    overlay(j, "phl", phl);
    overlay(j, "pll", pll);
    overlay(j, "probe_sizes", probe_sizes);
    overlay(j, "probe_anywhere", probe_anywhere);
    overlay(j, "seed", common.seed);
  }
};

int run_generate(GenerateOpts& o) {
  BlockParams params = o.block_params();
  Network net = generate_sbm(params, o.common.seed);
  for (std::size_t i = 0; i < o.probe_sizes.size(); ++i)
    assign_probe_group(net, o.probe_sizes[i], !o.probe_anywhere,
                       splitmix64(o.common.seed) + 1 + i);
  ensure_out(o.common);
  write_edges_csv(net, out_path(o.common, "edges.csv"));
  write_labels_csv(net, out_path(o.common, "labels.csv"));
  write_manifest(o.common, "generate", o.to_json());
  std::cout << "generate: " << net.n_nodes << " nodes, " << net.edge_count() << " edges -> "
            << o.common.out << "\n";
  return 0;
}

// ------------------------------------------------------------------ ingest

struct IngestOpts {
  CommonOpts common;
  std::string edges, attrs;
  double min_prev = 0.001, max_prev = 0.10;
  std::uint32_t k = 16, sample_size = 500, surveys = 500;

  json to_json() const {
    return json{{"edges", edges},       {"attrs", attrs},   {"min_prev", min_prev},
                {"max_prev", max_prev}, {"k", k},           {"sample_size", sample_size},
                {"surveys", surveys},   {"seed", common.seed}};
  }
  void from_json(const json& j) {
    overlay(j, "edges", edges);
    overlay(j, "attrs", attrs);
    overlay(j, "min_prev", min_prev);
    overlay(j, "max_prev", max_prev);
    overlay(j, "k", k);
    overlay(j, "sample_size", sample_size);
    overlay(j, "surveys", surveys);
    overlay(j, "seed", common.seed);
  }
};

int run_ingest(IngestOpts& o) {
  LoadedNetwork loaded = load_network(o.edges, o.attrs);
  auto candidates = derive_candidate_groups(loaded.network, loaded.attrs, o.min_prev, o.max_prev);
  auto cases = build_cases(candidates, o.k, o.sample_size, o.surveys, o.common.seed);
  ensure_out(o.common);
  write_candidates_csv(candidates, out_path(o.common, "candidates.csv"));
  write_cases_csv(cases, out_path(o.common, "cases.csv"));
  write_manifest(o.common, "ingest", o.to_json());
  std::cout << "ingest: " << candidates.size() << " candidate groups, " << cases.size()
            << " cases -> " << o.common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  CommonOpts common;
  // synthetic mode
  std::uint32_t n = 0, nh = 0;
  double a = 1.0, p = 0.01;
  std::vector<std::uint32_t> probe_sizes;
  bool probe_anywhere = false;
  // ingest mode
  std::string edges, attrs;
  double min_prev = 0.001, max_prev = 0.10;
  std::uint32_t k = 16;
  // shared
  std::uint32_t sample_size = 500, surveys = 500;
  std::string estimators = "drpr,drpa,dapa";
  bool dump_ard = false;

  json to_json() const {
    return json{{"n", n},
                {"nh", nh},
                {"a", a},
                {"p", p},
                {"probe_sizes", probe_sizes},
                {"probe_anywhere", probe_anywhere},
                {"edges", edges},
                {"attrs", attrs},
                {"min_prev", min_prev},
                {"max_prev", max_prev},
                {"k", k},
                {"sample_size", sample_size},
                {"surveys", surveys},
                {"estimators", estimators},
                {"dump_ard", dump_ard},
                {"seed", common.seed}};
  }
  void from_json(const json& j) {
    overlay(j, "n", n);
    overlay(j, "nh", nh);
    overlay(j, "a", a);
    overlay(j, "p", p);
    overlay(j, "probe_sizes", probe_sizes);
    overlay(j, "probe_anywhere", probe_anywhere);
    overlay(j, "edges", edges);
    overlay(j, "attrs", attrs);
    overlay(j, "min_prev", min_prev);
    overlay(j, "max_prev", max_prev);
    overlay(j, "k", k);
    overlay(j, "sample_size", sample_size);
    overlay(j, "surveys", surveys);
    overlay(j, "estimators", estimators);
    overlay(j, "dump_ard", dump_ard);
    overlay(j, "seed", common.seed);
  }
};

int run_simulate(SimulateOpts& o) {
  RunCaseOptions run_opts;
  run_opts.estimators = parse_estimators(o.estimators);
  run_opts.threads = o.common.threads;

  Network net;
  std::vector<CaseSpec> cases;
  std::vector<CandidateGroup> candidates;
  bool ingest_mode = !o.edges.empty();

  if (ingest_mode) {
    LoadedNetwork loaded = load_network(o.edges, o.attrs);
    net = std::move(loaded.network);
    candidates = derive_candidate_groups(net, loaded.attrs, o.min_prev, o.max_prev);
    cases = build_cases(candidates, o.k, o.sample_size, o.surveys, o.common.seed);
    for (const CandidateGroup& g : candidates)
      net.register_group(NodeSet::from_members(g.members, net.n_nodes));
  } else {
    if (o.n == 0 || o.nh == 0)
      throw std::invalid_argument("simulate needs either --edges/--attrs or --n/--nh");
    if (o.probe_sizes.empty()) throw std::invalid_argument("simulate needs --probe-size");
    BlockParams params{o.n, o.nh, o.a * o.p, o.p, o.a * o.p};
    if (o.a * o.p > 1.0) throw std::invalid_argument("a*p exceeds 1");
    net = generate_sbm(params, o.common.seed);
    std::vector<std::uint32_t> hidden_members(o.nh);
    for (std::uint32_t i = 0; i < o.nh; ++i) hidden_members[i] = i;
    CaseSpec spec;
    spec.case_id = 0;
    spec.hidden_group_id = net.register_group(NodeSet::from_members(hidden_members, o.n));
    for (std::size_t i = 0; i < o.probe_sizes.size(); ++i)
      spec.probe_group_ids.push_back(assign_probe_group(
          net, o.probe_sizes[i], !o.probe_anywhere, splitmix64(o.common.seed) + 1 + i));
    spec.sample_size = o.sample_size;
    spec.n_surveys = o.surveys;
    spec.seed = splitmix64(o.common.seed + 1);
    cases.push_back(std::move(spec));
  }

  ensure_out(o.common);
  std::vector<CaseResult> results;
  results.reserve(cases.size());
  for (const CaseSpec& spec : cases) {
    results.push_back(run_case(net, spec, run_opts));
    write_survey_log_csv(results.back(),
                         out_path(o.common, "surveys_case" + std::to_string(spec.case_id) + ".csv"));
    if (o.dump_ard) {
      auto respondents = srs_without_replacement(net.n_nodes, spec.sample_size, spec.seed);
      ArdSample sample =
          ard_from_graph(net, respondents, net.group(spec.hidden_group_id), spec.probe_group_ids);
      write_ard_csv(sample, out_path(o.common, "ard_case" + std::to_string(spec.case_id) + ".csv"));
    }
  }
  write_case_results_csv(results, out_path(o.common, "case_results.csv"));
  if (ingest_mode) {
    write_candidates_csv(candidates, out_path(o.common, "candidates.csv"));
    write_cases_csv(cases, out_path(o.common, "cases.csv"));
  }
  write_manifest(o.common, "simulate", o.to_json());
  std::cout << "simulate: " << cases.size() << " case(s) x " << o.surveys << " surveys -> "
            << o.common.out << "\n";
  return 0;
}

// -------------------------------------------------------------------- grid

struct GridOpts {
  CommonOpts common;
  std::vector<double> p{}, rk{}, nn{};
  std::string preset;  // "", "fig1-top", "fig1-bottom"
  double loga_min = -4.0, loga_max = 4.0, loga_step = 0.1;
  double r_min = 0.01, r_max = 0.99, r_step = 0.02;
  bool axes_given = false;

  GridAxes axes() const {
    GridAxes ax;
    if (preset == "fig1-bottom")
      ax = grid_axes_narrow();
    else
      ax = grid_axes_wide();
    if (axes_given) ax = {loga_min, loga_max, loga_step, r_min, r_max, r_step};
    return ax;
  }

  json to_json() const {
    GridAxes ax = axes();
    return json{{"p", p.empty() ? std::vector<double>{0.01} : p},
                {"rk", rk.empty() ? std::vector<double>{0.1} : rk},
                {"nn", nn.empty() ? std::vector<double>{5e5} : nn},
                {"loga_min", ax.log_a_min}, {"loga_max", ax.log_a_max},
                {"loga_step", ax.log_a_step}, {"r_min", ax.r_min},
                {"r_max", ax.r_max},       {"r_step", ax.r_step},
                {"seed", common.seed}};
  }
  void from_json(const json& j) {
    overlay(j, "p", p);
    overlay(j, "rk", rk);
    overlay(j, "nn", nn);
    overlay(j, "loga_min", loga_min);
    overlay(j, "loga_max", loga_max);
    overlay(j, "loga_step", loga_step);
    overlay(j, "r_min", r_min);
    overlay(j, "r_max", r_max);
    overlay(j, "r_step", r_step);
    axes_given = true;
    preset.clear();
    overlay(j, "seed", common.seed);
  }
};

int run_grid(GridOpts& o) {
  if (o.p.empty()) o.p = {0.01};
  if (o.rk.empty()) o.rk = {0.1};
  if (o.nn.empty()) o.nn = {5e5};
  GridAxes ax = o.axes();
  json config = o.to_json();

  std::vector<GridFixed> fixed_sets;
  for (double pv : o.p)
    for (double rkv : o.rk)
      for (double nnv : o.nn) fixed_sets.push_back({pv, rkv, nnv});

  ensure_out(o.common);
  auto grids = grid_sweep(fixed_sets, ax);
  for (std::size_t i = 0; i < grids.size(); ++i) {
    std::string stem = "grid_" + std::to_string(i);
    write_winner_grid_csv(grids[i], out_path(o.common, stem + ".csv"));
    write_winner_grid_sidecar(grids[i], out_path(o.common, stem + ".json"));
  }
  write_manifest(o.common, "grid", config);
  std::cout << "grid: " << grids.size() << " grid(s) -> " << o.common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- validate

struct ValidateOpts {
  CommonOpts common;
  std::string suite = "all";
  double a = 2.0, p = 0.01, r = 0.25;
  std::vector<double> r_list{0.05, 0.25, 0.5};
  std::uint32_t n = 20000, nk = 2000, sample = 500, reps = 2000;
  std::uint64_t hg_reps = 1000000;
  std::uint32_t hg_n = 30, hg_nh = 10, hg_d = 8;
  double hg_p = 0.3;

  json to_json() const {
    return json{{"suite", suite}, {"a", a},         {"p", p},       {"r", r},
                {"r_list", r_list}, {"n", n},       {"nk", nk},     {"sample", sample},
                {"reps", reps},   {"hg_reps", hg_reps}, {"hg_n", hg_n}, {"hg_nh", hg_nh},
                {"hg_d", hg_d},   {"hg_p", hg_p},   {"seed", common.seed}};
  }
  void from_json(const json& j) {
    overlay(j, "suite", suite);
    overlay(j, "a", a);
    overlay(j, "p", p);
    overlay(j, "r", r);
    overlay(j, "r_list", r_list);
    overlay(j, "n", n);
    overlay(j, "nk", nk);
    overlay(j, "sample", sample);
    overlay(j, "reps", reps);
    overlay(j, "hg_reps", hg_reps);
    overlay(j, "hg_n", hg_n);
    overlay(j, "hg_nh", hg_nh);
    overlay(j, "hg_d", hg_d);
    overlay(j, "hg_p", hg_p);
    overlay(j, "seed", common.seed);
  }
};

int run_validate(ValidateOpts& o) {
  bool all = o.suite == "all";
  json report = json::array();
  bool pass = true;

  auto base_cfg = [&](double a, double r) {
    ValidateConfig cfg;
    cfg.a = a;
    cfg.p = o.p;
    cfg.r = r;
    cfg.n_population = o.n;
    cfg.n_probe = o.nk;
    cfg.n_sample = o.sample;
    cfg.n_reps = o.reps;
    cfg.threads = o.common.threads;
    cfg.seed = o.common.seed;
    return cfg;
  };

  if (all || o.suite == "er-unbiased") {
    json suite{{"suite", "er-unbiased"}, {"points", json::array()}};
    bool ok = true;
    for (double r : o.r_list) {
      ValidationReport rep = validate_analytic(base_cfg(1.0, r));
      bool point_ok = rep.drpr.mean_ok && rep.drpa.mean_ok && rep.cross_ok;
      ok = ok && point_ok;
      suite["points"].push_back(json::parse(validation_report_json(rep)));
    }
    suite["pass"] = ok;
    pass = pass && ok;
    report.push_back(suite);
  }
  if (all || o.suite == "scaled-bias") {
    ValidationReport rep = validate_analytic(base_cfg(o.a, o.r));
    bool ok = rep.drpr.mean_ok && rep.drpa.mean_ok;
    json suite{{"suite", "scaled-bias"}, {"pass", ok},
               {"points", json::array({json::parse(validation_report_json(rep))})}};
    pass = pass && ok;
    report.push_back(suite);
  }
  if (all || o.suite == "variance") {
    json suite{{"suite", "variance"}, {"points", json::array()}};
    bool ok = true;
    ValidationReport rep_scaled = validate_analytic(base_cfg(o.a, o.r));
    ok = ok && rep_scaled.drpr.var_ok && rep_scaled.drpa.var_ok;
    suite["points"].push_back(json::parse(validation_report_json(rep_scaled)));
    for (double r : o.r_list) {
      ValidationReport rep = validate_analytic(base_cfg(1.0, r));
      ok = ok && rep.drpr.var_ok && rep.drpa.var_ok;
      suite["points"].push_back(json::parse(validation_report_json(rep)));
    }
    suite["pass"] = ok;
    pass = pass && ok;
    report.push_back(suite);
  }
  if (all || o.suite == "sign-regions") {
    Rng rng(o.common.seed);
    std::size_t disagreements = 0;
    for (int i = 0; i < 10000; ++i) {
      double la = -4.0 + 8.0 * rng.uniform01();
      double a = std::exp(la);
      double r = 0.001 + 0.998 * rng.uniform01();
      for (RatioKind kind : {RatioKind::drpr, RatioKind::drpa}) {
        double b = bias_scaled(kind, a, r);
        BiasSign s = bias_sign_region(kind, a, r);
        BiasSign expect = std::fabs(b) <= 1e-14 ? BiasSign::zero
                          : b > 0               ? BiasSign::positive
                                                : BiasSign::negative;
        if (s != expect) ++disagreements;
      }
    }
    bool boundary_ok = bias_scaled(RatioKind::drpr, 1.0, 0.37) == 0.0 &&
                       bias_scaled(RatioKind::drpr, 2.5, 0.5) == 0.0 &&
                       bias_scaled(RatioKind::drpa, 3.0, 0.25) == 0.0;
    bool ok = disagreements == 0 && boundary_ok;
    report.push_back(json{{"suite", "sign-regions"},
                          {"disagreements", disagreements},
                          {"boundary_zeros_exact", boundary_ok},
                          {"pass", ok}});
    pass = pass && ok;
  }
  if (all || o.suite == "s1-ordering") {
    Rng rng(o.common.seed + 7);
    bool closed_ok = true;
    for (int i = 0; i < 1000 && closed_ok; ++i) {
      std::size_t len = 2 + rng.below(18);
      std::vector<double> degrees(len);
      bool constant = true;
      for (auto& d : degrees) d = 1.0 + rng.below(200);
      for (auto& d : degrees) constant = constant && d == degrees[0];
      if (constant) degrees[0] += 1.0;
      auto [vr, va] = s1_prevalence_variances(degrees, 0.05 + 0.9 * rng.uniform01());
      closed_ok = closed_ok && vr < va;

      std::vector<std::uint32_t> sizes(2 + rng.below(14));
      bool const_sz = true;
      for (auto& s : sizes) s = 10 + static_cast<std::uint32_t>(rng.below(500));
      for (auto& s : sizes) const_sz = const_sz && s == sizes[0];
      if (const_sz) sizes[0] += 1;
      double total = 0;
      for (auto s : sizes) total += s;
      auto [dr, da] = s1_degree_variances(5.0 + rng.below(50), total * 20.0, sizes);
      closed_ok = closed_ok && dr < da;
    }
    std::vector<std::uint32_t> degs{10, 20};
    S1CheckResult prev = s1_prevalence_mc_check(degs, 0.2, o.hg_reps, o.common.seed + 11);
    std::vector<std::uint32_t> sizes{100, 50};
    S1CheckResult deg = s1_degree_mc_check(10, 1000, sizes, o.hg_reps, o.common.seed + 13);
    bool ok = closed_ok && prev.ordering_ok && prev.match_ok && deg.ordering_ok && deg.match_ok;
    report.push_back(json{{"suite", "s1-ordering"},
                          {"closed_form_ordering_held", closed_ok},
                          {"prevalence_mc", {{"emp_roa", prev.emp_var_roa},
                                             {"emp_aor", prev.emp_var_aor},
                                             {"closed_roa", prev.closed_var_roa},
                                             {"closed_aor", prev.closed_var_aor},
                                             {"z_roa", prev.z_roa},
                                             {"z_aor", prev.z_aor}}},
                          {"degree_mc", {{"emp_roa", deg.emp_var_roa},
                                         {"emp_aor", deg.emp_var_aor},
                                         {"closed_roa", deg.closed_var_roa},
                                         {"closed_aor", deg.closed_var_aor},
                                         {"z_roa", deg.z_roa},
                                         {"z_aor", deg.z_aor}}},
                          {"pass", ok}});
    pass = pass && ok;
  }
  if (all || o.suite == "s3-hypergeom") {
    HypergeomCheckResult hg =
        hypergeom_check(o.hg_n, o.hg_nh, o.hg_p, o.hg_d, o.hg_reps, o.common.seed + 17);
    bool ok = hg.tv_distance < 0.02;
    report.push_back(json{{"suite", "s3-hypergeom"},
                          {"tv_distance", hg.tv_distance},
                          {"n_conditional", hg.n_conditional},
                          {"pass", ok}});
    pass = pass && ok;
  }

  ensure_out(o.common);
  json top{{"pass", pass}, {"suites", report}};
  write_text_file(out_path(o.common, "validation.json"), top.dump(2) + "\n");
  write_manifest(o.common, "validate", o.to_json());
  std::cout << "validate: " << (pass ? "PASS" : "FAIL") << " -> " << o.common.out << "\n";
  return pass ? 0 : 3;
}

// ------------------------------------------------------------------ report

struct ReportOpts {
  CommonOpts common;
  std::string cases_csv;

  json to_json() const { return json{{"cases", cases_csv}, {"seed", common.seed}}; }
  void from_json(const json& j) {
    overlay(j, "cases", cases_csv);
    overlay(j, "seed", common.seed);
  }
};

int run_report(ReportOpts& o) {
  auto lines = read_lines(o.cases_csv);
  if (lines.size() < 2) throw IngestError(o.cases_csv + ": no data rows");
  auto header = split_csv_line(lines[0]);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IngestError(o.cases_csv + ": missing column " + name);
  };
  std::size_t c_case = col("case_id"), c_est = col("estimator"), c_rmse = col("rel_rmse"),
              c_band = col("band");

  struct Row {
    std::string band;
    double drpr = -1, drpa = -1;
  };
  std::map<std::string, Row> by_case;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = split_csv_line(lines[i]);
    Row& row = by_case[f[c_case]];
    row.band = f[c_band];
    double v = parse_double(f[c_rmse], o.cases_csv, i + 1);
    if (f[c_est] == "drpr") row.drpr = v;
    if (f[c_est] == "drpa") row.drpa = v;
  }

  std::map<std::string, std::pair<int, int>> bands;  // band -> (cases, drpa wins)
  for (const auto& [id, row] : by_case) {
    if (row.drpr < 0 || row.drpa < 0) continue;
    auto& b = bands[row.band];
    b.first += 1;
    if (row.drpa < row.drpr) b.second += 1;
  }

  std::ostringstream out;
  out << "band,n_cases,n_drpa_lower_rel_rmse\n";
  for (const auto& [band, c] : bands) out << band << ',' << c.first << ',' << c.second << '\n';
  ensure_out(o.common);
  write_text_file(out_path(o.common, "band_summary.csv"), out.str());
  write_manifest(o.common, "report", o.to_json());
  std::cout << out.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simple network scale-up estimators: simulation and analytics"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* cmd_gen = app.add_subcommand("generate", "write a synthetic two-block network");
  add_common(cmd_gen, gen.common);
  cmd_gen->add_option("--n", gen.n, "population size");
  cmd_gen->add_option("--nh", gen.nh, "hidden group size");
  cmd_gen->add_option("--a", gen.a, "within-block scale factor");
  cmd_gen->add_option("--p", gen.p, "between-block link probability");
  cmd_gen->add_option("--phh", gen.phh, "explicit within-H probability");
  cmd_gen->add_option("--phl", gen.phl, "explicit between probability");
  cmd_gen->add_option("--pll", gen.pll, "explicit within-L probability");
  cmd_gen->add_option("--probe-size", gen.probe_sizes, "register a probe group of this size");
  cmd_gen->add_flag("--probe-anywhere", gen.probe_anywhere,
                    "draw probe groups from all nodes, not only L");

  IngestOpts ing;
  auto* cmd_ing = app.add_subcommand("ingest", "derive candidate probe groups and cases");
  add_common(cmd_ing, ing.common);
  cmd_ing->add_option("--edges", ing.edges, "edge list CSV");
  cmd_ing->add_option("--attrs", ing.attrs, "attribute table CSV");
  cmd_ing->add_option("--min-prev", ing.min_prev, "candidate band lower edge");
  cmd_ing->add_option("--max-prev", ing.max_prev, "candidate band upper edge");
  cmd_ing->add_option("--k", ing.k, "number of largest candidates to rotate through");
  cmd_ing->add_option("--sample-size", ing.sample_size, "respondents per survey");
  cmd_ing->add_option("--surveys", ing.surveys, "surveys per case");

  SimulateOpts sim;
  auto* cmd_sim = app.add_subcommand("simulate", "replicate surveys over cases");
  add_common(cmd_sim, sim.common);
  cmd_sim->add_option("--n", sim.n, "population size (synthetic mode)");
  cmd_sim->add_option("--nh", sim.nh, "hidden group size (synthetic mode)");
  cmd_sim->add_option("--a", sim.a, "within-block scale factor");
  cmd_sim->add_option("--p", sim.p, "between-block link probability");
  cmd_sim->add_option("--probe-size", sim.probe_sizes, "probe group size (repeatable)");
  cmd_sim->add_flag("--probe-anywhere", sim.probe_anywhere,
                    "draw probe groups from all nodes, not only L");
  cmd_sim->add_option("--edges", sim.edges, "edge list CSV (ingest mode)");
  cmd_sim->add_option("--attrs", sim.attrs, "attribute table CSV (ingest mode)");
  cmd_sim->add_option("--min-prev", sim.min_prev, "candidate band lower edge");
  cmd_sim->add_option("--max-prev", sim.max_prev, "candidate band upper edge");
  cmd_sim->add_option("--k", sim.k, "number of cases (ingest mode)");
  cmd_sim->add_option("--sample-size", sim.sample_size, "respondents per survey");
  cmd_sim->add_option("--surveys", sim.surveys, "surveys per case");
  cmd_sim->add_option("--estimators", sim.estimators, "comma list: drpr,drpa,dapa,dapr");
  cmd_sim->add_flag("--dump-ard", sim.dump_ard, "also write one ARD sample per case");

  GridOpts grid;
  auto* cmd_grid = app.add_subcommand("grid", "closed-form winner grids");
  add_common(cmd_grid, grid.common);
  cmd_grid->add_option("--p", grid.p, "between probability (repeatable)");
  cmd_grid->add_option("--rk", grid.rk, "probe fraction (repeatable)");
  cmd_grid->add_option("--nn", grid.nn, "n*N product (repeatable)");
  cmd_grid->add_option("--preset", grid.preset, "fig1-top or fig1-bottom");
  auto axis_opt = [&](const char* name, double& ref) {
    cmd_grid->add_option(name, ref)->each([&grid](const std::string&) { grid.axes_given = true; });
  };
  axis_opt("--loga-min", grid.loga_min);
  axis_opt("--loga-max", grid.loga_max);
  axis_opt("--loga-step", grid.loga_step);
  axis_opt("--r-min", grid.r_min);
  axis_opt("--r-max", grid.r_max);
  axis_opt("--r-step", grid.r_step);

  ValidateOpts val;
  auto* cmd_val = app.add_subcommand("validate", "Monte Carlo vs closed-form checks");
  add_common(cmd_val, val.common);
  cmd_val->add_option("--suite", val.suite,
                      "er-unbiased | scaled-bias | variance | sign-regions | s1-ordering | "
                      "s3-hypergeom | all");
  cmd_val->add_option("--a", val.a, "scale factor for the scaled suites");
  cmd_val->add_option("--p", val.p, "between probability");
  cmd_val->add_option("--r", val.r, "prevalence for the scaled suites");
  cmd_val->add_option("--n", val.n, "population size");
  cmd_val->add_option("--nk", val.nk, "probe group size");
  cmd_val->add_option("--sample", val.sample, "respondents per replicate");
  cmd_val->add_option("--reps", val.reps, "replicates per point");
  cmd_val->add_option("--hg-reps", val.hg_reps, "draws for the hypergeometric/S1 checks");
  cmd_val->add_option("--hg-n", val.hg_n, "population for the hypergeometric check");
  cmd_val->add_option("--hg-nh", val.hg_nh, "hidden count for the hypergeometric check");
  cmd_val->add_option("--hg-d", val.hg_d, "conditioning degree");
  cmd_val->add_option("--hg-p", val.hg_p, "link probability for the hypergeometric check");

  ReportOpts rep;
  auto* cmd_rep = app.add_subcommand("report", "summarize a case-results CSV by band");
  add_common(cmd_rep, rep.common);
  cmd_rep->add_option("--cases", rep.cases_csv, "case_results.csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    auto with_config = [](auto& opts, CLI::App* cmd) {
      apply_env_seed(opts.common);
      if (!opts.common.config_path.empty()) opts.from_json(load_config(opts.common.config_path));
      (void)cmd;
    };
    if (cmd_gen->parsed()) {
      with_config(gen, cmd_gen);
      return run_generate(gen);
    }
    if (cmd_ing->parsed()) {
      with_config(ing, cmd_ing);
      return run_ingest(ing);
    }
    if (cmd_sim->parsed()) {
      with_config(sim, cmd_sim);
      return run_simulate(sim);
    }
    if (cmd_grid->parsed()) {
      with_config(grid, cmd_grid);
      return run_grid(grid);
    }
    if (cmd_val->parsed()) {
      with_config(val, cmd_val);
      return run_validate(val);
    }
    if (cmd_rep->parsed()) {
      with_config(rep, cmd_rep);
      return run_report(rep);
    }
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
