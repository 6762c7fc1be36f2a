// End-to-end checks of the command-line tool: exit codes, output files,
// manifest-based reruns and seed handling.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "nsum/csvio.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = NSUM_CLI_PATH;

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("nsum_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string make_attrs_fixture(const Workspace& ws) {
  // 1200 nodes: a dorm column with 24 levels of 50 (in band) and a year
  // column with 4 levels of 300 (out of band)
  std::string attrs = "node_id,dorm,year\n";
  for (int i = 0; i < 1200; ++i)
    attrs += std::to_string(i) + ",d" + std::to_string(i / 50) + ",y" + std::to_string(i % 4) +
             "\n";
  std::string path = ws.path("attrs.csv");
  nsum::write_text_file(path, attrs);
  return path;
}

}  // namespace

TEST_CASE("generate writes a reproducible network and validates parameters") {
  Workspace ws;
  CHECK(run("generate --n 300 --nh 30 --a 2 --p 0.02 --seed 11 --out " + ws.path("g1")) == 0);
  CHECK(fs::exists(ws.path("g1/edges.csv")));
  CHECK(fs::exists(ws.path("g1/labels.csv")));
  CHECK(fs::exists(ws.path("g1/manifest.json")));

  CHECK(run("generate --n 300 --nh 30 --a 2 --p 0.02 --seed 11 --out " + ws.path("g2")) == 0);
  CHECK(slurp(ws.path("g1/edges.csv")) == slurp(ws.path("g2/edges.csv")));

  CHECK(run("generate --n 300 --nh 30 --a 200 --p 0.01 --out " + ws.path("bad")) == 1);
}

TEST_CASE("a manifest reruns the command byte for byte") {
  Workspace ws;
  REQUIRE(run("generate --n 250 --nh 25 --a 1.5 --p 0.03 --seed 42 --out " + ws.path("m1")) == 0);
  REQUIRE(run("generate --config " + ws.path("m1/manifest.json") + " --out " + ws.path("m2")) ==
          0);
  CHECK(slurp(ws.path("m1/edges.csv")) == slurp(ws.path("m2/edges.csv")));
  CHECK(slurp(ws.path("m1/labels.csv")) == slurp(ws.path("m2/labels.csv")));

  // config keys win over conflicting flags
  REQUIRE(run("generate --config " + ws.path("m1/manifest.json") + " --seed 9999 --n 40 --out " +
              ws.path("m3")) == 0);
  CHECK(slurp(ws.path("m1/edges.csv")) == slurp(ws.path("m3/edges.csv")));
}

TEST_CASE("the environment seed applies only when no flag is given") {
  Workspace ws;
  ::setenv("NSUM_SEED", "777", 1);
  REQUIRE(run("generate --n 100 --nh 10 --p 0.05 --out " + ws.path("env1")) == 0);
  CHECK(slurp(ws.path("env1/manifest.json")).find("\"seed\": 777") != std::string::npos);
  REQUIRE(run("generate --n 100 --nh 10 --p 0.05 --seed 5 --out " + ws.path("env2")) == 0);
  CHECK(slurp(ws.path("env2/manifest.json")).find("\"seed\": 5") != std::string::npos);
  ::unsetenv("NSUM_SEED");
}

TEST_CASE("simulate produces per-estimator rows and honors the estimator list") {
  Workspace ws;
  REQUIRE(run("simulate --n 800 --nh 60 --a 2 --p 0.02 --probe-size 100 --probe-size 80 "
              "--sample-size 150 --surveys 10 --seed 3 --estimators drpr,drpa,dapa,dapr "
              "--dump-ard --out " +
              ws.path("sim")) == 0);
  CHECK(slurp(ws.path("sim/ard_case0.csv"))
            .find("respondent_id,is_hidden,y_hidden,degree,y_probe_1,y_probe_2") == 0);
  std::string results = slurp(ws.path("sim/case_results.csv"));
  CHECK(results.find("\ndrpr") == std::string::npos);  // rows start with the case id
  CHECK(results.find(",drpr,") != std::string::npos);
  CHECK(results.find(",drpa,") != std::string::npos);
  CHECK(results.find(",dapa,") != std::string::npos);
  CHECK(results.find(",dapr,") != std::string::npos);
  CHECK(fs::exists(ws.path("sim/surveys_case0.csv")));

  // n_valid + n_nan + n_inf = surveys on every row
  auto lines = nsum::read_lines(ws.path("sim/case_results.csv"));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = nsum::split_csv_line(lines[i]);
    CHECK(std::stoul(f[9]) + std::stoul(f[10]) + std::stoul(f[11]) == 10);
  }
}

TEST_CASE("simulate reruns identically from its manifest across thread counts") {
  Workspace ws;
  REQUIRE(run("simulate --n 600 --nh 50 --a 2 --p 0.02 --probe-size 80 --sample-size 120 "
              "--surveys 12 --seed 8 --threads 1 --out " +
              ws.path("s1")) == 0);
  REQUIRE(run("simulate --config " + ws.path("s1/manifest.json") + " --threads 4 --out " +
              ws.path("s2")) == 0);
  CHECK(slurp(ws.path("s1/case_results.csv")) == slurp(ws.path("s2/case_results.csv")));
  CHECK(slurp(ws.path("s1/surveys_case0.csv")) == slurp(ws.path("s2/surveys_case0.csv")));
}

TEST_CASE("grid defaults tie along log a = 0 and sweeps accumulate") {
  Workspace ws;
  REQUIRE(run("grid --out " + ws.path("grid")) == 0);
  auto lines = nsum::read_lines(ws.path("grid/grid_0.csv"));
  int zero_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = nsum::split_csv_line(lines[i]);
    if (f[0] == "0") {
      ++zero_rows;
      CHECK(f[8] == "tie");
      CHECK(f[9] == "tie");
      CHECK(f[10] == "tie");
    }
  }
  CHECK(zero_rows == 50);

  REQUIRE(run("grid --nn 500000 --nn 5000000 --out " + ws.path("sweep")) == 0);
  CHECK(fs::exists(ws.path("sweep/grid_0.csv")));
  CHECK(fs::exists(ws.path("sweep/grid_1.csv")));
  CHECK(fs::exists(ws.path("sweep/grid_1.json")));

  REQUIRE(run("grid --preset fig1-bottom --out " + ws.path("bottom")) == 0);
  std::string sidecar = slurp(ws.path("bottom/grid_0.json"));
  CHECK(sidecar.find("\"step\": 0.05") != std::string::npos);
}

TEST_CASE("ingest derives candidates and cases from csv fixtures") {
  Workspace ws;
  REQUIRE(run("generate --n 1200 --nh 100 --p 0.01 --seed 2 --out " + ws.path("net")) == 0);
  std::string attrs = make_attrs_fixture(ws);

  REQUIRE(run("ingest --edges " + ws.path("net/edges.csv") + " --attrs " + attrs +
              " --k 16 --seed 4 --out " + ws.path("ing")) == 0);
  auto cand_lines = nsum::read_lines(ws.path("ing/candidates.csv"));
  CHECK(cand_lines.size() == 1 + 24);  // 24 dorm levels in the band
  auto case_lines = nsum::read_lines(ws.path("ing/cases.csv"));
  CHECK(case_lines.size() == 1 + 16);

  REQUIRE(run("ingest --config " + ws.path("ing/manifest.json") + " --out " + ws.path("ing2")) ==
          0);
  CHECK(slurp(ws.path("ing/candidates.csv")) == slurp(ws.path("ing2/candidates.csv")));
  CHECK(slurp(ws.path("ing/cases.csv")) == slurp(ws.path("ing2/cases.csv")));

  // asking for more cases than candidates is a parameter error
  CHECK(run("ingest --edges " + ws.path("net/edges.csv") + " --attrs " + attrs +
            " --k 30 --out " + ws.path("ing3")) == 1);
  // missing file is an I/O error
  CHECK(run("ingest --edges " + ws.path("nope.csv") + " --attrs " + attrs + " --out " +
            ws.path("ing4")) == 2);
}

TEST_CASE("simulate ingest mode runs the rotated cases") {
  Workspace ws;
  REQUIRE(run("generate --n 1200 --nh 100 --p 0.015 --seed 6 --out " + ws.path("net")) == 0);
  std::string attrs = make_attrs_fixture(ws);
  REQUIRE(run("simulate --edges " + ws.path("net/edges.csv") + " --attrs " + attrs +
              " --k 4 --sample-size 200 --surveys 5 --seed 9 --out " + ws.path("sim")) == 0);
  auto lines = nsum::read_lines(ws.path("sim/case_results.csv"));
  CHECK(lines.size() == 1 + 4 * 3);  // 4 cases x 3 default estimators
  CHECK(fs::exists(ws.path("sim/surveys_case3.csv")));
  CHECK(fs::exists(ws.path("sim/cases.csv")));
}

TEST_CASE("report summarizes case results by band") {
  Workspace ws;
  REQUIRE(run("simulate --n 900 --nh 70 --a 2.5 --p 0.015 --probe-size 90 --probe-size 90 "
              "--sample-size 200 --surveys 20 --seed 12 --out " +
              ws.path("sim")) == 0);
  REQUIRE(run("report --cases " + ws.path("sim/case_results.csv") + " --out " + ws.path("rep")) ==
          0);
  std::string summary = slurp(ws.path("rep/band_summary.csv"));
  CHECK(summary.find("band,n_cases,n_drpa_lower_rel_rmse") == 0);
  CHECK(summary.find("low,1,") != std::string::npos);
}

TEST_CASE("validate exits zero on passing suites and three on failing ones") {
  Workspace ws;
  CHECK(run("validate --suite sign-regions --out " + ws.path("v1")) == 0);
  CHECK(run("validate --suite s3-hypergeom --hg-reps 200000 --out " + ws.path("v2")) == 0);
  // the er-unbiased means check cannot pass at these sizes (documented)
  CHECK(run("validate --suite er-unbiased --reps 400 --out " + ws.path("v3")) == 3);
  std::string report = slurp(ws.path("v3/validation.json"));
  CHECK(report.find("\"pass\": false") != std::string::npos);
}
