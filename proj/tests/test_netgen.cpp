#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "nsum/netgen.hpp"

using namespace nsum;

namespace {

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const Network& net) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> s;
  for (std::uint32_t i = 0; i < net.n_nodes; ++i)
    for (std::uint32_t j : net.adj[i])
      if (i < j) s.insert({i, j});
  return s;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((BlockParams{10, 0, 0.1, 0.1, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((BlockParams{10, 10, 0.1, 0.1, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((BlockParams{10, 2, 1.5, 0.1, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(generate_sbm({10, 2, -0.1, 0.1, 0.1}, 1), std::invalid_argument);
  ScaledParams bad;
  bad.a = 200.0;
  bad.p = 0.01;
  CHECK_THROWS_WITH_AS(bad.validate(), "a*p exceeds 1", std::invalid_argument);
}

TEST_CASE("scaled parameters expand exactly") {
  ScaledParams s;
  s.a = 2.0;
  s.p = 0.01;
  s.prevalence_r = 0.05;
  BlockParams b = s.expand(2000);
  CHECK(b.n_hidden == 100);
  CHECK(b.p_hh == 2.0 * 0.01);
  CHECK(b.p_hl == 0.01);
  CHECK(b.p_ll == b.p_hh);
}

TEST_CASE("zero probability gives an edgeless network") {
  Network net = generate_sbm({50, 10, 0.0, 0.0, 0.0}, 7);
  CHECK(net.edge_count() == 0);
}

TEST_CASE("probability one gives the complete graph") {
  Network net = generate_sbm({4, 2, 1.0, 1.0, 1.0}, 7);
  CHECK(net.edge_count() == 6);
  for (std::uint32_t i = 0; i < 4; ++i) CHECK(net.degree(i) == 3);

  Network k5 = generate_er(5, 1, 1.0, 3);
  CHECK(k5.edge_count() == 10);
  CHECK(generate_er(5, 1, 0.0, 3).edge_count() == 0);
}

TEST_CASE("er is the equal-probability special case, bit for bit") {
  for (std::uint64_t seed : {1ULL, 9ULL, 123456ULL}) {
    Network er = generate_er(300, 40, 0.03, seed);
    Network sbm = generate_sbm({300, 40, 0.03, 0.03, 0.03}, seed);
    CHECK(er.adj == sbm.adj);
  }
}

TEST_CASE("adjacency is symmetric, irreflexive and sorted") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    Network net = generate_sbm({200, 30, 0.10, 0.02, 0.05}, seed);
    auto edges = edge_set(net);
    std::uint64_t end_count = 0;
    for (std::uint32_t i = 0; i < net.n_nodes; ++i) {
      CHECK(std::is_sorted(net.adj[i].begin(), net.adj[i].end()));
      for (std::uint32_t j : net.adj[i]) {
        ++end_count;
        REQUIRE(j != i);
        auto key = std::minmax(i, j);
        REQUIRE(edges.count({key.first, key.second}) == 1);
        // symmetric: i must appear in adj[j]
        REQUIRE(std::binary_search(net.adj[j].begin(), net.adj[j].end(), i));
      }
    }
    CHECK(end_count == 2 * edges.size());
  }
}

TEST_CASE("identical params and seed reproduce the network; seeds differ") {
  BlockParams params{500, 60, 0.04, 0.01, 0.02};
  Network a = generate_sbm(params, 99);
  Network b = generate_sbm(params, 99);
  Network c = generate_sbm(params, 100);
  CHECK(a.adj == b.adj);
  CHECK(a.adj != c.adj);
}

TEST_CASE("block densities converge to the block probabilities") {
  // a = 2, p = 0.01 at N = 2000, N_H = 100
  BlockParams params{2000, 100, 0.02, 0.01, 0.02};
  Network net = generate_sbm(params, 2024);
  double m_hh = 100.0 * 99.0 / 2.0, m_hl = 100.0 * 1900.0, m_ll = 1900.0 * 1899.0 / 2.0;
  std::uint64_t e_hh = 0, e_hl = 0, e_ll = 0;
  for (std::uint32_t i = 0; i < net.n_nodes; ++i)
    for (std::uint32_t j : net.adj[i]) {
      if (i >= j) continue;
      bool ih = i < 100, jh = j < 100;
      if (ih && jh) ++e_hh;
      else if (!ih && !jh) ++e_ll;
      else ++e_hl;
    }
  auto within = [](double count, double m, double p) {
    double se = std::sqrt(p * (1 - p) / m);
    return std::abs(count / m - p) <= 4.0 * se;
  };
  CHECK(within(static_cast<double>(e_hh), m_hh, 0.02));
  CHECK(within(static_cast<double>(e_hl), m_hl, 0.01));
  CHECK(within(static_cast<double>(e_ll), m_ll, 0.02));

  // mean H-degree ~ N_H*a*p + (N - N_H)*p = 2 + 19
  double sum_deg = 0;
  for (std::uint32_t i = 0; i < 100; ++i) sum_deg += net.degree(i);
  double mean_h = sum_deg / 100.0;
  CHECK(std::abs(mean_h - 21.0) <= 3.0 * std::sqrt(20.8 / 100.0) + 0.02);
}

TEST_CASE("probe group assignment") {
  Network net = generate_sbm({1000, 100, 0.02, 0.01, 0.02}, 5);
  CHECK_THROWS_AS(assign_probe_group(net, 0, true, 1), std::invalid_argument);
  CHECK_THROWS_AS(assign_probe_group(net, 901, true, 1), std::invalid_argument);

  int gid = assign_probe_group(net, 100, true, 11);
  const NodeSet& g = net.group(gid);
  CHECK(g.size() == 100);
  for (std::uint32_t m : g.members) CHECK(m >= 100);  // none hidden

  // requesting the entire L block returns exactly L
  int full = assign_probe_group(net, 900, true, 12);
  CHECK(net.group(full).size() == 900);
  CHECK(net.group(full).members.front() == 100);
  CHECK(net.group(full).members.back() == 999);

  CHECK_THROWS_AS(net.group(99), std::invalid_argument);
}
