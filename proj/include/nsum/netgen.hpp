#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsum {

// Two-block link-probability parameterization. Nodes split into a hidden
// block H and the remainder L.
struct BlockParams {
  std::uint32_t n_total = 0;
  std::uint32_t n_hidden = 0;
  double p_hh = 0.0;
  double p_hl = 0.0;
  double p_ll = 0.0;

  double prevalence() const { return static_cast<double>(n_hidden) / n_total; }
  void validate() const;  // throws std::invalid_argument
};

// Reduced form with equal within-block probabilities: p_hh = p_ll = a*p,
// p_hl = p. a=1 is the Erdos-Renyi case, a>1 assortative, a<1 dissortative.
struct ScaledParams {
  double a = 1.0;
  double p = 0.01;
  double prevalence_r = 0.1;
  double r_k = 0.1;          // probe group fraction of the population
  double n_times_n = 5e5;    // sample size times population size

  void validate() const;
  BlockParams expand(std::uint32_t n_total) const;
};

// Node subset stored as a bitset plus the sorted member list.
struct NodeSet {
  std::vector<std::uint64_t> bits;
  std::vector<std::uint32_t> members;

  static NodeSet from_members(std::vector<std::uint32_t> m, std::uint32_t n_nodes);
  bool contains(std::uint32_t i) const { return (bits[i >> 6] >> (i & 63)) & 1ULL; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(members.size()); }
};

// Undirected simple graph with per-node sorted neighbor lists. Node ids
// below n_hidden carry the H label (generated networks put H first; loaded
// networks start with n_hidden = 0 and get hidden sets per experiment).
// Registered groups serve as probe groups and case-level hidden sets.
struct Network {
  std::uint32_t n_nodes = 0;
  std::uint32_t n_hidden = 0;
  std::vector<std::vector<std::uint32_t>> adj;
  std::vector<NodeSet> groups;

  bool is_hidden_label(std::uint32_t i) const { return i < n_hidden; }
  std::uint32_t degree(std::uint32_t i) const { return static_cast<std::uint32_t>(adj[i].size()); }
  std::uint64_t edge_count() const;
  int register_group(NodeSet s);
  const NodeSet& group(int id) const;
  std::vector<std::uint32_t> group_sizes(const std::vector<int>& ids) const;
};

// Samples each unordered pair independently with its block probability.
// Deterministic for a fixed (params, seed).
Network generate_sbm(const BlockParams& params, std::uint64_t seed);

// Erdos-Renyi: all three block probabilities equal to p. Same seed gives the
// exact same edge set as generate_sbm with equal probabilities.
Network generate_er(std::uint32_t n_total, std::uint32_t n_hidden, double p, std::uint64_t seed);

// Registers a uniformly random subset of the requested size as a new group
// and returns its id. With within_l_only the pool excludes H-labeled nodes.
int assign_probe_group(Network& net, std::uint32_t size, bool within_l_only, std::uint64_t seed);

// Edge list as `src,dst` with src < dst; labels as `node_id,group`.
void write_edges_csv(const Network& net, const std::string& path);
void write_labels_csv(const Network& net, const std::string& path);

}  // namespace nsum
