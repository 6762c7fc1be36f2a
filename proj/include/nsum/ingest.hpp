#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsum/netgen.hpp"

namespace nsum {

// Per-node categorical attributes. An empty string is a missing value and
// never contributes to any group indicator.
struct AttributeTable {
  std::uint32_t n_nodes = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> values;  // [column][node]
};

struct CandidateGroup {
  int group_id = -1;
  std::string column;
  std::string level;
  std::vector<std::uint32_t> members;
  double prevalence = 0.0;

  std::uint32_t size() const { return static_cast<std::uint32_t>(members.size()); }
};

// One experiment: a hidden group plus the probe groups used for degree
// estimation, with its replicate-survey settings.
struct CaseSpec {
  int case_id = -1;
  int hidden_group_id = -1;
  std::vector<int> probe_group_ids;
  std::uint32_t sample_size = 500;
  std::uint32_t n_surveys = 500;
  std::uint64_t seed = 0;
};

struct LoadedNetwork {
  Network network;
  AttributeTable attrs;
};

// Reads an edge list (`src,dst`) and an attribute table (`node_id,...`).
// Duplicate and reversed edge rows collapse to one undirected edge; node
// labels start as all-L. Throws IngestError naming the offending line.
LoadedNetwork load_network(const std::string& edges_path, const std::string& attrs_path);

// One candidate per (column, level) indicator whose prevalence lies in the
// closed band [min_prev, max_prev].
std::vector<CandidateGroup> derive_candidate_groups(const Network& net,
                                                    const AttributeTable& attrs,
                                                    double min_prev, double max_prev);

// Picks the k largest candidates (ties by ascending group_id) and makes one
// case per choice of hidden group; the other k-1 serve as probes.
std::vector<CaseSpec> build_cases(std::span<const CandidateGroup> candidates, std::uint32_t k,
                                  std::uint32_t sample_size, std::uint32_t n_surveys,
                                  std::uint64_t base_seed);

// Newman's nominal assortativity for a binary partition, from the 2x2
// edge-mixing matrix. Throws std::domain_error on an edgeless graph.
double assortativity(const Network& net, std::span<const std::uint8_t> partition);

enum class DegreeRatioBaseline { whole_population, non_hidden };

// Mean degree of the hidden members over the baseline mean degree.
double degree_ratio(const Network& net, const NodeSet& hidden,
                    DegreeRatioBaseline baseline = DegreeRatioBaseline::whole_population);

// Band thresholds 0.8 / 1.2; near1 is the closed middle interval.
std::string degree_ratio_band(double ratio);

void write_candidates_csv(std::span<const CandidateGroup> candidates, const std::string& path);
void write_cases_csv(std::span<const CaseSpec> cases, const std::string& path);

}  // namespace nsum
