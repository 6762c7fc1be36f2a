#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsum/netgen.hpp"

namespace nsum {

// One survey draw: per-respondent counts of alters in the hidden group and
// in each probe group. true_degrees is filled in graph mode only.
struct ArdSample {
  std::vector<std::uint32_t> respondent_ids;
  std::vector<std::uint8_t> is_hidden;
  std::vector<std::uint32_t> y_hidden;
  std::vector<std::vector<std::uint32_t>> y_probe;  // [respondent][probe]
  std::vector<std::uint32_t> true_degrees;
  std::uint32_t n_hidden_in_sample = 0;

  std::uint32_t n_respondents() const { return static_cast<std::uint32_t>(respondent_ids.size()); }
  std::uint32_t n_probes() const {
    return y_probe.empty() ? 0 : static_cast<std::uint32_t>(y_probe.front().size());
  }
};

// Uniform size-n subset of {0,...,N-1}, distinct ids, deterministic by seed.
std::vector<std::uint32_t> srs_without_replacement(std::uint32_t n_population,
                                                   std::uint32_t n_sample,
                                                   std::uint64_t seed);

// Exact counts read off a realized network; respondents never count
// themselves (the graph has no self-loops).
ArdSample ard_from_graph(const Network& net,
                         const std::vector<std::uint32_t>& respondents,
                         const NodeSet& hidden,
                         const std::vector<int>& probe_ids);

enum class Composition {
  random_srs,   // respondent block memberships from an SRS of the population
  conditioned,  // hidden-respondent count fixed at round(n * R)
};

// Fast path: draws responses directly from the block-model binomials with a
// single probe group K inside L, bypassing graph realization. Membership in
// K (and H) reduces the respondent's own alter pool by one.
ArdSample ard_from_model(const BlockParams& params,
                         std::uint32_t n_sample,
                         std::uint32_t probe_size,
                         Composition composition,
                         double conditioned_r,
                         std::uint64_t seed);

// CSV: respondent_id,is_hidden,y_hidden,degree,y_probe_1,...,y_probe_K
// (degree column empty when true degrees are absent).
void write_ard_csv(const ArdSample& sample, const std::string& path);

}  // namespace nsum
