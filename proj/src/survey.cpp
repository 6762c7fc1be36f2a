#include "nsum/survey.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nsum/csvio.hpp"
#include "nsum/rng.hpp"

namespace nsum {

std::vector<std::uint32_t> srs_without_replacement(std::uint32_t n_population,
                                                   std::uint32_t n_sample,
                                                   std::uint64_t seed) {
  if (n_sample > n_population)
    throw std::invalid_argument("sample size exceeds population size");
  std::vector<std::uint32_t> ids(n_population);
  for (std::uint32_t i = 0; i < n_population; ++i) ids[i] = i;
  Rng rng(seed);
  for (std::uint32_t i = 0; i < n_sample; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(n_population - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(n_sample);
  return ids;
}

ArdSample ard_from_graph(const Network& net,
                         const std::vector<std::uint32_t>& respondents,
                         const NodeSet& hidden,
                         const std::vector<int>& probe_ids) {
  for (int pid : probe_ids) net.group(pid);  // throws on unknown ids
  const std::size_t n = respondents.size();
  const std::size_t k = probe_ids.size();

  ArdSample s;
  s.respondent_ids = respondents;
  s.is_hidden.resize(n);
  s.y_hidden.resize(n);
  s.y_probe.assign(n, std::vector<std::uint32_t>(k, 0));
  s.true_degrees.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    std::uint32_t id = respondents[r];
    if (id >= net.n_nodes) throw std::invalid_argument("respondent id out of range");
    s.is_hidden[r] = hidden.contains(id) ? 1 : 0;
    s.n_hidden_in_sample += s.is_hidden[r];
    s.true_degrees[r] = net.degree(id);
    std::uint32_t yh = 0;
    for (std::uint32_t nb : net.adj[id]) {
      if (hidden.contains(nb)) ++yh;
      for (std::size_t j = 0; j < k; ++j)
        if (net.group(probe_ids[j]).contains(nb)) ++s.y_probe[r][j];
    }
    s.y_hidden[r] = yh;
  }
  return s;
}

ArdSample ard_from_model(const BlockParams& params,
                         std::uint32_t n_sample,
                         std::uint32_t probe_size,
                         Composition composition,
                         double conditioned_r,
                         std::uint64_t seed) {
  params.validate();
  const std::uint32_t n_h_pop = params.n_hidden;
  const std::uint32_t n_l_pop = params.n_total - params.n_hidden;
  if (probe_size == 0 || probe_size > n_l_pop)
    throw std::invalid_argument("probe size must be in [1, N - N_H]");
  if (n_sample == 0 || n_sample > params.n_total)
    throw std::invalid_argument("sample size must be in [1, N]");

  Rng rng(seed);
  std::vector<std::uint32_t> ids;
  if (composition == Composition::conditioned) {
    if (!(conditioned_r > 0.0 && conditioned_r < 1.0))
      throw std::invalid_argument("conditioned composition needs R in (0,1)");
    std::uint32_t n_h = static_cast<std::uint32_t>(std::llround(conditioned_r * n_sample));
    if (n_h > n_h_pop || n_sample - n_h > n_l_pop)
      throw std::invalid_argument("conditioned composition infeasible for the population");
    // stratified SRS: n_h ids from the H block, the rest from the L block
    auto h_part = srs_without_replacement(n_h_pop, n_h, rng.next_u64());
    auto l_part = srs_without_replacement(n_l_pop, n_sample - n_h, rng.next_u64());
    ids.reserve(n_sample);
    for (std::uint32_t v : h_part) ids.push_back(v);
    for (std::uint32_t v : l_part) ids.push_back(n_h_pop + v);
  } else {
    ids = srs_without_replacement(params.n_total, n_sample, rng.next_u64());
  }

  // Node ids < N_H are hidden; ids in [N_H, N_H + probe_size) are the probe
  // group K. Members of H (resp. K) have one fewer potential alter there.
  ArdSample s;
  s.respondent_ids = ids;
  s.is_hidden.resize(n_sample);
  s.y_hidden.resize(n_sample);
  s.y_probe.assign(n_sample, std::vector<std::uint32_t>(1, 0));

  for (std::uint32_t r = 0; r < n_sample; ++r) {
    std::uint32_t id = ids[r];
    bool in_h = id < n_h_pop;
    bool in_k = !in_h && (id - n_h_pop) < probe_size;
    s.is_hidden[r] = in_h ? 1 : 0;
    s.n_hidden_in_sample += s.is_hidden[r];
    std::uint32_t nh_star = n_h_pop - (in_h ? 1 : 0);
    std::uint32_t nk_star = probe_size - (in_k ? 1 : 0);
    double p_to_h = in_h ? params.p_hh : params.p_hl;
    double p_to_k = in_h ? params.p_hl : params.p_ll;
    s.y_hidden[r] = static_cast<std::uint32_t>(rng.binomial(nh_star, p_to_h));
    s.y_probe[r][0] = static_cast<std::uint32_t>(rng.binomial(nk_star, p_to_k));
  }
  return s;
}

void write_ard_csv(const ArdSample& sample, const std::string& path) {
  std::ostringstream out;
  out << "respondent_id,is_hidden,y_hidden,degree";
  for (std::uint32_t j = 0; j < sample.n_probes(); ++j) out << ",y_probe_" << (j + 1);
  out << '\n';
  for (std::uint32_t r = 0; r < sample.n_respondents(); ++r) {
    out << sample.respondent_ids[r] << ',' << static_cast<int>(sample.is_hidden[r]) << ','
        << sample.y_hidden[r] << ',';
    if (!sample.true_degrees.empty()) out << sample.true_degrees[r];
    for (std::uint32_t v : sample.y_probe[r]) out << ',' << v;
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace nsum
