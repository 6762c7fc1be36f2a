#include "nsum/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nsum/csvio.hpp"
#include "nsum/rng.hpp"

namespace nsum {

void BlockParams::validate() const {
  if (n_total < 2) throw std::invalid_argument("n_total must be at least 2");
  if (n_hidden == 0 || n_hidden >= n_total)
    throw std::invalid_argument("n_hidden must satisfy 0 < n_hidden < n_total");
  for (double p : {p_hh, p_hl, p_ll})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("link probabilities must be in [0,1]");
}

void ScaledParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0,1]");
  if (a * p > 1.0) throw std::invalid_argument("a*p exceeds 1");
  if (!(prevalence_r > 0.0 && prevalence_r < 1.0))
    throw std::invalid_argument("prevalence must be in (0,1)");
  if (!(r_k > 0.0 && r_k < 1.0)) throw std::invalid_argument("r_k must be in (0,1)");
  if (!(n_times_n > 0.0)) throw std::invalid_argument("nN must be positive");
}

BlockParams ScaledParams::expand(std::uint32_t n_total) const {
  validate();
  BlockParams b;
  b.n_total = n_total;
  b.n_hidden = static_cast<std::uint32_t>(std::llround(prevalence_r * n_total));
  b.p_hh = a * p;
  b.p_hl = p;
  b.p_ll = a * p;
  b.validate();
  return b;
}

NodeSet NodeSet::from_members(std::vector<std::uint32_t> m, std::uint32_t n_nodes) {
  std::sort(m.begin(), m.end());
  NodeSet s;
  s.bits.assign((n_nodes + 63) / 64, 0);
  for (std::uint32_t i : m) {
    if (i >= n_nodes) throw std::invalid_argument("group member id out of range");
    s.bits[i >> 6] |= 1ULL << (i & 63);
  }
  s.members = std::move(m);
  return s;
}

std::uint64_t Network::edge_count() const {
  std::uint64_t ends = 0;
  for (const auto& nb : adj) ends += nb.size();
  return ends / 2;
}

int Network::register_group(NodeSet s) {
  groups.push_back(std::move(s));
  return static_cast<int>(groups.size()) - 1;
}

const NodeSet& Network::group(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= groups.size())
    throw std::invalid_argument("unknown group id " + std::to_string(id));
  return groups[static_cast<std::size_t>(id)];
}

std::vector<std::uint32_t> Network::group_sizes(const std::vector<int>& ids) const {
  std::vector<std::uint32_t> sizes;
  sizes.reserve(ids.size());
  for (int id : ids) sizes.push_back(group(id).size());
  return sizes;
}

namespace {

// Visits the pair slots selected by independent Bernoulli(p) trials over
// n_slots consecutive slots, using geometric gap lengths. Distributionally
// identical to trying each slot, but O(expected successes).
template <class F>
void sample_slots(Rng& rng, std::uint64_t n_slots, double p, F&& emit) {
  if (n_slots == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < n_slots; ++t) emit(t);
    return;
  }
  std::uint64_t pos = 0;
  for (;;) {
    std::uint64_t gap = rng.geometric(p);
    if (gap >= n_slots - pos) break;
    pos += gap;
    emit(pos);
    ++pos;
    if (pos >= n_slots) break;
  }
}

// Maps a linear index over the upper triangle of an m x m block to (i, j),
// i < j. Row offsets are off(i) = i*m - i*(i+1)/2.
std::pair<std::uint32_t, std::uint32_t> triangle_pair(std::uint64_t t, std::uint64_t m) {
  double md = static_cast<double>(m) - 0.5;
  double disc = md * md - 2.0 * static_cast<double>(t);
  std::uint64_t i = static_cast<std::uint64_t>(std::floor(md - std::sqrt(std::max(disc, 0.0))));
  auto off = [m](std::uint64_t row) { return row * m - row * (row + 1) / 2; };
  while (i > 0 && off(i) > t) --i;
  while (off(i + 1) <= t) ++i;
  std::uint64_t j = i + 1 + (t - off(i));
  return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
}

}  // namespace

Network generate_sbm(const BlockParams& params, std::uint64_t seed) {
  params.validate();
  const std::uint64_t n = params.n_total;
  const std::uint64_t nh = params.n_hidden;
  const std::uint64_t nl = n - nh;

  Network net;
  net.n_nodes = params.n_total;
  net.n_hidden = params.n_hidden;
  net.adj.assign(n, {});

  Rng rng(seed);
  auto add_edge = [&net](std::uint32_t i, std::uint32_t j) {
    net.adj[i].push_back(j);
    net.adj[j].push_back(i);
  };

  // within H
  sample_slots(rng, nh * (nh - 1) / 2, params.p_hh, [&](std::uint64_t t) {
    auto [i, j] = triangle_pair(t, nh);
    add_edge(i, j);
  });
  // between H and L
  sample_slots(rng, nh * nl, params.p_hl, [&](std::uint64_t t) {
    std::uint32_t i = static_cast<std::uint32_t>(t / nl);
    std::uint32_t j = static_cast<std::uint32_t>(nh + t % nl);
    add_edge(i, j);
  });
  // within L
  sample_slots(rng, nl * (nl - 1) / 2, params.p_ll, [&](std::uint64_t t) {
    auto [i, j] = triangle_pair(t, nl);
    add_edge(static_cast<std::uint32_t>(nh + i), static_cast<std::uint32_t>(nh + j));
  });

  for (auto& nb : net.adj) std::sort(nb.begin(), nb.end());
  return net;
}

Network generate_er(std::uint32_t n_total, std::uint32_t n_hidden, double p, std::uint64_t seed) {
  BlockParams params{n_total, n_hidden, p, p, p};
  return generate_sbm(params, seed);
}

int assign_probe_group(Network& net, std::uint32_t size, bool within_l_only, std::uint64_t seed) {
  std::uint32_t lo = within_l_only ? net.n_hidden : 0;
  std::uint32_t pool = net.n_nodes - lo;
  if (size == 0) throw std::invalid_argument("probe group size must be positive");
  if (size > pool)
    throw std::invalid_argument("probe group size " + std::to_string(size) +
                                " exceeds eligible pool " + std::to_string(pool));
  std::vector<std::uint32_t> ids(pool);
  for (std::uint32_t i = 0; i < pool; ++i) ids[i] = lo + i;
  Rng rng(seed);
  for (std::uint32_t i = 0; i < size; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(pool - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(size);
  return net.register_group(NodeSet::from_members(std::move(ids), net.n_nodes));
}

void write_edges_csv(const Network& net, const std::string& path) {
  std::ostringstream out;
  out << "src,dst\n";
  for (std::uint32_t i = 0; i < net.n_nodes; ++i)
    for (std::uint32_t j : net.adj[i])
      if (i < j) out << i << ',' << j << '\n';
  write_text_file(path, out.str());
}

void write_labels_csv(const Network& net, const std::string& path) {
  std::ostringstream out;
  out << "node_id,group\n";
  for (std::uint32_t i = 0; i < net.n_nodes; ++i)
    out << i << ',' << (net.is_hidden_label(i) ? 'H' : 'L') << '\n';
  write_text_file(path, out.str());
}

}  // namespace nsum
