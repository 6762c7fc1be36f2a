#include "nsum/ingest.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nsum/csvio.hpp"
#include "nsum/rng.hpp"

namespace nsum {

LoadedNetwork load_network(const std::string& edges_path, const std::string& attrs_path) {
  // attribute table first; it defines the node universe
  auto attr_lines = read_lines(attrs_path);
  if (attr_lines.empty()) throw IngestError(attrs_path + ":1: missing header");
  auto header = split_csv_line(attr_lines[0]);
  if (header.empty() || header[0] != "node_id")
    throw IngestError(attrs_path + ":1: header must start with node_id");

  AttributeTable attrs;
  attrs.columns.assign(header.begin() + 1, header.end());
  std::uint32_t n_rows = 0;
  for (std::size_t li = 1; li < attr_lines.size(); ++li)
    if (!attr_lines[li].empty()) ++n_rows;
  attrs.n_nodes = n_rows;
  attrs.values.assign(attrs.columns.size(), std::vector<std::string>(n_rows));

  std::vector<bool> seen(n_rows, false);
  for (std::size_t li = 1; li < attr_lines.size(); ++li) {
    if (attr_lines[li].empty()) continue;
    auto fields = split_csv_line(attr_lines[li]);
    if (fields.size() != header.size())
      throw IngestError(attrs_path + ":" + std::to_string(li + 1) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    std::uint32_t id = parse_u32(fields[0], attrs_path, li + 1);
    if (id >= n_rows)
      throw IngestError(attrs_path + ":" + std::to_string(li + 1) + ": node id " +
                        std::to_string(id) + " out of range (rows: " + std::to_string(n_rows) + ")");
    if (seen[id])
      throw IngestError(attrs_path + ":" + std::to_string(li + 1) + ": duplicate node id " +
                        std::to_string(id));
    seen[id] = true;
    for (std::size_t c = 0; c < attrs.columns.size(); ++c) attrs.values[c][id] = fields[c + 1];
  }

  auto edge_lines = read_lines(edges_path);
  if (edge_lines.empty() || split_csv_line(edge_lines[0]) != std::vector<std::string>{"src", "dst"})
    throw IngestError(edges_path + ":1: expected header 'src,dst'");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(edge_lines.size());
  for (std::size_t li = 1; li < edge_lines.size(); ++li) {
    if (edge_lines[li].empty()) continue;
    auto fields = split_csv_line(edge_lines[li]);
    if (fields.size() != 2)
      throw IngestError(edges_path + ":" + std::to_string(li + 1) + ": expected 2 fields");
    std::uint32_t a = parse_u32(fields[0], edges_path, li + 1);
    std::uint32_t b = parse_u32(fields[1], edges_path, li + 1);
    if (a == b)
      throw IngestError(edges_path + ":" + std::to_string(li + 1) + ": self-loop at node " +
                        std::to_string(a));
    if (a >= attrs.n_nodes || b >= attrs.n_nodes)
      throw IngestError(edges_path + ":" + std::to_string(li + 1) + ": node id out of range");
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  LoadedNetwork out;
  out.network.n_nodes = attrs.n_nodes;
  out.network.n_hidden = 0;  // hidden status is per experiment, not per file
  out.network.adj.assign(attrs.n_nodes, {});
  for (auto [a, b] : edges) {
    out.network.adj[a].push_back(b);
    out.network.adj[b].push_back(a);
  }
  for (auto& nb : out.network.adj) std::sort(nb.begin(), nb.end());
  out.attrs = std::move(attrs);
  return out;
}

std::vector<CandidateGroup> derive_candidate_groups(const Network& net,
                                                    const AttributeTable& attrs,
                                                    double min_prev, double max_prev) {
  if (!(min_prev > 0.0 && min_prev < max_prev && max_prev < 1.0))
    throw std::invalid_argument("prevalence band must satisfy 0 < min < max < 1");
  if (attrs.n_nodes != net.n_nodes)
    throw std::invalid_argument("attribute table does not match the network size");

  std::vector<CandidateGroup> out;
  for (std::size_t c = 0; c < attrs.columns.size(); ++c) {
    std::map<std::string, std::vector<std::uint32_t>> levels;  // ordered for determinism
    for (std::uint32_t node = 0; node < attrs.n_nodes; ++node) {
      const std::string& v = attrs.values[c][node];
      if (!v.empty()) levels[v].push_back(node);
    }
    for (auto& [level, members] : levels) {
      double prev = static_cast<double>(members.size()) / net.n_nodes;
      if (prev < min_prev || prev > max_prev) continue;
      CandidateGroup g;
      g.group_id = static_cast<int>(out.size());
      g.column = attrs.columns[c];
      g.level = level;
      g.members = members;
      g.prevalence = prev;
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<CaseSpec> build_cases(std::span<const CandidateGroup> candidates, std::uint32_t k,
                                  std::uint32_t sample_size, std::uint32_t n_surveys,
                                  std::uint64_t base_seed) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (candidates.size() < k)
    throw std::invalid_argument("case construction needs " + std::to_string(k) +
                                " candidate groups, have " + std::to_string(candidates.size()));
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (candidates[x].size() != candidates[y].size())
      return candidates[x].size() > candidates[y].size();
    return candidates[x].group_id < candidates[y].group_id;
  });
  order.resize(k);

  std::vector<CaseSpec> cases;
  cases.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    CaseSpec spec;
    spec.case_id = static_cast<int>(i);
    spec.hidden_group_id = candidates[order[i]].group_id;
    for (std::uint32_t j = 0; j < k; ++j)
      if (j != i) spec.probe_group_ids.push_back(candidates[order[j]].group_id);
    spec.sample_size = sample_size;
    spec.n_surveys = n_surveys;
    spec.seed = splitmix64(base_seed + i);
    cases.push_back(std::move(spec));
  }
  return cases;
}

double assortativity(const Network& net, std::span<const std::uint8_t> partition) {
  if (partition.size() != net.n_nodes)
    throw std::invalid_argument("partition does not match the network size");
  // e[g][h] counts edge ends, so each edge contributes twice
  std::uint64_t e[2][2] = {{0, 0}, {0, 0}};
  for (std::uint32_t i = 0; i < net.n_nodes; ++i) {
    int gi = partition[i] ? 1 : 0;
    for (std::uint32_t j : net.adj[i]) e[gi][partition[j] ? 1 : 0]++;
  }
  std::uint64_t total = e[0][0] + e[0][1] + e[1][0] + e[1][1];
  if (total == 0) throw std::domain_error("assortativity undefined on an edgeless graph");
  double t = static_cast<double>(total);
  double trace = (static_cast<double>(e[0][0]) + static_cast<double>(e[1][1])) / t;
  double a0 = (static_cast<double>(e[0][0]) + static_cast<double>(e[0][1])) / t;
  double a1 = (static_cast<double>(e[1][0]) + static_cast<double>(e[1][1])) / t;
  double sum_sq = a0 * a0 + a1 * a1;
  if (sum_sq >= 1.0) return 1.0;  // all edges inside one class
  return (trace - sum_sq) / (1.0 - sum_sq);
}

double degree_ratio(const Network& net, const NodeSet& hidden, DegreeRatioBaseline baseline) {
  std::uint32_t nh = hidden.size();
  if (nh == 0) throw std::invalid_argument("hidden set is empty");
  if (baseline == DegreeRatioBaseline::non_hidden && nh >= net.n_nodes)
    throw std::invalid_argument("hidden set must be a strict subset for the non-hidden baseline");

  double sum_h = 0.0;
  for (std::uint32_t i : hidden.members) sum_h += net.degree(i);
  double mean_h = sum_h / nh;

  double mean_base;
  if (baseline == DegreeRatioBaseline::whole_population) {
    double sum_all = 0.0;
    for (std::uint32_t i = 0; i < net.n_nodes; ++i) sum_all += net.degree(i);
    mean_base = sum_all / net.n_nodes;
  } else {
    double sum_rest = 0.0;
    for (std::uint32_t i = 0; i < net.n_nodes; ++i)
      if (!hidden.contains(i)) sum_rest += net.degree(i);
    mean_base = sum_rest / (net.n_nodes - nh);
  }
  if (mean_base <= 0.0) throw std::domain_error("degree ratio undefined: zero baseline degree");
  return mean_h / mean_base;
}

std::string degree_ratio_band(double ratio) {
  if (ratio < 0.8) return "low";
  if (ratio > 1.2) return "high";
  return "near1";
}

void write_candidates_csv(std::span<const CandidateGroup> candidates, const std::string& path) {
  std::ostringstream out;
  out << "group_id,column,level,size,prevalence\n";
  for (const CandidateGroup& g : candidates)
    out << g.group_id << ',' << g.column << ',' << g.level << ',' << g.size() << ','
        << format_double(g.prevalence) << '\n';
  write_text_file(path, out.str());
}

void write_cases_csv(std::span<const CaseSpec> cases, const std::string& path) {
  std::ostringstream out;
  out << "case_id,hidden_group_id,probe_group_ids,seed\n";
  for (const CaseSpec& c : cases) {
    out << c.case_id << ',' << c.hidden_group_id << ',';
    for (std::size_t i = 0; i < c.probe_group_ids.size(); ++i) {
      if (i) out << ';';
      out << c.probe_group_ids[i];
    }
    out << ',' << c.seed << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace nsum
