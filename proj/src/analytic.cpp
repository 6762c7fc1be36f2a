#include "nsum/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nsum/csvio.hpp"

namespace nsum {

namespace {

void check_probs_r(double p_hh, double p_hl, double p_ll, double r) {
  for (double p : {p_hh, p_hl, p_ll})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("link probabilities must be in [0,1]");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("R must be in (0,1)");
}

void check_scaled(double a, double r) {
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("R must be in (0,1)");
}

}  // namespace

double expect_general(RatioKind kind, double p_hh, double p_hl, double p_ll, double r) {
  check_probs_r(p_hh, p_hl, p_ll, r);
  if (kind == RatioKind::drpr) {
    double den = r * p_hl + (1.0 - r) * p_ll;
    if (den <= 0.0) throw std::domain_error("dRpR expectation: zero denominator");
    return r * (r * p_hh + (1.0 - r) * p_hl) / den;
  }
  if (p_hl <= 0.0 || p_ll <= 0.0)
    throw std::domain_error("dRpA expectation: p_hl and p_ll must be positive");
  return r * (r * p_hh / p_hl + (1.0 - r) * p_hl / p_ll);
}

double var_general(RatioKind kind, double p_hh, double p_hl, double p_ll, double r,
                   double n, double n_population, double n_probe) {
  check_probs_r(p_hh, p_hl, p_ll, r);
  if (!(n > 0.0 && n_population > 0.0 && n_probe > 0.0))
    throw std::invalid_argument("n, N, N_K must be positive");
  const double q = 1.0 - r;
  if (kind == RatioKind::drpr) {
    double den = r * p_hl + q * p_ll;
    if (den <= 0.0) throw std::domain_error("dRpR variance: zero denominator");
    double den2 = den * den;
    double t1 = (r * p_hh * (1.0 - p_hh) + q * p_hl * (1.0 - p_hl)) / den2;
    double num = r * p_hh + q * p_hl;
    double t2 = num * num * (r * p_hl * (1.0 - p_hl) + q * p_ll * (1.0 - p_ll)) / (den2 * den2);
    return r / (n * n_population) * t1 + r * r / (n * n_probe) * t2;
  }
  if (p_hl <= 0.0 || p_ll <= 0.0)
    throw std::domain_error("dRpA variance: p_hl and p_ll must be positive");
  // Per-respondent ratio expansion: the response and probe-count means both
  // depend on the respondent's own block, so the L terms carry 1/p_ll powers.
  double t1 = r * p_hh * (1.0 - p_hh) / (p_hl * p_hl) +
              q * p_hl * (1.0 - p_hl) / (p_ll * p_ll);
  double t2 = r * p_hh * p_hh * (1.0 - p_hl) / (p_hl * p_hl * p_hl) +
              q * p_hl * p_hl * (1.0 - p_ll) / (p_ll * p_ll * p_ll);
  return r / (n * n_population) * t1 + r * r / (n * n_probe) * t2;
}

double bias_scaled(RatioKind kind, double a, double r) {
  check_scaled(a, r);
  if (kind == RatioKind::drpr) return r * (a - 1.0) * (2.0 * r - 1.0) / ((1.0 - r) * a + r);
  return r * (a - 1.0) * ((a + 1.0) * r - 1.0) / a;
}

double var_scaled(RatioKind kind, double a, double r, double p, double r_k, double n_times_n) {
  check_scaled(a, r);
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0,1]");
  if (a * p > 1.0) throw std::invalid_argument("a*p exceeds 1");
  if (!(r_k > 0.0 && r_k < 1.0)) throw std::invalid_argument("r_k must be in (0,1)");
  if (!(n_times_n > 0.0)) throw std::invalid_argument("nN must be positive");
  const double q = 1.0 - r;
  double t1, t2;
  if (kind == RatioKind::drpr) {
    double den = r + q * a;
    double den2 = den * den;
    t1 = ((r * a + q) - (r * a * a + q) * p) / den2;
    double num = r * a + q;
    t2 = num * num * ((r + q * a) - (r + q * a * a) * p) / (den2 * den2);
  } else {
    t1 = r * a * (1.0 - a * p) + q * (1.0 - p) / (a * a);
    t2 = r * a * a * (1.0 - p) + q * (1.0 - a * p) / (a * a * a);
  }
  return r / (n_times_n * p) * (t1 + r / r_k * t2);
}

MomentPair moments_scaled(RatioKind kind, double a, double r, double p, double r_k,
                          double n_times_n) {
  return {r + bias_scaled(kind, a, r), var_scaled(kind, a, r, p, r_k, n_times_n)};
}

std::string bias_sign_name(BiasSign s) {
  switch (s) {
    case BiasSign::negative: return "negative";
    case BiasSign::zero: return "zero";
    case BiasSign::positive: return "positive";
  }
  return "?";
}

BiasSign bias_sign_region(RatioKind kind, double a, double r) {
  double b = bias_scaled(kind, a, r);
  if (std::fabs(b) <= 1e-14) return BiasSign::zero;
  return b > 0.0 ? BiasSign::positive : BiasSign::negative;
}

std::string winner_name(Winner w) {
  switch (w) {
    case Winner::drpr: return "dRpR";
    case Winner::drpa: return "dRpA";
    case Winner::tie: return "tie";
    case Winner::invalid: return "invalid";
  }
  return "?";
}

GridAxes grid_axes_wide() { return {-4.0, 4.0, 0.1, 0.01, 0.99, 0.02}; }
GridAxes grid_axes_narrow() { return {0.0, 4.0, 0.05, 0.001, 0.1, 0.001}; }

namespace {

std::vector<double> build_axis(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad axis range");
  std::size_t count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = lo + static_cast<double>(i) * step;
  return axis;
}

// Smaller magnitude wins; relative differences below kWinnerTieTol tie.
Winner winner_of(double metric_drpr, double metric_drpa) {
  double x = std::fabs(metric_drpr), y = std::fabs(metric_drpa);
  double m = std::max(x, y);
  if (m == 0.0) return Winner::tie;
  if (std::fabs(x - y) < kWinnerTieTol * m) return Winner::tie;
  return x < y ? Winner::drpr : Winner::drpa;
}

}  // namespace

std::size_t WinnerGrid::count_winner(Winner w, int metric) const {
  std::size_t n = 0;
  for (const GridCell& c : cells) {
    Winner v = metric == 0 ? c.bias_winner : metric == 1 ? c.var_winner : c.rmse_winner;
    if (v == w) ++n;
  }
  return n;
}

WinnerGrid winner_grid(const GridFixed& fixed, const GridAxes& axes) {
  if (!(fixed.p > 0.0 && fixed.p <= 1.0)) throw std::invalid_argument("p must be in (0,1]");
  if (!(fixed.r_k > 0.0 && fixed.r_k < 1.0)) throw std::invalid_argument("r_k must be in (0,1)");
  if (!(fixed.n_times_n > 0.0)) throw std::invalid_argument("nN must be positive");

  WinnerGrid g;
  g.fixed = fixed;
  g.axes = axes;
  g.log_a_axis = build_axis(axes.log_a_min, axes.log_a_max, axes.log_a_step);
  g.r_axis = build_axis(axes.r_min, axes.r_max, axes.r_step);
  g.cells.resize(g.log_a_axis.size() * g.r_axis.size());

  for (std::size_t ia = 0; ia < g.log_a_axis.size(); ++ia) {
    double a = std::exp(g.log_a_axis[ia]);
    for (std::size_t ir = 0; ir < g.r_axis.size(); ++ir) {
      double r = g.r_axis[ir];
      GridCell& c = g.cells[ia * g.r_axis.size() + ir];
      if (a * fixed.p > 1.0 || !(r > 0.0 && r < 1.0)) {
        double nan = std::numeric_limits<double>::quiet_NaN();
        c = {nan, nan, nan, nan, nan, nan, Winner::invalid, Winner::invalid, Winner::invalid,
             false};
        continue;
      }
      c.valid = true;
      c.bias_drpr = bias_scaled(RatioKind::drpr, a, r);
      c.bias_drpa = bias_scaled(RatioKind::drpa, a, r);
      c.var_drpr = var_scaled(RatioKind::drpr, a, r, fixed.p, fixed.r_k, fixed.n_times_n);
      c.var_drpa = var_scaled(RatioKind::drpa, a, r, fixed.p, fixed.r_k, fixed.n_times_n);
      c.rmse_drpr = std::sqrt(c.bias_drpr * c.bias_drpr + c.var_drpr);
      c.rmse_drpa = std::sqrt(c.bias_drpa * c.bias_drpa + c.var_drpa);
      c.bias_winner = winner_of(c.bias_drpr, c.bias_drpa);
      c.var_winner = winner_of(c.var_drpr, c.var_drpa);
      c.rmse_winner = winner_of(c.rmse_drpr, c.rmse_drpa);
    }
  }
  return g;
}

std::vector<WinnerGrid> grid_sweep(std::span<const GridFixed> fixed_sets, const GridAxes& axes) {
  std::vector<WinnerGrid> out;
  out.reserve(fixed_sets.size());
  for (const GridFixed& f : fixed_sets) out.push_back(winner_grid(f, axes));
  return out;
}

void write_winner_grid_csv(const WinnerGrid& grid, const std::string& path) {
  std::ostringstream out;
  out << "log_a,R,bias_drpr,bias_drpa,var_drpr,var_drpa,rmse_drpr,rmse_drpa,"
         "bias_winner,var_winner,rmse_winner\n";
  for (std::size_t ia = 0; ia < grid.log_a_axis.size(); ++ia) {
    for (std::size_t ir = 0; ir < grid.r_axis.size(); ++ir) {
      const GridCell& c = grid.at(ia, ir);
      out << format_double(grid.log_a_axis[ia]) << ',' << format_double(grid.r_axis[ir]) << ','
          << format_double(c.bias_drpr) << ',' << format_double(c.bias_drpa) << ','
          << format_double(c.var_drpr) << ',' << format_double(c.var_drpa) << ','
          << format_double(c.rmse_drpr) << ',' << format_double(c.rmse_drpa) << ','
          << winner_name(c.bias_winner) << ',' << winner_name(c.var_winner) << ','
          << winner_name(c.rmse_winner) << '\n';
    }
  }
  write_text_file(path, out.str());
}

void write_winner_grid_sidecar(const WinnerGrid& grid, const std::string& path) {
  nlohmann::json j;
  j["p"] = grid.fixed.p;
  j["r_k"] = grid.fixed.r_k;
  j["n_times_n"] = grid.fixed.n_times_n;
  j["log_a"] = {{"min", grid.axes.log_a_min}, {"max", grid.axes.log_a_max},
                {"step", grid.axes.log_a_step}};
  j["r"] = {{"min", grid.axes.r_min}, {"max", grid.axes.r_max}, {"step", grid.axes.r_step}};
  j["tie_tolerance"] = kWinnerTieTol;
  write_text_file(path, j.dump(2) + "\n");
}

std::pair<double, double> s1_prevalence_variances(std::span<const double> degrees, double r) {
  if (degrees.empty()) throw std::invalid_argument("degree vector is empty");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("R must be in (0,1)");
  double sum_d = 0.0, sum_inv = 0.0;
  for (double d : degrees) {
    if (!(d > 0.0)) throw std::invalid_argument("degrees must be positive");
    sum_d += d;
    sum_inv += 1.0 / d;
  }
  double n = static_cast<double>(degrees.size());
  double var_roa = r * (1.0 - r) / sum_d;
  double var_aor = r * (1.0 - r) / (n * n) * sum_inv;
  return {var_roa, var_aor};
}

std::pair<double, double> s1_degree_variances(double d_i, double n_population,
                                              std::span<const std::uint32_t> probe_sizes) {
  if (probe_sizes.empty()) throw std::invalid_argument("probe group list is empty");
  if (!(d_i > 0.0)) throw std::invalid_argument("degree must be positive");
  double sum_n = 0.0, sum_sq = 0.0, sum_inv = 0.0;
  for (std::uint32_t s : probe_sizes) {
    if (s == 0) throw std::invalid_argument("probe group sizes must be positive");
    double sd = static_cast<double>(s);
    sum_n += sd;
    sum_sq += sd * sd;
    sum_inv += 1.0 / sd;
  }
  if (!(sum_n < n_population))
    throw std::invalid_argument("probe group sizes must sum to less than N");
  double k = static_cast<double>(probe_sizes.size());
  double var_roa = d_i * (n_population / sum_n - sum_sq / (sum_n * sum_n));
  double var_aor = d_i * (n_population / (k * k) * sum_inv - 1.0 / k);
  return {var_roa, var_aor};
}

}  // namespace nsum
