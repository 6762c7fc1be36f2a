#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsum {

// The two estimators with closed-form first-order moments under the
// two-block model with a single probe group inside L.
enum class RatioKind { drpr, drpa };

struct MomentPair {
  double expectation = 0.0;
  double variance = 0.0;
};

// Limiting first-order expectation as the hidden share of the sample
// approaches R. Throws std::domain_error on singular denominators.
double expect_general(RatioKind kind, double p_hh, double p_hl, double p_ll, double r);

// Limiting first-order variance. Dependence on the sample and population
// sizes enters through n*N and n*N_K.
double var_general(RatioKind kind, double p_hh, double p_hl, double p_ll, double r,
                   double n, double n_population, double n_probe);

// Scaled parameterization p_hh = p_ll = a*p, p_hl = p. The bias depends on
// (a, R) only.
double bias_scaled(RatioKind kind, double a, double r);
double var_scaled(RatioKind kind, double a, double r, double p, double r_k, double n_times_n);

MomentPair moments_scaled(RatioKind kind, double a, double r, double p, double r_k,
                          double n_times_n);

enum class BiasSign { negative, zero, positive };
std::string bias_sign_name(BiasSign s);

// Piecewise sign of the scaled bias; values within 1e-14 of zero classify
// as zero. Agrees with the sign of bias_scaled away from that band.
BiasSign bias_sign_region(RatioKind kind, double a, double r);

enum class Winner : std::uint8_t { drpr, drpa, tie, invalid };
std::string winner_name(Winner w);

struct GridFixed {
  double p = 0.01;
  double r_k = 0.1;
  double n_times_n = 5e5;
};

struct GridAxes {
  double log_a_min = -4.0, log_a_max = 4.0, log_a_step = 0.1;
  double r_min = 0.01, r_max = 0.99, r_step = 0.02;
};

// Defaults reproduce the two published panel layouts.
GridAxes grid_axes_wide();    // log a in [-4,4] step .1, R in [.01,.99] step .02
GridAxes grid_axes_narrow();  // log a in [0,4] step .05, R in [.001,.1] step .001

struct GridCell {
  double bias_drpr = 0, bias_drpa = 0;
  double var_drpr = 0, var_drpa = 0;
  double rmse_drpr = 0, rmse_drpa = 0;
  Winner bias_winner = Winner::invalid;
  Winner var_winner = Winner::invalid;
  Winner rmse_winner = Winner::invalid;
  bool valid = false;  // a*p <= 1
};

// (log a, R) lattice of biases, variances, rmse = sqrt(bias^2 + var) and
// per-metric winners. Cells with a*p > 1 are kept but marked invalid so the
// exported table stays rectangular.
struct WinnerGrid {
  GridFixed fixed;
  GridAxes axes;
  std::vector<double> log_a_axis;
  std::vector<double> r_axis;
  std::vector<GridCell> cells;  // row-major: log_a outer, r inner

  const GridCell& at(std::size_t ia, std::size_t ir) const {
    return cells[ia * r_axis.size() + ir];
  }
  std::size_t count_winner(Winner w, int metric) const;  // metric: 0 bias, 1 var, 2 rmse
};

// Relative tie tolerance for winner labels.
inline constexpr double kWinnerTieTol = 1e-12;

WinnerGrid winner_grid(const GridFixed& fixed, const GridAxes& axes);
std::vector<WinnerGrid> grid_sweep(std::span<const GridFixed> fixed_sets, const GridAxes& axes);

void write_winner_grid_csv(const WinnerGrid& grid, const std::string& path);
void write_winner_grid_sidecar(const WinnerGrid& grid, const std::string& path);

// Exact binomial-model variances of the prevalence estimators with known
// degrees: RoA uses the arithmetic mean of degrees, AoR the harmonic mean.
// Returns (var_roa, var_aor).
std::pair<double, double> s1_prevalence_variances(std::span<const double> degrees, double r);

// Exact binomial-model variances of the two degree estimators for one
// respondent of true degree d_i. Returns (var_roa, var_aor).
std::pair<double, double> s1_degree_variances(double d_i, double n_population,
                                              std::span<const std::uint32_t> probe_sizes);

}  // namespace nsum
