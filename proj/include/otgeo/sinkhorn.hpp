#pragma once

#include <vector>

#include "otgeo/measure.hpp"

namespace otgeo {

struct SinkhornOptions {
  double tol = 1e-6;            // L1 marginal violation
  std::size_t max_iter = 10000;
  /// Warm start by annealing: one update at each of eps_max, q eps_max,
  /// q^2 eps_max, ... above the target, eps_max being the largest cost
  /// over the joint bounding box. 0 disables.
  double eps_scaling = 0.5;
  /// `max_iter` bounds annealing, Sinkhorn and Newton updates together.
  /// Problems with at most kNewtonMaxSize points per side switch to dense
  /// Newton steps on the semi-dual once kNewtonAfter Sinkhorn updates have
  /// not converged.
  bool newton = true;
};

inline constexpr std::size_t kNewtonMaxSize = 512;
inline constexpr std::size_t kNewtonAfter = 500;
inline constexpr std::size_t kNewtonMaxSteps = 60;

/// Dual potentials of one entropic solve, in cost units.
struct SinkhornState {
  std::vector<double> f;
  std::vector<double> g;
  double epsilon = 0.0;
  std::size_t iterations = 0;
  /// L1 distance of the implied plan's row and column sums to mu and nu.
  double marginal_violation = 0.0;
};

struct SinkhornResult {
  /// <C, pi> + eps KL(pi | mu x nu) of the plan implied by the potentials.
  double ot_eps = 0.0;
  SinkhornState state;
  bool converged = false;
};

/// Log-domain Sinkhorn for OT_{c,eps}(mu, nu) with KL(pi | mu x nu)
/// regularization. Zero-weight atoms are dropped first (their potentials
/// are then absent from the state). Annealing updates count towards
/// `iterations`. Throws on eps <= 0 or tol <= 0.
SinkhornResult sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec,
                        double epsilon, const SinkhornOptions& opts = {});

/// OT_{c,eps}(mu, mu) through the symmetric fixed point f = g, iterating
/// f <- (f + T(f)) / 2.
SinkhornResult sinkhorn_symmetric(const DiscreteMeasure& mu, CostSpec spec, double epsilon,
                                  const SinkhornOptions& opts = {});

/// Primal objective <C, pi> + eps KL(pi | mu x nu) for the plan
/// pi_ij = a_i b_j exp((f_i + g_j - C_ij) / eps), streamed row by row.
double primal_from_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec,
                              double epsilon, const std::vector<double>& f,
                              const std::vector<double>& g);

struct DivergenceResult {
  double value = 0.0;  // S_eps
  SinkhornResult cross;
  SinkhornResult self_mu;
  SinkhornResult self_nu;
  bool converged = false;
  std::size_t iterations() const {
    return cross.state.iterations + self_mu.state.iterations + self_nu.state.iterations;
  }
};

/// S_eps(mu, nu) = OT_eps(mu, nu) - OT_eps(mu, mu)/2 - OT_eps(nu, nu)/2.
/// Non-convergence of any solve is reported through `converged`.
DivergenceResult sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     CostSpec spec, double epsilon, const SinkhornOptions& opts = {});

inline constexpr std::size_t kMaxAssignmentSize = 512;

/// Exact OT between two uniform clouds of equal size n <= 512:
/// min over permutations of (1/n) sum_i c(x_i, y_sigma(i)).
double exact_ot_assignment(const PointCloud& x, const PointCloud& y, CostSpec spec);

/// Dense min-cost perfect matching (shortest augmenting paths with
/// potentials, O(n^3)). `cost` is row-major n x n. Returns column per row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

}  // namespace otgeo
