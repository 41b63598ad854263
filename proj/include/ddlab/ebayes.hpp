#pragma once

#include <utility>
#include <vector>

#include "ddlab/numerics.hpp"

// Empirical Bayes for the orthonormal-design model: theta_hat_i ~ N(theta_i,
// sigma^2), theta_i ~ N(0, sigma_i^2), with the precision parameterization
// V_i = 1/(sigma_i^2 + sigma^2), V_{p+1} = 1/sigma^2 and the ordering
// V_0 <= ... <= V_p <= V_{p+1} enforced by isotonic regression. Shrinkage
// factors are z_i = V_i / V_{p+1} = sigma^2/(sigma_i^2 + sigma^2) in (0,1],
// and the posterior mean of coefficient i is (1 - z_i) theta_hat_i.

namespace ddlab {

struct CoefficientStats {
  Vector theta_hat;  // OLS coefficients under Q^T Q = I
  double s = 0.0;    // residual sum of squares
  int d = 0;         // N - (p+1)
  int N = 0;
};

// Independent Gamma priors p(V_i) proportional to V_i^{gamma_i - 1} e^{-V_i / beta_i},
// one pair per coordinate 0..p+1 (the last one belongs to V_{p+1} = 1/sigma^2).
struct GammaPriorSchedule {
  Vector shapes;  // gamma_i, must exceed 1/2
  Vector scales;  // beta_i > 0
};

// gamma_i = 1 + 0.1 i, beta_i = 10 for i = 0..p+1.
GammaPriorSchedule default_schedule(int p);

struct PavaFit {
  Vector v_unconstrained;  // length p+2
  Vector v_isotonic;       // length p+2, nondecreasing
  Vector z;                // length p+1, in (0,1], nondecreasing
  double sigma2_hat = 0.0;
  std::vector<std::pair<int, int>> pool_blocks;  // inclusive index ranges
};

// Log of the joint marginal likelihood of (z, sigma^2):
//   -(N/2) log sigma^2 + ((d-2)/2) log s - s/(2 sigma^2)
//   + sum_i [ (1/2) log z_i - theta_hat_i^2 z_i / (2 sigma^2) ],
// additive constant fixed to zero.
double joint_hyper_loglik(const CoefficientStats& stats, const Vector& z, double sigma2);

// Analytic gradient: entries 0..p are d/dz_i, the last entry is d/dsigma2.
Vector joint_hyper_grad(const CoefficientStats& stats, const Vector& z, double sigma2);

// Per-coordinate MAP of V under the Gamma priors (derivation in
// docs/math-notes.md):
//   V_i     = (gamma_i - 1/2) / (1/beta_i + theta_hat_i^2 / 2),  i <= p
//   V_{p+1} = (gamma_{p+1} + d/2 - 1) / (1/beta_{p+1} + s/2)
Vector unconstrained_v_map(const CoefficientStats& stats, const GammaPriorSchedule& schedule);

// Weighted isotonic regression (nondecreasing) via pool-adjacent-violators.
std::pair<Vector, std::vector<std::pair<int, int>>> pava(const Vector& values,
                                                         const Vector& weights);

enum class PavaWeights {
  unit,       // canonical
  curvature,  // negative second derivative of the V-space log-posterior at the MAP
};

PavaFit deaton_fit(const CoefficientStats& stats, const GammaPriorSchedule& schedule,
                   PavaWeights weights = PavaWeights::unit);

// (1 - z_i) * theta_hat_i, coordinate-wise.
Vector shrinkage_posterior_means(const CoefficientStats& stats, const PavaFit& fit);

struct GaussianMeansResult {
  Vector means;           // tau_i^2/(tau_i^2 + sigma^2) * y_i
  Vector per_coord_risk;  // sigma^2 tau_i^2 / (sigma^2 + tau_i^2)
};

GaussianMeansResult gaussian_means_bayes(const Vector& y, const Vector& tau2, double sigma2);
GaussianMeansResult gaussian_means_bayes(const Vector& y, double tau2, double sigma2);

// n tau^2/(sigma^2 + n tau^2) * ybar + sigma^2/(sigma^2 + n tau^2) * mu0
double james_stein_style_mean(double ybar, int n, double mu0, double tau2, double sigma2);

}  // namespace ddlab
