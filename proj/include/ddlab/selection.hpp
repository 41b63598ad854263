#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddlab/linmodel.hpp"

// Model comparison: BIC, Laplace evidence from numerical Hessians, posteriors
// over finite model lists, Bayes factors, and exact-counting evidence for
// discrete hypothesis families.

namespace ddlab {

// BIC in reward form: mle_loglik - (k/2) log n. Larger is better -- note
// this is NOT the common -2 log L + k log n deviance convention.
double bic(double mle_loglik, int k, double n);

// log P(D|M) ~= log_post(theta_hat) + (k/2) log(2 pi) - 1/2 logdet(-H),
// H the central-finite-difference Hessian of log_post at theta_hat with
// per-coordinate step h_j = max(fd_step, fd_step * |theta_hat_j|).
// Validates the mode (gradient norm < mode_tol) rather than optimizing.
// fd_step trades truncation against roundoff in the second differences;
// 1e-3 keeps conjugate-Gaussian cases accurate to ~1e-8 (see docs).
double laplace_log_evidence(const std::function<double(const Vector&)>& log_post,
                            const Vector& theta_hat, double mode_tol, double fd_step = 1e-3);

struct ModelList {
  std::vector<GaussianLinearModel> models;
  Vector prior_probs;  // nonnegative, sums to 1 within 1e-12
};

struct ModelEvidence {
  double log_evidence = 0.0;
  double laplace_log_evidence = 0.0;
  double bic_value = 0.0;
  double mle_loglik = 0.0;
  int k = 0;
  int n = 0;
};

struct EvidenceReport {
  std::vector<ModelEvidence> per_model;
  Vector posterior_probs;
};

EvidenceReport model_posterior(const ModelList& list, const Vector& y);

double bayes_factor(const EvidenceReport& report, int i, int j);

// exp of log-weights normalized to a probability vector, with
// max-subtraction so large negative evidences cannot underflow everything.
Vector normalize_log_weights(const Vector& log_w);

// --- discrete hypothesis families (exact integer counting) ---

// Exact rational with int64 numerator/denominator, always reduced, den > 0.
struct Rat {
  long long n = 0, d = 1;
  Rat() = default;
  Rat(long long num, long long den);
  friend bool operator==(const Rat&, const Rat&) = default;
};
Rat operator+(const Rat&, const Rat&);
Rat operator-(const Rat&, const Rat&);
Rat operator*(const Rat&, const Rat&);
Rat operator/(const Rat&, const Rat&);

struct DiscreteHypothesis {
  std::string name;
  long long grid_size = 0;
  // first `len` terms (at x = 1..len) of the sequence for one grid index
  std::function<std::vector<Rat>(long long index, int len)> generator;
};

struct DiscreteEvidence {
  long long count = 0;
  long long grid_size = 0;
  double evidence = 0.0;  // count / grid_size
};

// Counts grid indices whose generated sequence equals D exactly, by full
// enumeration of the grid. Suitable for grids up to a few million indices.
DiscreteEvidence discrete_evidence(const DiscreteHypothesis& h, const std::vector<long long>& D);

// Arithmetic progressions y_x = n0 + (x-1) n, with n0, n on an integer grid.
DiscreteHypothesis arithmetic_hypothesis(long long lo = -50, long long hi = 50);

// Cubics c0 + c1 x + c2 x^2 + c3 x^3 whose coefficients are reduced
// fractions with |numerator| <= max_num and denominator in {1..max_den},
// each distinct value counted once. Enumeration form for oracle-sized grids:
DiscreteHypothesis cubic_hypothesis_enumerated(long long max_num, long long max_den);

// ...and the closed count for the full grid: a sequence of length >= 4 pins
// the cubic uniquely (polynomial interpolation), so the count is a grid
// membership test; shorter sequences leave 4-len coefficients free and only
// those are enumerated. Exact int64 rational arithmetic throughout.
DiscreteEvidence cubic_evidence(const std::vector<long long>& D, long long max_num,
                                long long max_den);

long long cubic_grid_size(long long max_num, long long max_den);

}  // namespace ddlab
