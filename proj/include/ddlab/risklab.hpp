#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ddlab/linmodel.hpp"

// Experiment harness: seeded synthetic data, Monte-Carlo frequentist risk on
// a fixed noise-free test grid, and the complexity sweeps that trace the
// U-curve / interpolation spike / re-descent and the evidence peak.

namespace ddlab {

enum class XDesign { equispaced, uniform_random };

struct GeneratorSpec {
  int true_degree = 10;
  Vector true_coefficients;  // empty => drawn N(0,1) from the seed's coefficient stream
  double noise_sd = 0.3;
  int N = 20;
  XDesign x_design = XDesign::equispaced;
  double a = -1.0, b = 1.0;
};

struct Dataset {
  Vector x, y, f_true_at_x;
  GeneratorSpec spec;  // with coefficients resolved
  std::uint64_t seed = 0;
};

// Substream tags for derive_seed(seed, tag, index); fixed constants so every
// consumer of randomness is keyed independently (documented in README).
namespace stream {
inline constexpr std::uint64_t kX = 1;          // random x designs
inline constexpr std::uint64_t kNoise = 2;      // observation noise
inline constexpr std::uint64_t kCoef = 3;       // drawn true coefficients
inline constexpr std::uint64_t kFeatures = 4;   // random feature weights
inline constexpr std::uint64_t kCanonical = 5;  // the sweep's canonical dataset
}  // namespace stream

// Fills in true_coefficients (when empty) from derive_seed(seed, kCoef).
GeneratorSpec resolve_coefficients(GeneratorSpec spec, std::uint64_t seed);

// f_true = normalized-Legendre expansion of true_degree on [a,b]; y adds
// i.i.d. N(0, noise_sd^2) from derive_seed(seed, kNoise). Bit-reproducible.
Dataset generate(const GeneratorSpec& spec, std::uint64_t seed);

double train_error(const Vector& y, const Vector& predictions);

struct PriorSchedule {
  enum class Kind { constant, young_decay } kind = Kind::young_decay;
  double tau2 = 1.0;
};

// constant: tau2 for every column; young_decay: tau2 / (1+j)^2.
Vector prior_variances(const PriorSchedule& prior, int n_cols);

struct Estimator {
  enum class Kind { min_norm, ridge, bayes } kind = Kind::min_norm;
  double ridge_lambda = 0.0;
  PriorSchedule prior;       // bayes only
  double min_norm_tol = 1e-10;
};

// Basis for a given complexity (= column count): data-orthonormal polynomials
// of degree complexity-1 while complexity <= N; beyond that, the
// interpolating random-feature design (training-point hats + seeded Fourier
// features), so every width past the threshold can reach zero train error.
// Feature draws are prefix-nested, so widths are nested bases.
DesignMatrix complexity_design(const Vector& x, int complexity, std::uint64_t feature_seed);

struct RiskResult {
  double mean = 0.0;
  double std_error = 0.0;
  Vector samples;  // per-replicate risks, in replicate order
};

// Predictions at test_x from one training set.
using Predictor = std::function<Vector(const Dataset& data, const Vector& test_x)>;

// Monte-Carlo risk of a predictor against f_true on an equispaced test grid
// (noise-free targets: reported risk is squared bias + variance, without the
// irreducible sigma^2). Replicate r uses derive_seed(master_seed, stream_id, r).
RiskResult frequentist_risk_custom(const GeneratorSpec& spec, const Predictor& predictor,
                                   int replicates, int test_points, std::uint64_t master_seed,
                                   std::uint64_t stream_id = 0);

RiskResult frequentist_risk(const GeneratorSpec& spec, int complexity, const Estimator& est,
                            int replicates, int test_points, std::uint64_t master_seed);

struct RiskCurvePoint {
  int complexity = 0;
  double train_mse = 0.0;
  double test_risk_mle = 0.0, test_risk_mle_se = 0.0;
  double test_risk_bayes = 0.0, test_risk_bayes_se = 0.0;
  double log_evidence = 0.0;
  double bic_value = 0.0;
  int replicates = 0;
  Vector mle_samples, bayes_samples;  // kept for median / bootstrap analyses
};

// Per complexity: min-norm train error and exact evidence/BIC on a canonical
// dataset (fixed across complexities), plus Monte-Carlo risks for the
// min-norm and Bayes estimators.
std::vector<RiskCurvePoint> double_descent_sweep(const GeneratorSpec& spec,
                                                 const std::vector<int>& complexities,
                                                 const Estimator& mle_estimator,
                                                 const Estimator& bayes_estimator,
                                                 int replicates, int test_points,
                                                 std::uint64_t master_seed);

// Exact conjugate log-evidence per degree on data-orthonormal designs with
// the given prior schedule; noise variance is known.
std::vector<std::pair<int, double>> evidence_sweep(const Dataset& data,
                                                   const std::vector<int>& degrees,
                                                   const PriorSchedule& prior,
                                                   double noise_variance);

}  // namespace ddlab
