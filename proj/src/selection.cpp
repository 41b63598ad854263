#include "ddlab/selection.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace ddlab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double bic(double mle_loglik, int k, double n) {
  if (k < 0) throw DomainViolation("bic: k must be >= 0");
  if (!(n >= 1.0)) throw DomainViolation("bic: n must be >= 1");
  return mle_loglik - 0.5 * static_cast<double>(k) * std::log(n);
}

double laplace_log_evidence(const std::function<double(const Vector&)>& log_post,
                            const Vector& theta_hat, double mode_tol, double fd_step) {
  if (!(mode_tol > 0.0)) throw DomainViolation("laplace_log_evidence: mode_tol must be > 0");
  if (!(fd_step > 0.0)) throw DomainViolation("laplace_log_evidence: fd_step must be > 0");
  const Eigen::Index k = theta_hat.size();
  if (k < 1) throw DimensionError("laplace_log_evidence: empty theta_hat");

  Vector h(k);
  for (Eigen::Index j = 0; j < k; ++j) h[j] = std::max(fd_step, fd_step * std::abs(theta_hat[j]));

  const double f0 = log_post(theta_hat);
  Vector fp(k), fm(k), g(k);
  {
    Vector th = theta_hat;
    for (Eigen::Index j = 0; j < k; ++j) {
      th[j] = theta_hat[j] + h[j];
      fp[j] = log_post(th);
      th[j] = theta_hat[j] - h[j];
      fm[j] = log_post(th);
      th[j] = theta_hat[j];
      g[j] = (fp[j] - fm[j]) / (2.0 * h[j]);
    }
  }
  if (!(g.norm() < mode_tol))
    throw NotAtModeError("laplace_log_evidence: finite-difference gradient norm " +
                         std::to_string(g.norm()) + " is not below mode_tol " +
                         std::to_string(mode_tol) + "; theta_hat is not at a mode");

  Matrix H(k, k);
  for (Eigen::Index j = 0; j < k; ++j) H(j, j) = (fp[j] - 2.0 * f0 + fm[j]) / (h[j] * h[j]);
  {
    Vector th = theta_hat;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        double quad = 0.0;
        for (int si = -1; si <= 1; si += 2) {
          for (int sj = -1; sj <= 1; sj += 2) {
            th[i] = theta_hat[i] + si * h[i];
            th[j] = theta_hat[j] + sj * h[j];
            quad += si * sj * log_post(th);
          }
        }
        th[i] = theta_hat[i];
        th[j] = theta_hat[j];
        H(i, j) = H(j, i) = quad / (4.0 * h[i] * h[j]);
      }
    }
  }

  SpdFactor F;
  try {
    F = cholesky(Matrix(-H));
  } catch (const NotSpdError& e) {
    throw NotSpdError(std::string("laplace_log_evidence: -Hessian at theta_hat is not positive "
                                  "definite (") +
                          e.what() + ")",
                      e.pivot);
  }
  return f0 + 0.5 * static_cast<double>(k) * kLog2Pi - 0.5 * logdet_spd(F);
}

Vector normalize_log_weights(const Vector& log_w) {
  if (log_w.size() == 0) throw DimensionError("normalize_log_weights: empty input");
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < log_w.size(); ++i) mx = std::max(mx, log_w[i]);
  if (!std::isfinite(mx))
    throw Error("normalize_log_weights: no finite weight to normalize against");
  Vector p = (log_w.array() - mx).exp();
  return p / p.sum();
}

EvidenceReport model_posterior(const ModelList& list, const Vector& y) {
  const auto j_count = static_cast<Eigen::Index>(list.models.size());
  if (j_count == 0) throw DimensionError("model_posterior: empty model list");
  if (list.prior_probs.size() != j_count)
    throw DimensionError("model_posterior: prior length does not match model count");
  double prior_sum = 0.0;
  for (Eigen::Index j = 0; j < j_count; ++j) {
    if (list.prior_probs[j] < 0.0)
      throw DomainViolation("model_posterior: negative prior probability");
    prior_sum += list.prior_probs[j];
  }
  if (std::abs(prior_sum - 1.0) > 1e-12)
    throw DomainViolation("model_posterior: prior probabilities must sum to 1 within 1e-12");

  EvidenceReport report;
  Vector log_w(j_count);
  for (Eigen::Index j = 0; j < j_count; ++j) {
    const GaussianLinearModel& m = list.models[j];
    if (m.design.matrix.rows() != y.size())
      throw DimensionError("model_posterior: model " + std::to_string(j) +
                           " has design rows != y length");
    ModelEvidence e;
    const PosteriorSummary post = posterior(m, y);
    e.log_evidence = post.log_evidence;
    e.k = static_cast<int>(m.design.matrix.cols());
    e.n = static_cast<int>(m.design.matrix.rows());
    e.mle_loglik = mle_loglik(m, y);
    e.bic_value = bic(e.mle_loglik, e.k, static_cast<double>(e.n));

    const Matrix& A = m.design.matrix;
    const double s2 = m.noise_variance;
    const Vector& c = m.prior_variances;
    const double nn = static_cast<double>(e.n);
    auto log_joint = [&A, &c, &y, s2, nn](const Vector& th) {
      double v = -0.5 * nn * (kLog2Pi + std::log(s2)) -
                 0.5 * (y - A * th).squaredNorm() / s2;
      for (Eigen::Index q = 0; q < th.size(); ++q)
        v += -0.5 * (kLog2Pi + std::log(c[q])) - 0.5 * th[q] * th[q] / c[q];
      return v;
    };
    e.laplace_log_evidence = laplace_log_evidence(log_joint, post.mean, 1e-3);

    log_w[j] = e.log_evidence + std::log(list.prior_probs[j]);
    report.per_model.push_back(e);
  }
  report.posterior_probs = normalize_log_weights(log_w);
  return report;
}

double bayes_factor(const EvidenceReport& report, int i, int j) {
  const int m = static_cast<int>(report.per_model.size());
  if (i < 0 || j < 0 || i >= m || j >= m)
    throw Error("bayes_factor: index out of range (have " + std::to_string(m) + " models)");
  return std::exp(report.per_model[i].log_evidence - report.per_model[j].log_evidence);
}

// --- discrete hypotheses ---

Rat::Rat(long long num, long long den) {
  if (den == 0) throw Error("Rat: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  n = (g != 0) ? num / g : 0;
  d = (g != 0) ? den / g : 1;
  if (n == 0) d = 1;
}

Rat operator+(const Rat& a, const Rat& b) { return Rat(a.n * b.d + b.n * a.d, a.d * b.d); }
Rat operator-(const Rat& a, const Rat& b) { return Rat(a.n * b.d - b.n * a.d, a.d * b.d); }
Rat operator*(const Rat& a, const Rat& b) { return Rat(a.n * b.n, a.d * b.d); }
Rat operator/(const Rat& a, const Rat& b) {
  if (b.n == 0) throw Error("Rat: division by zero");
  return Rat(a.n * b.d, a.d * b.n);
}

DiscreteEvidence discrete_evidence(const DiscreteHypothesis& h, const std::vector<long long>& D) {
  if (h.grid_size <= 0) throw DomainViolation("discrete_evidence: empty grid");
  const int len = static_cast<int>(D.size());
  std::vector<Rat> target(D.size());
  for (size_t i = 0; i < D.size(); ++i) target[i] = Rat(D[i], 1);
  long long count = 0;
  for (long long idx = 0; idx < h.grid_size; ++idx) {
    if (h.generator(idx, len) == target) ++count;
  }
  return {count, h.grid_size, static_cast<double>(count) / static_cast<double>(h.grid_size)};
}

DiscreteHypothesis arithmetic_hypothesis(long long lo, long long hi) {
  if (lo > hi) throw DomainViolation("arithmetic_hypothesis: lo > hi");
  const long long side = hi - lo + 1;
  DiscreteHypothesis h;
  h.name = "arithmetic[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
  h.grid_size = side * side;
  h.generator = [lo, side](long long index, int len) {
    const long long n0 = lo + index % side;
    const long long n = lo + index / side;
    std::vector<Rat> out(len);
    for (int x = 1; x <= len; ++x) out[x - 1] = Rat(n0 + (x - 1) * n, 1);
    return out;
  };
  return h;
}

namespace {

// All reduced fractions num/den with |num| <= max_num, den in {1..max_den}.
std::vector<Rat> cubic_grid_values(long long max_num, long long max_den) {
  if (max_num < 0 || max_den < 1)
    throw DomainViolation("cubic hypothesis: need max_num >= 0 and max_den >= 1");
  std::vector<Rat> values;
  for (long long den = 1; den <= max_den; ++den)
    for (long long num = -max_num; num <= max_num; ++num)
      if (std::gcd(num < 0 ? -num : num, den) == 1) values.emplace_back(num, den);
  return values;
}

bool in_cubic_grid(const Rat& r, long long max_num, long long max_den) {
  return r.d <= max_den && r.n <= max_num && r.n >= -max_num;
}

// Unique polynomial of degree <= m-1 through (x = 1..m, values), by Newton
// divided differences; returns monomial coefficients c_0..c_{m-1}.
std::vector<Rat> interpolate_unit_knots(const std::vector<Rat>& values) {
  const int m = static_cast<int>(values.size());
  std::vector<Rat> dd = values;
  std::vector<Rat> newton(m);
  newton[0] = dd[0];
  for (int level = 1; level < m; ++level) {
    for (int i = 0; i + level < m; ++i)
      dd[i] = (dd[i + 1] - dd[i]) / Rat(level, 1);  // knots are 1..m, spacing 1
    newton[level] = dd[0];
  }
  // expand a_0 + a_1 (x-1) + a_2 (x-1)(x-2) + ...
  std::vector<Rat> coef(m, Rat(0, 1));
  std::vector<Rat> basis{Rat(1, 1)};
  for (int k = 0; k < m; ++k) {
    for (size_t t = 0; t < basis.size(); ++t) coef[t] = coef[t] + newton[k] * basis[t];
    if (k + 1 < m) {
      // basis *= (x - (k+1))
      std::vector<Rat> next(basis.size() + 1, Rat(0, 1));
      const Rat shift(-(k + 1), 1);
      for (size_t t = 0; t < basis.size(); ++t) {
        next[t] = next[t] + basis[t] * shift;
        next[t + 1] = next[t + 1] + basis[t];
      }
      basis = std::move(next);
    }
  }
  return coef;
}

Rat eval_poly(const std::vector<Rat>& coef, long long x) {
  Rat v(0, 1);
  for (size_t k = coef.size(); k-- > 0;) v = v * Rat(x, 1) + coef[k];
  return v;
}

}  // namespace

long long cubic_grid_size(long long max_num, long long max_den) {
  const long long v = static_cast<long long>(cubic_grid_values(max_num, max_den).size());
  return v * v * v * v;
}

DiscreteHypothesis cubic_hypothesis_enumerated(long long max_num, long long max_den) {
  auto values = cubic_grid_values(max_num, max_den);
  const long long v = static_cast<long long>(values.size());
  DiscreteHypothesis h;
  h.name = "cubic[num<=" + std::to_string(max_num) + ";den<=" + std::to_string(max_den) + "]";
  h.grid_size = v * v * v * v;
  h.generator = [values = std::move(values), v](long long index, int len) {
    std::vector<Rat> coef(4);
    for (int k = 0; k < 4; ++k) {
      coef[k] = values[index % v];
      index /= v;
    }
    std::vector<Rat> out(len);
    for (int x = 1; x <= len; ++x) out[x - 1] = eval_poly(coef, x);
    return out;
  };
  return h;
}

DiscreteEvidence cubic_evidence(const std::vector<long long>& D, long long max_num,
                                long long max_den) {
  if (D.size() < 2) throw DomainViolation("cubic_evidence: need at least 2 data values");
  const auto values = cubic_grid_values(max_num, max_den);
  const long long v = static_cast<long long>(values.size());
  const long long grid = v * v * v * v;
  const int len = static_cast<int>(D.size());
  const int m = std::min(len, 4);  // constrained coefficients

  std::vector<Rat> target(D.size());
  for (size_t i = 0; i < D.size(); ++i) target[i] = Rat(D[i], 1);

  long long count = 0;
  const int free_coeffs = 4 - m;
  long long combos = 1;
  for (int t = 0; t < free_coeffs; ++t) combos *= v;
  for (long long idx = 0; idx < combos; ++idx) {
    // choose the top coefficients c_m..c_3 from the grid, then the bottom
    // part is pinned by interpolation through the first m points
    std::vector<Rat> top(free_coeffs);
    long long rem = idx;
    for (int t = 0; t < free_coeffs; ++t) {
      top[t] = values[rem % v];  // top[t] = c_{m+t}
      rem /= v;
    }
    std::vector<Rat> lower_vals(m);
    for (int x = 1; x <= m; ++x) {
      Rat resid = target[x - 1];
      Rat xp(1, 1);
      for (int e = 0; e < m; ++e) xp = xp * Rat(x, 1);  // x^m
      for (int t = 0; t < free_coeffs; ++t) {
        resid = resid - top[t] * xp;
        xp = xp * Rat(x, 1);
      }
      lower_vals[x - 1] = resid;
    }
    std::vector<Rat> coef = interpolate_unit_knots(lower_vals);
    coef.resize(4, Rat(0, 1));
    for (int t = 0; t < free_coeffs; ++t) coef[m + t] = top[t];

    bool ok = true;
    for (int k = 0; k < 4 && ok; ++k) ok = in_cubic_grid(coef[k], max_num, max_den);
    for (int x = m + 1; x <= len && ok; ++x) ok = (eval_poly(coef, x) == target[x - 1]);
    if (ok) ++count;
  }
  return {count, grid, static_cast<double>(count) / static_cast<double>(grid)};
}

}  // namespace ddlab
