// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Run via ctest or directly; exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "ddlab/config.hpp"
#include "ddlab/csv.hpp"
#include "ddlab/ebayes.hpp"
#include "ddlab/errors.hpp"
#include "ddlab/risklab.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/selection.hpp"
#include "oracles.hpp"

using namespace ddlab;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// Design wrapper around an explicit matrix; the evidence/posterior code only
// reads .matrix, so the evaluation state can stay trivial here.
DesignMatrix raw_design(Matrix a) {
  DesignMatrix dm;
  dm.basis.kind = BasisKind::data_orthonormal;
  dm.basis.degree_or_width = static_cast<int>(a.cols()) - 1;
  dm.points = Vector::LinSpaced(a.rows(), -1.0, 1.0);
  dm.r_inv = Matrix::Identity(a.cols(), a.cols());
  dm.matrix = std::move(a);
  return dm;
}

// Unnormalized log posterior of the conjugate model: Gaussian likelihood plus
// the diagonal Gaussian prior. Its integral is the exact evidence.
std::function<double(const Vector&)> log_joint(const GaussianLinearModel& m, const Vector& y) {
  return [&m, &y](const Vector& theta) {
    const double n = static_cast<double>(y.size());
    const Vector r = y - m.design.matrix * theta;
    double lp = -0.5 * n * std::log(2.0 * M_PI * m.noise_variance) -
                0.5 * r.squaredNorm() / m.noise_variance;
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      lp += -0.5 * std::log(2.0 * M_PI * m.prior_variances[j]) -
            0.5 * theta[j] * theta[j] / m.prior_variances[j];
    return lp;
  };
}

GaussianLinearModel random_conjugate_model(std::uint64_t seed, int max_rows, int max_cols) {
  Rng rng(seed);
  const int p = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_cols));
  const int lo = p + 1;
  const int n = lo + static_cast<int>(rng.next_u64() %
                                      static_cast<std::uint64_t>(std::max(1, max_rows - lo)));
  Matrix a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal() / std::sqrt(static_cast<double>(n));
  GaussianLinearModel m;
  m.design = raw_design(std::move(a));
  m.prior_variances.resize(p);
  for (int j = 0; j < p; ++j) m.prior_variances[j] = 0.3 + 1.7 * rng.uniform01();
  m.noise_variance = 0.3 + rng.uniform01();
  return m;
}

Vector random_response(const GaussianLinearModel& m, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = m.design.matrix.rows();
  const Eigen::Index p = m.design.matrix.cols();
  Vector theta(p);
  for (Eigen::Index j = 0; j < p; ++j)
    theta[j] = std::sqrt(m.prior_variances[j]) * rng.normal();
  Vector y = m.design.matrix * theta;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += std::sqrt(m.noise_variance) * rng.normal();
  return y;
}

// --- criteria -------------------------------------------------------------

bool occam_exact_value(std::string& detail) {
  const std::vector<long long> data{-1, 3, 7, 11};
  const DiscreteHypothesis hyp = arithmetic_hypothesis();
  DiscreteEvidence ev;
  double best = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    ev = discrete_evidence(hyp, data);
    best = std::min(best, seconds_since(t0));
  }
  if (ev.count != 1 || ev.grid_size != 10201) {
    detail = "count " + std::to_string(ev.count) + "/" + std::to_string(ev.grid_size) +
             ", expected 1/10201";
    return false;
  }
  if (ev.evidence != 1.0 / 10201.0) {
    detail = "evidence " + num(ev.evidence) + " is not exactly 1/10201";
    return false;
  }
  if (best >= 1e-3) {
    detail = "took " + num(best) + " s, limit 1 ms";
    return false;
  }
  detail = "evidence 1/10201, " + num(best * 1e6) + " us";
  return true;
}

bool laplace_gaussian_exactness(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const GaussianLinearModel m = random_conjugate_model(5000 + i, 40, 10);
    const Vector y = random_response(m, 6000 + i);
    const PosteriorSummary post = posterior(m, y);
    const double lap = laplace_log_evidence(log_joint(m, y), post.mean, 1e-3);
    worst = std::max(worst, std::abs(lap - post.log_evidence));
  }
  const double secs = seconds_since(t0);
  detail = "max |laplace - exact| = " + num(worst) + ", " + num(secs) + " s";
  if (worst >= 1e-6) return false;
  if (secs >= 5.0) {
    detail += " (limit 5 s)";
    return false;
  }
  return true;
}

bool quadrature_oracle(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rel = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(7000 + i);
    const int n = 10 + static_cast<int>(rng.next_u64() % 31);
    Matrix a(n, 2);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < 2; ++c) a(r, c) = rng.normal() / std::sqrt(static_cast<double>(n));
    GaussianLinearModel m;
    m.design = raw_design(std::move(a));
    m.prior_variances = Vector(2);
    m.prior_variances[0] = 0.5 + rng.uniform01();
    m.prior_variances[1] = 0.5 + rng.uniform01();
    m.noise_variance = 0.36 + rng.uniform01();
    const Vector y = random_response(m, 7500 + i);

    const double exact = log_evidence(m, y);
    const auto lj = log_joint(m, y);
    const double w0 = 8.0 * std::sqrt(m.prior_variances[0]);
    const double w1 = 8.0 * std::sqrt(m.prior_variances[1]);
    const double quad = oracle::log_trapezoid_2d(
        [&lj](double t0v, double t1v) {
          Vector th(2);
          th[0] = t0v;
          th[1] = t1v;
          return lj(th);
        },
        -w0, w0, -w1, w1, 400);
    worst_rel = std::max(worst_rel, std::abs(exact - quad) / std::abs(exact));
  }
  const double secs = seconds_since(t0);
  detail = "max relative error " + num(worst_rel) + ", " + num(secs) + " s";
  if (worst_rel >= 1e-6) return false;
  if (secs >= 30.0) {
    detail += " (limit 30 s)";
    return false;
  }
  return true;
}

bool pava_oracle_equivalence(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, worst_idem = 0.0, worst_maxmin = 0.0;
  Rng rng(8000);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);  // lengths 2..6
    Vector v(n), w(n);
    for (int i = 0; i < n; ++i) {
      v[i] = 4.0 * rng.normal();
      w[i] = 0.25 + 3.0 * rng.uniform01();
    }
    const auto [fit, blocks] = pava(v, w);
    const Vector brute = oracle::isotonic_exhaustive(v, w);
    worst = std::max(worst, (fit - brute).cwiseAbs().maxCoeff());
    const auto [refit, reblocks] = pava(fit, w);
    worst_idem = std::max(worst_idem, (refit - fit).cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
      worst_maxmin =
          std::max(worst_maxmin, std::abs(fit[i] - oracle::isotonic_maxmin_value(v, w, i)));
  }
  const double secs = seconds_since(t0);
  detail = "max |pava - oracle| = " + num(worst) + ", idempotence " + num(worst_idem) +
           ", max-min " + num(worst_maxmin) + ", " + num(secs) + " s";
  if (worst >= 1e-10 || worst_idem >= 1e-10 || worst_maxmin >= 1e-10) return false;
  if (secs >= 10.0) {
    detail += " (limit 10 s)";
    return false;
  }
  return true;
}

struct SweepData {
  std::vector<RiskCurvePoint> curve;
  double seconds = 0.0;
};

const SweepData& shared_sweep() {
  static const SweepData data = [] {
    SweepData d;
    const auto t0 = std::chrono::steady_clock::now();
    GeneratorSpec spec;  // N=20, noise_sd 0.3, true degree 10
    Estimator mn;
    Estimator bayes;
    bayes.kind = Estimator::Kind::bayes;  // young_decay, tau2 = 1
    std::vector<int> complexities;
    for (int c = 2; c <= 80; ++c) complexities.push_back(c);
    d.curve = double_descent_sweep(spec, complexities, mn, bayes, 100, 256, 20260814);
    d.seconds = seconds_since(t0);
    return d;
  }();
  return data;
}

const RiskCurvePoint& point_at(const std::vector<RiskCurvePoint>& curve, int c) {
  for (const RiskCurvePoint& p : curve)
    if (p.complexity == c) return p;
  throw Error("no sweep point at complexity " + std::to_string(c));
}

bool double_descent_shape(std::string& detail) {
  const SweepData& data = shared_sweep();
  const double at10 = oracle::median(point_at(data.curve, 10).mle_samples);
  const double at20 = oracle::median(point_at(data.curve, 20).mle_samples);
  const double at80 = oracle::median(point_at(data.curve, 80).mle_samples);
  double worst_train = 0.0;
  for (const RiskCurvePoint& p : data.curve)
    if (p.complexity >= 20) worst_train = std::max(worst_train, p.train_mse);
  detail = "median mle risk " + num(at10) + " @10, " + num(at20) + " @20, " + num(at80) +
           " @80; max train_mse beyond threshold " + num(worst_train) + "; sweep " +
           num(data.seconds) + " s";
  if (!(at20 > at10 && at20 > at80)) return false;
  if (!(worst_train < 1e-12)) return false;
  if (data.seconds >= 120.0) {
    detail += " (limit 120 s)";
    return false;
  }
  return true;
}

bool bayes_finite_at_threshold(std::string& detail) {
  const SweepData& data = shared_sweep();
  const RiskCurvePoint& p = point_at(data.curve, 20);  // complexity = N
  for (Eigen::Index i = 0; i < p.bayes_samples.size(); ++i)
    if (!std::isfinite(p.bayes_samples[i])) {
      detail = "bayes risk sample " + std::to_string(i) + " not finite";
      return false;
    }
  const double med_b = oracle::median(p.bayes_samples);
  const double med_m = oracle::median(p.mle_samples);
  const double frac = oracle::bootstrap_median_greater(p.mle_samples, p.bayes_samples, 2000, 99);
  detail = "median bayes " + num(med_b) + " vs mle " + num(med_m) + " at complexity 20; " +
           num(100.0 * frac) + "% of bootstrap resamples agree";
  return med_b < med_m && frac >= 0.95;
}

bool evidence_peak(std::string& detail) {
  GeneratorSpec spec;  // the section-5 defaults; coefficients drawn per seed
  PriorSchedule prior;
  prior.kind = PriorSchedule::Kind::constant;
  prior.tau2 = 1.0;
  std::vector<int> degrees;
  for (int d = 0; d <= 19; ++d) degrees.push_back(d);
  std::vector<double> argmaxes;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto sweep = evidence_sweep(generate(spec, seed), degrees, prior, 0.09);
    int best = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i)
      if (sweep[i].second > sweep[static_cast<std::size_t>(best)].second)
        best = static_cast<int>(i);
    argmaxes.push_back(static_cast<double>(sweep[static_cast<std::size_t>(best)].first));
  }
  const double med = oracle::median(argmaxes);
  detail = "median argmax degree " + num(med) + " over 50 seeds (true degree 10)";
  return std::abs(med - 10.0) <= 2.0;
}

bool shrinkage_identity(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(9000 + i);
    const int n = 12 + static_cast<int>(rng.next_u64() % 19);
    const int degree = 1 + static_cast<int>(rng.next_u64() % 6);  // d = n-degree-1 >= 4
    Vector x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x[k] = -1.0 + 2.0 * rng.uniform01();
      y[k] = rng.normal();
    }
    std::sort(x.data(), x.data() + n);
    const DesignMatrix q = data_orthonormal_design(x, degree);
    CoefficientStats stats;
    stats.theta_hat = ols(q, y);
    const auto [s, d] = residual_stats(q, y);
    stats.s = s;
    stats.d = d;
    stats.N = n;
    const PavaWeights mode = (i % 2 == 0) ? PavaWeights::unit : PavaWeights::curvature;
    const PavaFit fit = deaton_fit(stats, default_schedule(degree), mode);
    const Vector shrunk = shrinkage_posterior_means(stats, fit);

    Vector c(degree + 1);
    for (int k = 0; k <= degree; ++k)
      c[k] = std::max(fit.sigma2_hat * (1.0 - fit.z[k]) / fit.z[k], 1e-14);
    const GaussianLinearModel m{q, c, fit.sigma2_hat};
    worst = std::max(worst, (posterior(m, y).mean - shrunk).cwiseAbs().maxCoeff());
  }
  detail = "max |shrunk - posterior mean| = " + num(worst) + " over 100 fits";
  return worst < 1e-10;
}

bool gradient_checks(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(10000 + i);
    const int p1 = 1 + static_cast<int>(rng.next_u64() % 8);
    CoefficientStats stats;
    stats.theta_hat.resize(p1);
    for (int k = 0; k < p1; ++k) stats.theta_hat[k] = 2.0 * rng.normal();
    stats.d = 3 + static_cast<int>(rng.next_u64() % 10);
    stats.N = p1 + stats.d;
    stats.s = 0.1 + stats.d * 0.3 * rng.uniform01();
    Vector z(p1);
    for (int k = 0; k < p1; ++k) z[k] = 0.05 + 0.9 * rng.uniform01();
    const double sigma2 = 0.2 + 2.0 * rng.uniform01();

    const Vector analytic = joint_hyper_grad(stats, z, sigma2);
    Vector x(p1 + 1);
    x.head(p1) = z;
    x[p1] = sigma2;
    const Vector fd = oracle::fd_gradient(
        [&stats, p1](const Vector& t) { return joint_hyper_loglik(stats, t.head(p1), t[p1]); },
        x, 1e-5);
    worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff());
  }
  detail = "max |analytic - central FD| = " + num(worst) + " over 100 interior points";
  return worst < 1e-6;
}

// --- criterion 10: byte-identical CLI reruns -------------------------------

struct Scratch {
  std::filesystem::path path;
  Scratch() {
    path = std::filesystem::temp_directory_path() /
           ("ddlab_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

int run_tool(const std::string& bin, const std::string& args, const Scratch& s) {
  const std::string cmd = bin + " " + args + " >" + s.sub("stdout.txt") + " 2>" +
                          s.sub("stderr.txt");
  const int status = std::system(cmd.c_str());
  return (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

bool cli_determinism(std::string& detail) {
  const char* bin = std::getenv("DDLAB_BIN");
  if (!bin) {
    detail = "DDLAB_BIN not set";
    return false;
  }
  Scratch s;
  struct Case {
    const char* name;
    std::string config;
    std::string extra_flags;
    std::vector<const char*> artifacts;
  };
  const std::vector<Case> cases = {
      {"gen", R"({"version": 1, "seed": 7, "generator": {}})", "",
       {"dataset.csv", "dataset.json"}},
      {"sweep",
       R"({"version": 1, "seed": 3, "generator": {},
           "sweep": {"complexities": [2, 4, 6], "replicates": 2, "test_points": 16}})",
       " --svg", {"risk_curve.csv", "risk_curve.svg"}},
      {"evidence",
       R"({"version": 1, "generator": {},
           "evidence": {"degrees": [0, 1, 2, 3, 4], "seeds": [1, 2]}})",
       " --svg", {"evidence_curve.csv", "evidence_curve.svg"}},
      {"deaton",
       R"({"version": 1, "seed": 5, "generator": {}, "deaton": {"degree": 4}})", "",
       {"deaton_fit.csv"}},
      {"occam", R"({"version": 1, "occam": {"data": [-1, 3, 7, 11]}})", "", {"occam.csv"}},
  };
  for (const Case& c : cases) {
    const std::string cfg = s.sub(std::string(c.name) + ".json");
    write_file(cfg, c.config);
    for (int run = 1; run <= 2; ++run) {
      const std::string out = s.sub(std::string(c.name) + "_run" + std::to_string(run));
      const int code =
          run_tool(bin, std::string(c.name) + " -c " + cfg + " -o " + out + c.extra_flags, s);
      if (code != 0) {
        detail = std::string(c.name) + " run " + std::to_string(run) + " exited " +
                 std::to_string(code);
        return false;
      }
    }
    for (const char* artifact : c.artifacts) {
      const std::string a = read_file(s.sub(std::string(c.name) + "_run1/") + artifact);
      const std::string b = read_file(s.sub(std::string(c.name) + "_run2/") + artifact);
      if (a != b) {
        detail = std::string(c.name) + ": " + artifact + " differs between reruns";
        return false;
      }
    }
  }
  detail = "all 5 commands byte-identical across reruns";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    bool (*fn)(std::string&);
  };
  const Criterion criteria[] = {
      {1, "occam-exact-value", occam_exact_value},
      {2, "laplace-gaussian-exactness", laplace_gaussian_exactness},
      {3, "quadrature-oracle", quadrature_oracle},
      {4, "pava-oracle-equivalence", pava_oracle_equivalence},
      {5, "double-descent-shape", double_descent_shape},
      {6, "bayes-finite-at-threshold", bayes_finite_at_threshold},
      {7, "evidence-peak", evidence_peak},
      {8, "shrinkage-identity", shrinkage_identity},
      {9, "gradient-checks", gradient_checks},
      {10, "cli-determinism", cli_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    std::string line = "ACCEPTANCE " + std::to_string(c.id) + " " + c.name + ": " +
                       (ok ? "PASS" : "FAIL");
    if (!detail.empty()) line += " (" + detail + ")";
    std::puts(line.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
