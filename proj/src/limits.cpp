#include "trapgap/limits.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include "trapgap/error.hpp"

namespace trapgap {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_count(std::size_t m, ErrorCode code) {
  if (m == 0) throw Error(code, "at least one trap is required");
  if (m > kMaxTraps)
    throw Error(code, "more than " + std::to_string(kMaxTraps) + " traps");
}

// Shared precondition of the secular routines.
void validate_sigma_b(const std::vector<double>& sigma,
                      const std::vector<double>& b) {
  if (sigma.size() != b.size())
    throw Error(ErrorCode::InvalidArgument, "sigma and b differ in length");
  check_count(sigma.size(), ErrorCode::InvalidArgument);
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j] > 0.0) || !std::isfinite(b[j]))
      throw Error(ErrorCode::InvalidArgument, "b must be positive", j);
    if (!(sigma[j] > 0.0) || !std::isfinite(sigma[j]))
      throw Error(ErrorCode::InvalidArgument, "sigma must be positive", j);
    total += b[j];
  }
  if (!(total < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "trap volumes must sum below 1, got " + fmt(total));
  for (std::size_t j = 0; j + 1 < sigma.size(); ++j) {
    if (!(sigma[j + 1] - sigma[j] >= kSigmaSeparation * sigma[j + 1]))
      throw Error(ErrorCode::NonMonotoneSigma,
                  "sigma_" + std::to_string(j + 1) + "=" + fmt(sigma[j]) +
                      " is not separated from sigma_" + std::to_string(j + 2) +
                      "=" + fmt(sigma[j + 1]),
                  j);
  }
}

double exterior_volume(const std::vector<double>& b) {
  return 1.0 - std::accumulate(b.begin(), b.end(), 0.0);
}

// Terms c_j/(sigma_j - lambda) with c_j = sigma_j b_j / |B_{m+1}|.
struct RationalSecular {
  std::vector<double> sigma;
  std::vector<double> c;

  RationalSecular(const std::vector<double>& s, const std::vector<double>& b)
      : sigma(s), c(s.size()) {
    const double ext = exterior_volume(b);
    for (std::size_t j = 0; j < s.size(); ++j) c[j] = s[j] * b[j] / ext;
  }

  struct Eval {
    double value;
    double slope;
    double scale;
  };

  Eval operator()(double lambda) const {
    Eval e{1.0, 0.0, 1.0};
    for (std::size_t j = 0; j < sigma.size(); ++j) {
      const double t = c[j] / (sigma[j] - lambda);
      e.value += t;
      e.slope += t / (sigma[j] - lambda);
      e.scale += std::abs(t);
    }
    return e;
  }
};

constexpr double kPolishResidual = 1e-13;

// f is increasing on (lo, hi) and changes sign there; safeguarded Newton.
double polish_root(const RationalSecular& f, double lo, double hi,
                   double guess) {
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const auto e = f(x);
    if (std::abs(e.value) <= kPolishResidual * e.scale) return x;
    if (e.value < 0.0)
      lo = x;
    else
      hi = x;
    double next = x - e.value / e.slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::abs(x)) {
      return x;
    }
    x = next;
  }
  return x;
}

}  // namespace

double SecularCoefficients::operator()(double lambda) const {
  double acc = 0.0;
  for (double a : A) acc = acc * lambda + a;
  return acc;
}

double default_kappa(int n, double override_kappa) {
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (n == 2) return 0.0;
  if (override_kappa > 0.0) return override_kappa;
  if (n == 3) return kUnitDiscCapacity3D;
  throw Error(ErrorCode::InvalidArgument,
              "kappa must be supplied for n >= 4");
}

const GapTargets& validate_targets(const GapTargets& targets) {
  const auto& iv = targets.intervals;
  check_count(iv.size(), ErrorCode::OrderingViolation);
  if (!(iv[0].first > 0.0))
    throw Error(ErrorCode::OrderingViolation, "alpha_1 must be positive", 0);
  for (std::size_t j = 0; j < iv.size(); ++j) {
    if (!(iv[j].first < iv[j].second))
      throw Error(ErrorCode::OrderingViolation,
                  "alpha_" + std::to_string(j + 1) + " < beta_" +
                      std::to_string(j + 1) + " fails",
                  j);
    if (j + 1 < iv.size() && !(iv[j].second < iv[j + 1].first))
      throw Error(ErrorCode::OrderingViolation,
                  "beta_" + std::to_string(j + 1) + " < alpha_" +
                      std::to_string(j + 2) + " fails",
                  j);
  }
  if (!(iv.back().second < targets.L))
    throw Error(ErrorCode::OrderingViolation, "beta_m < L fails",
                iv.size() - 1);
  return targets;
}

LimitSpectrum spectrum_from_targets(const GapTargets& targets) {
  validate_targets(targets);
  LimitSpectrum spec;
  for (const auto& [a, b] : targets.intervals) {
    spec.sigma.push_back(a);
    spec.mu.push_back(b);
  }
  return spec;
}

void validate_spectrum(const LimitSpectrum& spec) {
  if (spec.sigma.size() != spec.mu.size())
    throw Error(ErrorCode::InvalidArgument, "sigma and mu differ in length");
  check_count(spec.size(), ErrorCode::NotInG);
  const auto& s = spec.sigma;
  const auto& u = spec.mu;
  if (!(s[0] > 0.0)) throw Error(ErrorCode::NotInG, "sigma_1 must be positive", 0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!std::isfinite(s[j]) || !std::isfinite(u[j]))
      throw Error(ErrorCode::NotInG, "non-finite endpoint", j);
    if (!(s[j] < u[j]))
      throw Error(ErrorCode::NotInG, "sigma_j < mu_j fails", j);
    if (j + 1 < s.size() && !(u[j] < s[j + 1]))
      throw Error(ErrorCode::NotInG, "mu_j < sigma_{j+1} fails", j);
  }
}

void validate_design(const DesignParams& p) {
  if (p.n < 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (p.d.size() != p.b.size())
    throw Error(ErrorCode::InvalidArgument, "d and b differ in length");
  check_count(p.d.size(), ErrorCode::InvalidArgument);
  if (p.n >= 3 && !(p.kappa > 0.0))
    throw Error(ErrorCode::InvalidArgument, "kappa must be positive for n >= 3");
  double total = 0.0;
  for (std::size_t j = 0; j < p.d.size(); ++j) {
    if (!(p.d[j] > 0.0) || !std::isfinite(p.d[j]))
      throw Error(ErrorCode::InvalidArgument, "d must be positive", j);
    if (!(p.b[j] > 0.0) || !std::isfinite(p.b[j]))
      throw Error(ErrorCode::InvalidArgument, "b must be positive", j);
    total += p.b[j];
  }
  if (!(total < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "trap volumes must sum below 1, got " + fmt(total));
}

std::vector<double> sigma_from_design(const DesignParams& p) {
  validate_design(p);
  std::vector<double> sigma(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p.n == 2)
      sigma[j] = std::numbers::pi * p.d[j] / (2.0 * p.b[j]);
    else
      sigma[j] = p.kappa * std::pow(p.d[j], p.n - 2) / (4.0 * p.b[j]);
  }
  for (std::size_t j = 0; j + 1 < sigma.size(); ++j) {
    if (!(sigma[j + 1] - sigma[j] >= kSigmaSeparation * sigma[j + 1]))
      throw Error(ErrorCode::NonMonotoneSigma,
                  "sigma must increase strictly, sigma_" + std::to_string(j + 1) +
                      "=" + fmt(sigma[j]) + " sigma_" + std::to_string(j + 2) +
                      "=" + fmt(sigma[j + 1]),
                  j);
  }
  return sigma;
}

SecularCoefficients secular_coefficients(const std::vector<double>& sigma,
                                         const std::vector<double>& b) {
  validate_sigma_b(sigma, b);
  const std::size_t m = sigma.size();
  const double ext = exterior_volume(b);
  // e[k]: k-th elementary symmetric sum of sigma.
  // f[k]: sum over k-subsets of (product of sigma) * (sum of b).
  std::vector<double> e(m + 1, 0.0), f(m + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) {
      f[k] += sigma[i] * (f[k - 1] + b[i] * e[k - 1]);
      e[k] += sigma[i] * e[k - 1];
    }
  }
  SecularCoefficients out;
  out.A.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
    out.A[k] = sign * (ext * e[k] + f[k]);
  }
  return out;
}

double secular_residual(const std::vector<double>& sigma,
                        const std::vector<double>& b, double lambda) {
  const RationalSecular f(sigma, b);
  const auto e = f(lambda);
  return std::abs(e.value) / e.scale;
}

std::vector<double> solve_mu(const std::vector<double>& sigma,
                             const std::vector<double>& b) {
  const SecularCoefficients poly = secular_coefficients(sigma, b);
  const std::size_t m = sigma.size();

  // Companion matrix of the monic polynomial in t = lambda / scale.
  const double scale = sigma.back();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  double power = 1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    power *= scale;
    companion(0, k - 1) = -poly.A[k] / (poly.A[0] * power);
    if (k < m) companion(k, k - 1) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::RootCountMismatch, "companion eigensolve failed");

  std::vector<double> guesses;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) <= 1e-7 * std::max(1.0, std::abs(z)))
      guesses.push_back(z.real() * scale);
  }
  if (guesses.size() < m)
    throw Error(ErrorCode::RootCountMismatch,
                "found " + std::to_string(guesses.size()) + " real roots of " +
                    std::to_string(m));
  std::sort(guesses.begin(), guesses.end());

  const RationalSecular f(sigma, b);
  const double c_total = std::accumulate(f.c.begin(), f.c.end(), 0.0);
  std::vector<double> mu(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = sigma[j];
    const double hi = (j + 1 < m) ? sigma[j + 1] : sigma[j] + 2.0 * c_total;
    mu[j] = polish_root(f, lo, hi, guesses[j]);
    if (!(mu[j] > lo && mu[j] < hi) ||
        (j + 1 == m && !(mu[j] > sigma[j])))
      throw Error(ErrorCode::InterlacingFailure,
                  "root " + fmt(mu[j]) + " left its bracket (" + fmt(lo) +
                      ", " + fmt(hi) + ")",
                  j);
    // Next to a pole the residual is limited by the rounding of mu itself.
    const auto e = f(mu[j]);
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::abs(mu[j]) * e.slope;
    if (std::abs(e.value) > kPolishResidual * e.scale + floor)
      throw Error(ErrorCode::InterlacingFailure,
                  "root polish did not converge", j);
  }
  return mu;
}

Eigen::MatrixXd build_matrix_M(const std::vector<double>& sigma,
                               const std::vector<double>& b) {
  validate_sigma_b(sigma, b);
  const std::size_t m = sigma.size();
  Eigen::MatrixXd M(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    M(i, i) = (1.0 - b[i]) / sigma[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double v = -std::sqrt(b[i] * b[j] / (sigma[i] * sigma[j]));
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

std::vector<double> mu_via_matrix(const std::vector<double>& sigma,
                                  const std::vector<double>& b) {
  const Eigen::MatrixXd M = build_matrix_M(sigma, b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  std::vector<double> mu;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (std::abs(ev) < 1e-14)
      throw Error(ErrorCode::SingularM, "eigenvalue " + fmt(ev) + " of M",
                  static_cast<std::size_t>(i));
    mu.push_back(1.0 / ev);
  }
  std::sort(mu.begin(), mu.end());
  return mu;
}

LimitSpectrum forward(const DesignParams& p) {
  LimitSpectrum spec;
  spec.sigma = sigma_from_design(p);
  spec.mu = solve_mu(spec.sigma, p.b);
  return spec;
}

std::vector<double> rho_from_spectrum(const LimitSpectrum& spec) {
  validate_spectrum(spec);
  const auto& s = spec.sigma;
  const auto& u = spec.mu;
  const std::size_t m = s.size();
  std::vector<double> rho(m);
  for (std::size_t j = 0; j < m; ++j) {
    double r = (u[j] - s[j]) / s[j];
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) r *= (u[i] - s[j]) / (s[i] - s[j]);
    rho[j] = r;
  }
  return rho;
}

DesignParams inverse_design(const LimitSpectrum& spec, int n, double kappa) {
  const double cap = default_kappa(n, kappa);
  const std::vector<double> rho = rho_from_spectrum(spec);
  const std::size_t m = rho.size();
  for (std::size_t j = 0; j < m; ++j)
    if (!(rho[j] > 0.0))
      throw Error(ErrorCode::NotInG, "rho_j is not positive", j);

  // Back-substitute into 1 + sum_j sigma_j rho_j / (sigma_j - mu_k) = 0.
  for (std::size_t k = 0; k < m; ++k) {
    double sum = 1.0, scale = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double t = spec.sigma[j] * rho[j] / (spec.sigma[j] - spec.mu[k]);
      sum += t;
      scale += std::abs(t);
    }
    if (std::abs(sum) > 1e-10 * scale)
      throw Error(ErrorCode::InvalidArgument,
                  "rho back-substitution residual " + fmt(std::abs(sum) / scale),
                  k);
  }

  const double denom = 1.0 + std::accumulate(rho.begin(), rho.end(), 0.0);
  DesignParams p;
  p.n = n;
  p.kappa = cap;
  p.d.resize(m);
  p.b.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    p.b[j] = rho[j] / denom;
    const double w = spec.sigma[j] * rho[j] / denom;
    if (n == 2)
      p.d[j] = 2.0 * w / std::numbers::pi;
    else
      p.d[j] = std::pow(4.0 * w / cap, 1.0 / (n - 2));
  }
  return p;
}

double hole_radius(double d, double epsilon, int n) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (n == 2) return std::exp(-1.0 / (d * epsilon * epsilon)) / epsilon;
  return d * std::pow(epsilon, 2.0 / (n - 2));
}

double epsilon_branch_limit(double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  return std::sqrt(2.0 / d);
}

double epsilon_from_radius(double r, double d, int n) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (!(r > 0.0) || !std::isfinite(r))
    throw Error(ErrorCode::NoSolution, "radius must be positive and finite");
  if (n > 2) return std::pow(r / d, 0.5 * (n - 2));

  // log(r(eps)) - log(r); increasing on (0, eps_max].
  const double log_r = std::log(r);
  auto g = [&](double eps) {
    return -std::log(eps) - 1.0 / (d * eps * eps) - log_r;
  };
  const double hi = epsilon_branch_limit(d);
  const double g_hi = g(hi);
  if (g_hi < 0.0)
    throw Error(ErrorCode::NoSolution,
                "radius " + fmt(r) + " exceeds the largest achievable " +
                    fmt(hole_radius(d, hi, 2)));
  if (g_hi == 0.0) return hi;
  double lo = 0.5 * hi;
  while (g(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < 1e-150) throw Error(ErrorCode::NoSolution, "radius too small");
  }
  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      g, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

LimitSpectrum random_spectrum(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_value(std::log(0.1), std::log(100.0));
  std::vector<double> pts(2 * m);
  for (;;) {
    for (auto& x : pts) x = std::exp(log_value(rng));
    std::sort(pts.begin(), pts.end());
    bool spread = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) spread = spread && pts[i + 1] > 1.01 * pts[i];
    if (spread) break;
  }
  LimitSpectrum s;
  for (std::size_t j = 0; j < m; ++j) {
    s.sigma.push_back(pts[2 * j]);
    s.mu.push_back(pts[2 * j + 1]);
  }
  return s;
}

std::vector<Interval> maxwell_gap_map(const LimitSpectrum& spec) {
  validate_spectrum(spec);
  std::vector<Interval> out;
  out.reserve(2 * spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j)
    out.push_back({std::sqrt(spec.sigma[j]), std::sqrt(spec.mu[j])});
  for (std::size_t j = 0; j < spec.size(); ++j)
    out.push_back({-std::sqrt(spec.mu[j]), -std::sqrt(spec.sigma[j])});
  return out;
}

}  // namespace trapgap
