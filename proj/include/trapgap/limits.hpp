#pragma once

// Closed-form gap algebra for trap-screen periodic domains.
//
// A design is a set of m traps, each described by a hole constant d_j and a
// trap volume b_j.  As the period shrinks, the Neumann spectrum of the
// periodic domain develops m gaps whose ends converge to (sigma_j, mu_j):
//
//   sigma_j = kappa d_j^{n-2} / (4 b_j)      (n >= 3)
//   sigma_j = pi d_j / (2 b_j)               (n = 2)
//
// and mu_j are the m roots of the secular equation
//
//   1 + sum_j sigma_j b_j / ((1 - sum_i b_i) (sigma_j - lambda)) = 0,
//
// which interlace: sigma_1 < mu_1 < sigma_2 < ... < sigma_m < mu_m.
// This header provides the forward map, its inverse, and the equivalent
// matrix formulation used as an independent cross-check.

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace trapgap {

/// Largest number of traps handled by the algebra.
inline constexpr std::size_t kMaxTraps = 64;

/// Dirichlet energy of the capacity potential of the unit disc in R^3.
inline constexpr double kUnitDiscCapacity3D = 8.0;

/// Relative separation required between consecutive sigma_j.
inline constexpr double kSigmaSeparation = 1e-9;

struct DesignParams {
  int n = 2;
  /// Capacity of the unit (n-1)-disc; ignored for n = 2.
  double kappa = 0.0;
  std::vector<double> d;
  std::vector<double> b;

  std::size_t size() const { return d.size(); }
};

struct LimitSpectrum {
  std::vector<double> sigma;
  std::vector<double> mu;

  std::size_t size() const { return sigma.size(); }
};

struct GapTargets {
  std::vector<std::pair<double, double>> intervals;
  double L = 0.0;

  std::size_t size() const { return intervals.size(); }
};

/// Coefficients A_0..A_m of sum_k lambda^{m-k} A_k (A_0 leads).
struct SecularCoefficients {
  std::vector<double> A;

  std::size_t degree() const { return A.empty() ? 0 : A.size() - 1; }
  double operator()(double lambda) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Capacity constant for dimension n: kUnitDiscCapacity3D for n = 3, the
/// supplied override otherwise.  Throws InvalidArgument when n >= 4 and no
/// positive override is given.  Returns 0 for n = 2.
double default_kappa(int n, double override_kappa = 0.0);

/// Checks 0 < alpha_1, alpha_j < beta_j < alpha_{j+1}, beta_m < L.
/// Throws OrderingViolation with the index of the interval that owns the
/// first failing inequality.
const GapTargets& validate_targets(const GapTargets& targets);

/// Reinterprets validated targets as the limit spectrum to be designed.
LimitSpectrum spectrum_from_targets(const GapTargets& targets);

/// Checks membership of the interlacing set; throws NotInG(index).
void validate_spectrum(const LimitSpectrum& spec);

/// Checks d_j > 0, b_j > 0, sum b < 1, n >= 2, kappa > 0 for n >= 3.
void validate_design(const DesignParams& p);

std::vector<double> sigma_from_design(const DesignParams& p);

SecularCoefficients secular_coefficients(const std::vector<double>& sigma,
                                         const std::vector<double>& b);

/// Roots of the secular equation in ascending order.  Companion-matrix
/// roots are polished by safeguarded Newton on the rational form until the
/// relative residual is at most 1e-13.
std::vector<double> solve_mu(const std::vector<double>& sigma,
                             const std::vector<double>& b);

/// Relative residual of the rational secular function at lambda.
double secular_residual(const std::vector<double>& sigma,
                        const std::vector<double>& b, double lambda);

/// M_ii = (1 - b_i)/sigma_i, M_ij = -sqrt(b_i b_j / (sigma_i sigma_j)).
Eigen::MatrixXd build_matrix_M(const std::vector<double>& sigma,
                               const std::vector<double>& b);

/// Reciprocal eigenvalues of M, ascending.
std::vector<double> mu_via_matrix(const std::vector<double>& sigma,
                                  const std::vector<double>& b);

/// Full forward map (d, b) -> (sigma, mu).
LimitSpectrum forward(const DesignParams& p);

/// rho_j = (mu_j - sigma_j)/sigma_j * prod_{i != j} (mu_i - sigma_j)/(sigma_i - sigma_j).
std::vector<double> rho_from_spectrum(const LimitSpectrum& spec);

/// Inverse map (sigma, mu) -> (d, b).  kappa is only read for n >= 3.
DesignParams inverse_design(const LimitSpectrum& spec, int n,
                            double kappa = 0.0);

/// Hole radius of trap j at scale epsilon:
/// d eps^{2/(n-2)} for n >= 3, eps^{-1} exp(-1/(d eps^2)) for n = 2.
double hole_radius(double d, double epsilon, int n);

/// Upper end of the monotone branch of the n = 2 radius law,
/// eps_max = sqrt(2/d).  The law is increasing on (0, eps_max].
double epsilon_branch_limit(double d);

/// Inverse of hole_radius.  For n = 2 solved on (0, epsilon_branch_limit(d)];
/// throws NoSolution when r lies outside the achievable range.
double epsilon_from_radius(double r, double d, int n);

/// Random admissible spectrum for property checks: 2m log-uniform points in
/// [0.1, 100], sorted, with consecutive ratios of at least 1.01.
LimitSpectrum random_spectrum(std::size_t m, std::mt19937_64& rng);

/// (sqrt sigma_j, sqrt mu_j) for every j followed by their mirrors
/// (-sqrt mu_j, -sqrt sigma_j).
std::vector<Interval> maxwell_gap_map(const LimitSpectrum& spec);

}  // namespace trapgap
