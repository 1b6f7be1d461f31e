#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "trapgap/error.hpp"
#include "trapgap/limits.hpp"

using namespace trapgap;

TEST_CASE("round trip over random admissible spectra") {
  std::mt19937_64 rng(20240607);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 6);
    const LimitSpectrum target = random_spectrum(m, rng);
    const DesignParams p = inverse_design(target, 2);
    double total_b = 0.0;
    for (double b : p.b) {
      CHECK(b > 0.0);
      total_b += b;
    }
    CHECK(total_b < 1.0);
    for (double r : rho_from_spectrum(target)) CHECK(r > 0.0);
    const LimitSpectrum back = forward(p);
    for (std::size_t j = 0; j < m; ++j) {
      worst = std::max({worst, std::abs(back.sigma[j] / target.sigma[j] - 1),
                        std::abs(back.mu[j] / target.mu[j] - 1)});
      CHECK(back.sigma[j] < back.mu[j]);
      if (j + 1 < m) CHECK(back.mu[j] < back.sigma[j + 1]);
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("companion and matrix paths agree") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 8);
    std::vector<double> sigma(m), b(m);
    double acc = 0.0;
    for (auto& s : sigma) s = (acc += 0.05 + 3.0 * unit(rng));
    double budget = 0.95 * unit(rng) + 0.01;
    for (auto& x : b) x = budget * (0.05 + unit(rng)) / (1.05 * static_cast<double>(m));
    const auto a = solve_mu(sigma, b);
    const auto c = mu_via_matrix(sigma, b);
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(std::abs(a[j] - c[j]) <= 1e-9 * a[j]);
      CHECK(sigma[j] < a[j]);
      if (j + 1 < m) CHECK(a[j] < sigma[j + 1]);
      CHECK(secular_residual(sigma, b, a[j]) <= 1e-13);
    }
  }
}

TEST_CASE("leading minors of the trap matrix") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t m = 1; m <= 5; ++m) {
    std::vector<double> sigma(m), b(m);
    double acc = 0.0;
    for (auto& s : sigma) s = (acc += 0.2 + unit(rng));
    for (auto& x : b) x = 0.15 * unit(rng) + 0.01;
    const Eigen::MatrixXd M = build_matrix_M(sigma, b);
    CHECK((M - M.transpose()).norm() == 0.0);
    // Leading k-minor: (1 - b_1 - ... - b_k) / (sigma_1 ... sigma_k).
    double bsum = 0.0, sprod = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
      bsum += b[k - 1];
      sprod *= sigma[k - 1];
      const double minor = M.topLeftCorner(k, k).determinant();
      CHECK(minor == doctest::Approx((1.0 - bsum) / sprod).epsilon(1e-12));
    }
  }
}

TEST_CASE("roots collapse onto sigma as volumes vanish") {
  const std::vector<double> sigma{0.5, 1.5, 2.5};
  double previous = 1.0;
  for (double scale : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
    const std::vector<double> b{scale, 2 * scale, scale};
    const auto mu = solve_mu(sigma, b);
    double dev = 0.0;
    for (std::size_t j = 0; j < 3; ++j) dev = std::max(dev, mu[j] / sigma[j] - 1);
    CHECK(dev > 0.0);
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 1e-9);
}

TEST_CASE("random spectra are admissible and reproducible") {
  std::mt19937_64 a(3), b(3);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_spectrum(4, a);
    const auto r = random_spectrum(4, b);
    CHECK(s.sigma == r.sigma);
    CHECK_NOTHROW(validate_spectrum(s));
  }
}
