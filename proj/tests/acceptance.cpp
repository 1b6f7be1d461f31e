// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-fail N[,N...]]
// Exits 0 when the failing set equals the expected set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/disc_capacity.hpp"
#include "trapgap/bands.hpp"
#include "trapgap/error.hpp"
#include "trapgap/limits.hpp"

using namespace trapgap;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

Outcome closed_form_single_trap() {
  Outcome o;
  std::vector<double> times;
  LimitSpectrum s;
  DesignParams p;
  for (int rep = 0; rep < 11; ++rep) {
    const auto t0 = Clock::now();
    s = forward({2, 0, {1 / std::numbers::pi}, {0.5}});
    p = inverse_design({{1}, {2}}, 2);
    times.push_back(seconds_since(t0));
  }
  std::nth_element(times.begin(), times.begin() + 5, times.end());
  const double t = times[5];
  o.require(std::abs(s.mu[0] - 2.0) <= 1e-12, "mu");
  o.require(std::abs(p.b[0] - 0.5) <= 1e-12, "b");
  o.require(std::abs(p.d[0] - 1 / std::numbers::pi) <= 1e-12, "d");
  o.require(t < 1e-3, "runtime");
  o.note << " mu=" << s.mu[0] << " b=" << p.b[0] << " d=" << p.d[0] << " time=" << t * 1e6
         << "us";
  return o;
}

Outcome two_trap_secular() {
  Outcome o;
  const double disc = std::sqrt(7.5 * 7.5 - 32.0);
  const double r1 = (7.5 - disc) / 2, r2 = (7.5 + disc) / 2;
  const auto mu = solve_mu({1, 4}, {0.25, 0.25});
  const auto alt = mu_via_matrix({1, 4}, {0.25, 0.25});
  const auto p = inverse_design({{1, 4}, {r1, r2}}, 2);
  o.require(rel(mu[0], r1) <= 1e-9 && rel(mu[1], r2) <= 1e-9, "roots");
  o.require(rel(alt[0], mu[0]) <= 1e-9 && rel(alt[1], mu[1]) <= 1e-9, "matrix path");
  o.require(std::abs(p.b[0] - 0.25) <= 1e-9 && std::abs(p.b[1] - 0.25) <= 1e-9, "inverse");
  o.note << " mu=(" << mu[0] << ", " << mu[1] << ") matrix=(" << alt[0] << ", " << alt[1]
         << ") b=(" << p.b[0] << ", " << p.b[1] << ")";
  return o;
}

Outcome random_round_trip() {
  Outcome o;
  std::mt19937_64 rng(1);
  double worst = 0.0;
  bool interlaced = true;
  const auto t0 = Clock::now();
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 6);
    const LimitSpectrum target = random_spectrum(m, rng);
    const LimitSpectrum back = forward(inverse_design(target, 2));
    for (std::size_t j = 0; j < m; ++j) {
      worst = std::max({worst, rel(back.sigma[j], target.sigma[j]), rel(back.mu[j], target.mu[j])});
      interlaced = interlaced && back.sigma[j] < back.mu[j] &&
                   (j + 1 == m || back.mu[j] < back.sigma[j + 1]);
    }
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-9, "round trip");
  o.require(interlaced, "interlacing");
  o.require(t < 2.0, "runtime");
  o.note << " max_rel_err=" << worst << " time=" << t << "s";
  return o;
}

Outcome geometry_layout() {
  Outcome o;
  const BoxFamily f = boxes_from_volumes({0.1, 0.2}, 2);
  const double l = std::sqrt(0.65), l_hat = 0.7 / (2 * std::sqrt(0.65));
  o.require(std::abs(f.l - l) <= 1e-10 && std::abs(f.l - 0.8062258) <= 1e-7, "l");
  // The quoted 0.4341214 is off in the last digit; the closed form gives 0.43412157.
  o.require(std::abs(f.l_hat - l_hat) <= 1e-10 && std::abs(f.l_hat - 0.4341214) <= 5e-7, "l_hat");
  o.require(std::abs(f.boxes[0].volume() - 0.1) <= 1e-15 &&
                std::abs(f.boxes[1].volume() - 0.2) <= 1e-15,
            "volumes");
  o.require(validate_conditions(f).ok(), "conditions");
  o.note << std::setprecision(10) << " l=" << f.l << " l_hat=" << f.l_hat;
  return o;
}

Outcome empty_cell_spectra() {
  Outcome o;
  const auto t0 = Clock::now();
  const BandStructure bs =
      band_enclosures(build_sealed_cell(boxes_from_volumes({}, 2)), {0.02, 4, 4, 0.25}, 5);
  const double t = seconds_since(t0);
  const auto within = [&](double got, double want, double tol) {
    return want == 0.0 ? std::abs(got) < 1e-8 : rel(got, want) <= tol;
  };
  const double n_ref[] = {0, kPi2, kPi2, 2 * kPi2};
  const double d_ref[] = {2 * kPi2, 5 * kPi2, 5 * kPi2};
  double worst_n = 0, worst_d = 0, worst_p = 0, worst_a = 0;
  for (int k = 0; k < 4; ++k) {
    o.require(within(bs.quads[k].neumann, n_ref[k], 0.005), "neumann");
    if (n_ref[k] > 0) worst_n = std::max(worst_n, rel(bs.quads[k].neumann, n_ref[k]));
    o.require(within(bs.quads[k].antiperiodic, 2 * kPi2, 0.01), "antiperiodic");
    worst_a = std::max(worst_a, rel(bs.quads[k].antiperiodic, 2 * kPi2));
  }
  for (int k = 0; k < 3; ++k) {
    o.require(within(bs.quads[k].dirichlet, d_ref[k], 0.005), "dirichlet");
    worst_d = std::max(worst_d, rel(bs.quads[k].dirichlet, d_ref[k]));
  }
  o.require(within(bs.quads[0].periodic, 0, 0.01), "periodic zero");
  for (int k = 1; k < 5; ++k) {
    o.require(within(bs.quads[k].periodic, 4 * kPi2, 0.01), "periodic");
    worst_p = std::max(worst_p, rel(bs.quads[k].periodic, 4 * kPi2));
  }
  o.require(t < 30.0, "runtime");
  o.note << " dev N=" << worst_n << " D=" << worst_d << " P=" << worst_p << " A=" << worst_a
         << " nodes=" << bs.mesh_nodes << " time=" << t << "s";
  return o;
}

Outcome discrete_enclosure() {
  Outcome o;
  const DesignParams p = inverse_design({{1}, {2}}, 2);
  const SolverOptions solver;
  const CellGeometry cell = build_cell(boxes_from_volumes(p.b, 2), {0.02});
  // Checked here directly: band_enclosures itself would throw on a breach.
  BandStructure bs;
  try {
    bs = band_enclosures(cell, {0.05, 8, 4, 0.25}, 4, solver);
  } catch (const Error& e) {
    o.require(false, e.what());
    return o;
  }
  double worst = -1e300;
  for (const auto& q : bs.quads) {
    const double slack = 2 * solver.tol * std::max({1.0, std::abs(q.periodic), std::abs(q.dirichlet)});
    worst = std::max({worst, q.neumann - q.periodic, q.antiperiodic - q.dirichlet});
    o.require(q.neumann <= q.periodic + slack && q.antiperiodic <= q.dirichlet + slack, "order");
  }
  o.note << " max(N-T1, T2-D)=" << worst << " over k<=4";
  return o;
}

StudyOptions study_options() {
  StudyOptions o;
  o.mesh = {0.05, 8, 4, 0.25};
  return o;
}

Outcome gap_opening_trend() {
  Outcome o;
  const auto t0 = Clock::now();
  const DesignParams p = inverse_design({{1}, {2}}, 2);
  const StudyTable t = convergence_study(p, {{1}, {2}}, {0.05, 0.02, 0.01}, study_options());
  const double secs = seconds_since(t0);
  o.require(t.all_certified(), "a: certified gap at every radius");
  o.require(t.trend_ok(), "b: monotone deviations");
  const StudyRow& last = t.rows.back();
  o.require(last.deviation_sigma[0] <= 0.35 && last.deviation_mu[0] <= 0.35,
            "c: final deviations <= 0.35");
  o.require(secs < 600, "runtime");
  for (const auto& row : t.rows)
    o.note << " r=" << row.radius << ": D1=" << row.scaled_dirichlet[0]
           << " N2=" << row.scaled_neumann[0] << " dev=(" << row.deviation_sigma[0] << ", "
           << row.deviation_mu[0] << ")" << (row.certified[0] ? " certified" : " uncertified")
           << ";";
  o.note << " time=" << secs << "s";
  return o;
}

Outcome neumann_cluster_trend() {
  Outcome o;
  const std::vector<DesignParams> designs{
      inverse_design({{1}, {2}}, 2),
      {2, 0, {0.6 / std::numbers::pi, 0.6 / std::numbers::pi}, {0.3, 0.2}}};
  const std::vector<double> radii{0.05, 0.02, 0.01};
  const auto opts = study_options();
  for (const auto& p : designs) {
    const std::size_t m = p.size();
    const double ref = sealed_neumann_reference(p, opts.mesh, m + 2, opts.solver)[m + 1];
    std::vector<std::vector<double>> lam;
    for (double r : radii) {
      const TrapScaling s = scaling_for_radius(p, r);
      const BandStructure bs = band_enclosures(build_cell(boxes_from_volumes(p.b, 2), s.hole_radii),
                                               opts.mesh, m + 2, opts.solver);
      std::vector<double> v;
      for (const auto& q : bs.quads) v.push_back(q.neumann);
      lam.push_back(v);
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
      o.require(std::abs(lam[i][0]) < 1e-8, "lambda_1 is zero");
      o.require(lam[i][m + 1] >= 0.5 * ref, "lambda_{m+2} stays away from zero");
      if (i > 0)
        for (std::size_t k = 1; k <= m; ++k)
          o.require(lam[i][k] < lam[i - 1][k], "cluster decreases");
    }
    o.note << " m=" << m << ": ref=" << ref;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      o.note << " r=" << radii[i] << " (";
      for (std::size_t k = 1; k <= m + 1; ++k) o.note << (k > 1 ? ", " : "") << lam[i][k];
      o.note << ")";
    }
    o.note << ";";
  }
  return o;
}

Outcome capacity_oracle() {
  Outcome o;
  const double kappa = oracle::disc_capacity(160);
  o.require(rel(kappa, kUnitDiscCapacity3D) <= 0.01, "capacity");
  o.note << " boundary elements=" << kappa << " library=" << kUnitDiscCapacity3D;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) expected.insert(std::stoi(item));
    }
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form single trap", closed_form_single_trap},
      {"two-trap secular roots and matrix path", two_trap_secular},
      {"random round trip", random_round_trip},
      {"box layout constants", geometry_layout},
      {"empty-cell analytic spectra", empty_cell_spectra},
      {"discrete enclosure", discrete_enclosure},
      {"gap opening and deviation trend", gap_opening_trend},
      {"Neumann cluster trend", neumann_cluster_trend},
      {"unit-disc capacity oracle", capacity_oracle},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    if (!o.pass) failed.insert(id);
    std::printf("%s %d %s:%s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.note.str().c_str(),
                !o.pass && expected.count(id) ? " (expected)" : "");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
  return failed == expected ? 0 : 1;
}
