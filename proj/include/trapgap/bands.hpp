#pragma once

// Band enclosures from the four real cell problems and the gap reports and
// convergence studies built on them.
//
// For every band k the Bloch eigenvalue branch is bracketed by
//   lambda_k^N <= lambda_k^theta <= lambda_k^D,
// so a strict inequality lambda_k^D < lambda_{k+1}^N certifies a gap between
// bands k and k+1.  The periodic and antiperiodic values tighten the
// estimates of the band edges:
//   lambda_k^N <= band_k bottom <= lambda_k^periodic,
//   lambda_k^antiperiodic <= band_k top <= lambda_k^D.
// Physical values are the cell values times eps^{-2}.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trapgap/fem.hpp"
#include "trapgap/geometry.hpp"
#include "trapgap/limits.hpp"
#include "trapgap/mesh.hpp"

namespace trapgap {

struct BandQuad {
  double neumann = 0.0;
  double periodic = 0.0;
  double antiperiodic = 0.0;
  double dirichlet = 0.0;
};

struct Gap {
  /// Gap lies between band `below` and band `below + 1` (1-based).
  std::size_t below = 0;
  /// Certified end points lambda_k^D and lambda_{k+1}^N.
  double lo = 0.0;
  double hi = 0.0;
  /// Sharper estimates lambda_k^antiperiodic and lambda_{k+1}^periodic.
  double estimate_lo = 0.0;
  double estimate_hi = 0.0;
};

struct BandStructure {
  std::vector<BandQuad> quads;
  /// 1 for cell values; the scale applied by physical_spectrum otherwise.
  double epsilon = 1.0;
  double tol = 0.0;
  std::size_t mesh_nodes = 0;

  std::vector<Gap> certified_gaps() const;
};

/// Runs all four boundary conditions on one mesh and checks
/// N <= periodic and antiperiodic <= D band by band (slack 2 tol |lambda|).
BandStructure band_enclosures(const Mesh& mesh, std::size_t k_max,
                              const SolverOptions& solver = {});
BandStructure band_enclosures(const CellGeometry& cell, const MeshOptions& mesh_options,
                              std::size_t k_max, const SolverOptions& solver = {});

/// Multiplies every eigenvalue by eps^{-2}.
BandStructure physical_spectrum(const BandStructure& bs, double epsilon);

struct StudyOptions {
  MeshOptions mesh;
  SolverOptions solver;
  /// Number of bands per run; defaults to m + 2 when zero.
  std::size_t k_max = 0;
};

struct StudyRow {
  double radius = 0.0;
  double epsilon = 0.0;
  std::vector<double> hole_radii;
  /// Cell eigenvalues of the run.
  BandStructure bands;
  /// eps^{-2} lambda_k^D and eps^{-2} lambda_{k+1}^N for k = 1..m.
  std::vector<double> scaled_dirichlet;
  std::vector<double> scaled_neumann;
  /// Relative deviations from sigma_k and mu_k.
  std::vector<double> deviation_sigma;
  std::vector<double> deviation_mu;
  /// lambda_k^D < lambda_{k+1}^N for k = 1..m.
  std::vector<bool> certified;
};

struct StudyTable {
  LimitSpectrum spectrum;
  std::vector<StudyRow> rows;
  /// Per k: deviations decrease strictly along the sweep.
  std::vector<bool> trend_sigma;
  std::vector<bool> trend_mu;

  bool all_certified() const;
  bool trend_ok() const;
};

/// Scale and per-trap hole radii for a sweep radius r.  r is the hole
/// radius of the trap with the smallest d_j (the narrowest hole); the others
/// follow from the common scale eps.  Throws InconsistentEpsilon when the
/// per-trap inversions of the radius law disagree by more than 1e-9.
struct TrapScaling {
  double epsilon = 0.0;
  std::vector<double> hole_radii;
};
TrapScaling scaling_for_radius(const DesignParams& design, double r);

/// Sweeps descending radii for a two-dimensional design and compares the
/// scaled cell eigenvalues with the predicted limits.
StudyTable convergence_study(const DesignParams& design, const LimitSpectrum& spec,
                             const std::vector<double>& radii, const StudyOptions& options);

/// Neumann eigenvalues of the cell with every trap sealed: the reference for
/// the first eigenvalue above the zero cluster.
std::vector<double> sealed_neumann_reference(const DesignParams& design,
                                             const MeshOptions& mesh_options,
                                             std::size_t k, const SolverOptions& solver = {});

struct GapReportRow {
  double lo = 0.0;
  double hi = 0.0;
  bool certified = false;
  /// Index into the target list, empty when nothing overlaps.
  std::optional<std::size_t> matched_target;
  /// max(|lo - alpha|/alpha, |hi - beta|/beta) for the matched target.
  std::optional<double> deviation;
};

struct GapReport {
  std::vector<GapReportRow> rows;
  std::size_t certified_count() const;
};

/// Lists certified gaps of bs inside [0, L], matched to targets by overlap;
/// unmatched targets are listed as uncertified rows.
GapReport gap_report(const BandStructure& bs, const GapTargets& targets);

/// CSV tables.  Columns:
///   bands: k,lamN,lamT1,lamT2,lamD
///   gaps:  lo,hi,certified,matched_target,deviation
///   study: r,eps,k,scaledD,sigma,devD,scaledN,mu,devN,certified,trendD,trendN
std::string bands_csv(const BandStructure& bs);
std::string gaps_csv(const GapReport& report);
std::string study_csv(const StudyTable& table);

}  // namespace trapgap
