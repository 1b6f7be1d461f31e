#include "trapgap/bands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <sstream>

#include "trapgap/error.hpp"
#include "trapgap/serialization.hpp"

namespace trapgap {

std::vector<Gap> BandStructure::certified_gaps() const {
  std::vector<Gap> gaps;
  for (std::size_t k = 0; k + 1 < quads.size(); ++k) {
    if (quads[k].dirichlet < quads[k + 1].neumann)
      gaps.push_back({k + 1, quads[k].dirichlet, quads[k + 1].neumann,
                      quads[k].antiperiodic, quads[k + 1].periodic});
  }
  return gaps;
}

BandStructure band_enclosures(const Mesh& mesh, std::size_t k_max,
                              const SolverOptions& solver) {
  if (k_max == 0) throw Error(ErrorCode::InvalidArgument, "k_max must be positive");
  const RawSystem raw = assemble(mesh);
  constexpr std::array variants{BoundaryCondition::Neumann, BoundaryCondition::Periodic,
                                BoundaryCondition::Antiperiodic, BoundaryCondition::Dirichlet};
  std::array<std::future<EigenResult>, 4> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    jobs[v] = std::async(std::launch::async, [&raw, &solver, k_max, bc = variants[v]] {
      return solve_lowest(apply_bc(raw, bc), k_max, solver);
    });
  }
  std::array<EigenResult, 4> results;
  for (std::size_t v = 0; v < variants.size(); ++v) results[v] = jobs[v].get();

  BandStructure bs;
  bs.tol = solver.tol;
  bs.mesh_nodes = mesh.nodes.size();
  for (std::size_t k = 0; k < k_max; ++k) {
    BandQuad q{results[0].values[k], results[1].values[k], results[2].values[k],
               results[3].values[k]};
    const auto slack = [&](double a, double b) {
      return 2.0 * solver.tol * std::max({1.0, std::abs(a), std::abs(b)});
    };
    if (q.neumann > q.periodic + slack(q.neumann, q.periodic))
      throw Error(ErrorCode::EnclosureViolation,
                  "Neumann " + format_real(q.neumann) + " above periodic " +
                      format_real(q.periodic),
                  k + 1);
    if (q.antiperiodic > q.dirichlet + slack(q.antiperiodic, q.dirichlet))
      throw Error(ErrorCode::EnclosureViolation,
                  "antiperiodic " + format_real(q.antiperiodic) + " above Dirichlet " +
                      format_real(q.dirichlet),
                  k + 1);
    bs.quads.push_back(q);
  }
  return bs;
}

BandStructure band_enclosures(const CellGeometry& cell, const MeshOptions& mesh_options,
                              std::size_t k_max, const SolverOptions& solver) {
  return band_enclosures(triangulate(cell, mesh_options), k_max, solver);
}

BandStructure physical_spectrum(const BandStructure& bs, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double scale = 1.0 / (epsilon * epsilon);
  BandStructure out = bs;
  out.epsilon = bs.epsilon * epsilon;
  for (auto& q : out.quads) {
    q.neumann *= scale;
    q.periodic *= scale;
    q.antiperiodic *= scale;
    q.dirichlet *= scale;
  }
  return out;
}

bool StudyTable::all_certified() const {
  for (const auto& row : rows)
    for (bool c : row.certified)
      if (!c) return false;
  return !rows.empty();
}

bool StudyTable::trend_ok() const {
  return std::all_of(trend_sigma.begin(), trend_sigma.end(), [](bool b) { return b; }) &&
         std::all_of(trend_mu.begin(), trend_mu.end(), [](bool b) { return b; });
}

TrapScaling scaling_for_radius(const DesignParams& design, double r) {
  validate_design(design);
  const auto narrowest = static_cast<std::size_t>(
      std::min_element(design.d.begin(), design.d.end()) - design.d.begin());
  TrapScaling s;
  s.epsilon = epsilon_from_radius(r, design.d[narrowest], design.n);
  for (std::size_t j = 0; j < design.size(); ++j) {
    const double radius = design.d[j] == design.d[narrowest] ? r : hole_radius(design.d[j], s.epsilon, design.n);
    double eps_j = 0.0;
    try {
      eps_j = epsilon_from_radius(radius, design.d[j], design.n);
    } catch (const Error& e) {
      throw Error(ErrorCode::InconsistentEpsilon,
                  "radius law of trap cannot be inverted: " + std::string(e.what()), j);
    }
    if (std::abs(eps_j - s.epsilon) > 1e-9 * s.epsilon)
      throw Error(ErrorCode::InconsistentEpsilon,
                  "trap scale " + format_real(eps_j) + " differs from " + format_real(s.epsilon),
                  j);
    s.hole_radii.push_back(radius);
  }
  return s;
}

StudyTable convergence_study(const DesignParams& design, const LimitSpectrum& spec,
                             const std::vector<double>& radii, const StudyOptions& options) {
  validate_design(design);
  if (design.n != 2)
    throw Error(ErrorCode::UnsupportedDimension, "studies run on two-dimensional designs");
  const std::size_t m = design.size();
  if (spec.size() != m)
    throw Error(ErrorCode::InvalidArgument, "spectrum and design differ in trap count");
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "no radii to sweep");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i + 1] < radii[i]))
      throw Error(ErrorCode::InvalidArgument, "radii must be strictly descending", i + 1);

  const std::size_t k_max = options.k_max ? options.k_max : m + 2;
  if (k_max < m + 1)
    throw Error(ErrorCode::InvalidArgument, "k_max must cover m + 1 bands");
  const BoxFamily family = boxes_from_volumes(design.b, design.n);

  StudyTable table;
  table.spectrum = spec;
  for (double r : radii) {
    StudyRow row;
    row.radius = r;
    const TrapScaling scaling = scaling_for_radius(design, r);
    row.epsilon = scaling.epsilon;
    row.hole_radii = scaling.hole_radii;
    const CellGeometry cell = build_cell(family, row.hole_radii);
    row.bands = band_enclosures(cell, options.mesh, k_max, options.solver);
    const double scale = 1.0 / (row.epsilon * row.epsilon);
    for (std::size_t k = 0; k < m; ++k) {
      const double d = row.bands.quads[k].dirichlet * scale;
      const double n = row.bands.quads[k + 1].neumann * scale;
      row.scaled_dirichlet.push_back(d);
      row.scaled_neumann.push_back(n);
      row.deviation_sigma.push_back(std::abs(d - spec.sigma[k]) / spec.sigma[k]);
      row.deviation_mu.push_back(std::abs(n - spec.mu[k]) / spec.mu[k]);
      row.certified.push_back(row.bands.quads[k].dirichlet < row.bands.quads[k + 1].neumann);
    }
    table.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < m; ++k) {
    bool ds = true, dm = true;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      ds = ds && table.rows[i + 1].deviation_sigma[k] < table.rows[i].deviation_sigma[k];
      dm = dm && table.rows[i + 1].deviation_mu[k] < table.rows[i].deviation_mu[k];
    }
    table.trend_sigma.push_back(ds);
    table.trend_mu.push_back(dm);
  }
  return table;
}

std::vector<double> sealed_neumann_reference(const DesignParams& design,
                                             const MeshOptions& mesh_options, std::size_t k,
                                             const SolverOptions& solver) {
  validate_design(design);
  const CellGeometry cell = build_sealed_cell(boxes_from_volumes(design.b, design.n));
  const Mesh mesh = triangulate(cell, mesh_options);
  return solve_lowest(apply_bc(assemble(mesh), BoundaryCondition::Neumann), k, solver).values;
}

std::size_t GapReport::certified_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const GapReportRow& r) { return r.certified; }));
}

GapReport gap_report(const BandStructure& bs, const GapTargets& targets) {
  GapReport report;
  std::vector<bool> matched(targets.size(), false);
  for (const Gap& gap : bs.certified_gaps()) {
    if (!(gap.lo < targets.L)) continue;
    GapReportRow row;
    row.lo = gap.lo;
    row.hi = gap.hi;
    row.certified = true;
    double best_overlap = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const auto [a, b] = targets.intervals[j];
      const double overlap = std::min(gap.hi, b) - std::max(gap.lo, a);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        row.matched_target = j;
      }
    }
    if (row.matched_target) {
      const auto [a, b] = targets.intervals[*row.matched_target];
      row.deviation = std::max(std::abs(gap.lo - a) / a, std::abs(gap.hi - b) / b);
      matched[*row.matched_target] = true;
    }
    report.rows.push_back(row);
  }
  for (std::size_t j = 0; j < targets.size(); ++j)
    if (!matched[j])
      report.rows.push_back({targets.intervals[j].first, targets.intervals[j].second, false, j,
                             std::nullopt});
  return report;
}

std::string bands_csv(const BandStructure& bs) {
  std::ostringstream os;
  os << "k,lamN,lamT1,lamT2,lamD\n";
  for (std::size_t k = 0; k < bs.quads.size(); ++k) {
    const BandQuad& q = bs.quads[k];
    os << k + 1 << "," << format_real(q.neumann) << "," << format_real(q.periodic) << ","
       << format_real(q.antiperiodic) << "," << format_real(q.dirichlet) << "\n";
  }
  return os.str();
}

std::string gaps_csv(const GapReport& report) {
  std::ostringstream os;
  os << "lo,hi,certified,matched_target,deviation\n";
  for (const auto& r : report.rows) {
    os << format_real(r.lo) << "," << format_real(r.hi) << "," << (r.certified ? 1 : 0) << ",";
    if (r.matched_target) os << *r.matched_target + 1;
    os << ",";
    if (r.deviation) os << format_real(*r.deviation);
    os << "\n";
  }
  return os.str();
}

std::string study_csv(const StudyTable& table) {
  std::ostringstream os;
  os << "r,eps,k,scaledD,sigma,devD,scaledN,mu,devN,certified,trendD,trendN\n";
  for (const auto& row : table.rows)
    for (std::size_t k = 0; k < row.scaled_dirichlet.size(); ++k)
      os << format_real(row.radius) << "," << format_real(row.epsilon) << "," << k + 1 << ","
         << format_real(row.scaled_dirichlet[k]) << "," << format_real(table.spectrum.sigma[k])
         << "," << format_real(row.deviation_sigma[k]) << ","
         << format_real(row.scaled_neumann[k]) << "," << format_real(table.spectrum.mu[k]) << ","
         << format_real(row.deviation_mu[k]) << "," << (row.certified[k] ? 1 : 0) << ","
         << (table.trend_sigma[k] ? 1 : 0) << "," << (table.trend_mu[k] ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace trapgap
