// Command-line front end: design, forward evaluation, geometry and mesh
// export, band verification and radius sweeps.
//
// Exit codes: 0 ok, 1 I/O or parse failure, 2 invariant violation,
// 3 spectrum outside the admissible set, 4 mesh or solver failure,
// 5 missing gap certificate or failed trend.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trapgap/bands.hpp"
#include "trapgap/error.hpp"
#include "trapgap/geometry.hpp"
#include "trapgap/limits.hpp"
#include "trapgap/mesh.hpp"
#include "trapgap/serialization.hpp"

namespace {

using namespace trapgap;

struct RunConfig {
  std::string input;
  std::string out;
  int n = 2;
  double kappa = 0.0;
  double h_max = 0.05;
  double hole_refine = 8.0;
  double tol = 1e-9;
  std::size_t k_max = 0;
  std::vector<double> radii{0.05, 0.02, 0.01};
  std::uint64_t seed = 1;
  bool no_header = false;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return 1;
    case ErrorCode::NotInG:
      return 3;
    case ErrorCode::HoleTooLarge:
    case ErrorCode::MeshFailure:
    case ErrorCode::DegenerateTriangle:
    case ErrorCode::MissingPeriodicPairs:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::EnclosureViolation:
      return 4;
    default:
      return 2;
  }
}

std::string header(const std::string& command) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream os;
  os << "# trapgap " << command << " " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << "\n";
  return os.str();
}

void emit(const RunConfig& cfg, const std::string& command, const std::string& body,
          bool tabular) {
  const std::string text = (tabular && !cfg.no_header ? header(command) : "") + body;
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text_file(cfg.out, text);
}

DesignParams load_design(const RunConfig& cfg) {
  DesignParams p = design_from_json(read_text_file(cfg.input));
  p.kappa = default_kappa(p.n, cfg.kappa > 0.0 ? cfg.kappa : p.kappa);
  return p;
}

MeshOptions mesh_options(const RunConfig& cfg) {
  MeshOptions o;
  o.h_max = cfg.h_max;
  o.hole_refine = cfg.hole_refine;
  return o;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.tol = cfg.tol;
  return o;
}

// The cell at the first sweep radius; sealed when the design has no traps.
CellGeometry cell_for(const DesignParams& p, const RunConfig& cfg, double* epsilon) {
  const BoxFamily family = boxes_from_volumes(p.b, p.n);
  if (p.size() == 0) {
    if (epsilon) *epsilon = 1.0;
    return build_sealed_cell(family);
  }
  const TrapScaling s = scaling_for_radius(p, cfg.radii.front());
  if (epsilon) *epsilon = s.epsilon;
  return build_cell(family, s.hole_radii);
}

GapTargets implied_targets(const DesignParams& p) {
  GapTargets t;
  if (p.size() == 0) {
    t.L = 1.0;
    return t;
  }
  const LimitSpectrum s = forward(p);
  for (std::size_t j = 0; j < s.size(); ++j) t.intervals.emplace_back(s.sigma[j], s.mu[j]);
  t.L = 1.5 * s.mu.back();
  return t;
}

int cmd_design(const RunConfig& cfg) {
  const GapTargets targets = targets_from_json(read_text_file(cfg.input));
  const LimitSpectrum spec = spectrum_from_targets(targets);
  const DesignParams p = inverse_design(spec, cfg.n, default_kappa(cfg.n, cfg.kappa));
  emit(cfg, "design", to_json(p, spec), false);
  return 0;
}

int cmd_forward(const RunConfig& cfg) {
  const DesignParams p = load_design(cfg);
  const LimitSpectrum s = forward(p);
  double agreement = 0.0;
  if (s.size() > 0) {
    const std::vector<double> alt = mu_via_matrix(s.sigma, p.b);
    for (std::size_t j = 0; j < s.size(); ++j)
      agreement = std::max(agreement, std::abs(alt[j] - s.mu[j]) / s.mu[j]);
  }
  auto doc = nlohmann::ordered_json::parse(to_json(s));
  doc["path_agreement"] = agreement;
  emit(cfg, "forward", doc.dump(2) + "\n", false);
  return 0;
}

int cmd_geometry(const RunConfig& cfg) {
  const CellGeometry cell = cell_for(load_design(cfg), cfg, nullptr);
  emit(cfg, "geometry", export_geometry(cell), false);
  return 0;
}

int cmd_mesh(const RunConfig& cfg) {
  const CellGeometry cell = cell_for(load_design(cfg), cfg, nullptr);
  const Mesh mesh = triangulate(cell, mesh_options(cfg));
  const MeshReport report = validate_mesh(mesh, &cell);
  if (!report.ok())
    throw Error(ErrorCode::MeshFailure, "generated mesh fails validation: " +
                                            report.violations.front().detail);
  emit(cfg, "mesh", export_mesh(mesh), false);
  return 0;
}

int cmd_bands(const RunConfig& cfg) {
  const DesignParams p = load_design(cfg);
  double epsilon = 1.0;
  const CellGeometry cell = cell_for(p, cfg, &epsilon);
  const std::size_t k_max = cfg.k_max ? cfg.k_max : p.size() + 2;
  const BandStructure bs = band_enclosures(cell, mesh_options(cfg), k_max, solver_options(cfg));
  const GapReport report = gap_report(physical_spectrum(bs, epsilon), implied_targets(p));
  emit(cfg, "bands", bands_csv(bs) + "\n" + gaps_csv(report), true);
  return 0;
}

StudyTable run_study(const DesignParams& p, const RunConfig& cfg) {
  StudyOptions o;
  o.mesh = mesh_options(cfg);
  o.solver = solver_options(cfg);
  o.k_max = cfg.k_max;
  return convergence_study(p, forward(p), cfg.radii, o);
}

int cmd_study(const RunConfig& cfg) {
  const StudyTable table = run_study(load_design(cfg), cfg);
  emit(cfg, "study", study_csv(table), true);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const DesignParams p = load_design(cfg);
  if (p.size() == 0) {
    std::cerr << "verify\tno traps: no gap to certify\n";
    return 5;
  }
  const StudyTable table = run_study(p, cfg);
  const StudyRow& finest = table.rows.back();
  const GapReport report =
      gap_report(physical_spectrum(finest.bands, finest.epsilon), implied_targets(p));
  emit(cfg, "verify", study_csv(table) + "\n" + gaps_csv(report), true);
  if (!table.all_certified()) {
    std::cerr << "verify\tgap certificate missing\n";
    return 5;
  }
  if (!table.trend_ok()) {
    std::cerr << "verify\tdeviation trend not monotone\n";
    return 5;
  }
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  double roundtrip = 0.0, paths = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 6);
    const LimitSpectrum target = random_spectrum(m, rng);
    const DesignParams p = inverse_design(target, 2);
    const LimitSpectrum back = forward(p);
    const std::vector<double> alt = mu_via_matrix(back.sigma, p.b);
    for (std::size_t j = 0; j < m; ++j) {
      roundtrip = std::max({roundtrip, std::abs(back.sigma[j] - target.sigma[j]) / target.sigma[j],
                            std::abs(back.mu[j] - target.mu[j]) / target.mu[j]});
      paths = std::max(paths, std::abs(alt[j] - back.mu[j]) / back.mu[j]);
    }
  }
  std::ostringstream os;
  os << "check,trials,max_rel_error,limit,pass\n"
     << "roundtrip," << trials << "," << format_real(roundtrip) << ",1e-09,"
     << (roundtrip <= 1e-9) << "\n"
     << "path_equivalence," << trials << "," << format_real(paths) << ",1e-09,"
     << (paths <= 1e-9) << "\n";
  emit(cfg, "selftest", os.str(), true);
  return roundtrip <= 1e-9 && paths <= 1e-9 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design and verification of trap-screen periodic domains with prescribed gaps"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;

  app.add_option("--n", cfg.n, "Space dimension")->check(CLI::Range(2, 16));
  app.add_option("--kappa", cfg.kappa, "Unit-disc capacity override")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--h-max", cfg.h_max, "Largest element size")->check(CLI::Range(1e-4, 0.2));
  app.add_option("--hole-refine", cfg.hole_refine, "Element size reduction near holes")
      ->check(CLI::Range(1.0, 1e6));
  app.add_option("--tol", cfg.tol, "Eigen-residual tolerance")->check(CLI::Range(1e-12, 1e-3));
  app.add_option("--k-max", cfg.k_max, "Bands per cell problem (default m + 2)");
  app.add_option("--radii", cfg.radii, "Sweep radii, descending")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--seed", cfg.seed, "Seed for selftest sampling");
  app.add_flag("--no-header", cfg.no_header, "Omit the timestamp line of CSV outputs");

  struct Command {
    const char* name;
    const char* help;
    const char* input;
    int (*run)(const RunConfig&);
  };
  const std::vector<Command> commands{
      {"design", "Targets JSON -> design JSON", "targets", cmd_design},
      {"forward", "Design JSON -> limit spectrum JSON", "design", cmd_forward},
      {"geometry", "Design JSON -> cell geometry JSON at the first radius", "design",
       cmd_geometry},
      {"mesh", "Design JSON -> cell mesh at the first radius", "design", cmd_mesh},
      {"bands", "Band enclosures and gap report at the first radius", "design", cmd_bands},
      {"verify", "Radius sweep; fails unless every gap is certified and trends hold", "design",
       cmd_verify},
      {"study", "Radius sweep table", "design", cmd_study},
      {"selftest", "Randomized round-trip and path-equivalence checks", nullptr, cmd_selftest},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    if (c.input) sub->add_option("input", cfg.input, std::string(c.input) + " JSON file")
                     ->required()
                     ->check(CLI::ExistingFile);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (std::size_t i = 0; i + 1 < cfg.radii.size(); ++i)
    if (!(cfg.radii[i + 1] < cfg.radii[i])) {
      std::cerr << "error\tInvalidArgument\t" << i + 1 << "\tradii must be strictly descending\n";
      return 2;
    }

  if (!cfg.out.empty()) {
    const auto dir = std::filesystem::absolute(cfg.out).parent_path();
    if (!std::filesystem::is_directory(dir)) {
      std::cerr << "error\tIO\t-\toutput directory " << dir << " does not exist\n";
      return 1;
    }
  }

  for (const auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    try {
      return command->run(cfg);
    } catch (const Error& e) {
      std::cerr << "error\t" << to_string(e.code()) << "\t"
                << (e.index() ? std::to_string(*e.index()) : "-") << "\t" << e.what() << "\n";
      return exit_code(e.code());
    } catch (const std::exception& e) {
      std::cerr << "error\tIO\t-\t" << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
