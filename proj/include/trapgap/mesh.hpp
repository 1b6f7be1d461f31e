#pragma once

// Slit-conforming triangulation of the period cell.
//
// The cell is covered by a graded tensor-product grid whose lines pass
// through every box face and every hole end, so screens are unions of grid
// edges.  Grid nodes lying on a screen are duplicated: triangles inside the
// box use the inner copy, triangles outside use the original.  Hole ends
// stay single nodes, which keeps the cell connected through the hole.
// Opposite sides of dY share the same grid lines, so (anti)periodic pairs
// match exactly.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "trapgap/geometry.hpp"

namespace trapgap {

using NodePair = std::pair<std::size_t, std::size_t>;
using Triangle = std::array<std::size_t, 3>;

struct Mesh {
  std::vector<Point2> nodes;
  /// Counterclockwise node triples.
  std::vector<Triangle> triangles;
  /// 0 for the exterior region, j + 1 for triangles inside box j.
  std::vector<int> tags;
  /// (inner-side node, outer-side node) at identical coordinates.
  std::vector<NodePair> seams;
  /// Per axis: (node on x_k = -1/2, node on x_k = +1/2), corners included.
  std::array<std::vector<NodePair>, 2> periodic_pairs;
  /// Cell corners ordered (-,-), (+,-), (-,+), (+,+).
  std::array<std::size_t, 4> corners{};
};

struct MeshOptions {
  double h_max = 0.05;
  /// Element size along a hole is at most h_max / hole_refine.
  double hole_refine = 4.0;
  /// Additional refinement factor at the two hole ends.
  double tip_refine = 4.0;
  /// Growth of the element size with distance from a refinement site.
  double grading = 0.25;
};

/// Graded 1D partition of [lo, hi] through every breakpoint; exposed for
/// tests.  Each site is (position interval, local size).
struct SizeSite {
  double lo;
  double hi;
  double size;
};
std::vector<double> graded_partition(std::vector<double> breakpoints,
                                     const std::vector<SizeSite>& sites,
                                     double h_max, double grading);

/// Throws MeshFailure when a hole is narrower than h_max / hole_refine or a
/// screen segment is shorter than that length.
Mesh triangulate(const CellGeometry& cell, const MeshOptions& options);

enum class MeshCheck {
  BadIndex,
  NonPositiveArea,
  AreaPartition,
  SeamCoordinates,
  SeamTopology,
  PeriodicOffset,
  MirrorBoundary,
  ScreenCrossing,
};

struct MeshReport {
  struct Violation {
    MeshCheck check;
    std::size_t index;
    std::string detail;
  };
  std::vector<Violation> violations;
  double total_area = 0.0;
  double min_angle_deg = 0.0;
  double max_aspect_ratio = 0.0;
  std::size_t seam_count = 0;
  std::size_t periodic_pair_count = 0;

  bool ok() const { return violations.empty(); }
  bool has(MeshCheck check) const;
};

/// Checks every Mesh invariant.  Screen crossings are checked only when the
/// generating geometry is supplied.
MeshReport validate_mesh(const Mesh& mesh, const CellGeometry* cell = nullptr);

/// Plain-text format, see docs/formats.md.
std::string export_mesh(const Mesh& mesh);
/// Throws ParseError whose index is the 1-based offending line.
Mesh import_mesh(const std::string& text);

}  // namespace trapgap
