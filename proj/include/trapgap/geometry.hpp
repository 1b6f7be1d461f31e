#pragma once

// Period-cell geometry: a family of disjoint axis-aligned trap boxes inside
// Y = (-1/2, 1/2)^n, each closed by a screen with one small hole in the
// middle of its left (minimum-x1) face.

#include <cstddef>
#include <string>
#include <vector>

#include "trapgap/limits.hpp"

namespace trapgap {

struct Box {
  /// Open extent per axis.
  std::vector<Interval> extent;
  /// Side lengths as constructed; the volume is their product.
  std::vector<double> side;

  double volume() const;
};

struct BoxFamily {
  int n = 2;
  std::vector<Box> boxes;
  double l = 0.0;
  double l_hat = 0.0;
  std::vector<double> l_j;

  std::size_t size() const { return boxes.size(); }
};

/// Lays the boxes side by side along x1 inside the cube of side l:
///   l     = (1/2 + (1/2) sum b)^{1/n}
///   l_j   = b_j / l^{n-1}
///   l_hat = (1 - sum b) / (2 max(m-1, 1) l^{n-1})   (gap between boxes)
/// The first box starts at x1 = -l/2; all other axes span (-l/2, l/2).
BoxFamily boxes_from_volumes(const std::vector<double>& b, int n);

enum class Condition { Disjoint, Contained, FlatPart };

struct ConditionReport {
  struct Violation {
    Condition condition;
    std::vector<std::size_t> boxes;
    std::string detail;
  };
  std::vector<Violation> violations;
  /// Largest radius of a ball about the left-face midpoint that meets only
  /// the flat left face of its own box (per box).
  std::vector<double> flat_radius;
  /// Smallest distance between two box closures (infinity when m < 2).
  double min_separation = 0.0;

  bool ok() const { return violations.empty(); }
};

/// Checks pairwise disjoint closures, containment in Y and the flat-part
/// condition.  Never throws.
ConditionReport validate_conditions(const BoxFamily& f);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Segment {
  Point2 a;
  Point2 b;
};

/// Open hole of half-width `radius` on the left face of a box; radius 0
/// marks a sealed trap.
struct Hole {
  Point2 center;
  double radius = 0.0;
  double flat_radius = 0.0;
};

/// Box boundary minus the hole, as straight segments.
struct Screen {
  std::vector<Segment> segments;
};

struct CellGeometry {
  BoxFamily family;
  std::vector<Hole> holes;
  std::vector<Screen> screens;

  std::size_t size() const { return holes.size(); }
  bool sealed(std::size_t j) const { return holes[j].radius == 0.0; }
};

/// Places one hole of half-width radii[j] at the left-face midpoint of each
/// box.  Two-dimensional only.  Throws HoleTooLarge(j) when radii[j] is not
/// below the flat radius.
CellGeometry build_cell(const BoxFamily& f, const std::vector<double>& radii);

/// Same boxes with every screen closed; used for limit reference spectra.
CellGeometry build_sealed_cell(const BoxFamily& f);

/// JSON with keys "n", "l", "l_hat", "l_j", "boxes", "holes", "screens",
/// "regions"; reals with 17 significant digits.
std::string export_geometry(const CellGeometry& c);
CellGeometry import_geometry(const std::string& text);

}  // namespace trapgap
