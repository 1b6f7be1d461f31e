#include "trapgap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "trapgap/error.hpp"
#include "trapgap/serialization.hpp"

namespace trapgap {

std::vector<double> graded_partition(std::vector<double> breakpoints,
                                     const std::vector<SizeSite>& sites,
                                     double h_max, double grading) {
  std::sort(breakpoints.begin(), breakpoints.end());
  // Breakpoints closer than round-off (two holes of equal radius computed
  // along different paths) collapse to one grid line.
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                [](double a, double b) { return b - a < 1e-12; }),
                    breakpoints.end());
  double finest = h_max;
  for (const auto& s : sites) finest = std::min(finest, s.size);

  const auto size_at = [&](double t) {
    double h = h_max;
    for (const auto& s : sites) {
      const double dist = t < s.lo ? s.lo - t : (t > s.hi ? t - s.hi : 0.0);
      h = std::min(h, s.size + grading * dist);
    }
    return h;
  };

  std::vector<double> out{breakpoints.front()};
  for (std::size_t seg = 0; seg + 1 < breakpoints.size(); ++seg) {
    const double p = breakpoints[seg], q = breakpoints[seg + 1];
    const std::size_t samples = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(8.0 * (q - p) / finest)), 16, 400000);
    std::vector<double> ts(samples + 1), cum(samples + 1, 0.0);
    for (std::size_t i = 0; i <= samples; ++i)
      ts[i] = p + (q - p) * static_cast<double>(i) / static_cast<double>(samples);
    ts.back() = q;
    for (std::size_t i = 1; i <= samples; ++i)
      cum[i] = cum[i - 1] +
               0.5 * (ts[i] - ts[i - 1]) * (1.0 / size_at(ts[i - 1]) + 1.0 / size_at(ts[i]));
    const double total = cum.back();
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(total - 1e-9)));
    std::size_t cursor = 1;
    for (std::size_t i = 1; i < count; ++i) {
      const double target = total * static_cast<double>(i) / static_cast<double>(count);
      while (cum[cursor] < target) ++cursor;
      const double w = (target - cum[cursor - 1]) / (cum[cursor] - cum[cursor - 1]);
      out.push_back(ts[cursor - 1] + w * (ts[cursor] - ts[cursor - 1]));
    }
    out.push_back(q);
  }
  return out;
}

namespace {

std::size_t index_of(const std::vector<double>& grid, double value) {
  auto it = std::lower_bound(grid.begin(), grid.end(), value - 1e-12);
  if (it == grid.end() || std::abs(*it - value) > 1e-12)
    throw Error(ErrorCode::MeshFailure, "grid misses breakpoint " + format_real(value));
  return static_cast<std::size_t>(it - grid.begin());
}

double segment_length(const Segment& s) {
  return std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
}

}  // namespace

Mesh triangulate(const CellGeometry& cell, const MeshOptions& options) {
  if (cell.family.n != 2)
    throw Error(ErrorCode::UnsupportedDimension, "meshing is two-dimensional only");
  // The 0.2 cap only matters once there are screens to resolve.
  const double h_cap = cell.size() > 0 ? 0.2 : 0.5;
  if (!(options.h_max > 0.0 && options.h_max <= h_cap))
    throw Error(ErrorCode::InvalidArgument, "h_max must lie in (0, " + std::to_string(h_cap).substr(0, 3) + "]");
  if (!(options.hole_refine >= 1.0) || !(options.tip_refine >= 1.0))
    throw Error(ErrorCode::InvalidArgument, "refinement factors must be at least 1");
  if (!(options.grading > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grading must be positive");

  const double h_fine = options.h_max / options.hole_refine;
  const double h_tip = h_fine / options.tip_refine;
  const std::size_t m = cell.size();

  std::vector<double> xb{-0.5, 0.5}, yb{-0.5, 0.5};
  std::vector<SizeSite> xs_sites, ys_sites;
  for (std::size_t j = 0; j < m; ++j) {
    const Box& box = cell.family.boxes[j];
    const Hole& hole = cell.holes[j];
    xb.push_back(box.extent[0].lo);
    xb.push_back(box.extent[0].hi);
    yb.push_back(box.extent[1].lo);
    yb.push_back(box.extent[1].hi);
    for (const auto& seg : cell.screens[j].segments)
      if (segment_length(seg) < h_fine)
        throw Error(ErrorCode::MeshFailure,
                    "screen segment of length " + format_real(segment_length(seg)) +
                        " is below the resolvable length " + format_real(h_fine),
                    j);
    if (cell.sealed(j)) continue;
    if (hole.radius < h_fine)
      throw Error(ErrorCode::MeshFailure,
                  "hole radius " + format_real(hole.radius) +
                      " is below the resolvable radius " + format_real(h_fine),
                  j);
    const double y_lo = hole.center.y - hole.radius;
    const double y_hi = hole.center.y + hole.radius;
    yb.push_back(y_lo);
    yb.push_back(y_hi);
    xs_sites.push_back({hole.center.x, hole.center.x, h_tip});
    ys_sites.push_back({y_lo, y_lo, h_tip});
    ys_sites.push_back({y_hi, y_hi, h_tip});
    ys_sites.push_back({y_lo, y_hi, h_fine});
  }

  const auto xs = graded_partition(xb, xs_sites, options.h_max, options.grading);
  const auto ys = graded_partition(yb, ys_sites, options.h_max, options.grading);
  const std::size_t nx = xs.size(), ny = ys.size();
  const auto grid = [nx](std::size_t i, std::size_t k) { return k * nx + i; };

  Mesh mesh;
  mesh.nodes.reserve(nx * ny);
  for (std::size_t k = 0; k < ny; ++k)
    for (std::size_t i = 0; i < nx; ++i) mesh.nodes.push_back({xs[i], ys[k]});

  // Grid index ranges of each box and its hole ends.
  struct BoxCells {
    std::size_t i0, i1, k0, k1, t0, t1;
    bool open;
  };
  std::vector<BoxCells> cells;
  for (std::size_t j = 0; j < m; ++j) {
    const Box& box = cell.family.boxes[j];
    BoxCells bc{index_of(xs, box.extent[0].lo), index_of(xs, box.extent[0].hi),
                index_of(ys, box.extent[1].lo), index_of(ys, box.extent[1].hi),
                0, 0, !cell.sealed(j)};
    if (bc.open) {
      bc.t0 = index_of(ys, cell.holes[j].center.y - cell.holes[j].radius);
      bc.t1 = index_of(ys, cell.holes[j].center.y + cell.holes[j].radius);
    }
    cells.push_back(bc);
  }

  // Duplicate screen nodes; inner[j] maps grid node -> inner copy.
  std::vector<std::map<std::size_t, std::size_t>> inner(m);
  for (std::size_t j = 0; j < m; ++j) {
    const BoxCells& bc = cells[j];
    const auto on_screen = [&](std::size_t i, std::size_t k) {
      const bool boundary = i == bc.i0 || i == bc.i1 || k == bc.k0 || k == bc.k1;
      if (!boundary) return false;
      if (bc.open && i == bc.i0 && k >= bc.t0 && k <= bc.t1) return false;
      return true;
    };
    for (std::size_t k = bc.k0; k <= bc.k1; ++k)
      for (std::size_t i = bc.i0; i <= bc.i1; ++i)
        if (on_screen(i, k)) {
          const std::size_t outer = grid(i, k);
          const std::size_t copy = mesh.nodes.size();
          mesh.nodes.push_back(mesh.nodes[outer]);
          inner[j][outer] = copy;
          mesh.seams.push_back({copy, outer});
        }
  }

  for (std::size_t k = 0; k + 1 < ny; ++k) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      int tag = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (i >= cells[j].i0 && i < cells[j].i1 && k >= cells[j].k0 && k < cells[j].k1)
          tag = static_cast<int>(j) + 1;
      std::array<std::size_t, 4> q{grid(i, k), grid(i + 1, k), grid(i + 1, k + 1),
                                   grid(i, k + 1)};
      if (tag > 0) {
        const auto& copies = inner[static_cast<std::size_t>(tag - 1)];
        for (auto& v : q)
          if (auto it = copies.find(v); it != copies.end()) v = it->second;
      }
      mesh.triangles.push_back({q[0], q[1], q[2]});
      mesh.triangles.push_back({q[0], q[2], q[3]});
      mesh.tags.push_back(tag);
      mesh.tags.push_back(tag);
    }
  }

  for (std::size_t k = 0; k < ny; ++k)
    mesh.periodic_pairs[0].push_back({grid(0, k), grid(nx - 1, k)});
  for (std::size_t i = 0; i < nx; ++i)
    mesh.periodic_pairs[1].push_back({grid(i, 0), grid(i, ny - 1)});
  mesh.corners = {grid(0, 0), grid(nx - 1, 0), grid(0, ny - 1), grid(nx - 1, ny - 1)};
  return mesh;
}

bool MeshReport::has(MeshCheck check) const {
  return std::any_of(violations.begin(), violations.end(),
                     [check](const Violation& v) { return v.check == check; });
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// True when the open segment s passes through the open interior of the
// triangle.  Segments running along triangle edges do not count.
bool crosses_interior(const std::array<Point2, 3>& t, const Segment& s) {
  // Sample the segment at interior points of its overlap with the
  // triangle's bounding box; any sample strictly inside is a crossing.
  const double area = cross(t[0], t[1], t[2]);
  const auto strictly_inside = [&](const Point2& p) {
    const double tol = 1e-12 * std::abs(area);
    return cross(t[0], t[1], p) > tol && cross(t[1], t[2], p) > tol &&
           cross(t[2], t[0], p) > tol;
  };
  // Intersections of the segment line with the triangle edges bound the
  // chord; test its midpoint and the segment endpoints.
  std::vector<double> params{0.0, 1.0};
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  for (int e = 0; e < 3; ++e) {
    const Point2& p = t[e];
    const Point2& q = t[(e + 1) % 3];
    const double ex = q.x - p.x, ey = q.y - p.y;
    const double den = dx * ey - dy * ex;
    if (den == 0.0) continue;
    const double u = ((p.x - s.a.x) * ey - (p.y - s.a.y) * ex) / den;
    if (u > 0.0 && u < 1.0) params.push_back(u);
  }
  std::sort(params.begin(), params.end());
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    const double u = 0.5 * (params[i] + params[i + 1]);
    if (strictly_inside({s.a.x + u * dx, s.a.y + u * dy})) return true;
  }
  return false;
}

}  // namespace

MeshReport validate_mesh(const Mesh& mesh, const CellGeometry* cell) {
  MeshReport report;
  const std::size_t nn = mesh.nodes.size();
  report.seam_count = mesh.seams.size();
  report.periodic_pair_count = mesh.periodic_pairs[0].size() + mesh.periodic_pairs[1].size();
  report.min_angle_deg = 180.0;

  bool indices_ok = mesh.tags.size() == mesh.triangles.size();
  if (!indices_ok)
    report.violations.push_back({MeshCheck::BadIndex, 0, "tag count differs from triangle count"});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (tri[0] >= nn || tri[1] >= nn || tri[2] >= nn) {
      report.violations.push_back({MeshCheck::BadIndex, t, "node index out of range"});
      indices_ok = false;
      continue;
    }
    const Point2& a = mesh.nodes[tri[0]];
    const Point2& b = mesh.nodes[tri[1]];
    const Point2& c = mesh.nodes[tri[2]];
    const double area2 = cross(a, b, c);
    report.total_area += 0.5 * area2;
    if (!(area2 > 0.0)) {
      report.violations.push_back({MeshCheck::NonPositiveArea, t,
                                   "signed area " + format_real(0.5 * area2)});
      continue;
    }
    const double la = std::hypot(b.x - c.x, b.y - c.y);
    const double lb = std::hypot(c.x - a.x, c.y - a.y);
    const double lc = std::hypot(a.x - b.x, a.y - b.y);
    const double longest = std::max({la, lb, lc});
    report.max_aspect_ratio = std::max(report.max_aspect_ratio, longest * longest / area2);
    for (const auto& [opp, s1, s2] : {std::array{la, lb, lc}, std::array{lb, lc, la},
                                      std::array{lc, la, lb}}) {
      const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
      report.min_angle_deg = std::min(report.min_angle_deg, std::acos(cosv) * 180.0 / std::numbers::pi);
    }
  }
  if (std::abs(report.total_area - 1.0) > 1e-10)
    report.violations.push_back({MeshCheck::AreaPartition, 0,
                                 "triangle areas sum to " + format_real(report.total_area)});

  // Node -> incident triangle tags.
  std::vector<std::vector<std::size_t>> incident(nn);
  if (indices_ok)
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      for (std::size_t v : mesh.triangles[t]) incident[v].push_back(t);

  for (std::size_t s = 0; s < mesh.seams.size(); ++s) {
    const auto [in, out] = mesh.seams[s];
    if (in >= nn || out >= nn) {
      report.violations.push_back({MeshCheck::BadIndex, s, "seam node out of range"});
      continue;
    }
    if (!(mesh.nodes[in] == mesh.nodes[out]))
      report.violations.push_back({MeshCheck::SeamCoordinates, s, "seam nodes differ in position"});
    if (!indices_ok) continue;
    int inner_tag = -1;
    for (std::size_t t : incident[in]) {
      const auto& tri = mesh.triangles[t];
      if (std::find(tri.begin(), tri.end(), out) != tri.end())
        report.violations.push_back({MeshCheck::SeamTopology, s, "triangle uses both seam nodes"});
      if (mesh.tags[t] == 0 || (inner_tag != -1 && mesh.tags[t] != inner_tag))
        report.violations.push_back({MeshCheck::SeamTopology, s, "inner seam node touches another region"});
      inner_tag = mesh.tags[t];
    }
    for (std::size_t t : incident[out])
      if (inner_tag != -1 && mesh.tags[t] == inner_tag)
        report.violations.push_back({MeshCheck::SeamTopology, s, "outer seam node touches the trap interior"});
    if (incident[in].empty())
      report.violations.push_back({MeshCheck::SeamTopology, s, "inner seam node is unused"});
  }

  for (int axis = 0; axis < 2; ++axis) {
    for (std::size_t p = 0; p < mesh.periodic_pairs[axis].size(); ++p) {
      const auto [lo, hi] = mesh.periodic_pairs[axis][p];
      if (lo >= nn || hi >= nn) {
        report.violations.push_back({MeshCheck::BadIndex, p, "periodic node out of range"});
        continue;
      }
      const Point2& a = mesh.nodes[lo];
      const Point2& b = mesh.nodes[hi];
      const bool ok = axis == 0 ? (b.x - a.x == 1.0 && a.y == b.y && a.x == -0.5)
                                : (b.y - a.y == 1.0 && a.x == b.x && a.y == -0.5);
      if (!ok)
        report.violations.push_back({MeshCheck::PeriodicOffset, p,
                                     "pair is not offset by the unit vector of axis " +
                                         std::to_string(axis)});
    }
  }

  // Boundary node multisets on opposite faces.
  std::array<std::vector<double>, 4> faces;
  std::vector<bool> used(nn, false);
  if (indices_ok)
    for (const auto& tri : mesh.triangles)
      for (std::size_t v : tri) used[v] = true;
  for (std::size_t v = 0; v < nn; ++v) {
    if (!used[v]) continue;
    const Point2& p = mesh.nodes[v];
    if (p.x == -0.5) faces[0].push_back(p.y);
    if (p.x == 0.5) faces[1].push_back(p.y);
    if (p.y == -0.5) faces[2].push_back(p.x);
    if (p.y == 0.5) faces[3].push_back(p.x);
  }
  for (auto& f : faces) std::sort(f.begin(), f.end());
  if (faces[0] != faces[1])
    report.violations.push_back({MeshCheck::MirrorBoundary, 0, "x1 = -1/2 and x1 = 1/2 differ"});
  if (faces[2] != faces[3])
    report.violations.push_back({MeshCheck::MirrorBoundary, 1, "x2 = -1/2 and x2 = 1/2 differ"});

  if (cell != nullptr && indices_ok) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      const std::array<Point2, 3> pts{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
      for (const auto& screen : cell->screens)
        for (const auto& seg : screen.segments)
          if (crosses_interior(pts, seg))
            report.violations.push_back({MeshCheck::ScreenCrossing, t, "screen cuts a triangle"});
    }
  }
  return report;
}

std::string export_mesh(const Mesh& mesh) {
  std::ostringstream os;
  os << "trapgap-mesh 1\n";
  os << "nodes " << mesh.nodes.size() << "\n";
  for (const auto& p : mesh.nodes) os << format_real(p.x) << " " << format_real(p.y) << "\n";
  os << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " " << mesh.tags[t] << "\n";
  }
  os << "seams " << mesh.seams.size() << "\n";
  for (const auto& [a, b] : mesh.seams) os << a << " " << b << "\n";
  for (int axis = 0; axis < 2; ++axis) {
    os << (axis == 0 ? "periodic_x " : "periodic_y ") << mesh.periodic_pairs[axis].size() << "\n";
    for (const auto& [a, b] : mesh.periodic_pairs[axis]) os << a << " " << b << "\n";
  }
  os << "corners " << mesh.corners[0] << " " << mesh.corners[1] << " " << mesh.corners[2]
     << " " << mesh.corners[3] << "\n";
  os << "end\n";
  return os.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::istringstream next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_;
    return std::istringstream(line);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_ + 1) + ": " + what,
                line_ + 1);
  }
  [[noreturn]] void fail_here(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_) + ": " + what, line_);
  }

  std::size_t header(const std::string& keyword) {
    auto ls = next();
    std::string word;
    std::size_t count = 0;
    if (!(ls >> word >> count) || word != keyword) fail_here("expected '" + keyword + " <count>'");
    expect_end(ls);
    return count;
  }

  template <class... Ts>
  void fields(Ts&... out) {
    auto ls = next();
    if (!((ls >> out) && ...)) fail_here("malformed record");
    expect_end(ls);
  }

  void expect_end(std::istringstream& ls) {
    std::string extra;
    if (ls >> extra) fail_here("trailing data '" + extra + "'");
  }

 private:
  std::istringstream in_;
  std::size_t line_ = 0;
};

double parse_real(const std::string& token, LineReader& reader) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) reader.fail_here("bad real '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    reader.fail_here("bad real '" + token + "'");
  }
}

}  // namespace

Mesh import_mesh(const std::string& text) {
  LineReader reader(text);
  {
    auto ls = reader.next();
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "trapgap-mesh" || version != 1)
      reader.fail_here("expected 'trapgap-mesh 1'");
  }
  Mesh mesh;
  const std::size_t nn = reader.header("nodes");
  mesh.nodes.reserve(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    std::string xs, ys;
    reader.fields(xs, ys);
    mesh.nodes.push_back({parse_real(xs, reader), parse_real(ys, reader)});
  }
  const std::size_t nt = reader.header("triangles");
  for (std::size_t t = 0; t < nt; ++t) {
    Triangle tri{};
    int tag = 0;
    reader.fields(tri[0], tri[1], tri[2], tag);
    for (std::size_t v : tri)
      if (v >= nn) reader.fail_here("node index out of range");
    mesh.triangles.push_back(tri);
    mesh.tags.push_back(tag);
  }
  const auto read_pairs = [&](const std::string& keyword, std::vector<NodePair>& out) {
    const std::size_t count = reader.header(keyword);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t a = 0, b = 0;
      reader.fields(a, b);
      if (a >= nn || b >= nn) reader.fail_here("node index out of range");
      out.push_back({a, b});
    }
  };
  read_pairs("seams", mesh.seams);
  read_pairs("periodic_x", mesh.periodic_pairs[0]);
  read_pairs("periodic_y", mesh.periodic_pairs[1]);
  {
    auto ls = reader.next();
    std::string word;
    if (!(ls >> word) || word != "corners") reader.fail_here("expected 'corners'");
    for (auto& c : mesh.corners)
      if (!(ls >> c) || c >= nn) reader.fail_here("bad corner index");
    reader.expect_end(ls);
  }
  {
    auto ls = reader.next();
    std::string word;
    if (!(ls >> word) || word != "end") reader.fail_here("expected 'end'");
  }
  return mesh;
}

}  // namespace trapgap
