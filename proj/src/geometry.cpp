#include "trapgap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "trapgap/error.hpp"
#include "trapgap/serialization.hpp"

namespace trapgap {

double Box::volume() const {
  double v = 1.0;
  for (double s : side) v *= s;
  return v;
}

BoxFamily boxes_from_volumes(const std::vector<double>& b, int n) {
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (b.size() > kMaxTraps)
    throw Error(ErrorCode::InvalidArgument, "too many traps");
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j] > 0.0))
      throw Error(ErrorCode::InvalidArgument, "volume must be positive", j);
    total += b[j];
  }
  if (!(total < 1.0))
    throw Error(ErrorCode::VolumeBudgetExceeded,
                "trap volumes sum to " + format_real(total));

  const std::size_t m = b.size();
  BoxFamily f;
  f.n = n;
  f.l = std::pow(0.5 + 0.5 * total, 1.0 / n);
  const double face = std::pow(f.l, n - 1);
  const double gaps = static_cast<double>(std::max<std::size_t>(m, 2) - 1);
  f.l_hat = (1.0 - total) / (2.0 * gaps * face);

  double x = -0.5 * f.l;
  for (std::size_t j = 0; j < m; ++j) {
    const double lj = b[j] / face;
    f.l_j.push_back(lj);
    Box box;
    box.extent.push_back({x, x + lj});
    box.side.push_back(lj);
    for (int k = 1; k < n; ++k) {
      box.extent.push_back({-0.5 * f.l, 0.5 * f.l});
      box.side.push_back(f.l);
    }
    f.boxes.push_back(std::move(box));
    x += lj + f.l_hat;
  }
  return f;
}

namespace {

double point_box_distance(const std::vector<double>& p, const Box& box) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double lo = box.extent[k].lo, hi = box.extent[k].hi;
    const double d = p[k] < lo ? lo - p[k] : (p[k] > hi ? p[k] - hi : 0.0);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double box_box_distance(const Box& a, const Box& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.extent.size(); ++k) {
    const double d = std::max({0.0, b.extent[k].lo - a.extent[k].hi,
                               a.extent[k].lo - b.extent[k].hi});
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<double> left_face_midpoint(const Box& box) {
  std::vector<double> p(box.extent.size());
  p[0] = box.extent[0].lo;
  for (std::size_t k = 1; k < p.size(); ++k)
    p[k] = 0.5 * (box.extent[k].lo + box.extent[k].hi);
  return p;
}

std::string describe(const Box& box) {
  std::ostringstream os;
  for (std::size_t k = 0; k < box.extent.size(); ++k)
    os << (k ? " x " : "") << "(" << format_real(box.extent[k].lo) << ", "
       << format_real(box.extent[k].hi) << ")";
  return os.str();
}

}  // namespace

ConditionReport validate_conditions(const BoxFamily& f) {
  ConditionReport report;
  const std::size_t m = f.boxes.size();
  report.min_separation = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double dist = box_box_distance(f.boxes[i], f.boxes[j]);
      report.min_separation = std::min(report.min_separation, dist);
      if (!(dist > 0.0))
        report.violations.push_back({Condition::Disjoint, {i, j},
                                     "closures of boxes intersect"});
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    const Box& box = f.boxes[j];
    bool inside = box.extent.size() == static_cast<std::size_t>(f.n);
    for (const auto& iv : box.extent)
      inside = inside && iv.lo > -0.5 && iv.hi < 0.5 && iv.lo < iv.hi;
    if (!inside)
      report.violations.push_back(
          {Condition::Contained, {j}, "closure " + describe(box) + " not inside Y"});
  }

  for (std::size_t j = 0; j < m; ++j) {
    const Box& box = f.boxes[j];
    if (box.extent.size() != static_cast<std::size_t>(f.n)) {
      report.flat_radius.push_back(0.0);
      report.violations.push_back({Condition::FlatPart, {j}, "wrong dimension"});
      continue;
    }
    const auto c = left_face_midpoint(box);
    double r = box.extent[0].hi - box.extent[0].lo;
    for (std::size_t k = 1; k < c.size(); ++k)
      r = std::min(r, 0.5 * (box.extent[k].hi - box.extent[k].lo));
    for (std::size_t k = 0; k < c.size(); ++k)
      r = std::min({r, c[k] + 0.5, 0.5 - c[k]});
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) r = std::min(r, point_box_distance(c, f.boxes[i]));
    report.flat_radius.push_back(r);
    if (!(r > 0.0))
      report.violations.push_back(
          {Condition::FlatPart, {j}, "no flat ball around the left-face midpoint"});
  }
  return report;
}

namespace {

Screen make_screen(const Box& box, double radius) {
  const double x0 = box.extent[0].lo, x1 = box.extent[0].hi;
  const double y0 = box.extent[1].lo, y1 = box.extent[1].hi;
  const double yc = 0.5 * (y0 + y1);
  Screen s;
  s.segments.push_back({{x0, y0}, {x1, y0}});
  s.segments.push_back({{x1, y0}, {x1, y1}});
  s.segments.push_back({{x1, y1}, {x0, y1}});
  if (radius > 0.0) {
    s.segments.push_back({{x0, y1}, {x0, yc + radius}});
    s.segments.push_back({{x0, yc - radius}, {x0, y0}});
  } else {
    s.segments.push_back({{x0, y1}, {x0, y0}});
  }
  return s;
}

CellGeometry assemble_cell(const BoxFamily& f, const std::vector<double>& radii,
                           bool allow_sealed) {
  if (f.n != 2)
    throw Error(ErrorCode::UnsupportedDimension,
                "cell geometry is two-dimensional only, got n=" + std::to_string(f.n));
  if (radii.size() != f.size())
    throw Error(ErrorCode::InvalidArgument, "one hole radius per box is required");
  const ConditionReport report = validate_conditions(f);
  if (!report.ok())
    throw Error(ErrorCode::InvalidArgument,
                "box family violates its conditions: " + report.violations[0].detail);

  CellGeometry c;
  c.family = f;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double r = radii[j];
    if (!(r > 0.0) && !(allow_sealed && r == 0.0))
      throw Error(ErrorCode::InvalidArgument, "hole radius must be positive", j);
    if (!(r < report.flat_radius[j]))
      throw Error(ErrorCode::HoleTooLarge,
                  "hole radius " + format_real(r) + " not below flat radius " +
                      format_real(report.flat_radius[j]),
                  j);
    const auto mid = left_face_midpoint(f.boxes[j]);
    c.holes.push_back({{mid[0], mid[1]}, r, report.flat_radius[j]});
    c.screens.push_back(make_screen(f.boxes[j], r));
  }
  return c;
}

}  // namespace

CellGeometry build_cell(const BoxFamily& f, const std::vector<double>& radii) {
  return assemble_cell(f, radii, false);
}

CellGeometry build_sealed_cell(const BoxFamily& f) {
  return assemble_cell(f, std::vector<double>(f.size(), 0.0), true);
}

std::string export_geometry(const CellGeometry& c) {
  const auto pt = [](const Point2& p) {
    return "[" + format_real(p.x) + ", " + format_real(p.y) + "]";
  };
  std::ostringstream os;
  const BoxFamily& f = c.family;
  os << "{\n  \"n\": " << f.n << ",\n  \"l\": " << format_real(f.l)
     << ",\n  \"l_hat\": " << format_real(f.l_hat)
     << ",\n  \"l_j\": " << format_real_array(f.l_j) << ",\n  \"boxes\": [";
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Box& box = f.boxes[j];
    std::vector<double> lo, hi;
    for (const auto& iv : box.extent) {
      lo.push_back(iv.lo);
      hi.push_back(iv.hi);
    }
    os << (j ? ",\n" : "\n") << "    {\"lo\": " << format_real_array(lo)
       << ", \"hi\": " << format_real_array(hi)
       << ", \"side\": " << format_real_array(box.side) << "}";
  }
  os << (f.size() ? "\n  ]" : "]") << ",\n  \"holes\": [";
  for (std::size_t j = 0; j < c.holes.size(); ++j) {
    const Hole& h = c.holes[j];
    os << (j ? ",\n" : "\n") << "    {\"center\": " << pt(h.center)
       << ", \"radius\": " << format_real(h.radius)
       << ", \"flat_radius\": " << format_real(h.flat_radius)
       << ", \"face\": \"x1_min\"}";
  }
  os << (c.holes.empty() ? "]" : "\n  ]") << ",\n  \"screens\": [";
  for (std::size_t j = 0; j < c.screens.size(); ++j) {
    os << (j ? ",\n" : "\n") << "    [";
    const auto& segs = c.screens[j].segments;
    for (std::size_t s = 0; s < segs.size(); ++s)
      os << (s ? ", " : "") << "[" << pt(segs[s].a) << ", " << pt(segs[s].b) << "]";
    os << "]";
  }
  os << (c.screens.empty() ? "]" : "\n  ]") << ",\n  \"regions\": [";
  os << "{\"tag\": 0, \"region\": \"exterior\"}";
  for (std::size_t j = 0; j < c.holes.size(); ++j)
    os << ", {\"tag\": " << j + 1 << ", \"region\": \"box\", \"box\": " << j << "}";
  os << "]\n}\n";
  return os.str();
}

namespace {

using nlohmann::json;

std::vector<double> reals(const json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, "expected an array of reals");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, "expected a real");
    out.push_back(v.get<double>());
  }
  return out;
}

Point2 point(const json& arr) {
  const auto v = reals(arr);
  if (v.size() != 2) throw Error(ErrorCode::ParseError, "expected a 2D point");
  return {v[0], v[1]};
}

}  // namespace

CellGeometry import_geometry(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    CellGeometry c;
    BoxFamily& f = c.family;
    f.n = doc.at("n").get<int>();
    f.l = doc.at("l").get<double>();
    f.l_hat = doc.at("l_hat").get<double>();
    f.l_j = reals(doc.at("l_j"));
    for (const auto& jb : doc.at("boxes")) {
      Box box;
      const auto lo = reals(jb.at("lo"));
      const auto hi = reals(jb.at("hi"));
      box.side = reals(jb.at("side"));
      if (lo.size() != hi.size() || lo.size() != box.side.size())
        throw Error(ErrorCode::ParseError, "box extents disagree in dimension");
      for (std::size_t k = 0; k < lo.size(); ++k) box.extent.push_back({lo[k], hi[k]});
      f.boxes.push_back(std::move(box));
    }
    for (const auto& jh : doc.at("holes"))
      c.holes.push_back({point(jh.at("center")), jh.at("radius").get<double>(),
                         jh.at("flat_radius").get<double>()});
    for (const auto& js : doc.at("screens")) {
      Screen s;
      for (const auto& seg : js) {
        if (!seg.is_array() || seg.size() != 2)
          throw Error(ErrorCode::ParseError, "screen segment must hold two points");
        s.segments.push_back({point(seg[0]), point(seg[1])});
      }
      c.screens.push_back(std::move(s));
    }
    if (c.holes.size() != f.size() || c.screens.size() != f.size())
      throw Error(ErrorCode::ParseError, "holes, screens and boxes differ in count");
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace trapgap
