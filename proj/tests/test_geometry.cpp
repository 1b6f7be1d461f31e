#include <cmath>

#include "doctest.h"
#include "trapgap/error.hpp"
#include "trapgap/geometry.hpp"

using namespace trapgap;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("two-box layout constants") {
  // Direct long-double evaluation of the layout formulas for b = (0.1, 0.2).
  const long double total = 0.3L;
  const long double l = std::sqrt(0.5L + 0.5L * total);
  const long double l_hat = (1.0L - total) / (2.0L * l);
  const BoxFamily f = boxes_from_volumes({0.1, 0.2}, 2);
  CHECK(std::abs(f.l - static_cast<double>(l)) <= 1e-15);
  CHECK(std::abs(f.l_hat - static_cast<double>(l_hat)) <= 1e-15);
  CHECK(f.l == Approx(0.806225774829855).epsilon(1e-12));
  CHECK(f.l_hat == Approx(0.434121571062230).epsilon(1e-12));
  CHECK(f.l_j[0] == Approx(0.124034734589208).epsilon(1e-12));
  CHECK(f.l_j[1] == Approx(0.248069469178417).epsilon(1e-12));
  CHECK(f.boxes[0].extent[0].lo == Approx(-0.403112887414927).epsilon(1e-12));
  CHECK(f.boxes[0].extent[0].hi == Approx(-0.279078152825719).epsilon(1e-12));
  CHECK(f.boxes[1].extent[0].lo == Approx(0.155043418236511).epsilon(1e-12));
  CHECK(f.boxes[1].extent[0].hi == Approx(0.403112887414927).epsilon(1e-12));
  CHECK(f.boxes[0].volume() == Approx(0.1).epsilon(1e-15));
  CHECK(f.boxes[1].volume() == Approx(0.2).epsilon(1e-15));
  CHECK(validate_conditions(f).ok());
}

TEST_CASE("layouts close on the cube for several traps") {
  for (const auto& b : std::vector<std::vector<double>>{
           {0.1, 0.1, 0.1}, {0.05, 0.3, 0.1, 0.2}, {0.3, 0.2}, {0.01, 0.01, 0.01, 0.01, 0.01}}) {
    const BoxFamily f = boxes_from_volumes(b, 2);
    CHECK(f.boxes.back().extent[0].hi == Approx(0.5 * f.l).epsilon(1e-14));
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(f.boxes[j].volume() == Approx(b[j]).epsilon(1e-14));
    CHECK(validate_conditions(f).ok());
  }
  const BoxFamily f3 = boxes_from_volumes({0.1, 0.2, 0.05}, 3);
  CHECK(f3.boxes[1].volume() == Approx(0.2).epsilon(1e-14));
  CHECK(validate_conditions(f3).ok());
}

TEST_CASE("single and empty layouts") {
  const BoxFamily one = boxes_from_volumes({0.5}, 2);
  CHECK(one.l == Approx(std::sqrt(0.75)).epsilon(1e-15));
  CHECK(one.boxes[0].volume() == Approx(0.5).epsilon(1e-15));
  const ConditionReport r = validate_conditions(one);
  CHECK(r.ok());
  // Left face sits (1 - l)/2 from the cell boundary.
  CHECK(r.flat_radius[0] == Approx(0.5 * (1 - one.l)).epsilon(1e-14));
  const BoxFamily none = boxes_from_volumes({}, 2);
  CHECK(none.size() == 0);
  CHECK(validate_conditions(none).ok());
  CHECK(code_of([] { boxes_from_volumes({0.6, 0.5}, 2); }) == ErrorCode::VolumeBudgetExceeded);
  CHECK(code_of([] { boxes_from_volumes({0.1, -0.1}, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("condition violations are reported") {
  BoxFamily f = boxes_from_volumes({0.1, 0.2}, 2);
  // Slide box 2 onto box 1 so the two share a face.
  const double shift = f.boxes[1].extent[0].lo - f.boxes[0].extent[0].hi;
  f.boxes[1].extent[0].lo -= shift;
  f.boxes[1].extent[0].hi -= shift;
  const ConditionReport touching = validate_conditions(f);
  CHECK_FALSE(touching.ok());
  CHECK(touching.violations.front().condition == Condition::Disjoint);

  BoxFamily g = boxes_from_volumes({0.1}, 2);
  g.boxes[0].extent[1] = {-0.6, 0.2};
  const ConditionReport outside = validate_conditions(g);
  bool contained = false;
  for (const auto& v : outside.violations) contained |= v.condition == Condition::Contained;
  CHECK(contained);
}

TEST_CASE("cell with holes") {
  const BoxFamily f = boxes_from_volumes({0.5}, 2);
  const CellGeometry c = build_cell(f, {0.02});
  REQUIRE(c.size() == 1);
  CHECK(c.holes[0].center == Point2{f.boxes[0].extent[0].lo, 0.0});
  CHECK(c.holes[0].radius == 0.02);
  const auto& segs = c.screens[0].segments;
  REQUIRE(segs.size() == 5);
  // The two left-face pieces leave a gap of length 0.04 around y = 0.
  CHECK(segs[3].b.y == Approx(0.02));
  CHECK(segs[4].a.y == Approx(-0.02));
  double perimeter = 0;
  for (const auto& s : segs) perimeter += std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
  CHECK(perimeter == Approx(2 * (f.l + f.l_j[0]) - 0.04).epsilon(1e-14));

  const CellGeometry sealed = build_sealed_cell(f);
  CHECK(sealed.sealed(0));
  CHECK(sealed.screens[0].segments.size() == 4);

  CHECK(code_of([&] { build_cell(f, {0.2}); }) == ErrorCode::HoleTooLarge);
  CHECK(code_of([&] { build_cell(f, {0.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_cell(f, {0.01, 0.01}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { build_cell(boxes_from_volumes({0.1}, 3), {0.01}); }) ==
        ErrorCode::UnsupportedDimension);
}

TEST_CASE("geometry documents round trip exactly") {
  const CellGeometry c = build_cell(boxes_from_volumes({0.1, 0.2}, 2), {0.013, 0.021});
  const std::string text = export_geometry(c);
  const CellGeometry d = import_geometry(text);
  CHECK(export_geometry(d) == text);
  CHECK(d.family.l == c.family.l);
  CHECK(d.holes[1].radius == c.holes[1].radius);
  CHECK(d.screens[1].segments.size() == c.screens[1].segments.size());
  CHECK(d.screens[0].segments[2].a == c.screens[0].segments[2].a);
  CHECK_THROWS_AS(import_geometry("{\"n\": 2"), Error);
}
