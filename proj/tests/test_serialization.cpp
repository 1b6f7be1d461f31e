#include <cmath>
#include <limits>

#include "doctest.h"
#include "trapgap/error.hpp"
#include "trapgap/serialization.hpp"

using namespace trapgap;

TEST_CASE("reals keep every bit through text") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_real(x)) == x);
  CHECK_THROWS_AS(format_real(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK(format_real_array({1, 0.5}) == "[1, 0.5]");
  CHECK(format_real_array({}) == "[]");
}

TEST_CASE("design documents round trip") {
  const DesignParams p{3, 8.0, {0.1 / 3.0, 0.7}, {0.125, 0.2}};
  const DesignParams q = design_from_json(to_json(p));
  CHECK(q.n == 3);
  CHECK(q.kappa == 8.0);
  CHECK(q.d == p.d);
  CHECK(q.b == p.b);
  const DesignParams r = design_from_json(to_json(p, {{1, 2}, {1.5, 3}}));
  CHECK(r.d == p.d);
}

TEST_CASE("spectrum and target documents round trip") {
  const LimitSpectrum s{{1.0 / 7.0, 2.0}, {0.2, 2.5}};
  const LimitSpectrum t = spectrum_from_json(to_json(s));
  CHECK(t.sigma == s.sigma);
  CHECK(t.mu == s.mu);
  const GapTargets g{{{1, 2}, {3, 4.25}}, 10};
  const GapTargets h = targets_from_json(to_json(g));
  CHECK(h.intervals == g.intervals);
  CHECK(h.L == 10);
}

TEST_CASE("malformed documents") {
  const auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { design_from_json("{\"d\": [1,"); }) == ErrorCode::ParseError);
  CHECK(code([] { design_from_json("{\"n\": 2.5, \"d\": [], \"b\": []}"); }) ==
        ErrorCode::ParseError);
  CHECK(code([] { design_from_json("{\"d\": [1], \"b\": []}"); }) == ErrorCode::ParseError);
  CHECK(code([] { design_from_json("{\"d\": [\"x\"], \"b\": [0.1]}"); }) == ErrorCode::ParseError);
  CHECK(code([] { targets_from_json("{\"targets\": [[1, 2, 3]], \"L\": 4}"); }) ==
        ErrorCode::ParseError);
  CHECK(code([] { targets_from_json("{\"targets\": [[1, 2]]}"); }) == ErrorCode::ParseError);
  CHECK(code([] { spectrum_from_json("{\"sigma\": [1], \"mu\": []}"); }) == ErrorCode::ParseError);
}
