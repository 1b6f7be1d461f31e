#pragma once

// JSON documents for the algebra types.  Keys: "n", "kappa", "d", "b",
// "sigma", "mu", "targets", "L".  Reals are written with 17 significant
// digits so every document round-trips exactly.

#include <string>
#include <vector>

#include "trapgap/limits.hpp"

namespace trapgap {

/// %.17g rendering of a finite double; throws InvalidArgument otherwise.
std::string format_real(double x);
std::string format_real_array(const std::vector<double>& xs);

std::string to_json(const DesignParams& p);
std::string to_json(const LimitSpectrum& s);
std::string to_json(const GapTargets& t);

/// Design document with the implied spectrum echoed under "sigma"/"mu".
std::string to_json(const DesignParams& p, const LimitSpectrum& implied);

DesignParams design_from_json(const std::string& text);
LimitSpectrum spectrum_from_json(const std::string& text);
GapTargets targets_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace trapgap
