#include "trapgap/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "trapgap/error.hpp"

namespace trapgap {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what(), e.byte);
  }
}

std::vector<double> real_array(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const json& arr = doc.at(key);
  if (!arr.is_array())
    throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number())
      throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

double real_or(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  if (!doc.at(key).is_number())
    throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" must be a number");
  return doc.at(key).get<double>();
}

}  // namespace

std::string format_real(double x) {
  if (!std::isfinite(x))
    throw Error(ErrorCode::InvalidArgument, "cannot serialize a non-finite real");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_real_array(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_real(xs[i]);
  }
  return out + "]";
}

std::string to_json(const DesignParams& p) {
  std::ostringstream os;
  os << "{\n  \"n\": " << p.n << ",\n  \"kappa\": " << format_real(p.kappa)
     << ",\n  \"d\": " << format_real_array(p.d)
     << ",\n  \"b\": " << format_real_array(p.b) << "\n}\n";
  return os.str();
}

std::string to_json(const DesignParams& p, const LimitSpectrum& implied) {
  std::ostringstream os;
  os << "{\n  \"n\": " << p.n << ",\n  \"kappa\": " << format_real(p.kappa)
     << ",\n  \"d\": " << format_real_array(p.d)
     << ",\n  \"b\": " << format_real_array(p.b)
     << ",\n  \"sigma\": " << format_real_array(implied.sigma)
     << ",\n  \"mu\": " << format_real_array(implied.mu) << "\n}\n";
  return os.str();
}

std::string to_json(const LimitSpectrum& s) {
  return "{\n  \"sigma\": " + format_real_array(s.sigma) +
         ",\n  \"mu\": " + format_real_array(s.mu) + "\n}\n";
}

std::string to_json(const GapTargets& t) {
  std::string out = "{\n  \"targets\": [";
  for (std::size_t j = 0; j < t.intervals.size(); ++j) {
    if (j) out += ", ";
    out += "[" + format_real(t.intervals[j].first) + ", " +
           format_real(t.intervals[j].second) + "]";
  }
  return out + "],\n  \"L\": " + format_real(t.L) + "\n}\n";
}

DesignParams design_from_json(const std::string& text) {
  const json doc = parse(text);
  DesignParams p;
  if (doc.contains("n")) {
    if (!doc.at("n").is_number_integer())
      throw Error(ErrorCode::ParseError, "\"n\" must be an integer");
    p.n = doc.at("n").get<int>();
  }
  p.kappa = real_or(doc, "kappa", 0.0);
  p.d = real_array(doc, "d");
  p.b = real_array(doc, "b");
  if (p.d.size() != p.b.size())
    throw Error(ErrorCode::ParseError, "\"d\" and \"b\" differ in length");
  return p;
}

LimitSpectrum spectrum_from_json(const std::string& text) {
  const json doc = parse(text);
  LimitSpectrum s;
  s.sigma = real_array(doc, "sigma");
  s.mu = real_array(doc, "mu");
  if (s.sigma.size() != s.mu.size())
    throw Error(ErrorCode::ParseError, "\"sigma\" and \"mu\" differ in length");
  return s;
}

GapTargets targets_from_json(const std::string& text) {
  const json doc = parse(text);
  GapTargets t;
  if (!doc.contains("targets") || !doc.at("targets").is_array())
    throw Error(ErrorCode::ParseError, "missing \"targets\" array");
  for (const auto& pair : doc.at("targets")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number())
      throw Error(ErrorCode::ParseError, "each target must be [alpha, beta]");
    t.intervals.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  if (!doc.contains("L"))
    throw Error(ErrorCode::ParseError, "missing cutoff \"L\"");
  t.L = real_or(doc, "L", 0.0);
  return t;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path);
}

}  // namespace trapgap
