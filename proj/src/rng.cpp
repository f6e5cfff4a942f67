#include "switchpair/rng.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace switchpair::rng {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& s) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    if (consumed != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError("distribution spec: bad number '" + s + "'");
  }
}

}  // namespace

Distribution Distribution::parse(const std::string& spec) {
  const auto parts = split(spec, ':');
  const std::string& name = parts.front();
  const auto need = [&](std::size_t n) {
    if (parts.size() != n + 1)
      throw InvalidInputError("distribution spec '" + spec +
                              "': wrong parameter count");
  };
  if (name == "constant") {
    need(1);
    return constant(parse_double(parts[1]));
  }
  if (name == "uniform") {
    need(2);
    return uniform(parse_double(parts[1]), parse_double(parts[2]));
  }
  if (name == "normal") {
    need(2);
    return truncated_normal(parse_double(parts[1]), parse_double(parts[2]));
  }
  if (name == "lognormal") {
    need(2);
    return lognormal_median(parse_double(parts[1]), parse_double(parts[2]));
  }
  throw InvalidInputError("distribution spec '" + spec +
                          "': unknown family (expected constant, uniform, "
                          "normal or lognormal)");
}

std::string Distribution::to_string() const {
  std::ostringstream os;
  switch (family) {
    case DistFamily::Constant:
      os << "constant:" << a;
      break;
    case DistFamily::Uniform:
      os << "uniform:" << a << ":" << b;
      break;
    case DistFamily::TruncatedNormal:
      os << "normal:" << a << ":" << b;
      break;
    case DistFamily::LogNormal:
      os << "lognormal:" << a << ":" << b;
      break;
  }
  return os.str();
}

}  // namespace switchpair::rng
