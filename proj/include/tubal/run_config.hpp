#pragma once
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "tubal/ista.hpp"

namespace tubal {

/// Parsed "key = value" run configuration. Solver fields mirror
/// SolverConfig; beta is optional and defaults to the data-driven estimate
/// when absent. Paths given here are overridden by command-line arguments.
struct RunConfig {
  SolverConfig solver;
  bool beta_set = false;
  Index patch1 = 16, patch2 = 8, patch3 = 8;
  Index stride1 = 8, stride2 = 4, stride3 = 4;
  double target_snr_db = 0.14;
  std::string input, output, report, dict;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline config_error cfg_err(const std::string& name, int line, const std::string& msg) {
  return config_error(name + ":" + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& name, int line, const std::string& key,
                           const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw cfg_err(name, line, "expected a number for '" + key + "', got '" + v + "'");
  }
}

inline long long parse_int(const std::string& name, int line, const std::string& key,
                           const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw cfg_err(name, line, "expected an integer for '" + key + "', got '" + v + "'");
  return x;
}

inline long long parse_positive(const std::string& name, int line, const std::string& key,
                                const std::string& v) {
  const long long x = parse_int(name, line, key, v);
  if (x <= 0) throw cfg_err(name, line, "'" + key + "' must be positive, got '" + v + "'");
  return x;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& is, const std::string& name = "<config>") {
  RunConfig rc;
  std::string line;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw detail::cfg_err(name, ln, "expected 'key = value', got '" + stripped + "'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string val = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw detail::cfg_err(name, ln, "empty key");
    if (val.empty()) throw detail::cfg_err(name, ln, "empty value for '" + key + "'");

    if (key == "beta") {
      const double b = detail::parse_double(name, ln, key, val);
      if (!(b > 0) || !std::isfinite(b))
        throw detail::cfg_err(name, ln, "'beta' must be a positive number, got '" + val + "'");
      rc.solver.beta = b;
      rc.beta_set = true;
    } else if (key == "atoms") {
      rc.solver.atoms = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "max_outer") {
      const long long x = detail::parse_int(name, ln, key, val);
      if (x < 0) throw detail::cfg_err(name, ln, "'max_outer' must be nonnegative");
      rc.solver.max_outer = int(x);
    } else if (key == "max_inner") {
      rc.solver.max_inner = int(detail::parse_positive(name, ln, key, val));
    } else if (key == "eta") {
      const double e = detail::parse_double(name, ln, key, val);
      if (!(e > 1)) throw detail::cfg_err(name, ln, "'eta' must exceed 1, got '" + val + "'");
      rc.solver.eta = e;
    } else if (key == "tol_obj") {
      const double t = detail::parse_double(name, ln, key, val);
      if (!(t > 0)) throw detail::cfg_err(name, ln, "'tol_obj' must be positive");
      rc.solver.tol_obj = t;
    } else if (key == "newton_tol") {
      const double t = detail::parse_double(name, ln, key, val);
      if (!(t > 0)) throw detail::cfg_err(name, ln, "'newton_tol' must be positive");
      rc.solver.newton_tol = t;
    } else if (key == "max_newton") {
      rc.solver.max_newton = int(detail::parse_positive(name, ln, key, val));
    } else if (key == "seed") {
      const long long s = detail::parse_int(name, ln, key, val);
      if (s < 0) throw detail::cfg_err(name, ln, "'seed' must be nonnegative");
      rc.solver.seed = std::uint64_t(s);
    } else if (key == "patch1") {
      rc.patch1 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "patch2") {
      rc.patch2 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "patch3") {
      rc.patch3 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "stride1") {
      rc.stride1 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "stride2") {
      rc.stride2 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "stride3") {
      rc.stride3 = Index(detail::parse_positive(name, ln, key, val));
    } else if (key == "target_snr_db") {
      rc.target_snr_db = detail::parse_double(name, ln, key, val);
    } else if (key == "input") {
      rc.input = val;
    } else if (key == "output") {
      rc.output = val;
    } else if (key == "report") {
      rc.report = val;
    } else if (key == "dict") {
      rc.dict = val;
    } else {
      throw detail::cfg_err(name, ln, "unknown key '" + key + "'");
    }
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file '" + path + "'");
  return parse_run_config(is, path);
}

}  // namespace tubal
