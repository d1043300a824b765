#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/error.hpp"
#include "fracsol/evolution.hpp"
#include "fracsol/field.hpp"
#include "fracsol/ground_state.hpp"
#include "fracsol/kp2d.hpp"

namespace fracsol::io {

namespace fs = std::filesystem;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("io_error", "write failed for " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json wave_metadata(const SolitaryWave& w) {
  const auto& g = w.profile.grid();
  return {{"c", w.c},
          {"alpha", w.model.symbol.is_pure_power() ? w.model.symbol.alpha() : 0.0},
          {"family", to_string(w.model.family)},
          {"symbol", to_string(w.model.symbol.kind())},
          {"p", w.model.p},
          {"bbm_form", to_string(w.model.bbm_form)},
          {"residual_sup", w.residual_sup},
          {"residual_l2", w.residual_l2},
          {"iterations", w.iterations},
          {"dealiased", w.dealiased},
          {"n", g.n()},
          {"L", g.half_length()}};
}

/// CSV `x,value` with 17 significant digits, plus an optional JSON sidecar.
inline void save_profile(const RealField& u, const nlohmann::json& meta, const fs::path& path) {
  std::string s = "x,value\n";
  s.reserve(u.size() * 48);
  for (std::size_t k = 0; k < u.size(); ++k) s += fmt17(u.grid().x(k)) + "," + fmt17(u[k]) + "\n";
  write_text(path, s);
  if (!meta.is_null()) {
    nlohmann::json m = meta;
    m["n"] = u.grid().n();
    m["L"] = u.grid().half_length();
    write_text(sidecar_path(path), m.dump(2) + "\n");
  }
}

struct LoadedProfile {
  RealField field;
  nlohmann::json meta;  // null when no sidecar exists
};

inline double parse_number(const std::string& tok, std::size_t line, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line) + ": malformed " + what + " '" + tok + "'");
  }
}

inline LoadedProfile load_profile(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError("line 1: empty file " + path.string());
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw FormatError("line 1: expected header 'x,value'");
  std::vector<double> xs, vs;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw FormatError("line " + std::to_string(lineno) + ": expected two comma-separated columns");
    const double x = parse_number(line.substr(0, comma), lineno, "x");
    const double v = parse_number(line.substr(comma + 1), lineno, "value");
    if (!std::isfinite(x) || !std::isfinite(v)) throw FormatError("line " + std::to_string(lineno) + ": non-finite entry");
    xs.push_back(x);
    vs.push_back(v);
    lines.push_back(lineno);
  }
  if (xs.size() < 8) throw FormatError("profile has fewer than 8 rows");
  const double L = -xs.front();
  if (!(L > 0.0)) throw FormatError("line 2: first x must equal -L < 0");
  // Reference spacing from the median step, so a missing row is located exactly.
  std::vector<double> steps(xs.size() - 1);
  for (std::size_t k = 1; k < xs.size(); ++k) steps[k - 1] = xs[k] - xs[k - 1];
  std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
  const double dx = steps[steps.size() / 2];
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double step = xs[k] - xs[k - 1];
    if (std::abs(step - dx) > 1e-9 * dx)
      throw FormatError("line " + std::to_string(lines[k]) + ": non-uniform spacing (missing or extra row?)");
  }
  if (std::abs(dx - 2.0 * L / static_cast<double>(xs.size())) > 1e-9 * dx)
    throw FormatError("line " + std::to_string(lines.back()) + ": spacing does not match 2L/n (missing or extra trailing rows?)");
  if (!is_power_of_two(xs.size()))
    throw FormatError("row count " + std::to_string(xs.size()) + " is not a power of two");
  Grid1D g(xs.size(), L);
  LoadedProfile out{RealField(g, std::move(vs)), nullptr};
  const fs::path side = sidecar_path(path);
  if (fs::exists(side)) {
    try {
      out.meta = nlohmann::json::parse(read_text(side));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(side.string() + ": " + e.what());
    }
    if (out.meta.contains("n") && out.meta["n"].get<std::size_t>() != g.n())
      throw FormatError("grid mismatch: sidecar n=" + out.meta["n"].dump() + " but CSV has " + std::to_string(g.n()) + " rows");
    if (out.meta.contains("L") && std::abs(out.meta["L"].get<double>() - L) > 1e-9 * L)
      throw FormatError("grid mismatch: sidecar L=" + out.meta["L"].dump() + " but CSV implies L=" + fmt17(L));
  }
  return out;
}

inline void save_trace(const EvolutionTrace& tr, const fs::path& path) {
  std::string s = tr.family == Family::FBBM ? "t,quadratic,hamiltonian,orbital_distance\n" : "t,mass,energy,orbital_distance\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    s += fmt17(tr.times[i]) + "," + fmt17(tr.series_a[i]) + "," + fmt17(tr.series_b[i]) + ",";
    if (i < tr.orbital_distance.size()) s += fmt17(tr.orbital_distance[i]);
    s += "\n";
  }
  write_text(path, s);
}

inline void save_field_2d(const RealField2D& u, const fs::path& path) {
  const Grid2D& g = u.grid();
  std::string s = "x,y,value\n";
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      s += fmt17(g.x_axis().x(i)) + "," + fmt17(g.y_axis().x(j)) + "," + fmt17(u(i, j)) + "\n";
  write_text(path, s);
  nlohmann::json m = {{"nx", g.nx()}, {"ny", g.ny()}, {"Lx", g.x_axis().half_length()}, {"Ly", g.y_axis().half_length()}};
  write_text(sidecar_path(path), m.dump(2) + "\n");
}

}  // namespace fracsol::io
