#pragma once

// Serialization: differential-polynomial expression trees and field grids to
// JSON/CSV, with fixed 17-significant-digit formatting so identical runs
// produce byte-identical artifacts.

#include "soltk/jet.hpp"
#include "soltk/laxflow.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

namespace soltk {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string rat_str(const Rat& r) {
  return r.numerator().str() + "/" + r.denominator().str();
}

inline nlohmann::ordered_json to_json(const GaussRat& c) {
  return {{"re", rat_str(c.re)}, {"im", rat_str(c.im)}};
}

// Monomial as runs [component, order, power].
inline nlohmann::ordered_json to_json(const Monomial& m) {
  nlohmann::ordered_json jets = nlohmann::ordered_json::array();
  for (size_t k = 0; k < m.size();) {
    size_t e = k;
    while (e < m.size() && m[e] == m[k]) ++e;
    jets.push_back({m[k].comp, m[k].ord, static_cast<int>(e - k)});
    k = e;
  }
  return jets;
}

inline nlohmann::ordered_json to_json(const DiffPoly& p) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [m, c] : p.terms)
    terms.push_back({{"coeff", to_json(c)}, {"jets", to_json(m)}});
  return terms;
}

inline nlohmann::ordered_json to_json(const DiffPolyMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.dim; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.dim; ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return {{"size", m.dim}, {"entries", rows}};
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SoltkError("cannot open " + path + " for writing");
  f << body;
}

inline std::string to_csv(const SolutionGrid& g) {
  std::string out = "x,t";
  for (const auto& n : g.names) out += "," + n + "_re," + n + "_im";
  out += "\n";
  for (int it = 0; it < g.dom.nt; ++it)
    for (int ix = 0; ix < g.dom.nx; ++ix) {
      out += fmt17(g.dom.x(ix)) + "," + fmt17(g.dom.t(it));
      for (const auto& c : g.comp) {
        const Cplx v = c(ix, it);
        out += "," + fmt17(v.real()) + "," + fmt17(v.imag());
      }
      out += "\n";
    }
  return out;
}

inline std::string to_csv(const MatGrid& g) {
  const int n = g.m.empty() ? 0 : static_cast<int>(g.m.front().rows());
  std::string out = "x,t";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::string tag = std::to_string(i) + std::to_string(j);
      out += ",m" + tag + "_re,m" + tag + "_im";
    }
  out += "\n";
  for (int it = 0; it < g.dom.nt; ++it)
    for (int ix = 0; ix < g.dom.nx; ++ix) {
      out += fmt17(g.dom.x(ix)) + "," + fmt17(g.dom.t(it));
      const Mat& m = g.at(ix, it);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out += "," + fmt17(m(i, j).real()) + "," + fmt17(m(i, j).imag());
      out += "\n";
    }
  return out;
}

// FNV-1a, for config digests in reports.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace soltk
