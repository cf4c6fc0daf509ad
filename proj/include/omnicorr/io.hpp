#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "omnicorr/models.hpp"
#include "omnicorr/omnibus.hpp"
#include "omnicorr/types.hpp"

namespace omnicorr {

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

}  // namespace detail

// Graph collection text format:
//   line 1: "n m"
//   then m blocks, each of n-1 lines; line i of a block holds the
//   upper-triangle entries A(i, i+1..n) as space-separated 0/1.
inline void write_graphs(const std::string& path, const GraphCollection& g) {
  std::ofstream out = detail::open_out(path);
  out << g.n << ' ' << g.m << '\n';
  for (const Matrix& a : g.graphs) {
    for (Eigen::Index i = 0; i + 1 < g.n; ++i) {
      for (Eigen::Index j = i + 1; j < g.n; ++j) {
        out << (a(i, j) > 0.5 ? '1' : '0');
        if (j + 1 < g.n) out << ' ';
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<Matrix> read_graphs(const std::string& path) {
  std::ifstream in = detail::open_in(path);
  Eigen::Index n = 0, m = 0;
  in >> n >> m;
  if (!in || n < 1 || m < 1) throw std::runtime_error("bad graph header in " + path);
  std::vector<Matrix> graphs;
  graphs.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        int bit = 0;
        in >> bit;
        if (!in || (bit != 0 && bit != 1)) {
          throw std::runtime_error("bad graph payload in " + path);
        }
        a(i, j) = a(j, i) = bit;
      }
    }
    graphs.push_back(std::move(a));
  }
  return graphs;
}

/// Structured-text sidecar describing how a collection was sampled.
inline void write_graph_metadata(const std::string& path, std::uint64_t seed,
                                 const std::string& family, const Vector& params,
                                 const PointMassMixture& f) {
  std::ofstream out = detail::open_out(path);
  out << "[sampling]\n";
  out << "seed = " << seed << '\n';
  out << "family = " << family << '\n';
  out << "params =";
  for (Eigen::Index i = 0; i < params.size(); ++i) out << ' ' << format_double(params[i]);
  out << "\n\n[mixture]\n";
  out << "weights =";
  for (Eigen::Index k = 0; k < f.size(); ++k) out << ' ' << format_double(f.weights[k]);
  out << '\n';
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    out << "atom" << k << " =";
    for (Eigen::Index j = 0; j < f.dim(); ++j) out << ' ' << format_double(f.atoms(k, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Coefficient tensor format: "m" header, then the m x m x m entries
// flattened row-major as c[q](k,l), one block-matrix per q, row per k.
inline void write_coeffs(const std::string& path, const OmnibusCoefficients& c) {
  std::ofstream out = detail::open_out(path);
  out << c.m << '\n';
  for (Eigen::Index q = 0; q < c.m; ++q) {
    for (Eigen::Index k = 0; k < c.m; ++k) {
      for (Eigen::Index l = 0; l < c.m; ++l) {
        out << format_double(c.coeff(q, k, l));
        out << (l + 1 < c.m ? ' ' : '\n');
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline OmnibusCoefficients read_coeffs(const std::string& path) {
  std::ifstream in = detail::open_in(path);
  Eigen::Index m = 0;
  in >> m;
  if (!in || m < 1) throw std::runtime_error("bad coefficient header in " + path);
  OmnibusCoefficients out;
  out.m = m;
  out.c.assign(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  for (Eigen::Index q = 0; q < m; ++q) {
    for (Eigen::Index k = 0; k < m; ++k) {
      for (Eigen::Index l = 0; l < m; ++l) {
        in >> out.c[static_cast<std::size_t>(q)](k, l);
      }
    }
  }
  if (!in) throw std::runtime_error("bad coefficient payload in " + path);
  return out;
}

}  // namespace omnicorr
