#pragma once

#include <Eigen/Dense>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "omnicorr/models.hpp"
#include "omnicorr/spectral.hpp"
#include "omnicorr/types.hpp"

namespace omnicorr {

struct ValidationReport {
  bool pass = true;
  std::string message = "ok";
};

/// Coefficient tensor c[q](k,l): the weight of graph q in block (k,l).
/// The tensor is the single source of truth — every named construction
/// compiles to one, and assembly/validation/theory consume only it.
struct OmnibusCoefficients {
  Eigen::Index m = 0;
  std::vector<Matrix> c;  // m matrices, each m x m; c[q](k,l)

  double coeff(Eigen::Index q, Eigen::Index k, Eigen::Index l) const {
    return c[static_cast<std::size_t>(q)](k, l);
  }
};

/// alpha(s,q) = sum_l c[q](s,l): cumulative weight of graph q in block-row s.
struct AlphaWeights {
  Eigen::Index m = 0;
  Matrix alpha;  // m x m, alpha(s,q)
};

/// mn x d embedding partitioned into m per-graph blocks.
struct BlockEmbedding {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  Matrix coords;  // mn x d

  Eigen::Block<const Matrix> block(Eigen::Index s) const {
    require(s >= 0 && s < m, "BlockEmbedding: block index out of range");
    return coords.block(s * n, 0, n, d);
  }
};

inline ValidationReport validate_coeffs(const OmnibusCoefficients& coeffs,
                                        double tol = 1e-12) {
  const Eigen::Index m = coeffs.m;
  auto fail = [](const std::string& msg) {
    return ValidationReport{false, msg};
  };
  if (static_cast<Eigen::Index>(coeffs.c.size()) != m) {
    return fail("coefficient tensor has wrong graph count");
  }
  for (Eigen::Index q = 0; q < m; ++q) {
    const Matrix& cq = coeffs.c[static_cast<std::size_t>(q)];
    if (cq.rows() != m || cq.cols() != m) return fail("block shape mismatch");
    for (Eigen::Index k = 0; k < m; ++k) {
      for (Eigen::Index l = 0; l < m; ++l) {
        if (cq(k, l) < -tol) {
          std::ostringstream os;
          os << "nonnegativity fails at c[" << q << "](" << k << "," << l << ")";
          return fail(os.str());
        }
        if (std::abs(cq(k, l) - cq(l, k)) > tol) {
          std::ostringstream os;
          os << "block symmetry fails at c[" << q << "](" << k << "," << l << ")";
          return fail(os.str());
        }
      }
    }
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      double s = 0.0;
      for (Eigen::Index q = 0; q < m; ++q) s += coeffs.coeff(q, k, l);
      if (std::abs(s - 1.0) > tol) {
        std::ostringstream os;
        os << "convexity fails at block (" << k << "," << l << "): sum " << s;
        return fail(os.str());
      }
    }
  }
  // Strict row dominance: alpha(k,k) > alpha(k,q) for q != k.
  for (Eigen::Index k = 0; k < m; ++k) {
    double own = 0.0;
    for (Eigen::Index l = 0; l < m; ++l) own += coeffs.coeff(k, k, l);
    for (Eigen::Index q = 0; q < m; ++q) {
      if (q == k) continue;
      double other = 0.0;
      for (Eigen::Index l = 0; l < m; ++l) other += coeffs.coeff(q, k, l);
      if (other >= own - tol) {
        std::ostringstream os;
        os << "row dominance fails at row " << k << ": alpha(" << k << "," << q
           << ") = " << other << " vs alpha(" << k << "," << k << ") = " << own;
        return fail(os.str());
      }
    }
  }
  return ValidationReport{};
}

inline AlphaWeights alpha_weights(const OmnibusCoefficients& coeffs) {
  AlphaWeights out;
  out.m = coeffs.m;
  out.alpha = Matrix::Zero(coeffs.m, coeffs.m);
  for (Eigen::Index s = 0; s < coeffs.m; ++s) {
    for (Eigen::Index q = 0; q < coeffs.m; ++q) {
      for (Eigen::Index l = 0; l < coeffs.m; ++l) {
        out.alpha(s, q) += coeffs.coeff(q, s, l);
      }
    }
  }
  return out;
}

namespace detail {

inline OmnibusCoefficients empty_coeffs(Eigen::Index m) {
  OmnibusCoefficients out;
  out.m = m;
  out.c.assign(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  return out;
}

inline void check_validity(const OmnibusCoefficients& coeffs, const char* what) {
  ValidationReport report = validate_coeffs(coeffs);
  require(report.pass, std::string(what) + ": " + report.message);
}

}  // namespace detail

/// Classical OMNI: off-diagonal blocks are pairwise averages.
inline OmnibusCoefficients classical_coeffs(Eigen::Index m) {
  require(m >= 2, "classical_coeffs: m must be at least 2");
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (k == l) {
        out.c[static_cast<std::size_t>(k)](k, l) = 1.0;
      } else {
        out.c[static_cast<std::size_t>(k)](k, l) = 0.5;
        out.c[static_cast<std::size_t>(l)](k, l) = 0.5;
      }
    }
  }
  return out;
}

/// Total-average OMNI: every off-diagonal block is the grand mean graph.
inline OmnibusCoefficients total_average_coeffs(Eigen::Index m) {
  require(m >= 2, "total_average_coeffs: m must be at least 2");
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (k == l) {
        out.c[static_cast<std::size_t>(k)](k, l) = 1.0;
      } else {
        for (Eigen::Index q = 0; q < m; ++q) {
          out.c[static_cast<std::size_t>(q)](k, l) = 1.0 / static_cast<double>(m);
        }
      }
    }
  }
  return out;
}

/// Weighted pairwise-average OMNI: block (k,l) = (w_k A^k + w_l A^l)/(w_k+w_l).
inline OmnibusCoefficients weighted_pairwise_coeffs(const Vector& w) {
  const Eigen::Index m = w.size();
  require(m >= 2, "weighted_pairwise_coeffs: m must be at least 2");
  require((w.array() > 0.0).all(), "weighted_pairwise_coeffs: weights must be positive");
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (k == l) {
        out.c[static_cast<std::size_t>(k)](k, l) = 1.0;
      } else {
        const double denom = w[k] + w[l];
        out.c[static_cast<std::size_t>(k)](k, l) = w[k] / denom;
        out.c[static_cast<std::size_t>(l)](k, l) = w[l] / denom;
      }
    }
  }
  return out;
}

/// Dampened OMNI: block (k,l) with k>l is (w_k A^k + A^l)/(w_k+1) for a
/// strictly increasing positive weight vector.
inline OmnibusCoefficients dampened_coeffs(const Vector& w) {
  const Eigen::Index m = w.size();
  require(m >= 2, "dampened_coeffs: m must be at least 2");
  require((w.array() > 0.0).all(), "dampened_coeffs: weights must be positive");
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    require(w[i] < w[i + 1], "dampened_coeffs: weights must be strictly increasing");
  }
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (k == l) {
        out.c[static_cast<std::size_t>(k)](k, l) = 1.0;
      } else {
        const Eigen::Index hi = std::max(k, l);
        const Eigen::Index lo = std::min(k, l);
        out.c[static_cast<std::size_t>(hi)](k, l) = w[hi] / (w[hi] + 1.0);
        out.c[static_cast<std::size_t>(lo)](k, l) = 1.0 / (w[hi] + 1.0);
      }
    }
  }
  detail::check_validity(out, "dampened_coeffs");
  return out;
}

/// Forward OMNI: block (i,j) with i>j is ((i-1)A^j + A^i)/i (1-based i).
inline OmnibusCoefficients forward_coeffs(Eigen::Index m) {
  require(m >= 2, "forward_coeffs: m must be at least 2");
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (k == l) {
        out.c[static_cast<std::size_t>(k)](k, l) = 1.0;
      } else {
        const Eigen::Index hi = std::max(k, l);
        const Eigen::Index lo = std::min(k, l);
        const double i1 = static_cast<double>(hi) + 1.0;  // 1-based index
        out.c[static_cast<std::size_t>(lo)](k, l) = (i1 - 1.0) / i1;
        out.c[static_cast<std::size_t>(hi)](k, l) = 1.0 / i1;
      }
    }
  }
  detail::check_validity(out, "forward_coeffs");
  return out;
}

/// Pair-preserving OMNI (even m): graphs are coupled in consecutive
/// odd/even pairs; only the within-pair block is averaged.
inline OmnibusCoefficients pair_preserving_coeffs(Eigen::Index m) {
  require(m >= 2 && m % 2 == 0, "pair_preserving_coeffs: m must be even");
  OmnibusCoefficients out = detail::empty_coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index i = k + 1;  // 1-based
    for (Eigen::Index l = 0; l < m; ++l) {
      const Eigen::Index j = l + 1;
      std::size_t self = static_cast<std::size_t>(k);
      std::size_t other = static_cast<std::size_t>(l);
      if (i % 2 == 1) {
        if (i == j || i <= j - 2) {
          out.c[self](k, l) = 1.0;
        } else if (i == j - 1) {
          out.c[self](k, l) = 0.5;
          out.c[other](k, l) = 0.5;
        } else {  // i > j
          out.c[other](k, l) = 1.0;
        }
      } else {
        if (i == j || i <= j - 1) {
          out.c[self](k, l) = 1.0;
        } else if (i == j + 1) {
          out.c[self](k, l) = 0.5;
          out.c[other](k, l) = 0.5;
        } else {  // i - 1 > j
          out.c[other](k, l) = 1.0;
        }
      }
    }
  }
  detail::check_validity(out, "pair_preserving_coeffs");
  return out;
}

/// Assemble the mn x mn omnibus matrix from the coefficient tensor.
inline Matrix build_omnibus(const OmnibusCoefficients& coeffs,
                            const std::vector<Matrix>& graphs) {
  const Eigen::Index m = coeffs.m;
  require(static_cast<Eigen::Index>(graphs.size()) == m,
          "build_omnibus: graph count mismatch");
  require(m >= 1 && !graphs.empty(), "build_omnibus: empty input");
  const Eigen::Index n = graphs[0].rows();
  for (const Matrix& g : graphs) {
    require(g.rows() == n && g.cols() == n, "build_omnibus: graph shape mismatch");
  }
  Matrix out = Matrix::Zero(m * n, m * n);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = k; l < m; ++l) {
      Matrix block = Matrix::Zero(n, n);
      for (Eigen::Index q = 0; q < m; ++q) {
        const double cq = coeffs.coeff(q, k, l);
        if (cq != 0.0) block += cq * graphs[static_cast<std::size_t>(q)];
      }
      out.block(k * n, l * n, n, n) = block;
      if (l != k) out.block(l * n, k * n, n, n) = block.transpose();
    }
  }
  return out;
}

inline Matrix build_omnibus(const OmnibusCoefficients& coeffs,
                            const GraphCollection& collection) {
  require(coeffs.m == collection.m, "build_omnibus: m mismatch");
  return build_omnibus(coeffs, collection.graphs);
}

/// E[M] with every graph replaced by P. Convexity forces J_m (x) P exactly.
inline Matrix expected_omnibus(const OmnibusCoefficients& coeffs, const Matrix& p) {
  detail::check_validity(coeffs, "expected_omnibus");
  std::vector<Matrix> repeated(static_cast<std::size_t>(coeffs.m), p);
  return build_omnibus(coeffs, repeated);
}

/// ASE of an omnibus matrix, partitioned into m per-graph blocks.
inline BlockEmbedding omni_embed(const Matrix& m_mat, Eigen::Index d,
                                 Eigen::Index m) {
  require(m >= 1 && m_mat.rows() % m == 0,
          "omni_embed: order not divisible by m");
  Embedding e = ase(m_mat, d);
  BlockEmbedding out;
  out.m = m;
  out.n = m_mat.rows() / m;
  out.d = d;
  out.coords = std::move(e.coords);
  return out;
}

}  // namespace omnicorr
