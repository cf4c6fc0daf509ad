#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <tuple>
#include <utility>

#include "omnicorr/models.hpp"
#include "omnicorr/omnibus.hpp"
#include "omnicorr/types.hpp"

namespace omnicorr {

/// Limiting covariance kept as scalar coefficient times the base matrix
/// Sigma(x), so the method/model split stays inspectable.
struct LimitCovariance {
  double coefficient = 0.0;
  Matrix base;  // Sigma(x)

  Matrix matrix() const { return coefficient * base; }
};

/// Per-pair limiting embedded-space correlations with their method/model
/// decomposition.
struct CorrelationProfile {
  Eigen::Index m = 0;
  Matrix rho;
  Matrix method_part;
  Matrix model_part;
};

/// Delta = E[X X^T] = sum_k pi_k xi_k xi_k^T.
inline Matrix delta(const PointMassMixture& f) {
  return f.atoms.transpose() * f.weights.asDiagonal() * f.atoms;
}

/// Sigma(x) = Delta^{-1} E[(x.X - (x.X)^2) X X^T] Delta^{-1}, evaluated as an
/// exact finite sum over the mixture atoms.
inline Matrix sigma_x(const PointMassMixture& f, const Vector& x) {
  require(x.size() == f.dim(), "sigma_x: dimension mismatch");
  const Eigen::Index d = f.dim();
  Matrix inner = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const Vector xi = f.atoms.row(k).transpose();
    const double p = x.dot(xi);
    require(p >= -1e-12 && p <= 1.0 + 1e-12,
            "sigma_x: inner product outside [0,1]");
    inner += f.weights[k] * (p - p * p) * (xi * xi.transpose());
  }
  Matrix dinv = delta(f).inverse();
  return dinv * inner * dinv;
}

/// Mixture-weighted average of sigma_x over the atoms.
inline Matrix sigma_bar(const PointMassMixture& f) {
  Matrix out = Matrix::Zero(f.dim(), f.dim());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    out += f.weights[k] * sigma_x(f, f.atoms.row(k).transpose());
  }
  return out;
}

/// Difference covariance of two separately embedded rho-correlated graphs:
/// 2(1-rho) Sigma(x).
inline LimitCovariance cov_pairwise_rho(const PointMassMixture& f, const Vector& x,
                                        double rho) {
  require(rho >= 0.0 && rho <= 1.0, "cov_pairwise_rho: rho outside [0,1]");
  return LimitCovariance{2.0 * (1.0 - rho), sigma_x(f, x)};
}

/// Method / model coefficient split for the residual of block s:
/// (1/m^2)(sum_q alpha(s,q)^2 + 2 sum_{q<l} alpha(s,q) alpha(s,l) rho_{q,l}).
inline std::pair<double, double> residual_coefficients(const AlphaWeights& alpha,
                                                       const CorrelationSpec& r,
                                                       Eigen::Index s) {
  require(alpha.m == r.m, "residual_coefficients: m mismatch");
  require(s >= 0 && s < alpha.m, "residual_coefficients: index out of range");
  const Eigen::Index m = alpha.m;
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  double method = 0.0;
  double model = 0.0;
  for (Eigen::Index q = 0; q < m; ++q) {
    method += alpha.alpha(s, q) * alpha.alpha(s, q);
    for (Eigen::Index l = q + 1; l < m; ++l) {
      model += 2.0 * alpha.alpha(s, q) * alpha.alpha(s, l) * r.r(q, l);
    }
  }
  return {method / m2, model / m2};
}

inline LimitCovariance cov_single_residual(const AlphaWeights& alpha,
                                           const CorrelationSpec& r,
                                           const PointMassMixture& f,
                                           const Vector& x, Eigen::Index s) {
  auto [method, model] = residual_coefficients(alpha, r, s);
  return LimitCovariance{method + model, sigma_x(f, x)};
}

/// Method / model coefficient split for the block difference s1 - s2.
inline std::pair<double, double> difference_coefficients(const AlphaWeights& alpha,
                                                         const CorrelationSpec& r,
                                                         Eigen::Index s1,
                                                         Eigen::Index s2) {
  require(alpha.m == r.m, "difference_coefficients: m mismatch");
  require(s1 != s2, "difference_coefficients: s1 == s2");
  require(s1 >= 0 && s1 < alpha.m && s2 >= 0 && s2 < alpha.m,
          "difference_coefficients: index out of range");
  const Eigen::Index m = alpha.m;
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  double method = 0.0;
  double model = 0.0;
  double alt_form = 0.0;
  for (Eigen::Index q = 0; q < m; ++q) {
    const double dq = alpha.alpha(s1, q) - alpha.alpha(s2, q);
    method += dq * dq;
    for (Eigen::Index l = q + 1; l < m; ++l) {
      const double dl = alpha.alpha(s1, l) - alpha.alpha(s2, l);
      model += 2.0 * dq * dl * r.r(q, l);
      alt_form += 2.0 * dq * dl * (r.r(q, l) - 1.0);
    }
  }
  // Both algebraic forms of the same quantity must agree.
  require(std::abs((method + model) - alt_form) <= 1e-12 * (1.0 + std::abs(alt_form)),
          "difference_coefficients: internal form mismatch");
  return {method / m2, model / m2};
}

inline LimitCovariance cov_block_difference(const AlphaWeights& alpha,
                                            const CorrelationSpec& r,
                                            const PointMassMixture& f,
                                            const Vector& x, Eigen::Index s1,
                                            Eigen::Index s2) {
  auto [method, model] = difference_coefficients(alpha, r, s1, s2);
  return LimitCovariance{method + model, sigma_x(f, x)};
}

/// Limiting induced correlation between blocks s1 and s2, split into its
/// method and model parts; total = method + model.
inline std::tuple<double, double, double> induced_correlation(
    const AlphaWeights& alpha, const CorrelationSpec& r, Eigen::Index s1,
    Eigen::Index s2) {
  auto [method_coeff, model_coeff] = difference_coefficients(alpha, r, s1, s2);
  // The difference covariance is 2(1 - rho(s1,s2)) Sigma(x).
  const double rho_method = 1.0 - method_coeff / 2.0;
  const double rho_model = -model_coeff / 2.0;
  return {rho_method + rho_model, rho_method, rho_model};
}

inline CorrelationProfile correlation_profile(const AlphaWeights& alpha,
                                              const CorrelationSpec& r) {
  CorrelationProfile out;
  out.m = alpha.m;
  out.rho = Matrix::Identity(alpha.m, alpha.m);
  out.method_part = Matrix::Identity(alpha.m, alpha.m);
  out.model_part = Matrix::Zero(alpha.m, alpha.m);
  for (Eigen::Index s1 = 0; s1 < alpha.m; ++s1) {
    for (Eigen::Index s2 = s1 + 1; s2 < alpha.m; ++s2) {
      auto [total, method, model] = induced_correlation(alpha, r, s1, s2);
      out.rho(s1, s2) = out.rho(s2, s1) = total;
      out.method_part(s1, s2) = out.method_part(s2, s1) = method;
      out.model_part(s1, s2) = out.model_part(s2, s1) = model;
    }
  }
  return out;
}

/// Closed-form induced correlation for the dampened construction with
/// weights w_l = l, transcribed from its published long-sum form. The
/// general formula is ground truth; use this only for cross-checking.
/// Indices are 1-based here to match the formula, with s1 < s2.
inline std::pair<double, double> dampened_correlation_closed_form(
    Eigen::Index m, const CorrelationSpec& r, Eigen::Index s1, Eigen::Index s2) {
  require(s1 >= 1 && s1 < s2 && s2 <= m, "dampened closed form: need 1 <= s1 < s2 <= m");
  require(r.m == m, "dampened closed form: m mismatch");
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  const double a1 = static_cast<double>(s1);
  const double a2 = static_cast<double>(s2);
  auto rho = [&](Eigen::Index i, Eigen::Index j) { return r.r(i - 1, j - 1); };

  // Recurring partial sums.
  double tail1 = 0.0;  // sum_{l>s1, l != s2} 1/(l+1)
  for (Eigen::Index l = s1 + 1; l <= m; ++l) {
    if (l != s2) tail1 += 1.0 / (static_cast<double>(l) + 1.0);
  }
  double tail2 = 0.0;  // sum_{l>s2} 1/(l+1)
  for (Eigen::Index l = s2 + 1; l <= m; ++l) tail2 += 1.0 / (static_cast<double>(l) + 1.0);
  const double big1 = (a1 * a1 + 1.0) / (a1 + 1.0) + tail1;
  const double big2 = (a2 * a2 - a2 + 1.0) / (a2 + 1.0) + tail2;

  double method_sum = (a1 - 1.0) * (a2 - a1) * (a2 - a1) /
                      ((a1 + 1.0) * (a1 + 1.0) * (a2 + 1.0) * (a2 + 1.0));
  method_sum += big1 * big1;
  for (Eigen::Index l = s1 + 1; l < s2; ++l) {
    const double t = static_cast<double>(l) / (static_cast<double>(l) + 1.0) -
                     1.0 / (a2 + 1.0);
    method_sum += t * t;
  }
  method_sum += big2 * big2;
  const double rho_me = 1.0 - method_sum / (2.0 * m2);

  double model_sum = 0.0;
  for (Eigen::Index l = 2; l < s1; ++l) {
    for (Eigen::Index q = 1; q < l; ++q) {
      model_sum += (a2 - a1) * (a1 - a2) /
                   ((a1 + 1.0) * (a1 + 1.0) * (a2 + 1.0) * (a2 + 1.0)) * rho(q, l);
    }
  }
  for (Eigen::Index q = 1; q < s1; ++q) {
    model_sum += -(a2 - a1) / ((a1 + 1.0) * (a2 + 1.0)) * big1 * rho(q, s1);
  }
  for (Eigen::Index l = s1 + 1; l < s2; ++l) {
    const double dl = 1.0 / (a2 + 1.0) -
                      static_cast<double>(l) / (static_cast<double>(l) + 1.0);
    for (Eigen::Index q = 1; q < s1; ++q) {
      model_sum += (a2 - a1) / ((a1 + 1.0) * (a2 + 1.0)) * dl * rho(q, l);
    }
    model_sum += big1 * dl * rho(s1, l);
    for (Eigen::Index q = s1 + 1; q < l; ++q) {
      const double dq = static_cast<double>(q) / (static_cast<double>(q) + 1.0) -
                        1.0 / (a2 + 1.0);
      model_sum += dq * dl * rho(q, l);
    }
  }
  for (Eigen::Index q = 1; q < s1; ++q) {
    model_sum += (a2 - a1) / ((a1 + 1.0) * (a2 + 1.0)) * big2 * rho(q, s2);
  }
  model_sum += big1 * big2 * rho(s1, s2);
  for (Eigen::Index q = s1 + 1; q < s2; ++q) {
    const double dq = static_cast<double>(q) / (static_cast<double>(q) + 1.0) -
                      1.0 / (a2 + 1.0);
    model_sum += dq * big2 * rho(q, s2);
  }
  const double rho_mo = model_sum / m2;
  return {rho_me, rho_mo};
}

/// Closed-form induced correlation for the weighted pairwise construction
/// with w_{s1} = w_{s2} = w and unit weights elsewhere:
/// 1 - ((m-1)w + 1)^2 / (m^2 (1+w)^2) (1 - rho_{s1,s2}).
inline double weighted_correlation_closed_form(const Vector& w, Eigen::Index m,
                                               const CorrelationSpec& r,
                                               Eigen::Index s1, Eigen::Index s2) {
  require(w.size() == m && r.m == m, "weighted closed form: size mismatch");
  require(s1 != s2 && s1 >= 0 && s1 < m && s2 >= 0 && s2 < m,
          "weighted closed form: bad indices");
  const double ww = w[s1];
  require(w[s2] == ww, "weighted closed form: w_{s1} != w_{s2}");
  for (Eigen::Index k = 0; k < m; ++k) {
    if (k != s1 && k != s2) {
      require(w[k] == 1.0, "weighted closed form: other weights must be 1");
    }
  }
  const double md = static_cast<double>(m);
  const double factor = ((md - 1.0) * ww + 1.0) * ((md - 1.0) * ww + 1.0) /
                        (md * md * (1.0 + ww) * (1.0 + ww));
  return 1.0 - factor * (1.0 - r.r(s1, s2));
}

/// Covariance of the averaged embedding of m pairwise rho-correlated graphs:
/// ((1-rho)/m + rho) Sigma(x). The m = 1, rho = 0 case reduces to the
/// single-graph limit Sigma(x).
inline LimitCovariance avg_embedding_covariance(const PointMassMixture& f,
                                                const Vector& x, Eigen::Index m,
                                                double rho) {
  require(rho >= 0.0 && rho <= 1.0, "avg_embedding_covariance: rho outside [0,1]");
  require(m >= 1, "avg_embedding_covariance: m must be positive");
  const double factor = (1.0 - rho) / static_cast<double>(m) + rho;
  return LimitCovariance{factor, sigma_x(f, x)};
}

/// m_eff = m / (1 + rho (m-1)).
inline double effective_sample_size(Eigen::Index m, double rho) {
  require(rho >= 0.0 && rho <= 1.0, "effective_sample_size: rho outside [0,1]");
  require(m >= 1, "effective_sample_size: m must be positive");
  const double md = static_cast<double>(m);
  return md / (1.0 + rho * (md - 1.0));
}

}  // namespace omnicorr
