#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace omnicorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense embedding: one row of coordinates per vertex.
struct Embedding {
  Eigen::Index rows = 0;
  Eigen::Index dim = 0;
  Matrix coords;

  Embedding() = default;
  Embedding(Matrix c) : rows(c.rows()), dim(c.cols()), coords(std::move(c)) {
    if (!coords.allFinite()) {
      throw std::invalid_argument("Embedding: non-finite coordinates");
    }
  }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_symmetric(const Matrix& m, const char* what) {
  require(m.rows() == m.cols(), std::string(what) + ": not square");
  require(m.isApprox(m.transpose(), 0.0), std::string(what) + ": not symmetric");
  require(m.allFinite(), std::string(what) + ": non-finite entries");
}

}  // namespace omnicorr
