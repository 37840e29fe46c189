#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cqzl/common.hpp"

namespace cqzl {

// Hermitian matrix of pairwise codeword-state inner products.
struct GramMatrix {
  Eigen::MatrixXcd entries;

  int size() const { return static_cast<int>(entries.rows()); }
};

inline GramMatrix make_gram(Eigen::MatrixXcd g, double tol = 1e-12) {
  require(g.rows() == g.cols(), errc::invalid_input, "Gram matrix must be square");
  require(g.size() > 0, errc::invalid_input, "Gram matrix must be nonempty");
  double herm_dev = (g - g.adjoint()).cwiseAbs().maxCoeff();
  require(herm_dev <= tol, errc::invalid_input, "matrix is not Hermitian within tolerance");
  // symmetrize away the residual so diagonals come out exactly real
  Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  return GramMatrix{std::move(h)};
}

// Sparse factor V with G = V^dagger V; rows carry (column, value) pairs.
// Rows with at most L nonzeros realize an L-list measurement basis.
struct SparseFactor {
  struct Entry {
    int col;
    cxd value;
  };

  int cols = 0;
  std::vector<std::vector<Entry>> rows;

  Eigen::MatrixXcd dense() const {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& e : rows[r]) v(static_cast<Eigen::Index>(r), e.col) = e.value;
    return v;
  }

  // V^dagger V without materializing V
  Eigen::MatrixXcd gram() const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(cols, cols);
    for (const auto& row : rows)
      for (const auto& a : row)
        for (const auto& b : row) g(a.col, b.col) += std::conj(a.value) * b.value;
    return g;
  }
};

inline bool is_diagonally_dominant(const GramMatrix& g, double tol = 1e-12) {
  const int m = g.size();
  for (int i = 0; i < m; ++i) {
    double d = g.entries(i, i).real();
    if (!(d > 0.0)) return false;
    double off = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) off += std::abs(g.entries(i, j));
    if (d + tol < off) return false;
  }
  return true;
}

// Constructive factorization of a diagonally dominant Hermitian G: one row
// per off-diagonal pair (i<j) with entries sqrt(r) e^{-i theta/2} at column
// i and sqrt(r) e^{+i theta/2} at column j, where g_ij = r e^{i theta},
// followed by single-entry diagonal fix-up rows of value
// sqrt(g_ii - sum_j r_ij). At most two nonzeros per row and M(M+1)/2 rows.
inline SparseFactor factor_diag_dominant(const GramMatrix& g) {
  require(is_diagonally_dominant(g, 1e-12), errc::invalid_input,
          "matrix is not diagonally dominant");
  const int m = g.size();
  SparseFactor v;
  v.cols = m;
  std::vector<double> off_sum(m, 0.0);

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      cxd gij = g.entries(i, j);
      double r = std::abs(gij);
      off_sum[i] += r;
      off_sum[j] += r;
      if (r <= 1e-14) continue;
      double theta = std::arg(gij);  // branch (-pi, pi]
      double sr = std::sqrt(r);
      v.rows.push_back({{i, sr * std::polar(1.0, -theta / 2.0)},
                        {j, sr * std::polar(1.0, theta / 2.0)}});
    }
  }
  for (int i = 0; i < m; ++i) {
    double radicand = g.entries(i, i).real() - off_sum[i];
    if (radicand < -1e-12)
      fail_numerical("negative fix-up radicand at column " + std::to_string(i) +
                     " (dominance violated)");
    if (radicand <= 0.0) continue;
    v.rows.push_back({{i, cxd(std::sqrt(radicand), 0.0)}});
  }
  return v;
}

inline int max_nonzeros_per_row(const SparseFactor& v, double tol = 0.0) {
  int worst = 0;
  for (const auto& row : v.rows) {
    int nz = 0;
    for (const auto& e : row)
      if (std::abs(e.value) > tol) ++nz;
    worst = std::max(worst, nz);
  }
  return worst;
}

// Factor width <= 2 test via generalized diagonal dominance: the comparison
// matrix (|g_ii| on the diagonal, -|g_ij| off it) must be PSD.
inline bool is_factor_width_two(const GramMatrix& g, double tol = 1e-9) {
  const int m = g.size();
  Eigen::MatrixXd cmp(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      cmp(i, j) = (i == j) ? std::abs(g.entries(i, i)) : -std::abs(g.entries(i, j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cmp, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace cqzl
