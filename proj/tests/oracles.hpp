// Test-side oracles, independent of the library's computation paths:
// explicit tensor-product states, brute-force grid minimization, and
// seeded random instances. Kept out of the library on purpose.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cqzl/channel.hpp"
#include "cqzl/rng.hpp"

namespace oracle {

// Materialize |psi_{x_1}> ⊗ ... ⊗ |psi_{x_n}> (only viable for small n).
inline Eigen::VectorXcd tensor_state(const cqzl::ChannelSpec& ch, const std::vector<int>& seq) {
  Eigen::VectorXcd v = ch.states[seq[0]];
  for (std::size_t l = 1; l < seq.size(); ++l) {
    const Eigen::VectorXcd& s = ch.states[seq[l]];
    Eigen::VectorXcd next(v.size() * s.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      for (Eigen::Index j = 0; j < s.size(); ++j) next(i * s.size() + j) = v(i) * s(j);
    v = std::move(next);
  }
  return v;
}

inline double tensor_abs_overlap(const cqzl::ChannelSpec& ch, const std::vector<int>& x,
                                 const std::vector<int>& y) {
  return std::abs(tensor_state(ch, x).dot(tensor_state(ch, y)));
}

// Brute-force minimum of p'Ap over the simplex on a regular grid.
inline double grid_min_quadratic(const Eigen::MatrixXd& a, int resolution) {
  const int m = static_cast<int>(a.rows());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> counts(m, 0);
  // enumerate compositions of `resolution` into m parts
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == m - 1) {
      counts[idx] = left;
      Eigen::VectorXd p(m);
      for (int i = 0; i < m; ++i) p(i) = static_cast<double>(counts[i]) / resolution;
      best = std::min(best, p.dot(a * p));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[idx] = c;
      rec(idx + 1, left - c);
    }
  };
  rec(0, resolution);
  return best;
}

// Random Hermitian diagonally dominant matrix with unit-scale diagonal.
inline Eigen::MatrixXcd random_diag_dominant(int m, std::uint64_t key, bool complex_entries) {
  cqzl::Stream st{key};
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
  std::uint64_t ctr = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double re = 2.0 * st.u01(ctr++) - 1.0;
      double im = complex_entries ? 2.0 * st.u01(ctr++) - 1.0 : 0.0;
      g(i, j) = cqzl::cxd(re, im);
      g(j, i) = std::conj(g(i, j));
    }
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) off += std::abs(g(i, j));
    g(i, i) = off + st.u01(ctr++);  // dominance with random slack
  }
  return g;
}

// Random PSD matrix B'B with entries scaled to roughly unit diagonal.
inline Eigen::MatrixXd random_psd(int m, std::uint64_t key) {
  cqzl::Stream st{key};
  Eigen::MatrixXd b(m, m);
  std::uint64_t ctr = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = st.gaussian(ctr++);
  Eigen::MatrixXd a = b.transpose() * b;
  double scale = a.diagonal().maxCoeff();
  return a / scale;
}

}  // namespace oracle
