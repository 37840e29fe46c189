#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cqzl/common.hpp"
#include "cqzl/rng.hpp"

namespace cqzl {

struct SimplexDistribution {
  Eigen::VectorXd probs;

  int size() const { return static_cast<int>(probs.size()); }
};

inline SimplexDistribution make_distribution(Eigen::VectorXd p) {
  require(p.size() >= 1, errc::invalid_input, "distribution needs at least one entry");
  require(p.allFinite(), errc::invalid_input, "distribution entries must be finite");
  require(p.minCoeff() >= 0.0, errc::invalid_input, "distribution entries must be >= 0");
  require(std::abs(p.sum() - 1.0) <= 1e-12, errc::invalid_input, "distribution must sum to 1");
  return SimplexDistribution{std::move(p)};
}

inline SimplexDistribution uniform_distribution(int m) {
  require(m >= 1, errc::invalid_input, "alphabet size must be >= 1");
  return SimplexDistribution{Eigen::VectorXd::Constant(m, 1.0 / m)};
}

enum class MinMethod { exact_enumeration, frank_wolfe };

inline std::string to_string(MinMethod m) {
  return m == MinMethod::exact_enumeration ? "exact-enumeration" : "frank-wolfe";
}

struct SimplexMinResult {
  SimplexDistribution minimizer;
  double value = 0.0;
  MinMethod method = MinMethod::exact_enumeration;
  std::vector<int> support;
};

struct SimplexMinOptions {
  int exact_threshold = 12;  // support enumeration up to this alphabet size
  int starts = 32;           // random Dirichlet starts for Frank-Wolfe
  int max_iter = 10000;
  double tol = 1e-10;        // Frank-Wolfe gap
  std::uint64_t seed = 0;
};

inline double quadratic_form(const Eigen::MatrixXd& a, const SimplexDistribution& p) {
  require(a.rows() == a.cols(), errc::invalid_input, "matrix must be square");
  require(a.rows() == p.probs.size(), errc::invalid_input, "matrix/distribution dimension mismatch");
  return p.probs.dot(a * p.probs);
}

namespace detail {

// Euclidean projection onto the probability simplex.
inline Eigen::VectorXd project_simplex(Eigen::VectorXd v) {
  const int m = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < m; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      theta = t;
    }
  }
  for (int i = 0; i < m; ++i) v(i) = std::max(0.0, v(i) - theta);
  double s = v.sum();
  if (s > 0) v /= s;
  return v;
}

// Stationary point of p'Ap on the face with support S: solve the bordered
// KKT system [2A_S, -1; 1', 0] [p; lambda] = [0; 1].
inline bool face_stationary_point(const Eigen::MatrixXd& a, const std::vector<int>& s,
                                  Eigen::VectorXd& p_out) {
  const int k = static_cast<int>(s.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) kkt(i, j) = 2.0 * a(s[i], s[j]);
    kkt(i, k) = -1.0;
    kkt(k, i) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  double scale = std::max(1.0, kkt.cwiseAbs().maxCoeff());
  if ((kkt * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;  // inconsistent
  for (int i = 0; i < k; ++i)
    if (sol(i) <= 1e-13) return false;  // boundary cases belong to smaller supports
  p_out = sol.head(k);
  return true;
}

inline bool support_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct FwOutcome {
  Eigen::VectorXd p;
  double value = 0.0;
};

// Away-step Frank-Wolfe with exact line search for the quadratic objective.
inline FwOutcome frank_wolfe(const Eigen::MatrixXd& a, Eigen::VectorXd p, int max_iter, double tol) {
  const int m = static_cast<int>(a.rows());
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd g = 2.0 * (a * p);
    int s = 0, away = -1;
    for (int i = 1; i < m; ++i)
      if (g(i) < g(s)) s = i;
    for (int i = 0; i < m; ++i)
      if (p(i) > 1e-14 && (away < 0 || g(i) > g(away))) away = i;
    double gp = g.dot(p);
    double fw_gap = gp - g(s);
    if (fw_gap <= tol) break;
    double away_gain = away >= 0 ? g(away) - gp : 0.0;

    Eigen::VectorXd d;
    double gamma_max;
    if (fw_gap >= away_gain || away < 0 || p(away) >= 1.0 - 1e-14) {
      d = -p;
      d(s) += 1.0;
      gamma_max = 1.0;
    } else {
      d = p;
      d(away) -= 1.0;
      gamma_max = p(away) / (1.0 - p(away));
    }
    double gd = g.dot(d);
    double dad = d.dot(a * d);
    double gamma = gamma_max;
    if (dad > 0) gamma = std::clamp(-gd / (2.0 * dad), 0.0, gamma_max);
    if (gamma <= 0) break;
    p += gamma * d;
    p = p.cwiseMax(0.0);
    p /= p.sum();
  }
  return {p, p.dot(a * p)};
}

}  // namespace detail

// Global minimum of P'AP over the probability simplex. Small alphabets get
// certified support enumeration; larger ones fall back to multi-start
// away-step Frank-Wolfe (global only when A is PSD), recorded in `method`.
inline SimplexMinResult min_quadratic_over_simplex(const Eigen::MatrixXd& a,
                                                   const SimplexMinOptions& opts = {}) {
  require(a.rows() == a.cols(), errc::invalid_input, "matrix must be square");
  const int m = static_cast<int>(a.rows());
  require(m >= 1, errc::invalid_input, "matrix must be nonempty");

  SimplexMinResult best;
  best.value = std::numeric_limits<double>::infinity();

  if (m <= opts.exact_threshold) {
    std::vector<int> support;
    Eigen::VectorXd p_face;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      support.clear();
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) support.push_back(i);

      Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
      if (support.size() == 1) {
        p(support[0]) = 1.0;
      } else if (detail::face_stationary_point(a, support, p_face)) {
        for (std::size_t i = 0; i < support.size(); ++i) p(support[i]) = p_face(i);
      } else {
        continue;
      }
      double v = p.dot(a * p);
      bool better = v < best.value - 1e-14;
      bool tie = std::abs(v - best.value) <= 1e-14 && detail::support_lex_less(support, best.support);
      if (better || tie) {
        best.value = v;
        best.minimizer.probs = p;
        best.support = support;
      }
    }
    best.method = MinMethod::exact_enumeration;
    return best;
  }

  // Frank-Wolfe path: all vertices, the uniform distribution, and seeded
  // Dirichlet(1,...,1) starts; reduce in fixed start order.
  std::vector<Eigen::VectorXd> starts;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(i) = 1.0;
    starts.push_back(e);
  }
  starts.push_back(Eigen::VectorXd::Constant(m, 1.0 / m));
  for (int r = 0; r < opts.starts; ++r) {
    Stream st{derive_key(opts.seed, 0xD1217u + static_cast<std::uint64_t>(r))};
    Eigen::VectorXd p(m);
    for (int i = 0; i < m; ++i) p(i) = st.exponential(i);
    p /= p.sum();
    starts.push_back(p);
  }

  std::vector<detail::FwOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    outcomes[i] = detail::frank_wolfe(a, starts[i], opts.max_iter, opts.tol);
  });
  std::size_t win = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].value < outcomes[win].value - 0.0) win = i;

  best.value = outcomes[win].value;
  best.minimizer.probs = outcomes[win].p;
  best.method = MinMethod::frank_wolfe;
  for (int i = 0; i < m; ++i)
    if (best.minimizer.probs(i) > 1e-12) best.support.push_back(i);
  return best;
}

// Entrywise Kronecker power with row-major multi-index order.
inline Eigen::MatrixXd kronecker_power(const Eigen::MatrixXd& a, int n, int row_cap = 4096) {
  require(a.rows() == a.cols(), errc::invalid_input, "matrix must be square");
  require(n >= 1, errc::invalid_input, "power must be >= 1");
  const int m = static_cast<int>(a.rows());
  double rows = std::pow(static_cast<double>(m), n);
  require(rows <= static_cast<double>(row_cap), errc::invalid_input,
          "kronecker power exceeds the " + std::to_string(row_cap) + "-row cap");

  Eigen::MatrixXd k = a;
  for (int t = 1; t < n; ++t) {
    Eigen::MatrixXd next(k.rows() * m, k.cols() * m);
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j) next.block(i * m, j * m, m, m) = k(i, j) * a;
    k = std::move(next);
  }
  return k;
}

}  // namespace cqzl
