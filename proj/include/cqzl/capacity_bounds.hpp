#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cqzl/channel.hpp"
#include "cqzl/common.hpp"
#include "cqzl/rng.hpp"
#include "cqzl/simplex_qp.hpp"

namespace cqzl {

// A single bound in bits together with the data that certifies it:
// the optimizing distribution, the feasible converse matrix, or the
// primal/dual pair (sigma, P) with its duality gap.
struct BoundValue {
  double bits = 0.0;
  std::optional<SimplexDistribution> p_star;
  std::optional<Eigen::MatrixXd> converse_matrix;
  bool converse_exhaustive = false;  // sign-pattern family fully enumerated
  std::optional<Eigen::MatrixXcd> sigma;
  double duality_gap = 0.0;
  bool gap_ok = true;
};

struct BoundsReport {
  BoundValue achievability_L2;
  BoundValue converse;
  BoundValue r_infinity;
  bool psd_abs_overlaps = false;
  bool pairwise_non_obtuse = false;
  std::optional<double> capacity_exact;
  std::string notes;
};

struct ConverseOptions {
  int starts = 16;       // random starts of the projection local search
  int clamp_iters = 300; // alternating box/PSD projection sweeps
  std::uint64_t seed = 0;
  SimplexMinOptions qp;
};

struct RInfOptions {
  double tol = 1e-9;   // required duality gap, in bits
  int budget = 50000;  // subgradient iterations
  bool polish = true;  // low-dimensional ellipsoid refinement when Polyak stalls
};

namespace detail {

inline Eigen::MatrixXcd state_mixture(const ChannelSpec& ch, const Eigen::VectorXd& p) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ch.dim, ch.dim);
  for (int x = 0; x < ch.alphabet_size(); ++x)
    if (p(x) != 0.0) rho.noalias() += p(x) * (ch.states[x] * ch.states[x].adjoint());
  return rho;
}

// Dykstra recovery of the primal certificate: a density matrix supported on
// the top eigenspace of rho_P with <psi_x|sigma|psi_x> = lambda_max on the
// support of P and >= lambda_max off it. At the true optimum such a sigma
// exists by the KKT conditions; away from it the achieved duality gap is
// reported as-is.
inline Eigen::MatrixXcd recover_sigma(const ChannelSpec& ch, const Eigen::VectorXd& p,
                                      double eig_window = 1e-7) {
  const int dim = ch.dim;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state_mixture(ch, p));
  double lam = es.eigenvalues().maxCoeff();
  int k = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) >= lam - eig_window) ++k;
  Eigen::MatrixXcd u(dim, k);
  int c = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) >= lam - eig_window) u.col(c++) = es.eigenvectors().col(i);

  // constraints expressed as Hermitian k x k matrices with Frobenius pairing
  std::vector<Eigen::MatrixXcd> eq_mats{Eigen::MatrixXcd::Identity(k, k)};
  std::vector<double> eq_rhs{1.0};
  std::vector<Eigen::MatrixXcd> half_mats;
  for (int x = 0; x < ch.alphabet_size(); ++x) {
    Eigen::VectorXcd phi = u.adjoint() * ch.states[x];
    Eigen::MatrixXcd cx = phi * phi.adjoint();
    if (p(x) > 1e-7) {
      eq_mats.push_back(cx);
      eq_rhs.push_back(lam);
    } else {
      half_mats.push_back(cx);
    }
  }
  auto fdot = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.adjoint() * b).trace().real();
  };

  const int ne = static_cast<int>(eq_mats.size());
  Eigen::MatrixXd eq_gram(ne, ne);
  for (int i = 0; i < ne; ++i)
    for (int j = 0; j < ne; ++j) eq_gram(i, j) = fdot(eq_mats[i], eq_mats[j]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> eq_pinv(eq_gram);

  auto project_affine = [&](Eigen::MatrixXcd s) {
    Eigen::VectorXd resid(ne);
    for (int i = 0; i < ne; ++i) resid(i) = fdot(eq_mats[i], s) - eq_rhs[i];
    Eigen::VectorXd mu = eq_pinv.solve(resid);
    for (int i = 0; i < ne; ++i) s -= mu(i) * eq_mats[i];
    return s;
  };
  auto project_psd = [](const Eigen::MatrixXcd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e(0.5 * (s + s.adjoint()));
    Eigen::VectorXd d = e.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXcd(e.eigenvectors() * d.asDiagonal() * e.eigenvectors().adjoint());
  };

  const int nsets = 2 + static_cast<int>(half_mats.size());
  std::vector<Eigen::MatrixXcd> corr(nsets, Eigen::MatrixXcd::Zero(k, k));
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(k, k) / static_cast<double>(k);
  for (int sweep = 0; sweep < 400; ++sweep) {
    Eigen::MatrixXcd prev = s;
    for (int set = 0; set < nsets; ++set) {
      Eigen::MatrixXcd y = s + corr[set];
      Eigen::MatrixXcd z;
      if (set == 0) {
        z = project_affine(y);
      } else if (set < nsets - 1) {
        const auto& cx = half_mats[set - 1];
        double v = fdot(cx, y);
        z = (v >= lam) ? y : Eigen::MatrixXcd(y + (lam - v) / fdot(cx, cx) * cx);
      } else {
        z = project_psd(y);
      }
      corr[set] = y - z;
      s = z;
    }
    if ((s - prev).cwiseAbs().maxCoeff() < 1e-14) break;
  }

  Eigen::MatrixXcd sigma = u * project_psd(s) * u.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint());
  double tr = sigma.trace().real();
  if (tr > 1e-12) sigma /= tr;
  return sigma;
}

struct RInfEval {
  double dual_bits = 0.0;
  double gap = 0.0;
  Eigen::MatrixXcd sigma;
  double primal_value = 0.0;  // min_x <psi_x|sigma|psi_x>, a lower bound on lambda*
};

inline RInfEval evaluate_rinf_certificate(const ChannelSpec& ch, const Eigen::VectorXd& p) {
  RInfEval ev;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state_mixture(ch, p), Eigen::EigenvaluesOnly);
  double lam = es.eigenvalues().maxCoeff();
  ev.sigma = recover_sigma(ch, p);
  double pv = std::numeric_limits<double>::infinity();
  for (int x = 0; x < ch.alphabet_size(); ++x)
    pv = std::min(pv, (ch.states[x].adjoint() * ev.sigma * ch.states[x]).real()(0, 0));
  ev.primal_value = std::max(pv, 1e-300);
  ev.dual_bits = -std::log2(lam);
  ev.gap = std::max(0.0, -std::log2(ev.primal_value) - ev.dual_bits);
  return ev;
}

// lambda_max and one top eigenvector
inline double lambda_max_vec(const Eigen::MatrixXcd& rho, Eigen::VectorXcd& top) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::Index idx;
  double lam = es.eigenvalues().maxCoeff(&idx);
  top = es.eigenvectors().col(idx);
  return lam;
}

// Central-cut ellipsoid refinement of min_P lambda_max(rho_P) in the
// reduced coordinates (p_1..p_{m-1}); only used for small alphabets where
// its n^2 log(1/eps) iteration count is trivial.
inline void ellipsoid_polish(const ChannelSpec& ch, Eigen::VectorXd& best_p, double& best_f) {
  const int m = ch.alphabet_size();
  if (m == 1) return;

  auto eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
    Eigen::VectorXcd top;
    double f = lambda_max_vec(state_mixture(ch, p), top);
    grad.resize(m);
    for (int x = 0; x < m; ++x) grad(x) = std::norm(ch.states[x].dot(top));
    return f;
  };

  if (m == 2) {  // 1-D: ternary search on p0
    double lo = 0.0, hi = 1.0;
    Eigen::VectorXd g;
    for (int it = 0; it < 240; ++it) {
      double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
      Eigen::VectorXd pa(2), pb(2);
      pa << a, 1.0 - a;
      pb << b, 1.0 - b;
      if (eval(pa, g) <= eval(pb, g))
        hi = b;
      else
        lo = a;
    }
    Eigen::VectorXd p(2);
    p << 0.5 * (lo + hi), 1.0 - 0.5 * (lo + hi);
    double f = eval(p, g);
    if (f < best_f) best_f = f, best_p = p;
    return;
  }

  const int n = m - 1;
  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, 1.0 / m);
  Eigen::MatrixXd shape = 4.0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd grad;
  const int iters = 250 * n * n + 250;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd cut(n);
    bool feasible = true;
    for (int i = 0; i < n; ++i)
      if (y(i) < 0.0) {
        cut.setZero();
        cut(i) = -1.0;
        feasible = false;
        break;
      }
    if (feasible && y.sum() > 1.0) {
      cut.setOnes();
      feasible = false;
    }
    if (feasible) {
      Eigen::VectorXd p(m);
      p.head(n) = y;
      p(n) = 1.0 - y.sum();
      double f = eval(p, grad);
      if (f < best_f) {
        best_f = f;
        best_p = p;
      }
      cut = grad.head(n) - Eigen::VectorXd::Constant(n, grad(n));
    }
    double denom = cut.dot(shape * cut);
    if (denom <= 1e-300) break;
    Eigen::VectorXd sg = shape * cut / std::sqrt(denom);
    y -= sg / (n + 1.0);
    shape = (n * n / (n * n - 1.0)) * (shape - (2.0 / (n + 1.0)) * (sg * sg.transpose()));
    shape = 0.5 * (shape + shape.transpose());
  }
}

}  // namespace detail

// Theorem-2-style achievability: -log2 of the simplex minimum of the
// absolute overlap quadratic form, with the certifying distribution.
inline BoundValue achievability_bound_L2(const ChannelSpec& ch, const SimplexMinOptions& qp = {}) {
  auto res = min_quadratic_over_simplex(absolute_overlap_matrix(ch).entries, qp);
  BoundValue b;
  double v = std::clamp(res.value, 0.0, 1.0);
  b.bits = (v >= 1.0 - 1e-12) ? 0.0 : std::max(0.0, -std::log2(std::max(v, 1e-300)));
  b.p_star = res.minimizer;
  return b;
}

inline bool converse_matrix_feasible(const ChannelSpec& ch, const Eigen::MatrixXd& a,
                                     double tol = 1e-12) {
  const Eigen::MatrixXd box = absolute_overlap_matrix(ch).entries;
  if (a.rows() != box.rows() || a.cols() != box.cols()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (((a.cwiseAbs() - box).array() > tol).any()) return false;
  return min_eigenvalue_sym(a) >= -tol;
}

// Upper bound via the feasible-matrix family: any PSD A within the
// entrywise overlap box certifies -log2 min_P Q_P(A). The search covers
// the overlap matrix itself, sign-flip patterns for small alphabets, and
// an alternating-projection local search; soundness never depends on the
// search being exhaustive because feasibility is re-verified.
inline BoundValue converse_bound(const ChannelSpec& ch, const ConverseOptions& opts = {}) {
  const int m = ch.alphabet_size();
  const Eigen::MatrixXd box = absolute_overlap_matrix(ch).entries;

  auto clamp_to_box = [&](Eigen::MatrixXd a) {
    for (int i = 0; i < m; ++i) {
      a(i, i) = 1.0;
      for (int j = 0; j < m; ++j)
        if (j != i) a(i, j) = std::clamp(a(i, j), -box(i, j), box(i, j));
    }
    return Eigen::MatrixXd(0.5 * (a + a.transpose()));
  };
  auto psd_project = [](const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXd(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
  };
  auto local_search = [&](Eigen::MatrixXd a) {
    for (int it = 0; it < opts.clamp_iters; ++it) a = psd_project(clamp_to_box(a));
    return clamp_to_box(a);
  };

  std::vector<Eigen::MatrixXd> candidates;
  candidates.push_back(Eigen::MatrixXd::Identity(m, m));  // always feasible fallback
  candidates.push_back(box);                              // feasible iff overlaps are PSD
  candidates.push_back(local_search(box));

  if (m <= 4 && m >= 2) {
    const int npairs = m * (m - 1) / 2;
    for (std::uint32_t pat = 0; pat < (1u << npairs); ++pat) {
      Eigen::MatrixXd a = box;
      int bit = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++bit)
          if (pat & (1u << bit)) a(i, j) = a(j, i) = -a(i, j);
      candidates.push_back(a);
    }
  }
  for (int r = 0; r < opts.starts; ++r) {
    Stream st{derive_key(opts.seed, 0xC0A153u + static_cast<std::uint64_t>(r))};
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    std::uint64_t ctr = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double v = (2.0 * st.u01(ctr++) - 1.0) * box(i, j);
        a(i, j) = a(j, i) = v;
      }
    candidates.push_back(local_search(a));
  }

  BoundValue best;
  double best_q = -1.0;
  for (const auto& cand : candidates) {
    if (!converse_matrix_feasible(ch, cand)) continue;
    auto res = min_quadratic_over_simplex(cand, opts.qp);
    if (res.value > best_q) {
      best_q = res.value;
      best.converse_matrix = cand;
      best.p_star = res.minimizer;
    }
  }
  // the identity candidate guarantees best_q >= 1/m
  best.bits = std::max(0.0, -std::log2(std::clamp(best_q, 1e-300, 1.0)));
  best.converse_exhaustive = (m <= 4);
  return best;
}

// R_infinity through the dual form -log2 min_P lambda_max(rho_P), with a
// Dykstra-recovered primal sigma certifying the duality gap. Polyak
// subgradient steps use the sigma value as the running optimum estimate;
// small alphabets get an ellipsoid polish when the gap has not closed.
inline BoundValue r_infinity(const ChannelSpec& ch, const RInfOptions& opts = {}) {
  require(opts.tol > 0.0, errc::invalid_input, "duality gap tolerance must be > 0");
  const int m = ch.alphabet_size();

  Eigen::VectorXd p = Eigen::VectorXd::Constant(m, 1.0 / m);
  Eigen::VectorXcd top;
  double f = detail::lambda_max_vec(detail::state_mixture(ch, p), top);
  Eigen::VectorXd best_p = p;
  double best_f = f;

  auto ev = detail::evaluate_rinf_certificate(ch, best_p);
  double sigma_lb = ev.primal_value;

  if (ev.gap > opts.tol) {
    const int check_every = 250;
    for (int it = 0; it < opts.budget; ++it) {
      Eigen::VectorXd g(m);
      for (int x = 0; x < m; ++x) g(x) = std::norm(ch.states[x].dot(top));
      double target = std::max(sigma_lb, best_f - 0.05 * std::pow(0.9995, it) - 1e-12);
      double step = (f - target) / std::max(g.squaredNorm(), 1e-300);
      if (step > 0) p = detail::project_simplex(p - step * g);
      f = detail::lambda_max_vec(detail::state_mixture(ch, p), top);
      if (f < best_f) {
        best_f = f;
        best_p = p;
      }
      if ((it + 1) % check_every == 0) {
        ev = detail::evaluate_rinf_certificate(ch, best_p);
        sigma_lb = std::max(sigma_lb, ev.primal_value);
        if (ev.gap <= opts.tol) break;
        if (opts.polish && m <= 16 && it + 1 >= 2 * check_every) {
          detail::ellipsoid_polish(ch, best_p, best_f);
          ev = detail::evaluate_rinf_certificate(ch, best_p);
          break;
        }
      }
    }
    if (ev.gap > opts.tol) ev = detail::evaluate_rinf_certificate(ch, best_p);
  }

  BoundValue b;
  b.bits = ev.dual_bits;
  b.p_star = SimplexDistribution{best_p};
  b.sigma = ev.sigma;
  b.duality_gap = ev.gap;
  b.gap_ok = ev.gap <= opts.tol;
  return b;
}

// Smallest list size consistent with 2^{n·rate} codewords under the
// converse matrix A: ceil(2^{n·rate} · (min_P Q_P(A))^n), in log domain.
inline std::uint64_t min_list_size_for_rate(const ChannelSpec& ch, const Eigen::MatrixXd& a,
                                            double rate, int n,
                                            const SimplexMinOptions& qp = {}) {
  require(rate >= 0.0, errc::invalid_input, "rate must be >= 0");
  require(n >= 1, errc::invalid_input, "block length must be >= 1");
  require(converse_matrix_feasible(ch, a, 1e-9), errc::invalid_input,
          "matrix is not feasible for the converse family");
  double q = min_quadratic_over_simplex(a, qp).value;
  q = std::clamp(q, 1e-300, 1.0);
  double t = n * (rate + std::log2(q));
  require(t < 62.0, errc::invalid_input, "list-size bound exceeds 2^62");
  double x = std::exp2(t);
  double snapped = std::round(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, std::abs(x))) x = snapped;
  return static_cast<std::uint64_t>(std::ceil(x));
}

struct BoundsOptions {
  std::uint64_t seed = 0;
  double tol = 1e-9;  // classifier tolerance and R_infinity gap requirement
};

// Full report: the three bounds, the two structural classifiers, and the
// matching-bounds logic of the corollaries.
inline BoundsReport bounds_report(const ChannelSpec& ch, const BoundsOptions& opts = {}) {
  BoundsReport rep;
  SimplexMinOptions qp;
  qp.seed = opts.seed;
  ConverseOptions conv;
  conv.seed = opts.seed;
  conv.qp = qp;
  RInfOptions rinf;
  rinf.tol = std::max(opts.tol, 1e-12);

  rep.achievability_L2 = achievability_bound_L2(ch, qp);
  rep.converse = converse_bound(ch, conv);
  rep.r_infinity = r_infinity(ch, rinf);
  rep.psd_abs_overlaps = is_psd_absolute_overlaps(ch, opts.tol);
  rep.pairwise_non_obtuse = pairwise_non_obtuse_phases(ch, opts.tol).ok();

  std::vector<std::string> parts;
  if (rep.pairwise_non_obtuse) {
    rep.capacity_exact = rep.achievability_L2.bits;
    parts.push_back("Cor. 1 (pairwise non-obtuse) fired");
  } else if (rep.psd_abs_overlaps) {
    rep.capacity_exact = rep.achievability_L2.bits;
    parts.push_back("Cor. 3 (PSD) fired");
  } else {
    parts.push_back("no matching-bounds corollary applies");
  }
  if (rep.capacity_exact && rep.r_infinity.gap_ok &&
      rep.r_infinity.bits - *rep.capacity_exact > 1e-6)
    parts.push_back("strict gap to R-infinity");
  if (!rep.r_infinity.gap_ok) parts.push_back("R-infinity duality gap not closed");

  rep.notes = parts.empty() ? "" : parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) rep.notes += "; " + parts[i];
  return rep;
}

}  // namespace cqzl
