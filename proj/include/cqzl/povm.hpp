#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cqzl/common.hpp"
#include "cqzl/factor_width.hpp"
#include "cqzl/rng.hpp"

namespace cqzl {

// A list measurement on the code subspace. Operators are expressed in an
// orthonormal frame of span{psi_i} of dimension M; the ambient dim^n space
// is never materialized. Outcomes built here are rank-one and carry their
// factor vector; outcomes loaded from files may be dense.
struct ListMeasurement {
  struct Outcome {
    std::vector<int> label;   // sorted message subset, size <= L
    Eigen::VectorXcd amp;     // rank-one factor (empty when dense)
    Eigen::MatrixXcd op;      // dense operator (empty when rank-one)

    bool rank_one() const { return amp.size() > 0; }
    Eigen::MatrixXcd matrix() const { return rank_one() ? Eigen::MatrixXcd(amp * amp.adjoint()) : op; }
  };

  int subspace_dim = 0;
  Eigen::MatrixXcd frame_states;  // column i = coordinates of |psi_i> in the frame
  std::vector<Outcome> outcomes;
};

struct VerificationReport {
  bool complete = false;
  bool positive = false;
  bool zero_error = false;
  int max_list_size = 0;
  std::vector<double> per_message_success;
  std::optional<bool> fi_sum_check;
  double completeness_residual = 0.0;
  double min_operator_eigenvalue = 0.0;
};

struct VerifyOptions {
  double psd_tol = 1e-10;
  double completeness_tol = 1e-9;
  double zero_error_tol = 1e-9;
  bool check_fi_sum = true;  // pad labels to exactly L and test sum_i F_i = L*1
};

// Coordinates of the codeword states in an orthonormal frame for their
// span: the Cholesky factor R with G = R^dagger R, states as columns.
inline Eigen::MatrixXcd state_frame(const GramMatrix& g) {
  Eigen::LLT<Eigen::MatrixXcd> llt(g.entries);
  require(llt.info() == Eigen::Success, errc::numerical,
          "Gram matrix is not positive definite; states are linearly dependent");
  return llt.matrixL().adjoint();
}

// G^{-1}, read as the coordinates of the dual vectors in the codeword-state
// frame (dual_j = sum_i (G^{-1})_{ij} psi_i).
inline Eigen::MatrixXcd dual_basis(const GramMatrix& g) {
  const int m = g.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  require(lo > 0.0 && hi / lo <= 1e12, errc::numerical,
          "Gram matrix is singular or ill-conditioned (condition > 1e12)");
  Eigen::MatrixXcd inv = g.entries.inverse();
  double resid = (inv * g.entries - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
  require(resid <= 1e-9, errc::numerical, "dual basis reconstruction failed");
  return inv;
}

// Explicit zero-error list-2 POVM from the dual basis: one rank-one outcome
// sqrt(r_ij)(e^{-i theta/2} dual_i + e^{+i theta/2} dual_j) per significant
// off-diagonal pair, one singleton sqrt(g_ii - sum r_ij) dual_i per message
// with positive radicand. The outcome vectors are the factorization rows
// pushed through the dual frame, so completeness is the projector identity
// sum = Psi G^{-1} Psi^dagger.
inline ListMeasurement build_povm(const GramMatrix& g) {
  const int m = g.size();
  require(is_diagonally_dominant(g, 1e-12), errc::invalid_input,
          "Gram matrix is not diagonally dominant");
  SparseFactor v = factor_diag_dominant(g);
  Eigen::MatrixXcd frame = state_frame(g);
  // dual vectors in the frame: (R^dagger)^{-1}
  Eigen::MatrixXcd dual = frame.adjoint()
                              .triangularView<Eigen::Lower>()
                              .solve(Eigen::MatrixXcd::Identity(m, m));

  ListMeasurement meas;
  meas.subspace_dim = m;
  meas.frame_states = frame;
  meas.outcomes.reserve(v.rows.size());
  for (const auto& row : v.rows) {
    ListMeasurement::Outcome out;
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
    for (const auto& e : row) {
      out.label.push_back(e.col);
      u += std::conj(e.value) * dual.col(e.col);
    }
    std::sort(out.label.begin(), out.label.end());
    out.amp = std::move(u);
    meas.outcomes.push_back(std::move(out));
  }
  return meas;
}

inline VerificationReport verify_povm(const ListMeasurement& meas, const GramMatrix& g,
                                      int list_size, const VerifyOptions& opts = {}) {
  const int m = g.size();
  require(meas.subspace_dim == m, errc::invalid_input, "measurement/Gram dimension mismatch");
  for (const auto& out : meas.outcomes) {
    require(out.rank_one() ? out.amp.size() == m : (out.op.rows() == m && out.op.cols() == m),
            errc::invalid_input, "operator dimension mismatch");
    for (int msg : out.label)
      require(msg >= 0 && msg < m, errc::invalid_input, "label message out of range");
  }
  Eigen::MatrixXcd frame = state_frame(g);

  VerificationReport rep;
  rep.positive = true;
  rep.min_operator_eigenvalue = 0.0;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& out : meas.outcomes) {
    rep.max_list_size = std::max(rep.max_list_size, static_cast<int>(out.label.size()));
    if (out.rank_one()) {
      total.noalias() += out.amp * out.amp.adjoint();
    } else {
      Eigen::MatrixXcd herm = 0.5 * (out.op + out.op.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
      double lo = es.eigenvalues().minCoeff();
      rep.min_operator_eigenvalue = std::min(rep.min_operator_eigenvalue, lo);
      if (lo < -opts.psd_tol) rep.positive = false;
      total += out.op;
    }
  }
  rep.completeness_residual =
      (total - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
  rep.complete = rep.completeness_residual <= opts.completeness_tol;

  rep.per_message_success.assign(m, 0.0);
  for (const auto& out : meas.outcomes) {
    for (int msg : out.label) {
      const auto& psi = frame.col(msg);
      double pr = out.rank_one() ? std::norm(psi.dot(out.amp))
                                 : (psi.adjoint() * out.op * psi)(0, 0).real();
      rep.per_message_success[msg] += pr;
    }
  }
  double worst = 1.0;
  for (double s : rep.per_message_success) worst = std::min(worst, s);
  rep.zero_error = worst >= 1.0 - opts.zero_error_tol;

  if (opts.check_fi_sum && rep.max_list_size <= list_size && m >= list_size) {
    // pad every label to exactly list_size messages and form sum_i F_i
    Eigen::MatrixXcd fi_sum = Eigen::MatrixXcd::Zero(m, m);
    for (const auto& out : meas.outcomes) {
      std::set<int> padded(out.label.begin(), out.label.end());
      for (int cand = 0; static_cast<int>(padded.size()) < list_size && cand < m; ++cand)
        padded.insert(cand);
      fi_sum += static_cast<double>(padded.size()) * out.matrix();
    }
    double resid = (fi_sum - static_cast<double>(list_size) * Eigen::MatrixXcd::Identity(m, m))
                       .cwiseAbs()
                       .maxCoeff();
    rep.fi_sum_check = resid <= opts.completeness_tol;
  }
  return rep;
}

// Born-rule sampling of the measurement on a transmitted message.
inline std::map<std::vector<int>, std::int64_t> simulate_decode(const ListMeasurement& meas,
                                                                const GramMatrix& g, int message,
                                                                std::int64_t shots,
                                                                std::uint64_t seed) {
  const int m = g.size();
  require(message >= 0 && message < m, errc::invalid_input, "message index out of range");
  require(shots >= 1, errc::invalid_input, "shots must be >= 1");
  Eigen::MatrixXcd frame = state_frame(g);
  const auto& psi = frame.col(message);

  std::vector<double> cdf(meas.outcomes.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < meas.outcomes.size(); ++k) {
    const auto& out = meas.outcomes[k];
    double pr = out.rank_one() ? std::norm(psi.dot(out.amp))
                               : (psi.adjoint() * out.op * psi)(0, 0).real();
    acc += std::max(0.0, pr);
    cdf[k] = acc;
  }
  require(std::abs(acc - 1.0) <= 1e-6, errc::numerical,
          "outcome probabilities do not sum to 1 (measurement incomplete?)");

  std::map<std::vector<int>, std::int64_t> hist;
  Stream st{derive_key(seed, 0xB02Du)};
  for (std::int64_t t = 0; t < shots; ++t) {
    double u = st.u01(static_cast<std::uint64_t>(t)) * acc;
    std::size_t k = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (k >= meas.outcomes.size()) k = meas.outcomes.size() - 1;
    ++hist[meas.outcomes[k].label];
  }
  return hist;
}

}  // namespace cqzl
