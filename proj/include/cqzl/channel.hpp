#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqzl/common.hpp"
#include "cqzl/rng.hpp"

namespace cqzl {

// A pure-state classical-quantum channel: one unit vector per input symbol.
// Density matrices stay implicit; everything downstream works with inner
// products of these vectors.
struct ChannelSpec {
  int dim = 0;
  std::vector<Eigen::VectorXcd> states;

  int alphabet_size() const { return static_cast<int>(states.size()); }
};

// Entrywise moduli of pairwise state overlaps. Real symmetric, unit
// diagonal, entries in [0, 1].
struct OverlapMatrix {
  Eigen::MatrixXd entries;
};

// Unit-modulus phase factor per symbol.
struct PhaseAssignment {
  std::vector<cxd> phases;
};

// Result of the pairwise non-obtuse test. Failure carries a closed cycle
// of symbols whose overlap phases cannot be gauged away.
struct NonObtuseResult {
  std::optional<PhaseAssignment> phases;
  std::vector<int> witness_cycle;

  bool ok() const { return phases.has_value(); }
};

inline ChannelSpec make_channel(const std::vector<Eigen::VectorXcd>& vectors) {
  require(!vectors.empty(), errc::invalid_input, "channel needs at least one state");
  const Eigen::Index dim = vectors.front().size();
  require(dim >= 1, errc::invalid_input, "state vectors must have dimension >= 1");

  ChannelSpec ch;
  ch.dim = static_cast<int>(dim);
  ch.states.reserve(vectors.size());
  for (std::size_t x = 0; x < vectors.size(); ++x) {
    const auto& v = vectors[x];
    require(v.size() == dim, errc::invalid_input,
            "inconsistent state dimensions (symbol " + std::to_string(x) + ")");
    require(v.allFinite(), errc::invalid_input,
            "non-finite amplitude (symbol " + std::to_string(x) + ")");
    double norm = v.norm();
    require(norm > 0.0, errc::invalid_input, "zero state vector (symbol " + std::to_string(x) + ")");
    require(std::abs(norm - 1.0) <= 1e-9, errc::invalid_input,
            "state norm deviates from 1 by more than 1e-9 (symbol " + std::to_string(x) + ")");
    ch.states.push_back(v / norm);
  }
  return ch;
}

// The three planar trine states at mutual 120 degrees, all absolute
// overlaps equal to 1/2.
inline ChannelSpec trine_channel() {
  const double s = std::sqrt(3.0) / 2.0;
  std::vector<Eigen::VectorXcd> v(3, Eigen::VectorXcd(2));
  v[0] << cxd(1.0, 0.0), cxd(0.0, 0.0);
  v[1] << cxd(-0.5, 0.0), cxd(s, 0.0);
  v[2] << cxd(-0.5, 0.0), cxd(-s, 0.0);
  return make_channel(v);
}

// Two real qubit states with overlap c.
inline ChannelSpec binary_channel(double c) {
  require(c >= 0.0 && c <= 1.0, errc::invalid_input, "binary channel overlap must lie in [0, 1]");
  std::vector<Eigen::VectorXcd> v(2, Eigen::VectorXcd(2));
  v[0] << cxd(1.0, 0.0), cxd(0.0, 0.0);
  v[1] << cxd(c, 0.0), cxd(std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0);
  return make_channel(v);
}

// Channel with `alphabet` Haar-ish random states in dimension `dim`,
// deterministic in the stream key.
inline ChannelSpec random_channel(int dim, int alphabet, std::uint64_t key) {
  require(dim >= 1 && alphabet >= 1, errc::invalid_input, "random_channel needs dim, alphabet >= 1");
  Stream st{key};
  std::vector<Eigen::VectorXcd> v(alphabet, Eigen::VectorXcd(dim));
  std::uint64_t ctr = 0;
  for (int x = 0; x < alphabet; ++x) {
    for (int k = 0; k < dim; ++k) {
      double re = st.gaussian(ctr++);
      double im = st.gaussian(ctr++);
      v[x](k) = cxd(re, im);
    }
    double norm = v[x].norm();
    if (norm < 1e-12) v[x](0) = 1.0, norm = 1.0;  // vanishing draw, effectively never
    v[x] /= norm;
  }
  return make_channel(v);
}

inline cxd state_overlap(const ChannelSpec& ch, int x, int y) {
  return ch.states[x].dot(ch.states[y]);  // Eigen dot conjugates the left argument
}

inline OverlapMatrix absolute_overlap_matrix(const ChannelSpec& ch) {
  const int m = ch.alphabet_size();
  OverlapMatrix a;
  a.entries = Eigen::MatrixXd::Zero(m, m);
  for (int x = 0; x < m; ++x) {
    a.entries(x, x) = 1.0;
    for (int y = x + 1; y < m; ++y) {
      double v = std::min(1.0, std::abs(state_overlap(ch, x, y)));
      a.entries(x, y) = v;
      a.entries(y, x) = v;
    }
  }
  return a;
}

// |<psi_x|psi_y>| for n-fold sequences: per-position product accumulated in
// log domain. Tensor powers are never materialized here.
inline double codeword_abs_overlap(const ChannelSpec& ch, const std::vector<int>& x_seq,
                                   const std::vector<int>& y_seq) {
  require(!x_seq.empty(), errc::invalid_input, "codeword length must be >= 1");
  require(x_seq.size() == y_seq.size(), errc::invalid_input, "codeword length mismatch");
  const int m = ch.alphabet_size();
  double log_sum = 0.0;
  for (std::size_t l = 0; l < x_seq.size(); ++l) {
    int x = x_seq[l], y = y_seq[l];
    require(x >= 0 && x < m && y >= 0 && y < m, errc::invalid_input, "symbol out of alphabet");
    double o = std::abs(state_overlap(ch, x, y));
    if (o < 1e-300) return 0.0;
    log_sum += std::log(std::min(1.0, o));
  }
  return std::exp(log_sum);
}

inline double min_eigenvalue_sym(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_psd_absolute_overlaps(const ChannelSpec& ch, double tol = 1e-9) {
  require(tol >= 0.0, errc::invalid_input, "tolerance must be >= 0");
  return min_eigenvalue_sym(absolute_overlap_matrix(ch).entries) >= -tol;
}

// Gauge-fixing test for pairwise non-obtuse channels. Overlaps of modulus
// <= tol count as exact zeros; remaining pairs form the edge set. One phase
// per component is pinned, tree edges are made real positive, and every
// other edge is checked in the resulting gauge.
inline NonObtuseResult pairwise_non_obtuse_phases(const ChannelSpec& ch, double tol = 1e-9) {
  require(tol >= 0.0, errc::invalid_input, "tolerance must be >= 0");
  const int m = ch.alphabet_size();
  Eigen::MatrixXcd g(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) g(x, y) = state_overlap(ch, x, y);

  std::vector<cxd> alpha(m, cxd(1.0, 0.0));
  std::vector<int> parent(m, -1), depth(m, 0), order;
  std::vector<char> seen(m, 0);

  for (int root = 0; root < m; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    order.assign(1, root);
    for (std::size_t q = 0; q < order.size(); ++q) {
      int u = order[q];
      for (int v = 0; v < m; ++v) {
        if (seen[v] || std::abs(g(u, v)) <= tol) continue;
        seen[v] = 1;
        parent[v] = u;
        depth[v] = depth[u] + 1;
        // make <alpha_u psi_u | alpha_v psi_v> real positive along the tree edge
        cxd w = std::conj(alpha[u]) * g(u, v);
        alpha[v] = std::conj(w) / std::abs(w);
        order.push_back(v);
      }
    }
  }

  NonObtuseResult res;
  for (int x = 0; x < m; ++x) {
    for (int y = x + 1; y < m; ++y) {
      if (std::abs(g(x, y)) <= tol) continue;
      cxd z = std::conj(alpha[x]) * alpha[y] * g(x, y);
      if (std::abs(z.imag()) <= tol && z.real() >= -tol) continue;
      // inconsistent edge: close the cycle through tree parents
      std::vector<int> up_x{x}, up_y{y};
      int a = x, b = y;
      while (depth[a] > depth[b]) up_x.push_back(a = parent[a]);
      while (depth[b] > depth[a]) up_y.push_back(b = parent[b]);
      while (a != b) {
        up_x.push_back(a = parent[a]);
        up_y.push_back(b = parent[b]);
      }
      res.witness_cycle = up_x;  // x .. lca
      for (auto it = up_y.rbegin(); it != up_y.rend(); ++it)
        if (*it != a || res.witness_cycle.back() != a) res.witness_cycle.push_back(*it);
      if (res.witness_cycle.size() > 1 && res.witness_cycle.front() == res.witness_cycle.back())
        res.witness_cycle.pop_back();
      return res;
    }
  }
  res.phases = PhaseAssignment{std::move(alpha)};
  return res;
}

// Stable fingerprint of the normalized channel, used to tie codebooks and
// measurements back to the channel file they were built from.
inline std::string channel_hash(const ChannelSpec& ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  auto mix = [&h](const char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 0x100000001b3ULL;
    }
  };
  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "d%d;", ch.dim);
  mix(buf, n);
  for (const auto& s : ch.states) {
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      n = std::snprintf(buf, sizeof buf, "%.17g,%.17g;", s(k).real(), s(k).imag());
      mix(buf, n);
    }
  }
  n = std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, n);
}

}  // namespace cqzl
