#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cqzl/channel.hpp"
#include "cqzl/common.hpp"
#include "cqzl/factor_width.hpp"
#include "cqzl/rng.hpp"
#include "cqzl/simplex_qp.hpp"

namespace cqzl {

struct Codebook {
  int n = 0;
  std::vector<std::vector<int>> codewords;
  std::string channel_hash;

  int size() const { return static_cast<int>(codewords.size()); }
};

// Records the interference sums of the kept codewords and how the draw
// succeeded; S_i <= 1 for every kept codeword is exactly what makes the
// Gram matrix diagonally dominant.
struct ExpurgationCertificate {
  std::vector<double> s_values;
  int target_m = 0;
  int attempts = 0;
  std::uint64_t seed = 0;
};

struct ExpurgationResult {
  Codebook code;
  ExpurgationCertificate certificate;
  SimplexDistribution p;
};

namespace detail {

// floor(2^{-n log2 q - 2}) with a snap against floating noise at integers
inline std::int64_t expurgation_codebook_size(double q, int n) {
  double t = -static_cast<double>(n) * std::log2(q) - 2.0;
  if (t >= 62.0) fail_input("expurgation size exceeds 2^62; reduce n");
  double x = std::exp2(t);
  double snapped = std::round(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, x)) x = snapped;
  return static_cast<std::int64_t>(std::floor(x));
}

inline std::vector<int> sample_codeword(const Eigen::VectorXd& cdf, const Stream& st, int n,
                                        std::uint64_t codeword_index) {
  std::vector<int> w(n);
  for (int l = 0; l < n; ++l) {
    double u = st.u01(codeword_index * static_cast<std::uint64_t>(n) + l);
    int s = 0;
    while (s + 1 < cdf.size() && u >= cdf(s)) ++s;
    w[l] = s;
  }
  return w;
}

}  // namespace detail

// Executable form of the Theorem-2 expurgation: draw 2M codewords i.i.d.
// from P^n with M = floor(Q_P^{-n}/4), keep the M with the smallest
// interference sums when at least M of them have S_i <= 1, and retry with
// a derived seed otherwise. The proof guarantees success in expectation,
// not per draw, hence the retry loop.
inline ExpurgationResult expurgate_code(const ChannelSpec& ch, const SimplexDistribution& p,
                                        int n, std::uint64_t seed, int max_attempts = 64) {
  require(n >= 1, errc::invalid_input, "block length must be >= 1");
  const int alphabet = ch.alphabet_size();
  require(p.size() == alphabet, errc::invalid_input, "distribution/channel alphabet mismatch");

  const Eigen::MatrixXd a = absolute_overlap_matrix(ch).entries;
  const double q = quadratic_form(a, p);
  if (q >= 1.0 - 1e-12)
    fail_construction("trivial channel: Q_P = 1, no zero-error list code exists");

  const std::int64_t m = detail::expurgation_codebook_size(q, n);
  if (m < 1) {
    int n_min = n;
    while (detail::expurgation_codebook_size(q, n_min) < 1 && n_min < 1000000) ++n_min;
    fail_input("n too small, need n >= " + std::to_string(n_min));
  }
  const std::int64_t draw = 2 * m;

  Eigen::VectorXd cdf(alphabet);
  std::partial_sum(p.probs.data(), p.probs.data() + alphabet, cdf.data());
  cdf(alphabet - 1) = 1.0;

  // per-pair log-overlaps; -inf marks an exact zero factor
  Eigen::MatrixXd log_a(alphabet, alphabet);
  for (int x = 0; x < alphabet; ++x)
    for (int y = 0; y < alphabet; ++y)
      log_a(x, y) = a(x, y) < 1e-300 ? -std::numeric_limits<double>::infinity()
                                     : std::log(a(x, y));

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Stream st{derive_key(seed, static_cast<std::uint64_t>(attempt))};
    std::vector<std::vector<int>> words(draw);
    for (std::int64_t i = 0; i < draw; ++i)
      words[i] = detail::sample_codeword(cdf, st, n, static_cast<std::uint64_t>(i));

    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(draw, draw);
    parallel_for(static_cast<std::size_t>(draw), [&](std::size_t i) {
      for (std::int64_t j = static_cast<std::int64_t>(i) + 1; j < draw; ++j) {
        double ls = 0.0;
        for (int l = 0; l < n; ++l) ls += log_a(words[i][l], words[j][l]);
        overlap(i, j) = std::isfinite(ls) ? std::exp(ls) : 0.0;
      }
    });

    std::vector<double> s(draw);
    std::int64_t good = 0;
    for (std::int64_t i = 0; i < draw; ++i) {
      double si = 0.0;
      for (std::int64_t j = 0; j < draw; ++j)
        si += i < j ? overlap(i, j) : overlap(j, i);
      s[i] = si;
      if (si <= 1.0) ++good;
    }
    if (good < m) continue;

    std::vector<std::int64_t> idx(draw);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::int64_t u, std::int64_t v) {
      return s[u] != s[v] ? s[u] < s[v] : u < v;
    });
    std::vector<std::int64_t> keep(idx.begin(), idx.begin() + m);
    std::sort(keep.begin(), keep.end());

    ExpurgationResult res;
    res.code.n = n;
    res.code.channel_hash = channel_hash(ch);
    res.p = p;
    for (std::int64_t i : keep) res.code.codewords.push_back(words[i]);
    for (std::int64_t i : keep) {
      double si = 0.0;
      for (std::int64_t j : keep)
        if (j != i) si += i < j ? overlap(i, j) : overlap(j, i);
      res.certificate.s_values.push_back(si);
    }
    res.certificate.target_m = static_cast<int>(m);
    res.certificate.attempts = attempt + 1;
    res.certificate.seed = seed;
    return res;
  }
  fail_construction("expurgation failed after " + std::to_string(max_attempts) + " attempts");
}

// Gram matrix of the codeword states, with phases: per-position complex
// overlaps accumulated as log-magnitude plus phase.
inline GramMatrix code_gram(const ChannelSpec& ch, const Codebook& code) {
  const int m = code.size();
  require(m >= 1, errc::invalid_input, "codebook is empty");
  const int alphabet = ch.alphabet_size();
  Eigen::MatrixXcd z(alphabet, alphabet);
  for (int x = 0; x < alphabet; ++x)
    for (int y = 0; y < alphabet; ++y) z(x, y) = state_overlap(ch, x, y);

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    require(static_cast<int>(code.codewords[i].size()) == code.n, errc::invalid_input,
            "codeword length mismatch");
    for (int j = i + 1; j < m; ++j) {
      double log_mag = 0.0, phase = 0.0;
      bool zero = false;
      for (int l = 0; l < code.n; ++l) {
        int x = code.codewords[i][l], y = code.codewords[j][l];
        require(x >= 0 && x < alphabet && y >= 0 && y < alphabet, errc::invalid_input,
                "symbol out of alphabet");
        cxd v = z(x, y);
        if (std::abs(v) < 1e-300) {
          zero = true;
          break;
        }
        log_mag += std::log(std::abs(v));
        phase += std::arg(v);
      }
      cxd gij = zero ? cxd(0, 0) : std::polar(std::exp(log_mag), phase);
      g(i, j) = gij;
      g(j, i) = std::conj(gij);
    }
  }
  return GramMatrix{std::move(g)};
}

// The sparse factor IS the list-2 decoder: outcome k lists the column
// indices carrying nonzero weight in row k.
inline SparseFactor build_list2_decoder(const GramMatrix& g) { return factor_diag_dominant(g); }

inline double empirical_rate(const Codebook& code, int list_size) {
  require(code.size() >= 1, errc::invalid_input, "codebook is empty");
  require(list_size >= 1, errc::invalid_input, "list size must be >= 1");
  require(code.n >= 1, errc::invalid_input, "block length must be >= 1");
  return std::log2(static_cast<double>(code.size()) / list_size) / code.n;
}

}  // namespace cqzl
