#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqzl/capacity_bounds.hpp"
#include "cqzl/channel.hpp"
#include "cqzl/code_lab.hpp"
#include "cqzl/common.hpp"
#include "cqzl/povm.hpp"

namespace cqzl {

// All emitted JSON uses insertion-ordered keys and floats rounded to 12
// significant digits, so identical runs produce byte-identical artifacts.
using ojson = nlohmann::ordered_json;

namespace jio {

inline double num(double x) { return round_sig(x, 12); }

inline ojson complex_to_json(const cxd& z) { return ojson::array({num(z.real()), num(z.imag())}); }

inline cxd complex_from_json(const ojson& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          errc::invalid_input, "expected [re, im] pair");
  double re = j[0].get<double>(), im = j[1].get<double>();
  require(std::isfinite(re) && std::isfinite(im), errc::invalid_input,
          "non-finite complex component");
  return {re, im};
}

inline ojson cmatrix_to_json(const Eigen::MatrixXcd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXcd cmatrix_from_json(const ojson& j) {
  require(j.is_array() && !j.empty(), errc::invalid_input, "expected a matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require(j[i].is_array() && static_cast<Eigen::Index>(j[i].size()) == cols,
            errc::invalid_input, "ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

inline ojson rmatrix_to_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ojson rvector_to_json(const Eigen::VectorXd& v) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

}  // namespace jio

inline ojson channel_to_json(const ChannelSpec& ch) {
  ojson j;
  j["dim"] = ch.dim;
  ojson states = ojson::array();
  for (const auto& s : ch.states) {
    ojson vec = ojson::array();
    for (Eigen::Index k = 0; k < s.size(); ++k) vec.push_back(jio::complex_to_json(s(k)));
    states.push_back(std::move(vec));
  }
  j["states"] = std::move(states);
  return j;
}

inline ChannelSpec channel_from_json(const ojson& j) {
  require(j.is_object() && j.contains("dim") && j.contains("states"), errc::invalid_input,
          "channel JSON needs 'dim' and 'states'");
  require(j["dim"].is_number_integer(), errc::invalid_input, "'dim' must be an integer");
  const int dim = j["dim"].get<int>();
  require(dim >= 1, errc::invalid_input, "'dim' must be >= 1");
  require(j["states"].is_array() && !j["states"].empty(), errc::invalid_input,
          "'states' must be a nonempty array");
  std::vector<Eigen::VectorXcd> vecs;
  for (const auto& sj : j["states"]) {
    require(sj.is_array() && static_cast<int>(sj.size()) == dim, errc::invalid_input,
            "state length does not match 'dim'");
    Eigen::VectorXcd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = jio::complex_from_json(sj[k]);
    vecs.push_back(std::move(v));
  }
  return make_channel(vecs);
}

inline ojson distribution_to_json(const SimplexDistribution& p) {
  return jio::rvector_to_json(p.probs);
}

inline SimplexDistribution distribution_from_json(const ojson& j) {
  require(j.is_array() && !j.empty(), errc::invalid_input, "distribution must be a nonempty array");
  Eigen::VectorXd p(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) p(i) = j[i].get<double>();
  // re-normalize the 12-digit rounding residue before validating
  double s = p.sum();
  require(std::abs(s - 1.0) <= 1e-9, errc::invalid_input, "distribution must sum to 1");
  return make_distribution(p / s);
}

inline ojson bound_value_to_json(const BoundValue& b) {
  ojson j;
  j["bits"] = jio::num(b.bits);
  if (b.p_star) j["P_star"] = distribution_to_json(*b.p_star);
  if (b.converse_matrix) {
    j["A"] = jio::rmatrix_to_json(*b.converse_matrix);
    j["search_exhaustive"] = b.converse_exhaustive;
  }
  if (b.sigma) {
    j["sigma"] = jio::cmatrix_to_json(*b.sigma);
    j["duality_gap"] = jio::num(b.duality_gap);
    j["gap_ok"] = b.gap_ok;
  }
  return j;
}

inline ojson bounds_report_to_json(const BoundsReport& r) {
  ojson j;
  j["achievability_L2"] = bound_value_to_json(r.achievability_L2);
  j["converse"] = bound_value_to_json(r.converse);
  j["r_infinity"] = bound_value_to_json(r.r_infinity);
  j["psd_abs_overlaps"] = r.psd_abs_overlaps;
  j["pairwise_non_obtuse"] = r.pairwise_non_obtuse;
  j["capacity_exact"] = r.capacity_exact ? ojson(jio::num(*r.capacity_exact)) : ojson(nullptr);
  j["notes"] = r.notes;
  return j;
}

inline ojson codebook_to_json(const Codebook& code, const SimplexDistribution& p,
                              std::uint64_t seed) {
  ojson j;
  j["n"] = code.n;
  j["codewords"] = code.codewords;
  j["seed"] = seed;
  j["P"] = distribution_to_json(p);
  j["channel_hash"] = code.channel_hash;
  return j;
}

inline Codebook codebook_from_json(const ojson& j, SimplexDistribution* p_out = nullptr,
                                   std::uint64_t* seed_out = nullptr) {
  require(j.is_object() && j.contains("n") && j.contains("codewords") && j.contains("channel_hash"),
          errc::invalid_input, "codebook JSON needs 'n', 'codewords', 'channel_hash'");
  Codebook code;
  code.n = j["n"].get<int>();
  require(code.n >= 1, errc::invalid_input, "'n' must be >= 1");
  for (const auto& w : j["codewords"]) {
    std::vector<int> word = w.get<std::vector<int>>();
    require(static_cast<int>(word.size()) == code.n, errc::invalid_input,
            "codeword length does not match 'n'");
    code.codewords.push_back(std::move(word));
  }
  require(!code.codewords.empty(), errc::invalid_input, "codebook is empty");
  code.channel_hash = j["channel_hash"].get<std::string>();
  if (p_out && j.contains("P")) *p_out = distribution_from_json(j["P"]);
  if (seed_out && j.contains("seed")) *seed_out = j["seed"].get<std::uint64_t>();
  return code;
}

inline ojson certificate_to_json(const ExpurgationCertificate& c) {
  ojson j;
  ojson sv = ojson::array();
  for (double s : c.s_values) sv.push_back(jio::num(s));
  j["s_values"] = std::move(sv);
  j["target_M"] = c.target_m;
  j["attempts"] = c.attempts;
  j["seed"] = c.seed;
  return j;
}

inline ojson measurement_to_json(const ListMeasurement& m) {
  ojson j;
  j["subspace_dim"] = m.subspace_dim;
  j["frame"] = jio::cmatrix_to_json(m.frame_states);
  ojson outs = ojson::array();
  for (const auto& out : m.outcomes) {
    ojson o;
    o["label"] = out.label;
    o["op"] = jio::cmatrix_to_json(out.matrix());
    outs.push_back(std::move(o));
  }
  j["outcomes"] = std::move(outs);
  return j;
}

inline ListMeasurement measurement_from_json(const ojson& j) {
  require(j.is_object() && j.contains("subspace_dim") && j.contains("outcomes"),
          errc::invalid_input, "measurement JSON needs 'subspace_dim' and 'outcomes'");
  ListMeasurement m;
  m.subspace_dim = j["subspace_dim"].get<int>();
  require(m.subspace_dim >= 1, errc::invalid_input, "'subspace_dim' must be >= 1");
  if (j.contains("frame")) m.frame_states = jio::cmatrix_from_json(j["frame"]);
  for (const auto& oj : j["outcomes"]) {
    ListMeasurement::Outcome out;
    out.label = oj["label"].get<std::vector<int>>();
    out.op = jio::cmatrix_from_json(oj["op"]);
    require(out.op.rows() == m.subspace_dim && out.op.cols() == m.subspace_dim,
            errc::invalid_input, "operator dimension does not match subspace_dim");
    m.outcomes.push_back(std::move(out));
  }
  return m;
}

inline ojson verification_to_json(const VerificationReport& r) {
  ojson j;
  j["complete"] = r.complete;
  j["positive"] = r.positive;
  j["zero_error"] = r.zero_error;
  j["max_list_size"] = r.max_list_size;
  ojson pm = ojson::array();
  for (double s : r.per_message_success) pm.push_back(jio::num(s));
  j["per_message_success"] = std::move(pm);
  j["fi_sum_check"] = r.fi_sum_check ? ojson(*r.fi_sum_check) : ojson(nullptr);
  j["completeness_residual"] = jio::num(r.completeness_residual);
  return j;
}

inline ojson parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_input(origin + ": " + e.what());
  }
}

inline ojson load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::invalid_input, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline void save_json_file(const std::string& path, const ojson& j) {
  std::ofstream out(path);
  require(out.good(), errc::invalid_input, "cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace cqzl
