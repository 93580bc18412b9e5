#ifndef QFDIV_MATRIX_IO_HPP
#define QFDIV_MATRIX_IO_HPP

// JSON matrix files: {"dim": n, "dims": [...] optional, "re": [...], "im": [...]},
// entries row-major. Channels: {"d_in", "d_out", "kraus": [{"re", "im"}, ...]}.

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "qfdiv/bipartite.hpp"
#include "qfdiv/channels.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/linalg.hpp"

namespace qfdiv {

namespace detail {

inline Operator matrix_from_arrays(const nlohmann::json& j, Index rows, Index cols, const std::string& where) {
  if (!j.contains("re") || !j.contains("im") || !j["re"].is_array() || !j["im"].is_array()) {
    throw DomainError(where + ": shape: missing \"re\"/\"im\" arrays");
  }
  const auto& re = j["re"];
  const auto& im = j["im"];
  const auto n = static_cast<std::size_t>(rows * cols);
  if (re.size() != n || im.size() != n) {
    throw DomainError(where + ": shape: \"re\" and \"im\" must hold " + std::to_string(n) + " entries");
  }
  Operator m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(r * cols + c);
      if (!re[k].is_number() || !im[k].is_number()) throw DomainError(where + ": non-numeric entry");
      m(r, c) = Complex(re[k].get<double>(), im[k].get<double>());
    }
  }
  return m;
}

inline void arrays_from_matrix(const Operator& m, nlohmann::json& j) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  j["re"] = re;
  j["im"] = im;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(path + ": parse failure: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError(path + ": cannot write file");
  out << j.dump(2) << '\n';
}

}  // namespace detail

/// Parsed matrix file: a bare operator, or a state when "dims" is present.
struct MatrixFile {
  Operator matrix;
  std::vector<Index> dims;

  bool has_dims() const { return !dims.empty(); }
};

inline MatrixFile parse_matrix_json(const nlohmann::json& j, const std::string& where = "matrix") {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer()) {
    throw DomainError(where + ": shape: missing integer \"dim\"");
  }
  const auto dim = j["dim"].get<long long>();
  if (dim < 1) throw DomainError(where + ": shape: \"dim\" must be positive");
  MatrixFile out;
  out.matrix = detail::matrix_from_arrays(j, dim, dim, where);
  if (j.contains("dims")) {
    if (!j["dims"].is_array()) throw DomainError(where + ": shape: \"dims\" must be an array");
    for (const auto& d : j["dims"]) {
      if (!d.is_number_integer()) throw DomainError(where + ": shape: \"dims\" entries must be integers");
      out.dims.push_back(d.get<Index>());
    }
  }
  return out;
}

inline MatrixFile read_matrix_file(const std::string& path) {
  return parse_matrix_json(detail::read_json_file(path), path);
}

/// Hermitian PSD operator with trace <= 1; the failing invariant is named.
inline Operator read_density_file(const std::string& path) {
  auto mf = read_matrix_file(path);
  require_density(mf.matrix, path);
  return mf.matrix;
}

/// Normalized state with its factor dimensions; "dims" is required.
inline BipartiteState read_state_file(const std::string& path) {
  auto mf = read_matrix_file(path);
  if (!mf.has_dims()) throw DomainError(path + ": shape: state file needs \"dims\"");
  return BipartiteState(std::move(mf.matrix), std::move(mf.dims));
}

inline nlohmann::json matrix_to_json(const Operator& m, const std::vector<Index>& dims = {}) {
  nlohmann::json j;
  j["dim"] = m.rows();
  if (!dims.empty()) j["dims"] = dims;
  detail::arrays_from_matrix(m, j);
  return j;
}

inline nlohmann::json channel_to_json(const KrausChannel& phi) {
  nlohmann::json j;
  j["d_in"] = phi.d_in;
  j["d_out"] = phi.d_out;
  j["kraus"] = nlohmann::json::array();
  for (const auto& k : phi.kraus_ops) {
    nlohmann::json kj;
    detail::arrays_from_matrix(k, kj);
    j["kraus"].push_back(kj);
  }
  return j;
}

inline KrausChannel parse_channel_json(const nlohmann::json& j, const std::string& where = "channel") {
  if (!j.is_object() || !j.contains("d_in") || !j.contains("d_out") || !j.contains("kraus") ||
      !j["kraus"].is_array()) {
    throw DomainError(where + ": shape: channel needs \"d_in\", \"d_out\", \"kraus\"");
  }
  const auto d_in = j["d_in"].get<Index>();
  const auto d_out = j["d_out"].get<Index>();
  std::vector<Operator> ops;
  for (const auto& k : j["kraus"]) ops.push_back(detail::matrix_from_arrays(k, d_out, d_in, where));
  KrausChannel phi(std::move(ops), d_in, d_out);
  if (!validate_tpcp(phi)) throw DomainError(where + ": trace preservation: sum K^dag K != identity");
  return phi;
}

inline void write_matrix_file(const std::string& path, const Operator& m, const std::vector<Index>& dims = {}) {
  detail::write_json_file(path, matrix_to_json(m, dims));
}

inline void write_channel_file(const std::string& path, const KrausChannel& phi) {
  detail::write_json_file(path, channel_to_json(phi));
}

}  // namespace qfdiv

#endif  // QFDIV_MATRIX_IO_HPP
