#pragma once

// JSON (de)serialization for dilations and one-mode channels.  Matrices are
// stored as row-major flat arrays alongside their shape so records remain
// self-describing.

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "gausscap/channels.hpp"

namespace gausscap {

using json = nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::invalid_argument("matrix_from_json: shape/data mismatch");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
  }
  return m;
}

inline json to_json(const SymplecticDilation& w) {
  return json{{"n_system", w.n_system()},
              {"n_env", w.n_env()},
              {"S", matrix_to_json(w.matrix())},
              {"blocks",
               {{"M", matrix_to_json(w.M())},
                {"N", matrix_to_json(w.N())},
                {"O", matrix_to_json(w.O())},
                {"P", matrix_to_json(w.P())}}}};
}

inline SymplecticDilation dilation_from_json(const json& j) {
  return SymplecticDilation(matrix_from_json(j.at("S")), j.at("n_system").get<int>(),
                            j.at("n_env").get<int>());
}

inline json to_json(const TwoModeUnitary& u) {
  json j = to_json(u.dilation);
  j["q"] = u.q;
  j["kind"] = (u.kind == UnitaryKind::beam_splitter) ? "beam_splitter" : "two_mode_squeezer";
  return j;
}

inline TwoModeUnitary unitary_from_json(const json& j) {
  const auto kind_str = j.at("kind").get<std::string>();
  UnitaryKind kind;
  if (kind_str == "beam_splitter") {
    kind = UnitaryKind::beam_splitter;
  } else if (kind_str == "two_mode_squeezer") {
    kind = UnitaryKind::two_mode_squeezer;
  } else {
    throw std::invalid_argument("unitary_from_json: unknown kind '" + kind_str + "'");
  }
  return TwoModeUnitary{j.at("q").get<double>(), kind, dilation_from_json(j)};
}

inline json to_json(const OmgChannel& ch) {
  const OmgClassification cls = classify_omg(ch);
  json j{{"X", matrix_to_json(ch.X())},
         {"Y", matrix_to_json(ch.Y())},
         {"tau", ch.tau()},
         {"y", ch.y_noise()},
         {"K", ch.K()},
         {"class", to_string(cls.cls)}};
  if (cls.cls != OmgClass::unclassified) {
    j["kappa"] = cls.kappa;
    j["n0"] = cls.n0;
  }
  return j;
}

inline OmgChannel channel_from_json(const json& j) {
  return OmgChannel(matrix_from_json(j.at("X")), matrix_from_json(j.at("Y")));
}

}  // namespace gausscap
