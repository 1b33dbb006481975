// Copyright 2026 The inhand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INHAND_NN_PARAMS_HPP_
#define INHAND_NN_PARAMS_HPP_

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "inhand/nn/graph.hpp"
#include "inhand/rng.hpp"

namespace inhand::nn {

// Named, ordered parameter store. Order is the slot index used by the
// tape, the Adam state, and the checkpoint file, so it must stay stable
// for a given model.
class Params {
 public:
  int add(const std::string& name, Mat value) {
    names_.push_back(name);
    values_.push_back(std::move(value));
    return static_cast<int>(values_.size()) - 1;
  }

  int index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("params: unknown name " + name);
  }

  int size() const { return static_cast<int>(values_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  Mat& operator[](int i) { return values_.at(i); }
  const Mat& operator[](int i) const { return values_.at(i); }

  std::vector<Mat> zero_grads() const {
    std::vector<Mat> g(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      g[i].setZero(values_[i].rows(), values_[i].cols());
    return g;
  }

  // Flat JSON checkpoint: header with a format tag + per-tensor shape and
  // row-major data. nlohmann emits shortest round-trip doubles, so a
  // save/load cycle is lossless and byte-stable.
  nlohmann::json to_json(uint64_t seed = 0) const {
    nlohmann::json j;
    j["format"] = "inhand-params";
    j["version"] = 1;
    j["seed"] = seed;
    auto& tensors = j["tensors"] = nlohmann::json::array();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      nlohmann::json t;
      t["name"] = names_[i];
      t["rows"] = values_[i].rows();
      t["cols"] = values_[i].cols();
      std::vector<double> data(values_[i].size());
      for (Eigen::Index r = 0; r < values_[i].rows(); ++r)
        for (Eigen::Index c = 0; c < values_[i].cols(); ++c)
          data[r * values_[i].cols() + c] = values_[i](r, c);
      t["data"] = data;
      tensors.push_back(std::move(t));
    }
    return j;
  }

  void save(const std::string& path, uint64_t seed = 0) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("params save: cannot open " + path);
    out << to_json(seed).dump() << "\n";
  }

  // Loads values into the existing layout; names and shapes must match.
  void from_json(const nlohmann::json& j) {
    if (j.value("format", "") != std::string("inhand-params"))
      throw std::runtime_error("params load: unrecognized format tag");
    const auto& tensors = j.at("tensors");
    if (tensors.size() != values_.size())
      throw std::runtime_error("params load: tensor count mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const auto& t = tensors[i];
      if (t.at("name").get<std::string>() != names_[i])
        throw std::runtime_error("params load: name mismatch at slot " +
                                 std::to_string(i));
      const Eigen::Index rows = t.at("rows").get<Eigen::Index>();
      const Eigen::Index cols = t.at("cols").get<Eigen::Index>();
      if (rows != values_[i].rows() || cols != values_[i].cols())
        throw std::runtime_error("params load: shape mismatch for " + names_[i]);
      const auto data = t.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::runtime_error("params load: data size mismatch for " + names_[i]);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          values_[i](r, c) = data[r * cols + c];
    }
  }

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("params load: cannot open " + path);
    nlohmann::json j;
    in >> j;
    from_json(j);
  }

 private:
  std::vector<std::string> names_;
  std::vector<Mat> values_;
};

// Orthogonal-ish init: Gaussian fill, QR, sign-fixed, scaled by gain.
inline Mat orthogonal_init(int rows, int cols, double gain, Rng& rng) {
  const bool tall = rows >= cols;
  Mat a(tall ? rows : cols, tall ? cols : rows);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.cols());
  const Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < q.cols(); ++c)
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  Mat w = tall ? q : Mat(q.transpose());
  return w * gain;
}

}  // namespace inhand::nn

#endif  // INHAND_NN_PARAMS_HPP_
