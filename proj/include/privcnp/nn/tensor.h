//
// Copyright 2026 The privcnp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVCNP_NN_TENSOR_H_
#define PRIVCNP_NN_TENSOR_H_

#include <cstddef>
#include <string>
#include <vector>

namespace privcnp::nn {

// Dense row-major array of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape_in, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> values_in);

  static Tensor Scalar(double v) { return Tensor({1}, std::vector<double>{v}); }
  static Tensor Vector(std::vector<double> v);

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  bool SameShape(const Tensor& other) const { return shape == other.shape; }
  std::string ShapeString() const;
};

std::size_t ShapeSize(const std::vector<std::size_t>& shape);

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_TENSOR_H_
