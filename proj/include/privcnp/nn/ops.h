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

// Differentiable operations on tape variables.
//
// Convolutions work on single examples laid out as [channels, length].
// Weights of Conv1d are [out, in, K]; weights of ConvTranspose1d are
// [in, out, K], so one weight tensor serves a convolution and its adjoint.
// K must be odd. Both use symmetric zero padding p = (K - 1) / 2:
//
//   Conv1d          out_len = floor((L + 2p - K) / stride) + 1
//                           = L           for stride 1
//                           = ceil(L / 2) for stride 2
//   ConvTranspose1d is the exact adjoint of Conv1d with the same stride
//                   acting on inputs of length out_len. For stride 2 any
//                   out_len with ceil(out_len / 2) == L is valid, i.e.
//                   2L (default) or 2L - 1; for stride 1 out_len = L.

#ifndef PRIVCNP_NN_OPS_H_
#define PRIVCNP_NN_OPS_H_

#include <span>
#include <vector>

#include "privcnp/nn/tape.h"

namespace privcnp::nn {

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double factor);
Var AddScalar(Var a, double offset);
// a * s for a one-element s.
Var MulByScalar(Var a, Var s);
// Tensor of the given shape filled with the one-element s.
Var Fill(Var s, std::vector<std::size_t> shape);

// max(x, 0). The derivative at 0 is taken to be 0.
Var Relu(Var a);
Var Sigmoid(Var a);
Var Exp(Var a);
Var Log(Var a);
Var Sqrt(Var a);

// Concatenates along the leading axis; trailing shapes must agree.
Var Concat(std::span<const Var> parts);
// Rows [begin, end) of the leading axis.
Var Slice(Var a, std::size_t begin, std::size_t end);

Var Sum(Var a);
Var Mean(Var a);

// W x + b for x [in], W [out, in], b [out].
Var Dense(Var x, Var weights, Var bias);

Var Conv1d(Var x, Var weights, Var bias, int stride);
// out_len <= 0 selects the default (L for stride 1, 2L for stride 2).
Var ConvTranspose1d(Var x, Var weights, Var bias, int stride,
                    int out_len = 0);

// Output length of Conv1d for an input of length in_len.
int ConvOutputLength(int in_len, int kernel, int stride);

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_OPS_H_
