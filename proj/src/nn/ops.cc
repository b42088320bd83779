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

#include "privcnp/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "privcnp/errors.h"

namespace privcnp::nn {
namespace {

void RequireSameShape(Var a, Var b, const char* op) {
  if (!a.value().SameShape(b.value())) {
    throw DomainError(std::string(op) + ": shape mismatch " +
                      a.value().ShapeString() + " vs " +
                      b.value().ShapeString());
  }
}

void RequireSameTape(Var a, Var b) {
  if (a.tape != b.tape) throw DomainError("variables live on different tapes");
}

// Elementwise unary op given f(x) and f'(x) expressed through x and y=f(x).
template <typename F, typename D>
Var Unary(Var a, F f, D df) {
  const Tensor& x = a.value();
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const std::size_t ia = a.id;
  return a.tape->Push(std::move(y), {ia}, [ia, df](Tape& t, std::size_t self) {
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  });
}

struct ConvGeometry {
  int in_channels;
  int out_channels;
  int kernel;
  int pad;
  int stride;
  int long_len;   // length on the dense side
  int short_len;  // length on the strided side
};

// Index range of strided positions i with 0 <= stride * i + off < long_len,
// clipped to [0, short_len).
inline void ValidRange(const ConvGeometry& g, int off, int* lo, int* hi) {
  *lo = off >= 0 ? 0 : (-off + g.stride - 1) / g.stride;
  const int top = g.long_len - 1 - off;
  *hi = top < 0 ? -1 : std::min(top / g.stride, g.short_len - 1);
}

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// cols[c K + k][i] = x[c][s i + k - p], zero outside the input.
RowMatrix Im2Col(const ConvGeometry& g, const double* x) {
  RowMatrix cols =
      RowMatrix::Zero(static_cast<Eigen::Index>(g.in_channels) * g.kernel,
                      g.short_len);
  for (int c = 0; c < g.in_channels; ++c) {
    const double* xc = x + static_cast<std::size_t>(c) * g.long_len;
    for (int k = 0; k < g.kernel; ++k) {
      const int off = k - g.pad;
      int lo = 0;
      int hi = 0;
      ValidRange(g, off, &lo, &hi);
      double* row = cols.row(static_cast<Eigen::Index>(c) * g.kernel + k).data();
      for (int i = lo; i <= hi; ++i) row[i] = xc[g.stride * i + off];
    }
  }
  return cols;
}

// Scatter-adds the rows of cols back onto x; the adjoint of Im2Col.
void Col2Im(const ConvGeometry& g, const RowMatrix& cols, double* x) {
  for (int c = 0; c < g.in_channels; ++c) {
    double* xc = x + static_cast<std::size_t>(c) * g.long_len;
    for (int k = 0; k < g.kernel; ++k) {
      const int off = k - g.pad;
      int lo = 0;
      int hi = 0;
      ValidRange(g, off, &lo, &hi);
      const double* row =
          cols.row(static_cast<Eigen::Index>(c) * g.kernel + k).data();
      for (int i = lo; i <= hi; ++i) xc[g.stride * i + off] += row[i];
    }
  }
}

Eigen::Map<const RowMatrix> WeightMap(const ConvGeometry& g, const double* w) {
  return {w, g.out_channels,
          static_cast<Eigen::Index>(g.in_channels) * g.kernel};
}

// y[o][i] += sum_c sum_k w[o][c][k] x[c][s i + k - p]   (w indexed [o][c][k])
void CorrelateForward(const ConvGeometry& g, const double* w, const double* x,
                      double* y) {
  Eigen::Map<RowMatrix> out(y, g.out_channels, g.short_len);
  out.noalias() += WeightMap(g, w) * Im2Col(g, x);
}

// Adjoint of CorrelateForward with respect to x:
// dx[c][s i + k - p] += w[o][c][k] dy[o][i], and the weight gradient
// dw[o][c][k] += sum_i dy[o][i] x[c][s i + k - p].
void CorrelateBackward(const ConvGeometry& g, const double* w,
                       const double* x, const double* dy, double* dw,
                       double* dx) {
  const Eigen::Map<const RowMatrix> grad(dy, g.out_channels, g.short_len);
  if (dw != nullptr) {
    Eigen::Map<RowMatrix> gw(dw, g.out_channels,
                             static_cast<Eigen::Index>(g.in_channels) * g.kernel);
    gw.noalias() += grad * Im2Col(g, x).transpose();
  }
  if (dx != nullptr) {
    const RowMatrix cols = WeightMap(g, w).transpose() * grad;
    Col2Im(g, cols, dx);
  }
}

}  // namespace

Var Add(Var a, Var b) {
  RequireSameTape(a, b);
  RequireSameShape(a, b, "Add");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  const std::size_t ia = a.id;
  const std::size_t ib = b.id;
  return a.tape->Push(std::move(y), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad(s);
    for (std::size_t id : {ia, ib}) {
      if (!t.needs_grad(id)) continue;
      Tensor& gx = t.grad(id);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
  });
}

Var Sub(Var a, Var b) { return Add(a, Scale(b, -1.0)); }

Var Mul(Var a, Var b) {
  RequireSameTape(a, b);
  RequireSameShape(a, b, "Mul");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const std::size_t ia = a.id;
  const std::size_t ib = b.id;
  return a.tape->Push(std::move(y), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad(s);
    if (t.needs_grad(ia)) {
      const Tensor& bv = t.value(ib);
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.needs_grad(ib)) {
      const Tensor& av = t.value(ia);
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var Scale(Var a, double factor) {
  return Unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var AddScalar(Var a, double offset) {
  return Unary(
      a, [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Var MulByScalar(Var a, Var s) {
  RequireSameTape(a, s);
  if (s.value().size() != 1) throw DomainError("MulByScalar needs a scalar");
  const double sv = s.scalar();
  Tensor y = a.value();
  for (double& v : y.values) v *= sv;
  const std::size_t ia = a.id;
  const std::size_t is = s.id;
  return a.tape->Push(std::move(y), {ia, is}, [ia, is](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      const double sv = t.value(is)[0];
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * sv;
    }
    if (t.needs_grad(is)) {
      const Tensor& av = t.value(ia);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
      t.grad(is)[0] += acc;
    }
  });
}

Var Fill(Var s, std::vector<std::size_t> shape) {
  if (s.value().size() != 1) throw DomainError("Fill needs a scalar");
  Tensor y(std::move(shape), s.scalar());
  const std::size_t is = s.id;
  return s.tape->Push(std::move(y), {is}, [is](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    double acc = 0.0;
    for (double v : g.values) acc += v;
    t.grad(is)[0] += acc;
  });
}

Var Relu(Var a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Sigmoid(Var a) {
  return Unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Exp(Var a) {
  return Unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var Log(Var a) {
  return Unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var Sqrt(Var a) {
  return Unary(
      a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Var Concat(std::span<const Var> parts) {
  if (parts.empty()) throw DomainError("Concat of nothing");
  Tape* tape = parts[0].tape;
  std::vector<std::size_t> shape = parts[0].value().shape;
  if (shape.empty()) throw DomainError("Concat needs rank >= 1");
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  std::vector<double> values;
  for (const Var& p : parts) {
    RequireSameTape(parts[0], p);
    const Tensor& v = p.value();
    if (v.rank() != shape.size() ||
        !std::equal(v.shape.begin() + 1, v.shape.end(), shape.begin() + 1)) {
      throw DomainError("Concat: trailing shapes differ");
    }
    rows += v.shape[0];
    ids.push_back(p.id);
    offsets.push_back(values.size());
    values.insert(values.end(), v.values.begin(), v.values.end());
  }
  shape[0] = rows;
  return tape->Push(Tensor(std::move(shape), std::move(values)), ids,
                    [ids, offsets](Tape& t, std::size_t self) {
                      const Tensor& g = t.grad(self);
                      for (std::size_t k = 0; k < ids.size(); ++k) {
                        if (!t.needs_grad(ids[k])) continue;
                        Tensor& gp = t.grad(ids[k]);
                        for (std::size_t i = 0; i < gp.size(); ++i) {
                          gp[i] += g[offsets[k] + i];
                        }
                      }
                    });
}

Var Slice(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = a.value();
  if (x.rank() == 0 || begin > end || end > x.shape[0]) {
    throw DomainError("Slice out of range");
  }
  const std::size_t row = x.size() / x.shape[0];
  std::vector<std::size_t> shape = x.shape;
  shape[0] = end - begin;
  Tensor y(shape, std::vector<double>(x.values.begin() + begin * row,
                                      x.values.begin() + end * row));
  const std::size_t ia = a.id;
  const std::size_t offset = begin * row;
  return a.tape->Push(std::move(y), {ia}, [ia, offset](Tape& t, std::size_t s) {
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
  });
}

Var Sum(Var a) {
  double acc = 0.0;
  for (double v : a.value().values) acc += v;
  const std::size_t ia = a.id;
  return a.tape->Push(Tensor::Scalar(acc), {ia}, [ia](Tape& t, std::size_t s) {
    const double g = t.grad(s)[0];
    Tensor& ga = t.grad(ia);
    for (double& v : ga.values) v += g;
  });
}

Var Mean(Var a) {
  const auto n = static_cast<double>(a.value().size());
  if (n == 0.0) throw DomainError("Mean of an empty tensor");
  return Scale(Sum(a), 1.0 / n);
}

Var Dense(Var x, Var weights, Var bias) {
  const Tensor& xv = x.value();
  const Tensor& w = weights.value();
  const Tensor& b = bias.value();
  if (xv.rank() != 1 || w.rank() != 2 || b.rank() != 1 ||
      w.shape[1] != xv.shape[0] || w.shape[0] != b.shape[0]) {
    throw DomainError("Dense: incompatible shapes x" + xv.ShapeString() +
                      " W" + w.ShapeString() + " b" + b.ShapeString());
  }
  const std::size_t out = w.shape[0];
  const std::size_t in = w.shape[1];
  Tensor y = b;
  for (std::size_t o = 0; o < out; ++o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * xv[i];
    y[o] += acc;
  }
  const std::size_t ix = x.id;
  const std::size_t iw = weights.id;
  const std::size_t ib = bias.id;
  return x.tape->Push(
      std::move(y), {ix, iw, ib}, [ix, iw, ib, out, in](Tape& t, std::size_t s) {
        const Tensor& g = t.grad(s);
        const Tensor& xv = t.value(ix);
        const Tensor& w = t.value(iw);
        if (t.needs_grad(ib)) {
          Tensor& gb = t.grad(ib);
          for (std::size_t o = 0; o < out; ++o) gb[o] += g[o];
        }
        if (t.needs_grad(iw)) {
          Tensor& gw = t.grad(iw);
          for (std::size_t o = 0; o < out; ++o) {
            for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += g[o] * xv[i];
          }
        }
        if (t.needs_grad(ix)) {
          Tensor& gx = t.grad(ix);
          for (std::size_t o = 0; o < out; ++o) {
            for (std::size_t i = 0; i < in; ++i) gx[i] += g[o] * w[o * in + i];
          }
        }
      });
}

int ConvOutputLength(int in_len, int kernel, int stride) {
  const int pad = (kernel - 1) / 2;
  return (in_len + 2 * pad - kernel) / stride + 1;
}

Var Conv1d(Var x, Var weights, Var bias, int stride) {
  const Tensor& xv = x.value();
  const Tensor& w = weights.value();
  const Tensor& b = bias.value();
  if (xv.rank() != 2 || w.rank() != 3 || b.rank() != 1 ||
      w.shape[1] != xv.shape[0] || w.shape[0] != b.shape[0]) {
    throw DomainError("Conv1d: incompatible shapes x" + xv.ShapeString() +
                      " W" + w.ShapeString() + " b" + b.ShapeString());
  }
  if (w.shape[2] % 2 == 0) throw DomainError("Conv1d: kernel size must be odd");
  if (stride < 1) throw DomainError("Conv1d: stride must be positive");
  ConvGeometry g{.in_channels = static_cast<int>(w.shape[1]),
                 .out_channels = static_cast<int>(w.shape[0]),
                 .kernel = static_cast<int>(w.shape[2]),
                 .pad = static_cast<int>(w.shape[2] - 1) / 2,
                 .stride = stride,
                 .long_len = static_cast<int>(xv.shape[1]),
                 .short_len = 0};
  g.short_len = ConvOutputLength(g.long_len, g.kernel, stride);
  Tensor y({static_cast<std::size_t>(g.out_channels),
            static_cast<std::size_t>(g.short_len)});
  for (int o = 0; o < g.out_channels; ++o) {
    std::fill_n(y.data() + static_cast<std::size_t>(o) * g.short_len,
                g.short_len, b[o]);
  }
  CorrelateForward(g, w.data(), xv.data(), y.data());
  const std::size_t ix = x.id;
  const std::size_t iw = weights.id;
  const std::size_t ib = bias.id;
  return x.tape->Push(std::move(y), {ix, iw, ib},
                      [g, ix, iw, ib](Tape& t, std::size_t s) {
                        const Tensor& dy = t.grad(s);
                        if (t.needs_grad(ib)) {
                          Tensor& gb = t.grad(ib);
                          for (int o = 0; o < g.out_channels; ++o) {
                            double acc = 0.0;
                            for (int i = 0; i < g.short_len; ++i) {
                              acc += dy[static_cast<std::size_t>(o) * g.short_len + i];
                            }
                            gb[o] += acc;
                          }
                        }
                        double* dw = t.needs_grad(iw) ? t.grad(iw).data() : nullptr;
                        double* dx = t.needs_grad(ix) ? t.grad(ix).data() : nullptr;
                        if (dw == nullptr && dx == nullptr) return;
                        CorrelateBackward(g, t.value(iw).data(),
                                          t.value(ix).data(), dy.data(), dw, dx);
                      });
}

Var ConvTranspose1d(Var x, Var weights, Var bias, int stride, int out_len) {
  const Tensor& xv = x.value();
  const Tensor& w = weights.value();
  const Tensor& b = bias.value();
  if (xv.rank() != 2 || w.rank() != 3 || b.rank() != 1 ||
      w.shape[0] != xv.shape[0] || w.shape[1] != b.shape[0]) {
    throw DomainError("ConvTranspose1d: incompatible shapes x" +
                      xv.ShapeString() + " W" + w.ShapeString() + " b" +
                      b.ShapeString());
  }
  if (w.shape[2] % 2 == 0) {
    throw DomainError("ConvTranspose1d: kernel size must be odd");
  }
  if (stride < 1) throw DomainError("ConvTranspose1d: stride must be positive");
  const int in_len = static_cast<int>(xv.shape[1]);
  const int kernel = static_cast<int>(w.shape[2]);
  if (out_len <= 0) out_len = stride * in_len;
  if (ConvOutputLength(out_len, kernel, stride) != in_len) {
    throw DomainError("ConvTranspose1d: output length " +
                      std::to_string(out_len) +
                      " is not compatible with input length " +
                      std::to_string(in_len));
  }
  // Geometry of the forward convolution this op is the adjoint of: it maps
  // out_channels x out_len to in_channels x in_len with weights [in][out][K].
  ConvGeometry g{.in_channels = static_cast<int>(w.shape[1]),
                 .out_channels = static_cast<int>(w.shape[0]),
                 .kernel = kernel,
                 .pad = (kernel - 1) / 2,
                 .stride = stride,
                 .long_len = out_len,
                 .short_len = in_len};
  Tensor y({static_cast<std::size_t>(g.in_channels),
            static_cast<std::size_t>(out_len)});
  for (int o = 0; o < g.in_channels; ++o) {
    std::fill_n(y.data() + static_cast<std::size_t>(o) * out_len, out_len, b[o]);
  }
  CorrelateBackward(g, w.data(), /*x=*/nullptr, xv.data(), /*dw=*/nullptr,
                    y.data());
  const std::size_t ix = x.id;
  const std::size_t iw = weights.id;
  const std::size_t ib = bias.id;
  return x.tape->Push(
      std::move(y), {ix, iw, ib}, [g, ix, iw, ib](Tape& t, std::size_t s) {
        const Tensor& dy = t.grad(s);
        if (t.needs_grad(ib)) {
          Tensor& gb = t.grad(ib);
          for (int o = 0; o < g.in_channels; ++o) {
            double acc = 0.0;
            for (int j = 0; j < g.long_len; ++j) {
              acc += dy[static_cast<std::size_t>(o) * g.long_len + j];
            }
            gb[o] += acc;
          }
        }
        if (t.needs_grad(ix)) {
          // d/dx of the adjoint is the forward correlation applied to dy.
          CorrelateForward(g, t.value(iw).data(), dy.data(),
                           t.grad(ix).data());
        }
        if (t.needs_grad(iw)) {
          // dW[c][o][k] += sum_i x[c][i] dy[o][s i + k - p]; this is the
          // weight gradient of the forward correlation with roles swapped.
          CorrelateBackward(g, /*w=*/nullptr, dy.data(), t.value(ix).data(),
                            t.grad(iw).data(), /*dx=*/nullptr);
        }
      });
}

}  // namespace privcnp::nn
