// Copyright 2026 The kgre Authors.
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

#include "kgre/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgre/error.h"

namespace kgre::ops {
namespace {

[[noreturn]] void Mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " +
                   ShapeToString(a.shape()) + " and " + ShapeToString(b.shape()));
}

void Axpy(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double DotN(const double* x, const double* y, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

Var Add(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.shape() != y.shape()) Mismatch("Add", x, y);
  Tensor out = x;
  out.AddScaled(y);
  return a.tape().Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) t.GradSlot(a).AddScaled(g);
    if (t.RequiresGrad(b)) t.GradSlot(b).AddScaled(g);
  });
}

Var Sub(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.shape() != y.shape()) Mismatch("Sub", x, y);
  Tensor out = x;
  out.AddScaled(y, -1.0);
  return a.tape().Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) t.GradSlot(a).AddScaled(g);
    if (t.RequiresGrad(b)) t.GradSlot(b).AddScaled(g, -1.0);
  });
}

Var Mul(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.shape() != y.shape()) Mismatch("Mul", x, y);
  Tensor out = x;
  for (size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return a.tape().Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& x = t.Value(a);
    const Tensor& y = t.Value(b);
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradSlot(a);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (t.RequiresGrad(b)) {
      Tensor& gb = t.GradSlot(b);
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
    }
  });
}

Var Scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return a.tape().Record(std::move(out), {a}, [a, factor](Tape& t, const Tensor& g) {
    t.GradSlot(a).AddScaled(g, factor);
  });
}

Var AddBias(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& bias = b.value();
  if (bias.rank() != 1 || bias.size() != x.cols()) Mismatch("AddBias", x, bias);
  Tensor out = x;
  const size_t n = x.rows(), d = x.cols();
  for (size_t i = 0; i < n; ++i) Axpy(1.0, bias.data(), out.data() + i * d, d);
  return a.tape().Record(std::move(out), {a, b}, [a, b, n, d](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) t.GradSlot(a).AddScaled(g);
    if (t.RequiresGrad(b)) {
      Tensor& gb = t.GradSlot(b);
      for (size_t i = 0; i < n; ++i) Axpy(1.0, g.data() + i * d, gb.data(), d);
    }
  });
}

Var MatMul(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() != 2 || y.rank() != 2 || x.cols() != y.rows()) Mismatch("MatMul", x, y);
  const size_t n = x.rows(), k = x.cols(), m = y.cols();
  Tensor out(Shape{n, m});
  for (size_t i = 0; i < n; ++i) {
    for (size_t p = 0; p < k; ++p) {
      Axpy(x.at(i, p), y.data() + p * m, out.data() + i * m, m);
    }
  }
  return a.tape().Record(std::move(out), {a, b}, [a, b, n, k, m](Tape& t, const Tensor& g) {
    const Tensor& x = t.Value(a);
    const Tensor& y = t.Value(b);
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradSlot(a);
      for (size_t i = 0; i < n; ++i) {
        for (size_t p = 0; p < k; ++p) {
          ga.at(i, p) += DotN(g.data() + i * m, y.data() + p * m, m);
        }
      }
    }
    if (t.RequiresGrad(b)) {
      Tensor& gb = t.GradSlot(b);
      for (size_t i = 0; i < n; ++i) {
        for (size_t p = 0; p < k; ++p) {
          Axpy(x.at(i, p), g.data() + i * m, gb.data() + p * m, m);
        }
      }
    }
  });
}

Var Linear(Var x, Var weight, Var bias) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  if (w.rank() != 2 || in.rank() > 2 || in.cols() != w.cols()) {
    Mismatch("Linear", in, w);
  }
  const size_t n = in.rows(), k = w.cols(), m = w.rows();
  if (bias.valid()) {
    const Tensor& b = bias.value();
    if (b.rank() != 1 || b.size() != m) Mismatch("Linear(bias)", w, b);
  }
  Tensor out(in.rank() <= 1 ? Shape{m} : Shape{n, m});
  for (size_t i = 0; i < n; ++i) {
    const double* xi = in.data() + i * k;
    double* yi = out.data() + i * m;
    for (size_t o = 0; o < m; ++o) yi[o] = DotN(xi, w.data() + o * k, k);
    if (bias.valid()) Axpy(1.0, bias.value().data(), yi, m);
  }
  Var inputs[3] = {x, weight, bias};
  return x.tape().Record(
      std::move(out), std::span<const Var>(inputs, bias.valid() ? 3 : 2),
      [x, weight, bias, n, k, m](Tape& t, const Tensor& g) {
        const Tensor& in = t.Value(x);
        const Tensor& w = t.Value(weight);
        if (t.RequiresGrad(x)) {
          Tensor& gx = t.GradSlot(x);
          for (size_t i = 0; i < n; ++i) {
            for (size_t o = 0; o < m; ++o) {
              Axpy(g[i * m + o], w.data() + o * k, gx.data() + i * k, k);
            }
          }
        }
        if (t.RequiresGrad(weight)) {
          Tensor& gw = t.GradSlot(weight);
          for (size_t i = 0; i < n; ++i) {
            for (size_t o = 0; o < m; ++o) {
              Axpy(g[i * m + o], in.data() + i * k, gw.data() + o * k, k);
            }
          }
        }
        if (bias.valid() && t.RequiresGrad(bias)) {
          Tensor& gb = t.GradSlot(bias);
          for (size_t i = 0; i < n; ++i) Axpy(1.0, g.data() + i * m, gb.data(), m);
        }
      });
}

Var Relu(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return a.tape().Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    const Tensor& x = t.Value(a);
    Tensor& ga = t.GradSlot(a);
    for (size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0.0) ga[i] += g[i];
    }
  });
}

Var Tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = std::tanh(v);
  Tensor y = out;
  return a.tape().Record(std::move(out), {a}, [a, y](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var RowNormalize(Var a) {
  const Tensor& x = a.value();
  const size_t n = x.rows(), d = x.cols();
  Tensor out = x;
  std::vector<double> sums(n);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += x.at(i, j);
    if (s == 0.0) throw Error("RowNormalize: row " + std::to_string(i) + " sums to zero");
    sums[i] = s;
    for (size_t j = 0; j < d; ++j) out.at(i, j) = x.at(i, j) / s;
  }
  Tensor y = out;
  return a.tape().Record(std::move(out), {a},
                         [a, y, sums, n, d](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    for (size_t i = 0; i < n; ++i) {
      const double inner = DotN(g.data() + i * d, y.data() + i * d, d);
      for (size_t j = 0; j < d; ++j) {
        ga[i * d + j] += (g[i * d + j] - inner) / sums[i];
      }
    }
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("ConcatCols: no operands");
  const Tensor& first = parts[0].value();
  const size_t n = first.rows();
  bool vector_out = true;
  size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    if (v.rank() > 2 || v.rows() != n) Mismatch("ConcatCols", first, v);
    if (v.rank() == 2) vector_out = false;
    total += v.cols();
  }
  Tensor out(vector_out ? Shape{total} : Shape{n, total});
  std::vector<size_t> offsets;
  size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    const size_t c = v.cols();
    for (size_t i = 0; i < n; ++i) {
      std::copy_n(v.data() + i * c, c, out.data() + i * total + off);
    }
    offsets.push_back(off);
    off += c;
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape().Record(
      std::move(out), inputs, [inputs, offsets, n, total](Tape& t, const Tensor& g) {
        for (size_t q = 0; q < inputs.size(); ++q) {
          if (!t.RequiresGrad(inputs[q])) continue;
          Tensor& gp = t.GradSlot(inputs[q]);
          const size_t c = gp.cols();
          for (size_t i = 0; i < n; ++i) {
            Axpy(1.0, g.data() + i * total + offsets[q], gp.data() + i * c, c);
          }
        }
      });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no operands");
  const Tensor& first = parts[0].value();
  const size_t d = first.cols();
  size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    if (v.rank() != 2 || v.cols() != d) Mismatch("ConcatRows", first, v);
    total += v.rows();
  }
  Tensor out(Shape{total, d});
  std::vector<size_t> offsets;
  size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    std::copy_n(v.data(), v.size(), out.data() + off * d);
    offsets.push_back(off);
    off += v.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape().Record(
      std::move(out), inputs, [inputs, offsets, d](Tape& t, const Tensor& g) {
        for (size_t q = 0; q < inputs.size(); ++q) {
          if (!t.RequiresGrad(inputs[q])) continue;
          Tensor& gp = t.GradSlot(inputs[q]);
          Axpy(1.0, g.data() + offsets[q] * d, gp.data(), gp.size());
        }
      });
}

Var GatherRows(Var a, std::span<const uint32_t> rows) {
  const Tensor& x = a.value();
  const size_t n = x.rows(), d = x.cols();
  Tensor out(Shape{rows.size(), d});
  for (size_t e = 0; e < rows.size(); ++e) {
    if (rows[e] >= n) {
      throw ShapeError("GatherRows: row " + std::to_string(rows[e]) +
                       " out of range for " + ShapeToString(x.shape()));
    }
    std::copy_n(x.data() + rows[e] * d, d, out.data() + e * d);
  }
  std::vector<uint32_t> index(rows.begin(), rows.end());
  return a.tape().Record(std::move(out), {a}, [a, index, d](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    for (size_t e = 0; e < index.size(); ++e) {
      Axpy(1.0, g.data() + e * d, ga.data() + index[e] * d, d);
    }
  });
}

Var SelectRow(Var a, size_t r) {
  const Tensor& x = a.value();
  if (r >= x.rows()) {
    throw ShapeError("SelectRow: row " + std::to_string(r) + " out of range for " +
                     ShapeToString(x.shape()));
  }
  const size_t d = x.cols();
  Tensor out = x.Row(r);
  return a.tape().Record(std::move(out), {a}, [a, r, d](Tape& t, const Tensor& g) {
    Axpy(1.0, g.data(), t.GradSlot(a).data() + r * d, d);
  });
}

Var ScatterAddRows(Var a, std::span<const uint32_t> index, size_t rows) {
  const Tensor& x = a.value();
  const size_t d = x.cols();
  if (index.size() != x.rows()) {
    throw ShapeError("ScatterAddRows: " + std::to_string(index.size()) +
                     " indices for " + ShapeToString(x.shape()));
  }
  Tensor out(Shape{rows, d});
  for (size_t e = 0; e < index.size(); ++e) {
    if (index[e] >= rows) throw ShapeError("ScatterAddRows: index out of range");
    Axpy(1.0, x.data() + e * d, out.data() + index[e] * d, d);
  }
  std::vector<uint32_t> idx(index.begin(), index.end());
  return a.tape().Record(std::move(out), {a}, [a, idx, d](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    for (size_t e = 0; e < idx.size(); ++e) {
      Axpy(1.0, g.data() + idx[e] * d, ga.data() + e * d, d);
    }
  });
}

Var Reshape(Var a, Shape shape) {
  Tensor out = a.value().Reshaped(std::move(shape));
  return a.tape().Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    Axpy(1.0, g.data(), ga.data(), ga.size());
  });
}

Var Sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape().Record(Tensor::Scalar(s), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradSlot(a);
    for (double& v : ga.values()) v += g[0];
  });
}

Var LogSumExpPool(Var a) {
  const Tensor& x = a.value();
  Tensor out = LogSumExpRows(x);
  Tensor y = out;
  const size_t n = x.rows(), d = x.cols();
  return a.tape().Record(std::move(out), {a}, [a, y, n, d](Tape& t, const Tensor& g) {
    const Tensor& x = t.Value(a);
    Tensor& ga = t.GradSlot(a);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < d; ++j) {
        ga[i * d + j] += g[j] * std::exp(x[i * d + j] - y[j]);
      }
    }
  });
}

Var PnaAggregate(Var messages, std::span<const uint32_t> destination, size_t nodes) {
  const Tensor& x = messages.value();
  const size_t e_count = x.rows(), d = x.cols();
  if (destination.size() != e_count) {
    throw ShapeError("PnaAggregate: " + std::to_string(destination.size()) +
                     " destinations for " + ShapeToString(x.shape()));
  }
  std::vector<uint32_t> count(nodes, 0);
  for (uint32_t v : destination) {
    if (v >= nodes) throw ShapeError("PnaAggregate: destination out of range");
    ++count[v];
  }
  const size_t w = 4 * d;
  Tensor out(Shape{nodes, w});
  // Column layout per node: [0,d) mean, [d,2d) max, [2d,3d) min, [3d,4d) std.
  std::vector<uint32_t> arg_max(nodes * d, UINT32_MAX), arg_min(nodes * d, UINT32_MAX);
  for (size_t e = 0; e < e_count; ++e) {
    const uint32_t v = destination[e];
    double* row = out.data() + v * w;
    const double* m = x.data() + e * d;
    for (size_t j = 0; j < d; ++j) {
      row[j] += m[j];
      uint32_t& amax = arg_max[v * d + j];
      if (amax == UINT32_MAX || m[j] > x[amax * d + j]) amax = static_cast<uint32_t>(e);
      uint32_t& amin = arg_min[v * d + j];
      if (amin == UINT32_MAX || m[j] < x[amin * d + j]) amin = static_cast<uint32_t>(e);
    }
  }
  for (size_t v = 0; v < nodes; ++v) {
    if (count[v] == 0) continue;
    double* row = out.data() + v * w;
    for (size_t j = 0; j < d; ++j) {
      row[j] /= count[v];
      row[d + j] = x[arg_max[v * d + j] * d + j];
      row[2 * d + j] = x[arg_min[v * d + j] * d + j];
    }
  }
  for (size_t e = 0; e < e_count; ++e) {
    const uint32_t v = destination[e];
    double* row = out.data() + v * w;
    const double* m = x.data() + e * d;
    for (size_t j = 0; j < d; ++j) {
      const double diff = m[j] - row[j];
      row[3 * d + j] += diff * diff;
    }
  }
  for (size_t v = 0; v < nodes; ++v) {
    if (count[v] == 0) continue;
    double* row = out.data() + v * w;
    for (size_t j = 0; j < d; ++j) row[3 * d + j] = std::sqrt(row[3 * d + j] / count[v]);
  }
  std::vector<uint32_t> dst(destination.begin(), destination.end());
  Tensor y = out;
  return messages.tape().Record(
      std::move(out), {messages},
      [messages, dst, count, arg_max, arg_min, y, d, w](Tape& t, const Tensor& g) {
        const Tensor& x = t.Value(messages);
        Tensor& gx = t.GradSlot(messages);
        for (size_t e = 0; e < dst.size(); ++e) {
          const uint32_t v = dst[e];
          const double inv = 1.0 / count[v];
          const double* gr = g.data() + v * w;
          const double* yr = y.data() + v * w;
          double* ge = gx.data() + e * d;
          const double* m = x.data() + e * d;
          for (size_t j = 0; j < d; ++j) {
            double acc = gr[j] * inv;
            if (arg_max[v * d + j] == e) acc += gr[d + j];
            if (arg_min[v * d + j] == e) acc += gr[2 * d + j];
            const double sd = yr[3 * d + j];
            // d std / d x_e is undefined at std = 0; the zero subgradient keeps
            // singleton groups finite.
            if (sd > 0.0) acc += gr[3 * d + j] * (m[j] - yr[j]) * inv / sd;
            ge[j] += acc;
          }
        }
      });
}

Var GroupedBilinear(Var s, Var o, Var weight, size_t block_size) {
  const Tensor& sv = s.value();
  const Tensor& ov = o.value();
  const Tensor& wv = weight.value();
  const size_t d = sv.size();
  if (sv.rank() != 1 || ov.rank() != 1 || ov.size() != d) Mismatch("GroupedBilinear", sv, ov);
  if (block_size == 0 || d % block_size != 0) {
    throw ShapeError("GroupedBilinear: block size " + std::to_string(block_size) +
                     " does not divide width " + std::to_string(d));
  }
  const size_t k = block_size, nb = d / k;
  if (wv.rank() != 4 || wv.shape()[0] != nb || wv.shape()[2] != k || wv.shape()[3] != k) {
    Mismatch("GroupedBilinear(weight)", sv, wv);
  }
  const size_t r_count = wv.shape()[1];
  Tensor out(Shape{r_count});
  for (size_t b = 0; b < nb; ++b) {
    const double* sb = sv.data() + b * k;
    const double* ob = ov.data() + b * k;
    for (size_t r = 0; r < r_count; ++r) {
      const double* wbr = wv.data() + (b * r_count + r) * k * k;
      double acc = 0.0;
      for (size_t i = 0; i < k; ++i) acc += sb[i] * DotN(wbr + i * k, ob, k);
      out[r] += acc;
    }
  }
  return s.tape().Record(
      std::move(out), {s, o, weight},
      [s, o, weight, k, nb, r_count](Tape& t, const Tensor& g) {
        const Tensor& sv = t.Value(s);
        const Tensor& ov = t.Value(o);
        const Tensor& wv = t.Value(weight);
        Tensor* gs = t.RequiresGrad(s) ? &t.GradSlot(s) : nullptr;
        Tensor* go = t.RequiresGrad(o) ? &t.GradSlot(o) : nullptr;
        Tensor* gw = t.RequiresGrad(weight) ? &t.GradSlot(weight) : nullptr;
        for (size_t b = 0; b < nb; ++b) {
          const double* sb = sv.data() + b * k;
          const double* ob = ov.data() + b * k;
          for (size_t r = 0; r < r_count; ++r) {
            const double gr = g[r];
            if (gr == 0.0) continue;
            const size_t base = (b * r_count + r) * k * k;
            const double* wbr = wv.data() + base;
            for (size_t i = 0; i < k; ++i) {
              if (gs) (*gs)[b * k + i] += gr * DotN(wbr + i * k, ob, k);
              if (go) Axpy(gr * sb[i], wbr + i * k, go->data() + b * k, k);
              if (gw) Axpy(gr * sb[i], ob, gw->data() + base + i * k, k);
            }
          }
        }
      });
}

}  // namespace kgre::ops
