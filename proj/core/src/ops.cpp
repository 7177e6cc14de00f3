#include "noiselab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace noiselab {
namespace {

std::string pair_str(const Tensor& a, const Tensor& b) {
  return a.shape().to_string() + " and " + b.shape().to_string();
}

void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw ShapeError(op, "undefined operand");
}

template <typename Fn, typename Deriv>
Tensor unary(const char* op, const Tensor& a, Fn fn, Deriv deriv) {
  require_defined(op, a);
  std::vector<Scalar> out(a.size());
  auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  return Tensor::make_op(op, a.shape(), std::move(out), {a},
                         [deriv](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           if (!x.requires_grad) return;
                           for (std::size_t i = 0; i < self.grad.size(); ++i) {
                             x.grad[i] +=
                                 self.grad[i] * deriv(x.value[i], self.value[i]);
                           }
                         });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.cols() != b.rows()) throw ShapeError("matmul", pair_str(a, b));
  const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
  std::vector<Scalar> out(m * p, Scalar{0});
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    Scalar* row = out.data() + i * p;
    for (std::size_t k = 0; k < n; ++k) {
      const Scalar aik = av[i * n + k];
      if (aik == Scalar{0}) continue;
      const Scalar* brow = bv.data() + k * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += aik * brow[j];
    }
  }
  return Tensor::make_op(
      "matmul", {m, p}, std::move(out), {a, b}, [m, n, p](detail::Node& self) {
        detail::Node& x = *self.inputs[0];
        detail::Node& y = *self.inputs[1];
        const Scalar* g = self.grad.data();
        if (x.requires_grad) {
          // dA = dC * B^T
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
              const Scalar* brow = y.value.data() + k * p;
              const Scalar* grow = g + i * p;
              Scalar acc = 0;
              for (std::size_t j = 0; j < p; ++j) acc += grow[j] * brow[j];
              x.grad[i * n + k] += acc;
            }
          }
        }
        if (y.requires_grad) {
          // dB = A^T * dC
          for (std::size_t i = 0; i < m; ++i) {
            const Scalar* grow = g + i * p;
            for (std::size_t k = 0; k < n; ++k) {
              const Scalar aik = x.value[i * n + k];
              if (aik == Scalar{0}) continue;
              Scalar* yrow = y.grad.data() + k * p;
              for (std::size_t j = 0; j < p; ++j) yrow[j] += aik * grow[j];
            }
          }
        }
      });
}

namespace {

// Shared implementation of add/sub with optional row broadcast of b.
Tensor add_impl(const char* op, const Tensor& a, const Tensor& b, Scalar sign) {
  require_defined(op, a);
  require_defined(op, b);
  const bool broadcast = !(a.shape() == b.shape());
  if (broadcast && !(b.rows() == 1 && b.cols() == a.cols())) {
    throw ShapeError(op, pair_str(a, b));
  }
  const std::size_t cols = a.cols();
  std::vector<Scalar> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += sign * bv[broadcast ? i % cols : i];
  }
  return Tensor::make_op(op, a.shape(), std::move(out), {a, b},
                         [broadcast, cols, sign](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           detail::Node& y = *self.inputs[1];
                           if (x.requires_grad) {
                             for (std::size_t i = 0; i < self.grad.size(); ++i) {
                               x.grad[i] += self.grad[i];
                             }
                           }
                           if (y.requires_grad) {
                             for (std::size_t i = 0; i < self.grad.size(); ++i) {
                               y.grad[broadcast ? i % cols : i] +=
                                   sign * self.grad[i];
                             }
                           }
                         });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return add_impl("add", a, b, Scalar{1});
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return add_impl("sub", a, b, Scalar{-1});
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_defined("mul", a);
  require_defined("mul", b);
  if (!(a.shape() == b.shape())) throw ShapeError("mul", pair_str(a, b));
  std::vector<Scalar> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_op("mul", a.shape(), std::move(out), {a, b},
                         [](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           detail::Node& y = *self.inputs[1];
                           for (std::size_t i = 0; i < self.grad.size(); ++i) {
                             if (x.requires_grad) x.grad[i] += self.grad[i] * y.value[i];
                             if (y.requires_grad) y.grad[i] += self.grad[i] * x.value[i];
                           }
                         });
}

Tensor scale(const Tensor& a, Scalar factor) {
  return unary(
      "scale", a, [factor](Scalar x) { return factor * x; },
      [factor](Scalar, Scalar) { return factor; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      "sigmoid", a,
      [](Scalar x) {
        if (x >= 0) return Scalar{1} / (Scalar{1} + std::exp(-x));
        const Scalar e = std::exp(x);
        return e / (Scalar{1} + e);
      },
      [](Scalar, Scalar y) { return y * (Scalar{1} - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](Scalar x) { return std::tanh(x); },
      [](Scalar, Scalar y) { return Scalar{1} - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](Scalar x) { return x > 0 ? x : Scalar{0}; },
      [](Scalar x, Scalar) { return x > 0 ? Scalar{1} : Scalar{0}; });
}

Tensor abs(const Tensor& a) {
  return unary(
      "abs", a, [](Scalar x) { return std::abs(x); },
      [](Scalar x, Scalar) {
        return x > 0 ? Scalar{1} : (x < 0 ? Scalar{-1} : Scalar{0});
      });
}

Tensor clip(const Tensor& a, Scalar lo, Scalar hi) {
  return unary(
      "clip", a, [lo, hi](Scalar x) { return std::clamp(x, lo, hi); },
      [lo, hi](Scalar x, Scalar) {
        return (x >= lo && x <= hi) ? Scalar{1} : Scalar{0};
      });
}

Tensor log(const Tensor& a, Scalar floor) {
  return unary(
      "log", a, [floor](Scalar x) { return std::log(std::max(x, floor)); },
      [floor](Scalar x, Scalar) {
        return x >= floor && x > 0 ? Scalar{1} / x : Scalar{0};
      });
}

Tensor softmax_rows(const Tensor& a) {
  require_defined("softmax", a);
  const std::size_t rows = a.rows(), cols = a.cols();
  if (cols == 0) throw ShapeError("softmax", "zero columns");
  std::vector<Scalar> out(a.size());
  auto in = a.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const Scalar* x = in.data() + r * cols;
    Scalar* y = out.data() + r * cols;
    const Scalar mx = *std::max_element(x, x + cols);
    Scalar total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  return Tensor::make_op("softmax", a.shape(), std::move(out), {a},
                         [rows, cols](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           for (std::size_t r = 0; r < rows; ++r) {
                             const Scalar* y = self.value.data() + r * cols;
                             const Scalar* g = self.grad.data() + r * cols;
                             Scalar dot = 0;
                             for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
                             Scalar* gx = x.grad.data() + r * cols;
                             for (std::size_t c = 0; c < cols; ++c) {
                               gx[c] += y[c] * (g[c] - dot);
                             }
                           }
                         });
}

Tensor sum(const Tensor& a) {
  require_defined("sum", a);
  Scalar total = 0;
  for (Scalar v : a.values()) total += v;
  return Tensor::make_op("sum", {1, 1}, {total}, {a}, [](detail::Node& self) {
    detail::Node& x = *self.inputs[0];
    for (Scalar& g : x.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  require_defined("mean", a);
  if (a.size() == 0) throw ShapeError("mean", "empty tensor");
  return scale(sum(a), Scalar{1} / static_cast<Scalar>(a.size()));
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat", "no operands");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    require_defined("concat", p);
    if (p.rows() != rows) throw ShapeError("concat", pair_str(parts[0], p));
    offsets.push_back(cols);
    cols += p.cols();
  }
  std::vector<Scalar> out(rows * cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t pc = parts[k].cols();
    auto v = parts[k].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * pc, pc, out.data() + r * cols + offsets[k]);
    }
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return Tensor::make_op(
      "concat", {rows, cols}, std::move(out), std::move(inputs),
      [rows, cols, offsets](detail::Node& self) {
        for (std::size_t k = 0; k < self.inputs.size(); ++k) {
          detail::Node& x = *self.inputs[k];
          if (!x.requires_grad) continue;
          const std::size_t pc = x.shape.cols;
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < pc; ++c) {
              x.grad[r * pc + c] += self.grad[r * cols + offsets[k] + c];
            }
          }
        }
      });
}

Tensor concat_cols(std::initializer_list<Tensor> parts) {
  return concat_cols(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count) {
  require_defined("slice", a);
  if (begin + count > a.cols()) {
    throw ShapeError("slice", a.shape().to_string() + " columns [" +
                                  std::to_string(begin) + ", " +
                                  std::to_string(begin + count) + ")");
  }
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<Scalar> out(rows * count);
  auto v = a.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(v.data() + r * cols + begin, count, out.data() + r * count);
  }
  return Tensor::make_op("slice", {rows, count}, std::move(out), {a},
                         [rows, cols, begin, count](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t c = 0; c < count; ++c) {
                               x.grad[r * cols + begin + c] +=
                                   self.grad[r * count + c];
                             }
                           }
                         });
}

Tensor index_select(const Tensor& table, std::span<const std::size_t> rows) {
  require_defined("index_select", table);
  const std::size_t cols = table.cols();
  std::vector<Scalar> out(rows.size() * cols);
  auto v = table.values();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= table.rows()) {
      throw ShapeError("index_select", "row " + std::to_string(rows[i]) +
                                           " out of " + table.shape().to_string());
    }
    std::copy_n(v.data() + rows[i] * cols, cols, out.data() + i * cols);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return Tensor::make_op("index_select", {rows.size(), cols}, std::move(out),
                         {table}, [idx = std::move(idx), cols](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           for (std::size_t i = 0; i < idx.size(); ++i) {
                             for (std::size_t c = 0; c < cols; ++c) {
                               x.grad[idx[i] * cols + c] += self.grad[i * cols + c];
                             }
                           }
                         });
}

Tensor pick(const Tensor& a, std::span<const std::size_t> cols) {
  require_defined("pick", a);
  if (cols.size() != a.rows()) {
    throw ShapeError("pick", a.shape().to_string() + " with " +
                                 std::to_string(cols.size()) + " indices");
  }
  const std::size_t width = a.cols();
  std::vector<Scalar> out(cols.size());
  for (std::size_t r = 0; r < cols.size(); ++r) {
    if (cols[r] >= width) {
      throw ShapeError("pick", "column " + std::to_string(cols[r]) + " out of " +
                                   a.shape().to_string());
    }
    out[r] = a.at(r, cols[r]);
  }
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  return Tensor::make_op("pick", {cols.size(), 1}, std::move(out), {a},
                         [idx = std::move(idx), width](detail::Node& self) {
                           detail::Node& x = *self.inputs[0];
                           for (std::size_t r = 0; r < idx.size(); ++r) {
                             x.grad[r * width + idx[r]] += self.grad[r];
                           }
                         });
}

}  // namespace noiselab
