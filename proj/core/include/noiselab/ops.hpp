#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "noiselab/tensor.hpp"

namespace noiselab {

// Differentiable ops over 2-D tensors. Every op validates shapes and throws
// ShapeError naming itself and the offending shapes.

Tensor matmul(const Tensor& a, const Tensor& b);
// Elementwise sum; b may also be a 1xN row broadcast over a's rows.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Scalar factor);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor abs(const Tensor& a);
// Clamps into [lo, hi]; gradient passes where lo <= a <= hi.
Tensor clip(const Tensor& a, Scalar lo, Scalar hi);
// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& a);
// Natural log of max(a, floor). The gradient is zero where the floor binds.
Tensor log(const Tensor& a, Scalar floor = Scalar{0});

// Sum of all entries, 1x1.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// Column-wise concatenation of tensors with equal row counts.
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_cols(std::initializer_list<Tensor> parts);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count);

// Gathers rows of table; out-of-range indices throw.
Tensor index_select(const Tensor& table, std::span<const std::size_t> rows);
// Picks a[r][cols[r]] for each row, Bx1.
Tensor pick(const Tensor& a, std::span<const std::size_t> cols);

}  // namespace noiselab
