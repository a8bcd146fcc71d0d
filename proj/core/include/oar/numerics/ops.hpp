// Copyright 2026 The oarlab Authors
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

#ifndef OAR_NUMERICS_OPS_HPP
#define OAR_NUMERICS_OPS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "oar/numerics/graph.hpp"

/// Differentiable operations on graph variables.
///
/// Matrices are rank-2 row-major; "rows" ops treat a rank-1 input as a single
/// row. Every op validates shapes and throws ContractViolation on mismatch.
namespace oar::numerics {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var exp(Var a);
Var gelu(Var a);
/// Pass-through gradient inside [lo, hi], zero outside.
Var clamp(Var a, double lo, double hi);
/// Elementwise minimum; ties route the gradient to `a`.
Var minimum(Var a, Var b);

/// x[m,n] * g[n] broadcast over rows.
Var mul_rows(Var x, Var g);
Var matmul(Var a, Var b);
/// a[m,k] * b[n,k]^T
Var matmul_nt(Var a, Var b);

/// table[v,d] indexed by `ids` -> [len(ids), d].
Var gather_rows(Var table, std::span<const std::size_t> ids);
Var select_rows(Var x, std::span<const std::size_t> rows);
Var slice_cols(Var x, std::size_t start, std::size_t count);
Var concat_cols(std::span<const Var> parts);
/// Column means -> [1, n].
Var mean_rows(Var x);
/// out[i] = x[i, index[i]]
Var pick(Var x, std::span<const std::size_t> index);

Var rms_norm(Var x, double eps);
/// Row i is softmax over columns 0..i; later columns are zero.
Var causal_softmax(Var x);
/// Row-wise log-softmax restricted to allowed columns (all when empty).
Var log_softmax(Var x, std::span<const std::uint8_t> allowed = {});

Var sum(Var a);
Var mean(Var a);
Var dot(Var a, Var b);
/// sum_v p_v (log p_v - log q_v) with p = exp(log_p); entries with p_v == 0 are skipped.
Var kl_divergence(Var log_p, Var log_q);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator-(Var a) { return scale(a, -1.0); }

}  // namespace oar::numerics

#endif  // OAR_NUMERICS_OPS_HPP
