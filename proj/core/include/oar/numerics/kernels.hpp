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

#ifndef OAR_NUMERICS_KERNELS_HPP
#define OAR_NUMERICS_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>

/// Row-wise compute kernels shared by the autodiff graph and the cached
/// inference path.
///
/// Every output row depends only on its own input row and is accumulated in a
/// fixed order, so computing one row at a time, a batch of rows, or a whole
/// sequence produces identical bits.
namespace oar::numerics::kernels {

/// Log-probability assigned to vocabulary entries excluded by a mask.
inline constexpr double kMaskedLogProb = -1e30;

/// c[m,n] = a[m,k] * b[k,n]
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n);

/// c[m,n] = a[m,k] * b[n,k]^T
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);

/// c[k,n] += a[m,k]^T * b[m,n]
void matmul_tn_accumulate(std::span<const double> a, std::span<const double> b, std::span<double> c,
                          std::size_t m, std::size_t k, std::size_t n);

double dot(std::span<const double> a, std::span<const double> b);

/// out = x / sqrt(mean(x^2) + eps); returns the reciprocal RMS.
double rms_norm_row(std::span<const double> x, std::span<double> out, double eps);

double gelu(double x);
double gelu_derivative(double x);

/// Softmax over the first `count` entries of `scores`; the rest of `out` is zeroed.
void prefix_softmax_row(std::span<const double> scores, std::size_t count, std::span<double> out);

/// Log-softmax over entries with allowed[j] != 0 (all entries when `allowed` is empty).
/// Excluded entries receive kMaskedLogProb.
void log_softmax_row(std::span<const double> x, std::span<const std::uint8_t> allowed, std::span<double> out);

}  // namespace oar::numerics::kernels

#endif  // OAR_NUMERICS_KERNELS_HPP
