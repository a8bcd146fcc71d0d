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

#include "oar/numerics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oar::numerics::kernels {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n) {
  std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m * n), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* out = c.data() + i * n;
    const double* in = a.data() + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double scale = in[kk];
      const double* w = b.data() + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        out[j] += scale * w[j];
      }
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] = dot(a.subspan(i * k, k), b.subspan(j * k, k));
    }
  }
}

void matmul_tn_accumulate(std::span<const double> a, std::span<const double> b, std::span<double> c,
                          std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* left = a.data() + i * k;
    const double* right = b.data() + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double scale = left[kk];
      double* out = c.data() + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        out[j] += scale * right[j];
      }
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double rms_norm_row(std::span<const double> x, std::span<double> out, double eps) {
  double sum_sq = 0.0;
  for (const double v : x) {
    sum_sq += v * v;
  }
  const double inv = 1.0 / std::sqrt(sum_sq / static_cast<double>(x.size()) + eps);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] * inv;
  }
  return inv;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

double gelu(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_derivative(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

void prefix_softmax_row(std::span<const double> scores, std::size_t count, std::span<double> out) {
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    max_score = std::max(max_score, scores[j]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = std::exp(scores[j] - max_score);
    total += out[j];
  }
  const double inv = 1.0 / total;
  for (std::size_t j = 0; j < count; ++j) {
    out[j] *= inv;
  }
  for (std::size_t j = count; j < out.size(); ++j) {
    out[j] = 0.0;
  }
}

void log_softmax_row(std::span<const double> x, std::span<const std::uint8_t> allowed, std::span<double> out) {
  const bool masked = !allowed.empty();
  double max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!masked || allowed[j] != 0) {
      max_value = std::max(max_value, x[j]);
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!masked || allowed[j] != 0) {
      total += std::exp(x[j] - max_value);
    }
  }
  const double log_norm = max_value + std::log(total);
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = (!masked || allowed[j] != 0) ? x[j] - log_norm : kMaskedLogProb;
  }
}

}  // namespace oar::numerics::kernels
