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

#include "oar/numerics/ops.hpp"

#include <cmath>
#include <string>

#include "oar/common/error.hpp"
#include "oar/numerics/kernels.hpp"

namespace oar::numerics {

namespace {

void require_same(Var a, Var b, const char* op) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                                      to_string(b.shape()));
}

void require_matrix(Var x, const char* op) {
  require(x.value().rank() == 2, std::string(op) + ": expected a matrix, got " + to_string(x.shape()));
}

// Adds `values` into the gradient buffer of `target` if it is differentiable.
template <class Fn>
void accumulate(Graph& g, Var target, Fn&& fn) {
  if (g.requires_grad(target)) {
    fn(g.grad_buffer(target));
  }
}

}  // namespace

Var add(Var a, Var b) {
  require_same(a, b, "add");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] + b.value()[i];
  }
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i];
    });
    accumulate(g, b, [&](std::span<double> gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += go[i];
    });
  });
}

Var sub(Var a, Var b) {
  require_same(a, b, "sub");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] - b.value()[i];
  }
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i];
    });
    accumulate(g, b, [&](std::span<double> gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= go[i];
    });
  });
}

Var mul(Var a, Var b) {
  require_same(a, b, "mul");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] * b.value()[i];
  }
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * bv[i];
    });
    accumulate(g, b, [&](std::span<double> gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += go[i] * av[i];
    });
  });
}

Var scale(Var a, double factor) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] * factor;
  }
  return a.graph().record(std::move(out), {a}, [a, factor](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * factor;
    });
  });
}

Var exp(Var a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(a.value()[i]);
  }
  return a.graph().record(std::move(out), {a}, [a](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * std::exp(av[i]);
    });
  });
}

Var gelu(Var a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = kernels::gelu(a.value()[i]);
  }
  return a.graph().record(std::move(out), {a}, [a](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * kernels::gelu_derivative(av[i]);
    });
  });
}

Var clamp(Var a, double lo, double hi) {
  require(lo <= hi, "clamp: lo > hi");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(std::max(a.value()[i], lo), hi);
  }
  return a.graph().record(std::move(out), {a}, [a, lo, hi](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if (av[i] >= lo && av[i] <= hi) ga[i] += go[i];
      }
    });
  });
}

Var minimum(Var a, Var b) {
  require_same(a, b, "minimum");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(a.value()[i], b.value()[i]);
  }
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if (av[i] <= bv[i]) ga[i] += go[i];
      }
    });
    accumulate(g, b, [&](std::span<double> gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) {
        if (av[i] > bv[i]) gb[i] += go[i];
      }
    });
  });
}

Var mul_rows(Var x, Var gain) {
  const auto& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  require(gain.value().size() == n, "mul_rows: gain length mismatch");
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = xv[i * n + j] * gain.value()[j];
    }
  }
  return x.graph().record(std::move(out), {x, gain}, [x, gain, m, n](Graph& g, std::span<const double> go) {
    const auto& xv = g.value(x);
    const auto& gv = g.value(gain);
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += go[i * n + j] * gv[j];
      }
    });
    accumulate(g, gain, [&](std::span<double> gg) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gg[j] += go[i * n + j] * xv[i * n + j];
      }
    });
  });
}

Var matmul(Var a, Var b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.value().dim(0);
  const std::size_t k = a.value().dim(1);
  const std::size_t n = b.value().dim(1);
  require(b.value().dim(0) == k, "matmul: inner dimensions " + to_string(a.shape()) + " x " + to_string(b.shape()));
  Tensor out(Shape{m, n});
  kernels::matmul(a.value().data(), b.value().data(), out.data(), m, k, n);
  return a.graph().record(std::move(out), {a, b}, [a, b, m, k, n](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      std::vector<double> tmp(m * k);
      kernels::matmul_nt(go, g.value(b).data(), tmp, m, n, k);
      for (std::size_t i = 0; i < tmp.size(); ++i) ga[i] += tmp[i];
    });
    accumulate(g, b, [&](std::span<double> gb) { kernels::matmul_tn_accumulate(g.value(a).data(), go, gb, m, k, n); });
  });
}

Var matmul_nt(Var a, Var b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t m = a.value().dim(0);
  const std::size_t k = a.value().dim(1);
  const std::size_t n = b.value().dim(0);
  require(b.value().dim(1) == k, "matmul_nt: inner dimensions " + to_string(a.shape()) + " x " + to_string(b.shape()));
  Tensor out(Shape{m, n});
  kernels::matmul_nt(a.value().data(), b.value().data(), out.data(), m, k, n);
  return a.graph().record(std::move(out), {a, b}, [a, b, m, k, n](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      std::vector<double> tmp(m * k);
      kernels::matmul(go, g.value(b).data(), tmp, m, n, k);
      for (std::size_t i = 0; i < tmp.size(); ++i) ga[i] += tmp[i];
    });
    accumulate(g, b, [&](std::span<double> gb) { kernels::matmul_tn_accumulate(go, g.value(a).data(), gb, m, n, k); });
  });
}

Var gather_rows(Var table, std::span<const std::size_t> ids) {
  require_matrix(table, "gather_rows");
  const std::size_t rows = table.value().dim(0);
  const std::size_t d = table.value().dim(1);
  Tensor out(Shape{ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] < rows, "gather_rows: index " + std::to_string(ids[i]) + " out of range");
    const auto src = table.value().row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> index(ids.begin(), ids.end());
  return table.graph().record(std::move(out), {table}, [table, index, d](Graph& g, std::span<const double> go) {
    accumulate(g, table, [&](std::span<double> gt) {
      for (std::size_t i = 0; i < index.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) gt[index[i] * d + j] += go[i * d + j];
      }
    });
  });
}

Var select_rows(Var x, std::span<const std::size_t> rows) {
  const auto& xv = x.value();
  const std::size_t n = xv.cols();
  Tensor out(Shape{rows.size(), n});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < xv.rows(), "select_rows: row " + std::to_string(rows[i]) + " out of range");
    const auto src = xv.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> index(rows.begin(), rows.end());
  return x.graph().record(std::move(out), {x}, [x, index, n](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < index.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[index[i] * n + j] += go[i * n + j];
      }
    });
  });
}

Var slice_cols(Var x, std::size_t start, std::size_t count) {
  require_matrix(x, "slice_cols");
  const std::size_t m = x.value().dim(0);
  const std::size_t n = x.value().dim(1);
  require(start + count <= n, "slice_cols: range out of bounds");
  Tensor out(Shape{m, count});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < count; ++j) out[i * count + j] = x.value()[i * n + start + j];
  }
  return x.graph().record(std::move(out), {x}, [x, m, n, start, count](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < count; ++j) gx[i * n + start + j] += go[i * count + j];
      }
    });
  });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t m = parts.front().value().rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_matrix(p, "concat_cols");
    require(p.value().dim(0) == m, "concat_cols: row count mismatch");
    total += p.value().dim(1);
  }
  Tensor out(Shape{m, total});
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t n = p.value().dim(1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[i * total + offset + j] = p.value()[i * n + j];
    }
    offset += n;
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().graph().record(std::move(out), parts, [inputs, m, total](Graph& g, std::span<const double> go) {
    std::size_t offset = 0;
    for (const auto& p : inputs) {
      const std::size_t n = g.value(p).dim(1);
      accumulate(g, p, [&](std::span<double> gp) {
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) gp[i * n + j] += go[i * total + offset + j];
        }
      });
      offset += n;
    }
  });
}

Var mean_rows(Var x) {
  const auto& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  require(m > 0, "mean_rows: empty input");
  Tensor out(Shape{1, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += xv[i * n + j];
  }
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) out[j] *= inv;
  return x.graph().record(std::move(out), {x}, [x, m, n, inv](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += go[j] * inv;
      }
    });
  });
}

Var pick(Var x, std::span<const std::size_t> index) {
  const auto& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  require(index.size() == m, "pick: need one index per row");
  Tensor out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    require(index[i] < n, "pick: index out of range");
    out[i] = xv[i * n + index[i]];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return x.graph().record(std::move(out), {x}, [x, idx, n](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < idx.size(); ++i) gx[i * n + idx[i]] += go[i];
    });
  });
}

Var rms_norm(Var x, double eps) {
  const auto& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  Tensor out(xv.shape());
  std::vector<double> inv(m);
  for (std::size_t i = 0; i < m; ++i) {
    inv[i] = kernels::rms_norm_row(xv.row(i), out.row(i), eps);
  }
  return x.graph().record(std::move(out), {x}, [x, inv, m, n](Graph& g, std::span<const double> go) {
    const auto& xv = g.value(x);
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        double proj = 0.0;
        for (std::size_t j = 0; j < n; ++j) proj += go[i * n + j] * xv[i * n + j] * inv[i];
        proj /= static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
          const double y = xv[i * n + j] * inv[i];
          gx[i * n + j] += inv[i] * (go[i * n + j] - y * proj);
        }
      }
    });
  });
}

Var causal_softmax(Var x) {
  require_matrix(x, "causal_softmax");
  const std::size_t m = x.value().dim(0);
  require(x.value().dim(1) == m, "causal_softmax: expected a square matrix");
  Tensor out(Shape{m, m});
  for (std::size_t i = 0; i < m; ++i) {
    kernels::prefix_softmax_row(x.value().row(i), i + 1, out.row(i));
  }
  Tensor probs = out;
  return x.graph().record(std::move(out), {x}, [x, probs = std::move(probs), m](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j <= i; ++j) inner += go[i * m + j] * probs[i * m + j];
        for (std::size_t j = 0; j <= i; ++j) gx[i * m + j] += probs[i * m + j] * (go[i * m + j] - inner);
      }
    });
  });
}

Var log_softmax(Var x, std::span<const std::uint8_t> allowed) {
  const auto& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  require(allowed.empty() || allowed.size() == n, "log_softmax: mask length mismatch");
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < m; ++i) {
    kernels::log_softmax_row(xv.row(i), allowed, out.row(i));
  }
  std::vector<std::uint8_t> mask(allowed.begin(), allowed.end());
  Tensor logp = out;
  return x.graph().record(std::move(out), {x}, [x, mask, logp = std::move(logp), m, n](Graph& g, std::span<const double> go) {
    accumulate(g, x, [&](std::span<double> gx) {
      for (std::size_t i = 0; i < m; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (mask.empty() || mask[j] != 0) total += go[i * n + j];
        }
        for (std::size_t j = 0; j < n; ++j) {
          if (mask.empty() || mask[j] != 0) {
            gx[i * n + j] += go[i * n + j] - std::exp(logp[i * n + j]) * total;
          }
        }
      }
    });
  });
}

Var sum(Var a) {
  double total = 0.0;
  for (const double v : a.value().data()) total += v;
  return a.graph().record(Tensor::scalar(total), {a}, [a](Graph& g, std::span<const double> go) {
    accumulate(g, a, [&](std::span<double> ga) {
      for (auto& v : ga) v += go[0];
    });
  });
}

Var mean(Var a) {
  const std::size_t count = a.value().size();
  require(count > 0, "mean: empty input");
  return scale(sum(a), 1.0 / static_cast<double>(count));
}

Var dot(Var a, Var b) {
  require(a.value().size() == b.value().size(), "dot: length mismatch");
  const double value = kernels::dot(a.value().data(), b.value().data());
  return a.graph().record(Tensor::scalar(value), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    accumulate(g, a, [&](std::span<double> ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[0] * bv[i];
    });
    accumulate(g, b, [&](std::span<double> gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += go[0] * av[i];
    });
  });
}

Var kl_divergence(Var log_p, Var log_q) {
  require(log_p.value().size() == log_q.value().size(), "kl_divergence: length mismatch");
  const auto& lp = log_p.value();
  const auto& lq = log_q.value();
  double total = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const double p = std::exp(lp[i]);
    if (p > 0.0) {
      total += p * (lp[i] - lq[i]);
    }
  }
  return log_p.graph().record(Tensor::scalar(total), {log_p, log_q}, [log_p, log_q](Graph& g, std::span<const double> go) {
    const auto& lp = g.value(log_p);
    const auto& lq = g.value(log_q);
    accumulate(g, log_p, [&](std::span<double> gp) {
      for (std::size_t i = 0; i < gp.size(); ++i) {
        const double p = std::exp(lp[i]);
        if (p > 0.0) gp[i] += go[0] * p * (lp[i] - lq[i] + 1.0);
      }
    });
    accumulate(g, log_q, [&](std::span<double> gq) {
      for (std::size_t i = 0; i < gq.size(); ++i) {
        const double p = std::exp(lp[i]);
        if (p > 0.0) gq[i] -= go[0] * p;
      }
    });
  });
}

}  // namespace oar::numerics
