// Copyright 2026 The tgrl Authors.
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

#include "tgrl/kernels.h"

#include <algorithm>
#include <cstdint>
#include <cstring>

#ifdef TGRL_HAVE_OPENMP
#include <omp.h>
#endif

namespace tgrl::kernels {
namespace {

// Four independent partial sums; the reduction order is fixed so the serial
// and OpenMP matvec agree bit for bit.
inline double row_dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
  }
  for (; j < n; ++j) s0 += a[j] * b[j];
  return (s0 + s1) + (s2 + s3);
}

using v4d = double __attribute__((vector_size(32)));

inline v4d load4(const double* p) {
  v4d v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

// row_dot for rows [i0, i1), four rows at a time to overlap the dependency
// chains. Lane l of each accumulator is row_dot's s_l, so every row is
// reduced exactly as row_dot does.
inline void rows_dot(const double* w, std::size_t cols, const double* x,
                     double* y, std::size_t i0, std::size_t i1) {
  std::size_t i = i0;
  for (; i + 4 <= i1; i += 4) {
    const double* a0 = w + i * cols;
    const double* a1 = a0 + cols;
    const double* a2 = a1 + cols;
    const double* a3 = a2 + cols;
    v4d s0 = {}, s1 = {}, s2 = {}, s3 = {};
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const v4d xv = load4(x + j);
      s0 += load4(a0 + j) * xv;
      s1 += load4(a1 + j) * xv;
      s2 += load4(a2 + j) * xv;
      s3 += load4(a3 + j) * xv;
    }
    for (; j < cols; ++j) {
      s0[0] += a0[j] * x[j];
      s1[0] += a1[j] * x[j];
      s2[0] += a2[j] * x[j];
      s3[0] += a3[j] * x[j];
    }
    y[i] = (s0[0] + s0[1]) + (s0[2] + s0[3]);
    y[i + 1] = (s1[0] + s1[1]) + (s1[2] + s1[3]);
    y[i + 2] = (s2[0] + s2[1]) + (s2[2] + s2[3]);
    y[i + 3] = (s3[0] + s3[1]) + (s3[2] + s3[3]);
  }
  for (; i < i1; ++i) y[i] = row_dot(w + i * cols, x, cols);
}

// Capacity of the gather buffers below; longer term lists go in chunks.
constexpr std::size_t kGather = 64;

// dst[j] += c_0 src_0[j], then += c_1 src_1[j], ... for j in [c0, c1), with
// terms whose coefficient is zero skipped. Terms are applied in order, four
// per pass over dst.
inline void axpy_many(double* dst, std::size_t c0, std::size_t c1,
                      const double* coef, const double* const* src,
                      std::size_t n) {
  const std::size_t quads = std::min(n, kGather) / 4;
  for (std::size_t q = 0; q < quads; ++q) {
    const std::size_t k = 4 * q;
    const double g0 = coef[k], g1 = coef[k + 1], g2 = coef[k + 2],
                 g3 = coef[k + 3];
    const double *x0 = src[k], *x1 = src[k + 1], *x2 = src[k + 2],
                 *x3 = src[k + 3];
    for (std::size_t j = c0; j < c1; ++j) {
      double a = dst[j];
      a += g0 * x0[j];
      a += g1 * x1[j];
      a += g2 * x2[j];
      a += g3 * x3[j];
      dst[j] = a;
    }
  }
  for (std::size_t k = 4 * quads; k < n; ++k) {
    const double g = coef[k];
    const double* x = src[k];
    for (std::size_t j = c0; j < c1; ++j) dst[j] += g * x[j];
  }
}

inline void t_accum_block(const double* w, std::size_t rows, std::size_t cols,
                          const double* g, double* gx, std::size_t c0,
                          std::size_t c1) {
  double coef[kGather];
  const double* src[kGather];
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (g[i] == 0.0) continue;
    coef[n] = g[i];
    src[n] = w + i * cols;
    if (++n == kGather) {
      axpy_many(gx, c0, c1, coef, src, n);
      n = 0;
    }
  }
  axpy_many(gx, c0, c1, coef, src, n);
}

inline void outer_row(double* gw_row, double gi, const double* x,
                      std::size_t cols) {
  if (gi == 0.0) return;
  for (std::size_t j = 0; j < cols; ++j) gw_row[j] += gi * x[j];
}

inline void outer_row_batch(double* gw_row, std::size_t row, std::size_t cols,
                            const double* const* gs, const double* const* xs,
                            std::size_t count) {
  double coef[kGather];
  const double* src[kGather];
  std::size_t n = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double gi = gs[k][row];
    if (gi == 0.0) continue;
    coef[n] = gi;
    src[n] = xs[k];
    if (++n == kGather) {
      axpy_many(gw_row, 0, cols, coef, src, n);
      n = 0;
    }
  }
  axpy_many(gw_row, 0, cols, coef, src, n);
}

}  // namespace

void matvec_serial(std::span<const double> w, std::size_t rows,
                   std::size_t cols, std::span<const double> x,
                   std::span<double> y) {
  rows_dot(w.data(), cols, x.data(), y.data(), 0, rows);
}

void matvec_omp(std::span<const double> w, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y) {
  // Blocks of 4 rows, matching the serial grouping.
  const auto blocks = static_cast<std::int64_t>((rows + 3) / 4);
  const double* wp = w.data();
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t i0 = static_cast<std::size_t>(b) * 4;
    rows_dot(wp, cols, xp, yp, i0, std::min(rows, i0 + 4));
  }
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  if (rows * cols >= kParallelThreshold && max_threads() > 1)
    matvec_omp(w, rows, cols, x, y);
  else
    matvec_serial(w, rows, cols, x, y);
}

void matvec_t_accum_serial(std::span<const double> w, std::size_t rows,
                           std::size_t cols, std::span<const double> g,
                           std::span<double> gx) {
  t_accum_block(w.data(), rows, cols, g.data(), gx.data(), 0, cols);
}

void matvec_t_accum_omp(std::span<const double> w, std::size_t rows,
                        std::size_t cols, std::span<const double> g,
                        std::span<double> gx) {
  // Column blocks: each output column is owned by one thread and summed over
  // rows in ascending order, as in the serial loop. Wide blocks keep the row
  // reads contiguous.
  constexpr std::size_t kBlock = 512;
  const auto blocks = static_cast<std::int64_t>((cols + kBlock - 1) / kBlock);
  const double* wp = w.data();
  const double* gp = g.data();
  double* gxp = gx.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t c0 = static_cast<std::size_t>(b) * kBlock;
    const std::size_t c1 = std::min(cols, c0 + kBlock);
    t_accum_block(wp, rows, cols, gp, gxp, c0, c1);
  }
}

void matvec_t_accum(std::span<const double> w, std::size_t rows,
                    std::size_t cols, std::span<const double> g,
                    std::span<double> gx) {
  if (rows * cols >= kParallelThreshold && max_threads() > 1)
    matvec_t_accum_omp(w, rows, cols, g, gx);
  else
    matvec_t_accum_serial(w, rows, cols, g, gx);
}

void outer_accum_serial(std::span<double> gw, std::size_t rows,
                        std::size_t cols, std::span<const double> g,
                        std::span<const double> x) {
  for (std::size_t i = 0; i < rows; ++i)
    outer_row(gw.data() + i * cols, g[i], x.data(), cols);
}

void outer_accum_omp(std::span<double> gw, std::size_t rows, std::size_t cols,
                     std::span<const double> g, std::span<const double> x) {
  const auto n = static_cast<std::int64_t>(rows);
  double* gwp = gw.data();
  const double* gp = g.data();
  const double* xp = x.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    outer_row(gwp + static_cast<std::size_t>(i) * cols, gp[i], xp, cols);
}

void outer_accum(std::span<double> gw, std::size_t rows, std::size_t cols,
                 std::span<const double> g, std::span<const double> x) {
  if (rows * cols >= kParallelThreshold && max_threads() > 1)
    outer_accum_omp(gw, rows, cols, g, x);
  else
    outer_accum_serial(gw, rows, cols, g, x);
}

void outer_accum_batch_serial(std::span<double> gw, std::size_t rows,
                              std::size_t cols,
                              std::span<const double* const> gs,
                              std::span<const double* const> xs) {
  for (std::size_t i = 0; i < rows; ++i)
    outer_row_batch(gw.data() + i * cols, i, cols, gs.data(), xs.data(),
                    gs.size());
}

void outer_accum_batch_omp(std::span<double> gw, std::size_t rows,
                           std::size_t cols, std::span<const double* const> gs,
                           std::span<const double* const> xs) {
  const auto n = static_cast<std::int64_t>(rows);
  double* gwp = gw.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    outer_row_batch(gwp + r * cols, r, cols, gs.data(), xs.data(), gs.size());
  }
}

void outer_accum_batch(std::span<double> gw, std::size_t rows,
                       std::size_t cols, std::span<const double* const> gs,
                       std::span<const double* const> xs) {
  if (rows * cols * gs.size() >= kParallelThreshold && max_threads() > 1)
    outer_accum_batch_omp(gw, rows, cols, gs, xs);
  else
    outer_accum_batch_serial(gw, rows, cols, gs, xs);
}

void mean_rows_serial(std::span<const double> rows, std::size_t dim,
                      std::size_t first, std::size_t count,
                      std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (count == 0) return;
  for (std::size_t r = first; r < first + count; ++r) {
    const double* row = rows.data() + r * dim;
    for (std::size_t k = 0; k < dim; ++k) out[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (auto& v : out) v *= inv;
}

void mean_rows_omp(std::span<const double> rows, std::size_t dim,
                   std::size_t first, std::size_t count,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (count == 0) return;
  // Parallel over column blocks; each column is summed in row order.
  constexpr std::size_t kBlock = 512;
  const auto blocks = static_cast<std::int64_t>((dim + kBlock - 1) / kBlock);
  const double inv = 1.0 / static_cast<double>(count);
  const double* base = rows.data();
  double* op = out.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t c0 = static_cast<std::size_t>(b) * kBlock;
    const std::size_t c1 = std::min(dim, c0 + kBlock);
    for (std::size_t r = first; r < first + count; ++r) {
      const double* row = base + r * dim;
      for (std::size_t k = c0; k < c1; ++k) op[k] += row[k];
    }
    for (std::size_t k = c0; k < c1; ++k) op[k] *= inv;
  }
}

void mean_rows(std::span<const double> rows, std::size_t dim,
               std::size_t first, std::size_t count, std::span<double> out) {
  if (dim * count >= kParallelThreshold && max_threads() > 1)
    mean_rows_omp(rows, dim, first, count, out);
  else
    mean_rows_serial(rows, dim, first, count, out);
}

int max_threads() {
#ifdef TGRL_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace tgrl::kernels
