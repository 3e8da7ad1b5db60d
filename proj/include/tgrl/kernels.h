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

#ifndef TGRL_KERNELS_H_
#define TGRL_KERNELS_H_

#include <cstddef>
#include <span>

// Dense row-major kernels used by the autodiff tape.
//
// Each kernel exists in two flavours: a serial reference (`*_serial`) and an
// OpenMP version (`*_omp`). The OpenMP versions partition work so that every
// output element is accumulated by exactly one thread in the same order as the
// serial loop, so both flavours produce bit-identical results. The unsuffixed
// entry points dispatch on problem size.

namespace tgrl::kernels {

// Work (rows * cols) below which the dispatchers stay serial.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 16;

// y = W x, W is rows x cols.
void matvec_serial(std::span<const double> w, std::size_t rows,
                   std::size_t cols, std::span<const double> x,
                   std::span<double> y);
void matvec_omp(std::span<const double> w, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y);
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

// gx += W^T g.
void matvec_t_accum_serial(std::span<const double> w, std::size_t rows,
                           std::size_t cols, std::span<const double> g,
                           std::span<double> gx);
void matvec_t_accum_omp(std::span<const double> w, std::size_t rows,
                        std::size_t cols, std::span<const double> g,
                        std::span<double> gx);
void matvec_t_accum(std::span<const double> w, std::size_t rows,
                    std::size_t cols, std::span<const double> g,
                    std::span<double> gx);

// gw += g x^T.
void outer_accum_serial(std::span<double> gw, std::size_t rows,
                        std::size_t cols, std::span<const double> g,
                        std::span<const double> x);
void outer_accum_omp(std::span<double> gw, std::size_t rows, std::size_t cols,
                     std::span<const double> g, std::span<const double> x);
void outer_accum(std::span<double> gw, std::size_t rows, std::size_t cols,
                 std::span<const double> g, std::span<const double> x);

// gw += sum_k g_k x_k^T over a batch of (g, x) pairs, each row of gw updated
// once with the pairs taken in order. Matches successive outer_accum calls.
void outer_accum_batch_serial(std::span<double> gw, std::size_t rows,
                              std::size_t cols,
                              std::span<const double* const> gs,
                              std::span<const double* const> xs);
void outer_accum_batch_omp(std::span<double> gw, std::size_t rows,
                           std::size_t cols, std::span<const double* const> gs,
                           std::span<const double* const> xs);
void outer_accum_batch(std::span<double> gw, std::size_t rows,
                       std::size_t cols, std::span<const double* const> gs,
                       std::span<const double* const> xs);

// out = mean of `count` consecutive rows of a row-major matrix starting at
// `first`, each row `dim` wide.
void mean_rows_serial(std::span<const double> rows, std::size_t dim,
                      std::size_t first, std::size_t count,
                      std::span<double> out);
void mean_rows_omp(std::span<const double> rows, std::size_t dim,
                   std::size_t first, std::size_t count,
                   std::span<double> out);
void mean_rows(std::span<const double> rows, std::size_t dim,
               std::size_t first, std::size_t count, std::span<double> out);

// Number of OpenMP threads that would be used; 1 without OpenMP.
int max_threads();

}  // namespace tgrl::kernels

#endif  // TGRL_KERNELS_H_
