// Copyright 2026 The spsim Authors
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

#include "spsim/kernels.hpp"

namespace spsim::kernels {

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

double l2_norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

void score_all_serial(std::span<const float> query, double qnorm, const MatrixView& m,
                      std::span<double> out) {
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) out[i] = cosine_from(dot(query, m.row(i)), qnorm, m.norms[i]);
}

void score_all_parallel(std::span<const float> query, double qnorm, const MatrixView& m,
                        std::span<double> out) {
    const auto n = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        out[r] = cosine_from(dot(query, m.row(r)), qnorm, m.norms[r]);
    }
}

std::vector<double> row_norms_serial(std::span<const float> data, std::size_t dim) {
    const std::size_t n = dim == 0 ? 0 : data.size() / dim;
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = l2_norm(data.subspan(i * dim, dim));
    return norms;
}

std::vector<double> row_norms_parallel(std::span<const float> data, std::size_t dim) {
    const std::size_t n = dim == 0 ? 0 : data.size() / dim;
    std::vector<double> norms(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const auto r = static_cast<std::size_t>(i);
        norms[r] = l2_norm(data.subspan(r * dim, dim));
    }
    return norms;
}

}  // namespace spsim::kernels
