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

#pragma once

// Data-parallel inner loops. Every OpenMP kernel here has a serial twin that is kept
// as the reference for tests and for the benchmark comparison; both produce
// bit-identical results because each output element is computed by the same
// fixed-order arithmetic and ties are broken on a total order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace spsim::kernels {

/// Inner product accumulated in double, left to right.
double dot(std::span<const float> a, std::span<const float> b);

double l2_norm(std::span<const float> a);

/// dot / (na * nb) clamped to [-1, 1].
inline double cosine_from(double dot_ab, double na, double nb) {
    return std::clamp(dot_ab / (na * nb), -1.0, 1.0);
}

/// Row-major dense block of equal-length float vectors with cached norms.
struct MatrixView {
    std::span<const float> data;
    std::size_t dim = 0;
    std::span<const double> norms;

    std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const float> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

struct Scored {
    double score;
    std::uint32_t offset;
};

/// Higher score first; equal scores by lower offset. Offsets are assigned in doc-id
/// order, so this is the "ties by ascending doc id" rule.
inline bool ranks_before(const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.offset < b.offset;
}

/// Cosine of the query against every row.
void score_all_serial(std::span<const float> query, double qnorm, const MatrixView& m,
                      std::span<double> out);
void score_all_parallel(std::span<const float> query, double qnorm, const MatrixView& m,
                        std::span<double> out);

/// Top-k rows by ranks_before among rows where keep(row) is true.
template <typename Keep>
std::vector<Scored> top_k_serial(std::span<const float> query, double qnorm, const MatrixView& m,
                                 std::size_t k, Keep&& keep) {
    std::vector<Scored> heap;  // worst element on top
    heap.reserve(k + 1);
    auto worse_on_top = [](const Scored& a, const Scored& b) { return ranks_before(a, b); };
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const auto off = static_cast<std::uint32_t>(i);
        if (!keep(off)) continue;
        const Scored s{cosine_from(dot(query, m.row(i)), qnorm, m.norms[i]), off};
        if (heap.size() < k) {
            heap.push_back(s);
            std::push_heap(heap.begin(), heap.end(), worse_on_top);
        } else if (k > 0 && ranks_before(s, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), worse_on_top);
            heap.back() = s;
            std::push_heap(heap.begin(), heap.end(), worse_on_top);
        }
    }
    std::sort(heap.begin(), heap.end(), ranks_before);
    return heap;
}

/// Same contract as top_k_serial; rows are split into fixed chunks scanned in parallel
/// and the per-chunk winners merged. The comparison is a total order, so the merge is
/// independent of chunking and thread count.
template <typename Keep>
std::vector<Scored> top_k_parallel(std::span<const float> query, double qnorm, const MatrixView& m,
                                   std::size_t k, Keep&& keep) {
    const std::size_t n = m.rows();
    constexpr std::size_t kChunk = 2048;
    if (n <= kChunk || k == 0) return top_k_serial(query, qnorm, m, k, keep);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<Scored>> partial(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        MatrixView sub{m.data.subspan(lo * m.dim, (hi - lo) * m.dim), m.dim,
                       m.norms.subspan(lo, hi - lo)};
        auto local = top_k_serial(query, qnorm, sub, k, [&](std::uint32_t off) {
            return keep(static_cast<std::uint32_t>(lo + off));
        });
        for (auto& s : local) s.offset += static_cast<std::uint32_t>(lo);
        partial[c] = std::move(local);
    }
    std::vector<Scored> merged;
    for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
    const std::size_t take = std::min(k, merged.size());
    std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(take), merged.end(),
                      ranks_before);
    merged.resize(take);
    return merged;
}

/// Norm of every row.
std::vector<double> row_norms_serial(std::span<const float> data, std::size_t dim);
std::vector<double> row_norms_parallel(std::span<const float> data, std::size_t dim);

}  // namespace spsim::kernels
