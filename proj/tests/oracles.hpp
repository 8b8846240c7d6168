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

// Independent reference implementations. These are deliberately naive: quadratic
// loops, full sorts and long-double normal equations, sharing no code with the
// library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "spsim/common.hpp"
#include "spsim/rng.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Ranking metrics, straight from the definitions.

inline bool is_rel(const std::string& id, std::span<const std::string> relevant) {
    for (const auto& r : relevant)
        if (r == id) return true;
    return false;
}

inline std::size_t first_relevant(std::span<const std::string> ordered, std::span<const std::string> relevant) {
    for (std::size_t i = 0; i < ordered.size(); ++i)
        if (is_rel(ordered[i], relevant)) return i + 1;
    return 0;
}

inline double precision_at(std::span<const std::string> ordered, std::span<const std::string> relevant,
                           std::size_t k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += is_rel(ordered[i], relevant);
    return static_cast<double>(hits) / static_cast<double>(k);
}

inline double average_precision(std::span<const std::string> ordered, std::span<const std::string> relevant) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= ordered.size(); ++k)
        if (is_rel(ordered[k - 1], relevant)) sum += precision_at(ordered, relevant, k);
    return sum / static_cast<double>(relevant.size());
}

inline double rr_at10(std::span<const std::string> ordered, std::span<const std::string> relevant) {
    const auto r = first_relevant(ordered, relevant);
    return r >= 1 && r <= 10 ? 1.0 / static_cast<double>(r) : 0.0;
}

// ---------------------------------------------------------------------------
// Brute-force cosine search.

struct Hit {
    std::string id;
    double score;
};

inline double cosine(std::span<const float> a, std::span<const float> b) {
    double d = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    for (std::size_t i = 0; i < a.size(); ++i) na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    for (std::size_t i = 0; i < b.size(); ++i) nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
    double c = d / (std::sqrt(na) * std::sqrt(nb));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

struct Row {
    std::string id;
    std::vector<float> v;
    int year = 0;
    spsim::DocKind kind = spsim::DocKind::kPaper;
};

struct Filter {
    std::optional<int> year_min, year_max;
    std::optional<spsim::DocKind> kind;
};

inline std::vector<Hit> search(const std::vector<Row>& rows, std::span<const float> q, std::size_t k,
                               const Filter& f, const std::set<std::string>& exclude = {}) {
    std::vector<Hit> all;
    for (const auto& r : rows) {
        if (f.year_min && r.year < *f.year_min) continue;
        if (f.year_max && r.year > *f.year_max) continue;
        if (f.kind && r.kind != *f.kind) continue;
        if (exclude.count(r.id)) continue;
        all.push_back({r.id, cosine(q, r.v)});
    }
    std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// ---------------------------------------------------------------------------
// Least squares via normal equations in long double with Gauss-Jordan elimination.

inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    const std::size_t p = x.front().size();
    std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
    for (std::size_t r = 0; r < x.size(); ++r)
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) a[i][j] += static_cast<long double>(x[r][i]) * x[r][j];
            a[i][p] += static_cast<long double>(x[r][i]) * y[r];
        }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= p; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t i = 0; i < p; ++i) beta[i] = static_cast<double>(a[i][p] / a[i][i]);
    return beta;
}

/// diag((X'X)^-1), by Gauss-Jordan on [X'X | I] in long double.
inline std::vector<double> xtx_inverse_diagonal(const std::vector<std::vector<double>>& x) {
    const std::size_t p = x.front().size();
    std::vector<std::vector<long double>> a(p, std::vector<long double>(2 * p, 0.0L));
    for (const auto& row : x)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) a[i][j] += static_cast<long double>(row[i]) * row[j];
    for (std::size_t i = 0; i < p; ++i) a[i][p + i] = 1.0L;
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        const long double d = a[c][c];
        for (auto& v : a[c]) v /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            for (std::size_t j = 0; j < 2 * p; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> diag(p);
    for (std::size_t i = 0; i < p; ++i) diag[i] = static_cast<double>(a[i][p + i]);
    return diag;
}

inline double mean(std::span<const double> v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

// ---------------------------------------------------------------------------
// Random-ranking baseline: mean AP when each task's candidates are shuffled uniformly.

struct TaskIds {
    std::vector<std::string> candidates;
    std::vector<std::string> relevant;
};

inline double monte_carlo_random_map(const std::vector<TaskIds>& tasks, std::size_t shuffles, std::uint64_t seed) {
    spsim::Rng rng(seed);
    long double total = 0.0L;
    for (std::size_t s = 0; s < shuffles; ++s) {
        long double sum = 0.0L;
        for (const auto& t : tasks) {
            auto order = t.candidates;
            rng.shuffle(order);
            sum += average_precision(order, t.relevant);
        }
        total += sum / static_cast<long double>(tasks.size());
    }
    return static_cast<double>(total / static_cast<long double>(shuffles));
}

// ---------------------------------------------------------------------------
// Summary statistics for rank tables.

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double sample_sd(std::span<const double> v) {
    const double m = mean(v);
    long double ss = 0.0L;
    for (double x : v) ss += (x - m) * (x - m);
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

}  // namespace oracle
