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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "spsim/kernels.hpp"

namespace spsim::index {

/// Hierarchical navigable small-world graph over a fixed, read-only set of vectors,
/// scored by cosine similarity (higher is closer). Node i is row i of the vector block.
///
/// Construction is single-threaded and fully deterministic: nodes are inserted in row
/// order, each node's level comes from a seeded hash of its id, and every comparison
/// breaks score ties on the node offset.
class HnswGraph {
public:
    static constexpr std::uint32_t kNone = 0xffffffffU;

    struct Params {
        std::size_t m = 16;
        std::size_t ef_construction = 200;
        std::uint64_t seed = 0;

        bool operator==(const Params&) const = default;
    };

    HnswGraph() = default;

    void build(const kernels::MatrixView& vectors, std::span<const std::string> ids, Params params);

    std::size_t size() const { return levels_.size(); }
    std::uint32_t entry_point() const { return entry_; }
    int max_level() const { return max_level_; }
    int level(std::uint32_t node) const { return levels_[node]; }
    const std::vector<std::uint32_t>& links(std::uint32_t node, int layer) const {
        return links_[node][static_cast<std::size_t>(layer)];
    }

    /// Restores a graph from persisted parts (no validation beyond shape).
    void assign(Params params, std::uint32_t entry, int max_level, std::vector<int> levels,
                std::vector<std::vector<std::vector<std::uint32_t>>> links);

    /// Level drawn from the seeded hash of an id: floor(-ln(u) / ln(m)).
    static int level_for(const std::string& id, std::uint64_t seed, std::size_t m);

    /// Best-first search. Upper layers are walked greedily without the predicate; on
    /// layer 0 the beam of width ef explores through every node but only nodes with
    /// keep(node) == true enter the result set. Returns up to k results, best first.
    template <typename Keep>
    std::vector<kernels::Scored> search(std::span<const float> query, double qnorm,
                                        const kernels::MatrixView& vectors, std::size_t k, std::size_t ef,
                                        Keep&& keep) const;

    bool operator==(const HnswGraph&) const = default;

private:
    using Scored = kernels::Scored;

    // Max-heap on ranks_before (best on top) and its inverse.
    struct BestFirst {
        bool operator()(const Scored& a, const Scored& b) const { return kernels::ranks_before(b, a); }
    };
    struct WorstFirst {
        bool operator()(const Scored& a, const Scored& b) const { return kernels::ranks_before(a, b); }
    };

    static Scored score(std::span<const float> query, double qnorm, const kernels::MatrixView& v,
                        std::uint32_t node) {
        return {kernels::cosine_from(kernels::dot(query, v.row(node)), qnorm, v.norms[node]), node};
    }

    Scored greedy_descend(std::span<const float> query, double qnorm, const kernels::MatrixView& v,
                          Scored ep, int from_layer, int to_layer) const;

    template <typename Keep>
    std::vector<Scored> search_layer(std::span<const float> query, double qnorm, const kernels::MatrixView& v,
                                     const std::vector<Scored>& entry, std::size_t ef, int layer,
                                     Keep&& keep) const;

    std::vector<std::uint32_t> select_neighbors(const kernels::MatrixView& v, std::vector<Scored> candidates,
                                                std::size_t m) const;

    std::size_t max_links(int layer) const { return layer == 0 ? 2 * params_.m : params_.m; }

    Params params_{};
    std::uint32_t entry_ = kNone;
    int max_level_ = -1;
    std::vector<int> levels_;
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;
};

template <typename Keep>
std::vector<kernels::Scored> HnswGraph::search_layer(std::span<const float> query, double qnorm,
                                                     const kernels::MatrixView& v,
                                                     const std::vector<Scored>& entry, std::size_t ef,
                                                     int layer, Keep&& keep) const {
    std::vector<std::uint8_t> visited(levels_.size(), 0);
    std::priority_queue<Scored, std::vector<Scored>, BestFirst> candidates;
    std::priority_queue<Scored, std::vector<Scored>, WorstFirst> results;
    for (const auto& e : entry) {
        if (visited[e.offset]) continue;
        visited[e.offset] = 1;
        candidates.push(e);
        if (keep(e.offset)) results.push(e);
    }
    while (results.size() > ef) results.pop();
    while (!candidates.empty()) {
        const Scored c = candidates.top();
        // Once the result beam is full, nothing worse than its tail can improve it.
        if (results.size() >= ef && kernels::ranks_before(results.top(), c)) break;
        candidates.pop();
        for (std::uint32_t nb : links_[c.offset][static_cast<std::size_t>(layer)]) {
            if (visited[nb]) continue;
            visited[nb] = 1;
            const Scored s = score(query, qnorm, v, nb);
            if (results.size() < ef || kernels::ranks_before(s, results.top())) {
                candidates.push(s);
                if (keep(nb)) {
                    results.push(s);
                    if (results.size() > ef) results.pop();
                }
            }
        }
    }
    std::vector<Scored> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

template <typename Keep>
std::vector<kernels::Scored> HnswGraph::search(std::span<const float> query, double qnorm,
                                               const kernels::MatrixView& vectors, std::size_t k, std::size_t ef,
                                               Keep&& keep) const {
    if (entry_ == kNone || k == 0) return {};
    Scored ep = greedy_descend(query, qnorm, vectors, score(query, qnorm, vectors, entry_), max_level_, 1);
    auto found = search_layer(query, qnorm, vectors, {ep}, std::max(ef, k), 0, keep);
    if (found.size() > k) found.resize(k);
    return found;
}

}  // namespace spsim::index
