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

#include "spsim/hnsw.hpp"

#include <stdexcept>

#include "spsim/hash.hpp"

namespace spsim::index {

int HnswGraph::level_for(const std::string& id, std::uint64_t seed, std::size_t m) {
    const std::uint64_t h = seeded_hash(id, seed ^ 0x48534e57ULL);
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u <= 0.0) u = 0x1.0p-53;
    const double ml = 1.0 / std::log(static_cast<double>(std::max<std::size_t>(m, 2)));
    return std::min(static_cast<int>(std::floor(-std::log(u) * ml)), 32);
}

kernels::Scored HnswGraph::greedy_descend(std::span<const float> query, double qnorm, const kernels::MatrixView& v,
                                          Scored ep, int from_layer, int to_layer) const {
    for (int layer = from_layer; layer >= to_layer; --layer) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::uint32_t nb : links_[ep.offset][static_cast<std::size_t>(layer)]) {
                const Scored s = score(query, qnorm, v, nb);
                if (kernels::ranks_before(s, ep)) {
                    ep = s;
                    improved = true;
                }
            }
        }
    }
    return ep;
}

// Keeps a candidate only if it is closer to the base node than to every neighbor
// already kept; candidates arrive best first.
std::vector<std::uint32_t> HnswGraph::select_neighbors(const kernels::MatrixView& v, std::vector<Scored> candidates,
                                                       std::size_t m) const {
    std::sort(candidates.begin(), candidates.end(), kernels::ranks_before);
    std::vector<std::uint32_t> kept;
    kept.reserve(m);
    for (const auto& c : candidates) {
        if (kept.size() >= m) break;
        bool diverse = true;
        for (std::uint32_t r : kept) {
            const double sim_cr =
                kernels::cosine_from(kernels::dot(v.row(c.offset), v.row(r)), v.norms[c.offset], v.norms[r]);
            if (sim_cr > c.score) {
                diverse = false;
                break;
            }
        }
        if (diverse) kept.push_back(c.offset);
    }
    return kept;
}

void HnswGraph::build(const kernels::MatrixView& v, std::span<const std::string> ids, Params params) {
    if (params.m < 2) throw std::invalid_argument("hnsw m must be at least 2");
    params_ = params;
    const std::size_t n = v.rows();
    levels_.assign(n, 0);
    links_.assign(n, {});
    entry_ = kNone;
    max_level_ = -1;
    for (std::size_t i = 0; i < n; ++i) {
        const int lvl = level_for(ids[i], params.seed, params.m);
        levels_[i] = lvl;
        links_[i].assign(static_cast<std::size_t>(lvl) + 1, {});
    }
    auto always = [](std::uint32_t) { return true; };
    for (std::size_t i = 0; i < n; ++i) {
        const auto q = static_cast<std::uint32_t>(i);
        const int lvl = levels_[i];
        if (entry_ == kNone) {
            entry_ = q;
            max_level_ = lvl;
            continue;
        }
        const auto query = v.row(q);
        const double qnorm = v.norms[q];
        Scored ep = score(query, qnorm, v, entry_);
        if (max_level_ > lvl) ep = greedy_descend(query, qnorm, v, ep, max_level_, lvl + 1);
        std::vector<Scored> entry{ep};
        for (int layer = std::min(lvl, max_level_); layer >= 0; --layer) {
            auto found = search_layer(query, qnorm, v, entry, params.ef_construction, layer, always);
            auto chosen = select_neighbors(v, found, params.m);
            auto& mine = links_[q][static_cast<std::size_t>(layer)];
            mine = chosen;
            const std::size_t cap = max_links(layer);
            for (std::uint32_t nb : chosen) {
                auto& theirs = links_[nb][static_cast<std::size_t>(layer)];
                theirs.push_back(q);
                if (theirs.size() > cap) {
                    std::vector<Scored> cand;
                    cand.reserve(theirs.size());
                    for (std::uint32_t x : theirs)
                        cand.push_back({kernels::cosine_from(kernels::dot(v.row(nb), v.row(x)), v.norms[nb],
                                                             v.norms[x]),
                                        x});
                    theirs = select_neighbors(v, std::move(cand), cap);
                }
            }
            entry = std::move(found);
        }
        if (lvl > max_level_) {
            max_level_ = lvl;
            entry_ = q;
        }
    }
}

void HnswGraph::assign(Params params, std::uint32_t entry, int max_level, std::vector<int> levels,
                       std::vector<std::vector<std::vector<std::uint32_t>>> links) {
    params_ = params;
    entry_ = entry;
    max_level_ = max_level;
    levels_ = std::move(levels);
    links_ = std::move(links);
}

}  // namespace spsim::index
