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

#include "spsim/index.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <omp.h>

#include "spsim/binary_io.hpp"
#include "spsim/hash.hpp"

namespace spsim::index {

void SearchFilter::validate() const {
    if (year_min && year_max && *year_min > *year_max)
        throw ConfigError(fmt::format("filter year_min {} exceeds year_max {}", *year_min, *year_max));
}

IndexMode parse_index_mode(std::string_view s) {
    if (s == "exact") return IndexMode::kExact;
    if (s == "hnsw") return IndexMode::kHnsw;
    throw ConfigError(fmt::format("unknown index mode '{}' (expected exact or hnsw)", s));
}

const char* to_string(IndexMode m) { return m == IndexMode::kExact ? "exact" : "hnsw"; }

MetaMap meta_from_documents(std::span<const corpus::Document> docs) {
    MetaMap meta;
    meta.reserve(docs.size());
    for (const auto& d : docs) meta.emplace(d.id, DocMeta{d.pub_year(), d.kind});
    return meta;
}

double cosine(std::span<const float> v, std::span<const float> w) {
    if (v.size() != w.size())
        throw InputError(fmt::format("cosine: dimension mismatch ({} vs {})", v.size(), w.size()));
    const double nv = kernels::l2_norm(v);
    const double nw = kernels::l2_norm(w);
    if (nv == 0.0 || nw == 0.0) throw InputError("cosine: zero vector");
    return kernels::cosine_from(kernels::dot(v, w), nv, nw);
}

std::span<const float> Index::vector(std::size_t row) const {
    return std::span<const float>(data_).subspan(row * dim_, dim_);
}

std::optional<std::size_t> Index::row_of(std::string_view id) const {
    auto it = row_of_.find(std::string(id));
    if (it == row_of_.end()) return std::nullopt;
    return it->second;
}

void Index::attach_store(const embed::EmbeddingStore& store) {
    dim_ = store.dim();
    ids_ = store.ids();
    std::sort(ids_.begin(), ids_.end());
    row_of_.clear();
    row_of_.reserve(ids_.size());
    data_.resize(ids_.size() * dim_);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        row_of_.emplace(ids_[i], i);
        auto src = store.vector(ids_[i]);
        std::copy(src.begin(), src.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    }
    norms_ = kernels::row_norms_parallel(data_, dim_);
    for (std::size_t i = 0; i < norms_.size(); ++i)
        if (norms_[i] == 0.0) throw InputError(fmt::format("zero vector for '{}' cannot be indexed", ids_[i]));
    store_checksum_ = store.content_checksum();
}

Index Index::build(const embed::EmbeddingStore& store, const MetaMap& meta, const IndexConfig& config) {
    if (config.mode == IndexMode::kHnsw && config.hnsw_m < 2) throw ConfigError("hnsw_m must be at least 2");
    Index idx;
    idx.config_ = config;
    idx.attach_store(store);
    idx.meta_.reserve(idx.ids_.size());
    for (const auto& id : idx.ids_) {
        auto it = meta.find(id);
        if (it == meta.end()) throw InputError(fmt::format("no metadata for indexed id '{}'", id));
        idx.meta_.push_back(it->second);
    }
    if (config.mode == IndexMode::kHnsw)
        idx.graph_.build(idx.view(), idx.ids_, {config.hnsw_m, config.hnsw_ef_construction, config.seed});
    return idx;
}

void Index::check_query(std::span<const float> query, std::size_t k) const {
    if (k == 0) throw ConfigError("k must be positive");
    if (!ids_.empty() && query.size() != dim_)
        throw InputError(fmt::format("query has dim {}, index has {}", query.size(), dim_));
}

std::vector<std::uint32_t> Index::excluded_rows(const IdSet* exclude) const {
    std::vector<std::uint32_t> rows;
    if (!exclude) return rows;
    for (const auto& id : *exclude)
        if (auto r = row_of(id)) rows.push_back(static_cast<std::uint32_t>(*r));
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::vector<Neighbor> Index::to_neighbors(const std::vector<kernels::Scored>& hits) const {
    std::vector<Neighbor> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.push_back({ids_[h.offset], h.score});
    return out;
}

std::vector<Neighbor> Index::search(std::span<const float> query, std::size_t k, const SearchFilter& filter,
                                    const IdSet* exclude) const {
    check_query(query, k);
    filter.validate();
    if (ids_.empty()) return {};
    const double qnorm = kernels::l2_norm(query);
    if (qnorm == 0.0) throw InputError("query is a zero vector");
    const auto excluded = excluded_rows(exclude);
    auto keep = [&](std::uint32_t row) {
        const auto& m = meta_[row];
        return filter.matches(m.pub_year, m.kind) && !std::binary_search(excluded.begin(), excluded.end(), row);
    };
    if (config_.mode == IndexMode::kExact) return to_neighbors(kernels::top_k_parallel(query, qnorm, view(), k, keep));
    const std::size_t overfetch = (4 * k + 2) / 3;
    const std::size_t ef = std::max<std::size_t>({config_.hnsw_ef_search, k, overfetch});
    return to_neighbors(graph_.search(query, qnorm, view(), k, ef, keep));
}

std::vector<Neighbor> Index::search_exact_serial(std::span<const float> query, std::size_t k,
                                                 const SearchFilter& filter, const IdSet* exclude) const {
    check_query(query, k);
    filter.validate();
    if (ids_.empty()) return {};
    const double qnorm = kernels::l2_norm(query);
    if (qnorm == 0.0) throw InputError("query is a zero vector");
    const auto excluded = excluded_rows(exclude);
    auto keep = [&](std::uint32_t row) {
        const auto& m = meta_[row];
        return filter.matches(m.pub_year, m.kind) && !std::binary_search(excluded.begin(), excluded.end(), row);
    };
    return to_neighbors(kernels::top_k_serial(query, qnorm, view(), k, keep));
}

// ---------------------------------------------------------------------------

std::string Index::serialize() const {
    ByteWriter w;
    w.put_bytes(kIndexMagic);
    w.put(static_cast<std::uint8_t>(config_.mode));
    w.put(config_.hnsw_m);
    w.put(config_.hnsw_ef_construction);
    w.put(config_.hnsw_ef_search);
    w.put(config_.seed);
    w.put(store_checksum_);
    w.put(static_cast<std::uint64_t>(ids_.size()));
    w.put(static_cast<std::uint32_t>(dim_));
    for (const auto& m : meta_) {
        w.put(static_cast<std::int32_t>(m.pub_year));
        w.put(static_cast<std::uint8_t>(m.kind));
    }
    const bool has_graph = config_.mode == IndexMode::kHnsw && !ids_.empty();
    w.put(has_graph ? graph_.entry_point() : HnswGraph::kNone);
    w.put(static_cast<std::int32_t>(has_graph ? graph_.max_level() : -1));
    if (has_graph) {
        for (std::uint32_t node = 0; node < graph_.size(); ++node) {
            const int lvl = graph_.level(node);
            w.put(static_cast<std::uint8_t>(lvl));
            for (int layer = 0; layer <= lvl; ++layer) {
                const auto& links = graph_.links(node, layer);
                w.put(static_cast<std::uint32_t>(links.size()));
                w.put_span(std::span<const std::uint32_t>(links));
            }
        }
    }
    return w.bytes();
}

Index Index::deserialize(std::string_view bytes, const embed::EmbeddingStore& store) {
    if (bytes.size() < kIndexMagic.size() || bytes.substr(0, kIndexMagic.size()) != kIndexMagic)
        throw InputError("not an index file (magic bytes mismatch)");
    ByteReader r(bytes, "index");
    r.get_bytes(kIndexMagic.size());
    Index idx;
    const auto mode = r.get<std::uint8_t>();
    if (mode > 1) throw InputError(fmt::format("index declares unknown mode {}", mode));
    idx.config_.mode = static_cast<IndexMode>(mode);
    idx.config_.hnsw_m = r.get<std::uint32_t>();
    idx.config_.hnsw_ef_construction = r.get<std::uint32_t>();
    idx.config_.hnsw_ef_search = r.get<std::uint32_t>();
    idx.config_.seed = r.get<std::uint64_t>();
    const auto checksum = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    const auto dim = r.get<std::uint32_t>();
    if (checksum != store.content_checksum())
        throw InputError(fmt::format("store checksum {} does not match the {} recorded in the index",
                                     to_hex(store.content_checksum()), to_hex(checksum)));
    if (count != store.size() || dim != store.dim())
        throw InputError("index shape does not match the embedding store");
    idx.attach_store(store);
    idx.meta_.resize(static_cast<std::size_t>(count));
    for (auto& m : idx.meta_) {
        m.pub_year = r.get<std::int32_t>();
        const auto kind = r.get<std::uint8_t>();
        if (kind > 1) throw InputError("index metadata holds an unknown document kind");
        m.kind = static_cast<DocKind>(kind);
    }
    const auto entry = r.get<std::uint32_t>();
    const auto max_level = r.get<std::int32_t>();
    if (entry != HnswGraph::kNone) {
        if (entry >= count) throw InputError("index entry point out of range");
        std::vector<int> levels(static_cast<std::size_t>(count));
        std::vector<std::vector<std::vector<std::uint32_t>>> links(static_cast<std::size_t>(count));
        for (std::size_t node = 0; node < count; ++node) {
            levels[node] = r.get<std::uint8_t>();
            links[node].resize(static_cast<std::size_t>(levels[node]) + 1);
            for (auto& layer : links[node]) {
                const auto n = r.get<std::uint32_t>();
                r.need(std::uint64_t{n} * sizeof(std::uint32_t));
                layer.resize(n);
                r.get_into(std::span<std::uint32_t>(layer));
                for (auto x : layer)
                    if (x >= count) throw InputError("index adjacency list references a missing row");
            }
        }
        idx.graph_.assign({idx.config_.hnsw_m, idx.config_.hnsw_ef_construction, idx.config_.seed}, entry,
                          max_level, std::move(levels), std::move(links));
    }
    if (r.remaining() != 0) throw InputError(fmt::format("{} trailing bytes after index payload", r.remaining()));
    return idx;
}

void Index::save(const std::string& path) const { write_file(path, serialize()); }

Index Index::load(const std::string& path, const embed::EmbeddingStore& store) {
    return deserialize(read_file(path), store);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Neighbor>> batch_search(const Index& index, std::span<const BatchQuery> queries,
                                                std::size_t k, int threads) {
    if (k == 0) throw ConfigError("k must be positive");
    std::vector<std::vector<Neighbor>> out(queries.size());
    std::vector<std::exception_ptr> failures(queries.size());
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(queries.size()); ++i) {
        const auto q = static_cast<std::size_t>(i);
        try {
            out[q] = index.search(queries[q].vector, k, queries[q].filter);
        } catch (...) {
            failures[q] = std::current_exception();
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

std::vector<std::vector<Neighbor>> batch_search_serial(const Index& index, std::span<const BatchQuery> queries,
                                                       std::size_t k) {
    std::vector<std::vector<Neighbor>> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(index.search(q.vector, k, q.filter));
    return out;
}

}  // namespace spsim::index
