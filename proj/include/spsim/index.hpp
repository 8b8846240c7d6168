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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spsim/common.hpp"
#include "spsim/embed.hpp"
#include "spsim/hnsw.hpp"

namespace spsim::index {

struct Neighbor {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// Inclusive publication-year window plus an optional document kind.
struct SearchFilter {
    std::optional<int> year_min;
    std::optional<int> year_max;
    std::optional<DocKind> kind;

    /// Throws ConfigError when year_min > year_max.
    void validate() const;

    bool matches(int year, DocKind k) const {
        if (year_min && year < *year_min) return false;
        if (year_max && year > *year_max) return false;
        if (kind && k != *kind) return false;
        return true;
    }
};

enum class IndexMode : std::uint8_t { kExact = 0, kHnsw = 1 };

IndexMode parse_index_mode(std::string_view s);
const char* to_string(IndexMode m);

struct IndexConfig {
    IndexMode mode = IndexMode::kExact;
    std::uint32_t hnsw_m = 16;
    std::uint32_t hnsw_ef_construction = 200;
    std::uint32_t hnsw_ef_search = 128;
    std::uint64_t seed = 0;

    bool operator==(const IndexConfig&) const = default;
};

struct DocMeta {
    int pub_year = 0;
    DocKind kind = DocKind::kPaper;
};

using MetaMap = std::unordered_map<std::string, DocMeta>;

MetaMap meta_from_documents(std::span<const corpus::Document> docs);

/// <v,w> / (|v| |w|) clamped to [-1, 1]. Throws InputError on a zero vector or a
/// dimension mismatch.
double cosine(std::span<const float> v, std::span<const float> w);

using IdSet = std::unordered_set<std::string>;

/// Immutable cosine k-NN index over an embedding store. Rows are kept sorted by doc id,
/// so score ties resolve to the lexicographically smaller id. Safe for any number of
/// concurrent readers.
class Index {
public:
    Index() = default;

    /// Throws InputError naming the first store id without metadata.
    static Index build(const embed::EmbeddingStore& store, const MetaMap& meta, const IndexConfig& config);

    std::size_t size() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }
    const IndexConfig& config() const { return config_; }
    std::uint64_t store_checksum() const { return store_checksum_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const HnswGraph& graph() const { return graph_; }
    const DocMeta& meta(std::size_t row) const { return meta_[row]; }
    std::span<const float> vector(std::size_t row) const;
    std::optional<std::size_t> row_of(std::string_view id) const;

    /// Up to k neighbors passing the filter and not in exclude, best first. Exact mode
    /// returns the true top-k; hnsw mode checks the filter during traversal with a beam
    /// of max(ef_search, ceil(4k/3)). Throws ConfigError when k == 0 and InputError on a
    /// query dimension mismatch.
    std::vector<Neighbor> search(std::span<const float> query, std::size_t k, const SearchFilter& filter = {},
                                 const IdSet* exclude = nullptr) const;

    /// Exhaustive single-threaded scan, independent of mode; the reference for search().
    std::vector<Neighbor> search_exact_serial(std::span<const float> query, std::size_t k,
                                              const SearchFilter& filter = {}, const IdSet* exclude = nullptr) const;

    /// Layout: "SPIDX1\0", config block, store checksum, row count, dim, per-row
    /// (year, kind), then the graph as u32 little-endian adjacency lists.
    std::string serialize() const;

    /// Rebuilds an index against its store; throws InputError if the store checksum
    /// differs from the one recorded at build time.
    static Index deserialize(std::string_view bytes, const embed::EmbeddingStore& store);

    void save(const std::string& path) const;
    static Index load(const std::string& path, const embed::EmbeddingStore& store);

    bool operator==(const Index& o) const {
        return config_ == o.config_ && ids_ == o.ids_ && data_ == o.data_ && graph_ == o.graph_ &&
               store_checksum_ == o.store_checksum_;
    }

private:
    kernels::MatrixView view() const { return {data_, dim_, norms_}; }
    std::vector<std::uint32_t> excluded_rows(const IdSet* exclude) const;
    void attach_store(const embed::EmbeddingStore& store);
    std::vector<Neighbor> to_neighbors(const std::vector<kernels::Scored>& hits) const;
    void check_query(std::span<const float> query, std::size_t k) const;

    IndexConfig config_{};
    std::size_t dim_ = 0;
    std::uint64_t store_checksum_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> row_of_;
    std::vector<float> data_;
    std::vector<double> norms_;
    std::vector<DocMeta> meta_;
    HnswGraph graph_;
};

inline constexpr std::string_view kIndexMagic{"SPIDX1\0", 7};

struct BatchQuery {
    std::vector<float> vector;
    SearchFilter filter;
};

/// Runs every query; output i answers query i regardless of scheduling. threads == 0
/// uses the OpenMP default.
std::vector<std::vector<Neighbor>> batch_search(const Index& index, std::span<const BatchQuery> queries,
                                                std::size_t k, int threads = 0);
std::vector<std::vector<Neighbor>> batch_search_serial(const Index& index, std::span<const BatchQuery> queries,
                                                       std::size_t k);

}  // namespace spsim::index
