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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spsim/common.hpp"
#include "spsim/corpus.hpp"

namespace spsim::embed {

inline constexpr std::size_t kDefaultDim = 768;
inline constexpr double kUnitTolerance = 1e-6;

/// Dense float32 vector with no NaN/Inf entries.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<float> values);

    /// Scales accumulated values to unit length. Throws InputError on a zero vector.
    static EmbeddingVector normalized(std::span<const double> values);

    std::span<const float> values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    double norm() const;

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<float> values_;
};

using Embedder = std::function<EmbeddingVector(std::string_view)>;

/// Lowercased alphanumeric runs; bytes >= 0x80 are kept inside tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Signed feature hashing: each token lands on a seeded coordinate with a seeded sign,
/// counts accumulate and the result is L2-normalized. Throws InputError
/// ("empty token stream") when the text has no tokens.
EmbeddingVector toy_embed(std::string_view text, std::uint64_t seed, std::size_t dim = kDefaultDim);

Embedder make_toy_embedder(std::uint64_t seed, std::size_t dim = kDefaultDim);

enum class Pooling { kCls, kMean };

Pooling parse_pooling(std::string_view s);
const char* to_string(Pooling p);

/// Splits after '.', '!' or '?' when followed by whitespace. Pieces are trimmed and
/// pieces without any alphanumeric character are dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// cls: one embedder call on the full model input. mean: one call per sentence,
/// arithmetic mean, re-normalized.
EmbeddingVector embed_document(const corpus::Document& doc, Pooling pooling, const Embedder& embedder);

class StoreFormatError : public InputError {
public:
    using InputError::InputError;
};

class StoreDimensionError : public InputError {
public:
    using InputError::InputError;
};

/// id -> vector map with a shared dimension. Rows keep insertion order.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(std::size_t dim, std::string provenance);

    std::size_t dim() const { return dim_; }
    const std::string& provenance() const { return provenance_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    /// Throws InputError on a duplicate id or dimension mismatch.
    void add(std::string id, std::span<const float> values);

    const std::vector<std::string>& ids() const { return ids_; }
    std::span<const float> data() const { return data_; }
    std::span<const float> row(std::size_t i) const;
    std::optional<std::size_t> find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id).has_value(); }

    /// Vector for an id; throws InputError naming a missing id.
    std::span<const float> vector(std::string_view id) const;

    /// FNV-1a over dim, ids and vector bytes in row order (provenance excluded).
    std::uint64_t content_checksum() const;

    bool operator==(const EmbeddingStore& o) const {
        return dim_ == o.dim_ && provenance_ == o.provenance_ && ids_ == o.ids_ && data_ == o.data_;
    }

private:
    std::size_t dim_ = 0;
    std::string provenance_;
    std::vector<std::string> ids_;
    std::vector<float> data_;
    std::unordered_map<std::string, std::size_t> row_of_;
};

inline constexpr std::string_view kStoreMagic{"SPSIM1\0", 7};

std::string serialize_store(const EmbeddingStore& store);
EmbeddingStore deserialize_store(std::string_view bytes);

void save_store(const EmbeddingStore& store, const std::string& path);

/// Throws StoreFormatError (bad magic or trailing bytes), StoreDimensionError (dim 0)
/// or TruncatedError (short payload, with expected and actual byte counts).
EmbeddingStore load_store(const std::string& path);

struct ImportResult {
    EmbeddingStore store;
    std::size_t renormalized = 0;
};

inline constexpr double kImportNormTolerance = 1e-4;

/// Ids are one per line. Vectors are CSV when the path ends in ".csv", otherwise a
/// headerless block of little-endian float32 rows. Rows whose norm deviates from 1 by
/// more than 1e-4 are re-normalized and counted.
ImportResult import_precomputed(const std::string& vectors_path, const std::string& ids_path);

/// Embeds every document into a store (rows in document order). The parallel variant
/// fills rows concurrently and is bit-identical to the serial one.
EmbeddingStore embed_documents_serial(std::span<const corpus::Document> docs, Pooling pooling,
                                      const Embedder& embedder, std::size_t dim, std::string provenance);
EmbeddingStore embed_documents_parallel(std::span<const corpus::Document> docs, Pooling pooling,
                                        const Embedder& embedder, std::size_t dim, std::string provenance);

}  // namespace spsim::embed
