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

#include "spsim/embed.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spsim/binary_io.hpp"
#include "spsim/hash.hpp"
#include "spsim/kernels.hpp"

namespace spsim::embed {

namespace {

bool is_alnum_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\n\r\f\v");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\n\r\f\v");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
    for (float v : values_)
        if (!std::isfinite(v)) throw InputError("embedding contains NaN or Inf");
}

EmbeddingVector EmbeddingVector::normalized(std::span<const double> values) {
    double sq = 0.0;
    for (double v : values) sq += v * v;
    const double n = std::sqrt(sq);
    if (!(n > 0.0) || !std::isfinite(n)) throw InputError("cannot normalize a zero or non-finite vector");
    std::vector<float> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = static_cast<float>(values[i] / n);
    return EmbeddingVector(std::move(out));
}

double EmbeddingVector::norm() const { return kernels::l2_norm(values_); }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_alnum_byte(c)) {
            cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : ch;
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

EmbeddingVector toy_embed(std::string_view text, std::uint64_t seed, std::size_t dim) {
    if (dim < 2) throw ConfigError("toy_embed: dim must be at least 2");
    const auto tokens = tokenize(text);
    if (tokens.empty()) throw InputError("empty token stream");
    std::vector<double> acc(dim, 0.0);
    for (const auto& t : tokens) {
        const std::uint64_t h = seeded_hash(t, seed);
        const std::size_t coord = static_cast<std::size_t>((h & 0x7fffffffffffffffULL) % dim);
        acc[coord] += (h >> 63) ? -1.0 : 1.0;
    }
    return EmbeddingVector::normalized(acc);
}

Embedder make_toy_embedder(std::uint64_t seed, std::size_t dim) {
    return [seed, dim](std::string_view text) { return toy_embed(text, seed, dim); };
}

Pooling parse_pooling(std::string_view s) {
    if (s == "cls") return Pooling::kCls;
    if (s == "mean") return Pooling::kMean;
    throw ConfigError(fmt::format("unknown pooling '{}' (expected cls or mean)", s));
}

const char* to_string(Pooling p) { return p == Pooling::kCls ? "cls" : "mean"; }

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto emit = [&](std::string_view piece) {
        auto s = trim(piece);
        bool any = false;
        for (char c : s) any = any || is_alnum_byte(static_cast<unsigned char>(c));
        if (any) out.push_back(std::move(s));
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() && is_space(text[i + 1])) {
            emit(text.substr(start, i + 1 - start));
            start = i + 1;
        }
    }
    if (start < text.size()) emit(text.substr(start));
    return out;
}

EmbeddingVector embed_document(const corpus::Document& doc, Pooling pooling, const Embedder& embedder) {
    const std::string input = corpus::build_model_input(doc);
    if (pooling == Pooling::kCls) return embedder(input);
    const auto sentences = split_sentences(input);
    if (sentences.empty()) throw InputError(fmt::format("document '{}' has no sentences", doc.id));
    std::vector<double> mean;
    for (const auto& s : sentences) {
        const auto v = embedder(s);
        if (mean.empty()) mean.assign(v.dim(), 0.0);
        if (v.dim() != mean.size()) throw InputError("embedder returned vectors of differing dimension");
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v.values()[i];
    }
    const double inv = 1.0 / static_cast<double>(sentences.size());
    for (auto& m : mean) m *= inv;
    try {
        return EmbeddingVector::normalized(mean);
    } catch (const InputError&) {
        throw InputError(fmt::format("mean pooling of document '{}' cancelled to a zero vector", doc.id));
    }
}

// ---------------------------------------------------------------------------

EmbeddingStore::EmbeddingStore(std::size_t dim, std::string provenance)
    : dim_(dim), provenance_(std::move(provenance)) {
    if (dim == 0) throw StoreDimensionError("embedding store dimension must be positive");
}

void EmbeddingStore::add(std::string id, std::span<const float> values) {
    if (values.size() != dim_)
        throw InputError(fmt::format("vector for '{}' has dim {}, store has {}", id, values.size(), dim_));
    if (row_of_.contains(id)) throw InputError(fmt::format("duplicate embedding id '{}'", id));
    for (float v : values)
        if (!std::isfinite(v)) throw InputError(fmt::format("vector for '{}' contains NaN or Inf", id));
    row_of_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view id) const {
    auto it = row_of_.find(std::string(id));
    if (it == row_of_.end()) return std::nullopt;
    return it->second;
}

std::span<const float> EmbeddingStore::vector(std::string_view id) const {
    auto r = find(id);
    if (!r) throw InputError(fmt::format("no embedding for '{}'", id));
    return row(*r);
}

std::uint64_t EmbeddingStore::content_checksum() const {
    ByteWriter w;
    w.put(static_cast<std::uint32_t>(dim_));
    w.put(static_cast<std::uint64_t>(ids_.size()));
    for (const auto& id : ids_) w.put_string(id);
    w.put_span(std::span<const float>(data_));
    return fnv1a64(w.bytes());
}

std::string serialize_store(const EmbeddingStore& store) {
    ByteWriter w;
    w.put_bytes(kStoreMagic);
    w.put(static_cast<std::uint32_t>(store.dim()));
    w.put(static_cast<std::uint64_t>(store.size()));
    w.put_string(store.provenance());
    for (const auto& id : store.ids()) w.put_string(id);
    w.put_span(store.data());
    return w.bytes();
}

EmbeddingStore deserialize_store(std::string_view bytes) {
    ByteReader r(bytes, "embedding store");
    if (bytes.size() < kStoreMagic.size() || bytes.substr(0, kStoreMagic.size()) != kStoreMagic)
        throw StoreFormatError("not an embedding store (magic bytes mismatch)");
    r.get_bytes(kStoreMagic.size());
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    if (dim == 0) throw StoreDimensionError("embedding store declares dimension 0");
    std::string provenance = r.get_string();
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, r.remaining() / 4)));
    for (std::uint64_t i = 0; i < count; ++i) ids.push_back(r.get_string());
    const std::uint64_t payload = count * dim * sizeof(float);
    r.need(payload);
    std::vector<float> block(static_cast<std::size_t>(count) * dim);
    r.get_into(std::span<float>(block));
    if (r.remaining() != 0)
        throw StoreFormatError(fmt::format("{} trailing bytes after embedding store payload", r.remaining()));
    EmbeddingStore store(dim, std::move(provenance));
    for (std::size_t i = 0; i < ids.size(); ++i)
        store.add(std::move(ids[i]), std::span<const float>(block).subspan(i * dim, dim));
    return store;
}

void save_store(const EmbeddingStore& store, const std::string& path) { write_file(path, serialize_store(store)); }

EmbeddingStore load_store(const std::string& path) { return deserialize_store(read_file(path)); }

// ---------------------------------------------------------------------------

ImportResult import_precomputed(const std::string& vectors_path, const std::string& ids_path) {
    std::vector<std::string> ids;
    {
        std::ifstream in(ids_path);
        if (!in) throw InputError("cannot open " + ids_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            ids.push_back(line);
        }
    }
    std::vector<std::vector<float>> rows;
    if (vectors_path.ends_with(".csv")) {
        std::ifstream in(vectors_path);
        if (!in) throw InputError("cannot open " + vectors_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<float> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                try {
                    std::size_t used = 0;
                    const float v = std::stof(cell, &used);
                    if (trim(cell.substr(used)).size() != 0) throw std::invalid_argument(cell);
                    row.push_back(v);
                } catch (const std::exception&) {
                    throw ParseError(line_no, "value", fmt::format("not a number: '{}'", cell));
                }
            }
            if (!rows.empty() && row.size() != rows.front().size())
                throw ParseError(line_no, "value",
                                 fmt::format("row has {} values, expected {}", row.size(), rows.front().size()));
            rows.push_back(std::move(row));
        }
    } else {
        const std::string bytes = read_file(vectors_path);
        if (ids.empty()) {
            if (!bytes.empty()) throw InputError("vector block is non-empty but the id list is empty");
        } else {
            const std::size_t per_row = bytes.size() / ids.size();
            if (bytes.size() % (ids.size() * sizeof(float)) != 0 || per_row == 0)
                throw InputError(fmt::format("vector block of {} bytes does not split into {} float32 rows",
                                             bytes.size(), ids.size()));
            const std::size_t dim = per_row / sizeof(float);
            ByteReader r(bytes, "vector block");
            for (std::size_t i = 0; i < ids.size(); ++i) {
                std::vector<float> row(dim);
                r.get_into(std::span<float>(row));
                rows.push_back(std::move(row));
            }
        }
    }
    if (rows.size() != ids.size())
        throw InputError(fmt::format("count mismatch: {} ids but {} vector rows", ids.size(), rows.size()));
    if (rows.empty()) throw InputError("nothing to import");
    ImportResult result{EmbeddingStore(rows.front().size(), "imported"), 0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        for (float v : row)
            if (std::isnan(v) || std::isinf(v)) throw InputError(fmt::format("NaN/Inf in vector for '{}'", ids[i]));
        const double n = kernels::l2_norm(row);
        if (!(n > 0.0)) throw InputError(fmt::format("zero vector for '{}'", ids[i]));
        if (std::abs(n - 1.0) > kImportNormTolerance) {
            const std::vector<double> d(row.begin(), row.end());
            const auto unit = EmbeddingVector::normalized(d);
            row.assign(unit.values().begin(), unit.values().end());
            ++result.renormalized;
        }
        result.store.add(ids[i], row);
    }
    return result;
}

// ---------------------------------------------------------------------------

EmbeddingStore embed_documents_serial(std::span<const corpus::Document> docs, Pooling pooling,
                                      const Embedder& embedder, std::size_t dim, std::string provenance) {
    EmbeddingStore store(dim, std::move(provenance));
    for (const auto& d : docs) store.add(d.id, embed_document(d, pooling, embedder).values());
    return store;
}

EmbeddingStore embed_documents_parallel(std::span<const corpus::Document> docs, Pooling pooling,
                                        const Embedder& embedder, std::size_t dim, std::string provenance) {
    const auto n = static_cast<std::int64_t>(docs.size());
    std::vector<EmbeddingVector> vecs(docs.size());
    std::vector<std::exception_ptr> failures(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        try {
            vecs[r] = embed_document(docs[r], pooling, embedder);
        } catch (...) {
            failures[r] = std::current_exception();
        }
    }
    // Report the first failing document, as the serial path would.
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    EmbeddingStore store(dim, std::move(provenance));
    for (std::size_t i = 0; i < docs.size(); ++i) store.add(docs[i].id, vecs[i].values());
    return store;
}

}  // namespace spsim::embed
