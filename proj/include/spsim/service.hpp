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

#include <memory>
#include <string>
#include <string_view>

#include "spsim/corpus.hpp"
#include "spsim/embed.hpp"
#include "spsim/index.hpp"

namespace spsim::service {

struct Response {
    int status = 200;
    std::string body;  // JSON
};

/// Request handling for the read-only search API, independent of the transport.
/// All methods are const and safe to call concurrently.
class SearchService {
public:
    /// docs may be null, in which case document lookups always answer 404.
    SearchService(const index::Index& index, const embed::EmbeddingStore& store, const corpus::Corpus* docs);

    Response healthz() const;
    /// Body: {"query_id": id | "vector": [..], "k": n, "filter": {...}, "exclude": [..]}.
    Response search(std::string_view body) const;
    Response document(std::string_view id) const;

    const std::string& index_checksum() const { return checksum_; }

private:
    const index::Index& index_;
    const embed::EmbeddingStore& store_;
    const corpus::Corpus* docs_;
    std::string checksum_;
};

/// HTTP/1.1 front end: GET /healthz, POST /v1/search, GET /v1/documents/{id}.
class HttpServer {
public:
    explicit HttpServer(const SearchService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves on a background thread; port 0 picks a free port. Returns the
    /// bound port. Throws InputError when the port cannot be bound.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace spsim::service
