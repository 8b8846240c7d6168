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

#include "spsim/service.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "spsim/hash.hpp"

namespace spsim::service {

namespace {

using json = nlohmann::ordered_json;

Response error(int status, const std::string& message) {
    json j;
    j["error"] = message;
    return {status, j.dump()};
}

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<int> optional_int(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_number_integer()) throw BadRequest(fmt::format("'{}' must be an integer", key));
    return obj.at(key).get<int>();
}

}  // namespace

SearchService::SearchService(const index::Index& index, const embed::EmbeddingStore& store,
                             const corpus::Corpus* docs)
    : index_(index), store_(store), docs_(docs), checksum_(to_hex(fnv1a64(index.serialize()))) {}

Response SearchService::healthz() const { return {200, R"({"status":"ok"})"}; }

Response SearchService::search(std::string_view body) const {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error(400, "request body is not valid JSON");
    }
    if (!req.is_object()) return error(400, "request body must be a JSON object");
    try {
        std::vector<float> query;
        if (req.contains("query_id") && req.contains("vector"))
            throw BadRequest("give either 'query_id' or 'vector', not both");
        if (req.contains("query_id")) {
            if (!req.at("query_id").is_string()) throw BadRequest("'query_id' must be a string");
            const auto id = req.at("query_id").get<std::string>();
            if (!store_.contains(id)) return error(404, fmt::format("unknown query_id '{}'", id));
            const auto v = store_.vector(id);
            query.assign(v.begin(), v.end());
        } else if (req.contains("vector")) {
            const auto& v = req.at("vector");
            if (!v.is_array()) throw BadRequest("'vector' must be an array of numbers");
            for (const auto& x : v) {
                if (!x.is_number()) throw BadRequest("'vector' must be an array of numbers");
                query.push_back(x.get<float>());
            }
        } else {
            throw BadRequest("missing 'query_id' or 'vector'");
        }
        std::size_t k = 10;
        if (auto kk = optional_int(req, "k")) {
            if (*kk <= 0) throw BadRequest("'k' must be positive");
            k = static_cast<std::size_t>(*kk);
        }
        index::SearchFilter filter;
        if (req.contains("filter") && !req.at("filter").is_null()) {
            const auto& f = req.at("filter");
            if (!f.is_object()) throw BadRequest("'filter' must be an object");
            filter.year_min = optional_int(f, "year_min");
            filter.year_max = optional_int(f, "year_max");
            if (f.contains("kind") && !f.at("kind").is_null()) {
                if (!f.at("kind").is_string()) throw BadRequest("'filter.kind' must be a string");
                try {
                    filter.kind = parse_doc_kind(f.at("kind").get<std::string>());
                } catch (const InputError& e) {
                    throw BadRequest(e.what());
                }
            }
        }
        index::IdSet exclude;
        if (req.contains("exclude") && !req.at("exclude").is_null()) {
            const auto& e = req.at("exclude");
            if (!e.is_array()) throw BadRequest("'exclude' must be an array of ids");
            for (const auto& x : e) {
                if (!x.is_string()) throw BadRequest("'exclude' must be an array of ids");
                exclude.insert(x.get<std::string>());
            }
        }
        const auto hits = index_.search(query, k, filter, &exclude);
        json resp;
        resp["results"] = json::array();
        for (const auto& h : hits) resp["results"].push_back({{"doc_id", h.doc_id}, {"score", h.score}});
        resp["index_checksum"] = checksum_;
        return {200, resp.dump()};
    } catch (const BadRequest& e) {
        return error(400, e.what());
    } catch (const Error& e) {
        return error(400, e.what());
    }
}

Response SearchService::document(std::string_view id) const {
    if (!docs_) return error(404, fmt::format("unknown document '{}'", id));
    const auto* d = docs_->find(id);
    if (!d) return error(404, fmt::format("unknown document '{}'", id));
    return {200, corpus::document_to_json(*d)};
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    const SearchService& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(const SearchService& s) : service(s) {
        auto reply = [](httplib::Response& res, const Response& r) {
            res.status = r.status;
            res.set_content(r.body, "application/json");
        };
        server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, service.healthz());
        });
        server.Post("/v1/search", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.search(req.body));
        });
        server.Get(R"(/v1/documents/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.document(req.matches[1].str()));
        });
        server.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) reply(res, error(res.status, fmt::format("HTTP {}", res.status)));
        });
    }
};

HttpServer::HttpServer(const SearchService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw InputError(fmt::format("cannot bind {}", host));
    } else if (!impl_->server.bind_to_port(host, port)) {
        throw InputError(fmt::format("cannot bind {}:{} (port in use?)", host, port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::run(const std::string& host, int port) {
    if (!impl_->server.bind_to_port(host, port))
        throw InputError(fmt::format("cannot bind {}:{} (port in use?)", host, port));
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace spsim::service
