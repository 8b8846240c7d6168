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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <unistd.h>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "spsim/corpus.hpp"
#include "spsim/embed.hpp"
#include "spsim/index.hpp"
#include "spsim/rng.hpp"
#include "oracles.hpp"

namespace fixture {

inline std::chrono::year_month_day ymd(int y, unsigned m = 6, unsigned d = 15) {
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline spsim::corpus::Document paper(std::string id, int year, std::string abstract = "an english abstract",
                                     std::optional<std::string> lang = "en") {
    spsim::corpus::Document d;
    d.id = std::move(id);
    d.kind = spsim::DocKind::kPaper;
    d.title = "Title";
    d.abstract = std::move(abstract);
    d.lang = std::move(lang);
    d.pub_date = ymd(year);
    return d;
}

inline spsim::corpus::Document patent(std::string id, int year, std::string authority = "EP",
                                      std::optional<std::string> family = std::nullopt,
                                      std::optional<std::string> application = std::nullopt) {
    spsim::corpus::Document d;
    d.id = std::move(id);
    d.kind = spsim::DocKind::kPatent;
    d.title = "Patent title";
    d.abstract = "a patent abstract in english";
    d.lang = "en";
    d.pub_date = ymd(year);
    d.filing_year = year - 1;
    d.authority = std::move(authority);
    d.family_id = std::move(family);
    d.application_id = std::move(application);
    d.cpc_sections = "G";
    return d;
}

inline std::vector<float> random_unit(spsim::Rng& rng, std::size_t dim) {
    std::vector<float> v(dim);
    double n = 0.0;
    for (auto& x : v) {
        x = static_cast<float>(rng.normal());
        n += static_cast<double>(x) * x;
    }
    n = std::sqrt(n);
    for (auto& x : v) x = static_cast<float>(x / n);
    return v;
}

struct RandomCollection {
    spsim::embed::EmbeddingStore store;
    spsim::index::MetaMap meta;
    std::vector<oracle::Row> rows;
};

/// n random unit vectors with ids "d000123", years uniform in [1990, 2019], a mix of
/// kinds, and (when dup_share > 0) some rows duplicated from earlier rows to force ties.
inline RandomCollection random_collection(std::size_t n, std::size_t dim, std::uint64_t seed,
                                          double dup_share = 0.0) {
    spsim::Rng rng(seed);
    RandomCollection c;
    c.store = spsim::embed::EmbeddingStore(dim, "random");
    for (std::size_t i = 0; i < n; ++i) {
        oracle::Row r;
        r.id = fmt::format("d{:06d}", (i * 7919) % 1000003);
        r.v = i > 0 && rng.uniform() < dup_share ? c.rows[rng.below(i)].v : random_unit(rng, dim);
        r.year = 1990 + static_cast<int>(rng.below(30));
        r.kind = rng.below(4) == 0 ? spsim::DocKind::kPatent : spsim::DocKind::kPaper;
        c.store.add(r.id, r.v);
        c.meta[r.id] = {r.year, r.kind};
        c.rows.push_back(std::move(r));
    }
    return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / fmt::format("spsim_test_{}_{}", name, ::getpid());
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixture
