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

#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "spsim/index.hpp"
#include "spsim/kernels.hpp"

using namespace spsim;
using namespace spsim::index;

namespace {

IndexConfig hnsw_config(std::uint32_t ef_search = 128) {
    IndexConfig c;
    c.mode = IndexMode::kHnsw;
    c.hnsw_ef_search = ef_search;
    c.seed = 42;
    return c;
}

oracle::Filter to_oracle(const SearchFilter& f) { return {f.year_min, f.year_max, f.kind}; }

SearchFilter random_filter(Rng& rng) {
    SearchFilter f;
    if (rng.below(2)) f.year_min = 1990 + static_cast<int>(rng.below(20));
    if (rng.below(2)) f.year_max = (f.year_min ? *f.year_min : 1990) + static_cast<int>(rng.below(15));
    if (rng.below(3) == 0) f.kind = rng.below(2) ? DocKind::kPaper : DocKind::kPatent;
    return f;
}

double recall(const std::vector<Neighbor>& got, const std::vector<oracle::Hit>& truth) {
    if (truth.empty()) return 1.0;
    std::set<std::string> t;
    for (const auto& h : truth) t.insert(h.id);
    std::size_t hit = 0;
    for (const auto& n : got) hit += t.count(n.doc_id);
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace

TEST(Cosine, Basics) {
    const std::vector<float> a{1, 0}, b{0, 2}, c{3, 0}, z{0, 0}, d3{1, 0, 0};
    EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
    EXPECT_DOUBLE_EQ(cosine(a, c), 1.0);
    EXPECT_THROW(cosine(a, z), InputError);
    EXPECT_THROW(cosine(a, d3), InputError);
}

TEST(Filter, ValidateAndMatch) {
    SearchFilter f{2001, 2000, std::nullopt};
    EXPECT_THROW(f.validate(), ConfigError);
    SearchFilter g{2000, 2005, DocKind::kPaper};
    EXPECT_TRUE(g.matches(2000, DocKind::kPaper));
    EXPECT_TRUE(g.matches(2005, DocKind::kPaper));
    EXPECT_FALSE(g.matches(2006, DocKind::kPaper));
    EXPECT_FALSE(g.matches(2003, DocKind::kPatent));
}

TEST(Search, SelfRetrievalBothModes) {
    auto c = fixture::random_collection(500, 32, 1);
    for (auto cfg : {IndexConfig{}, hnsw_config()}) {
        const auto idx = Index::build(c.store, c.meta, cfg);
        for (std::size_t i = 0; i < 500; i += 37) {
            const auto r = idx.search(c.rows[i].v, 1);
            ASSERT_EQ(r.size(), 1u);
            EXPECT_EQ(r[0].doc_id, c.rows[i].id);
            EXPECT_NEAR(r[0].score, 1.0, 1e-6);
        }
    }
}

TEST(Search, ExhaustionReturnsAllMatchingSorted) {
    auto c = fixture::random_collection(200, 16, 2);
    const auto idx = Index::build(c.store, c.meta, {});
    SearchFilter f{2000, 2002, DocKind::kPaper};
    const auto got = idx.search(c.rows[0].v, 10000, f);
    const auto want = oracle::search(c.rows, c.rows[0].v, 10000, to_oracle(f));
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].doc_id, want[i].id);
}

TEST(Search, Errors) {
    auto c = fixture::random_collection(50, 8, 3);
    const auto idx = Index::build(c.store, c.meta, {});
    EXPECT_THROW(idx.search(c.rows[0].v, 0), ConfigError);
    EXPECT_THROW(idx.search(std::vector<float>(9, 1.0f), 3), InputError);
    EXPECT_TRUE(idx.search(c.rows[0].v, 5, SearchFilter{3000, 3001, std::nullopt}).empty());
}

TEST(Search, MissingMetadataNamesId) {
    auto c = fixture::random_collection(20, 8, 4);
    c.meta.erase(c.rows[5].id);
    try {
        Index::build(c.store, c.meta, {});
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find(c.rows[5].id), std::string::npos);
    }
}

TEST(Search, ExactEqualsBruteForceProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.below(3000);
        auto c = fixture::random_collection(n, 1 + rng.below(40), rng.next(), 0.1);
        const auto idx = Index::build(c.store, c.meta, {});
        const auto q = fixture::random_unit(rng, c.store.dim());
        const auto f = random_filter(rng);
        std::set<std::string> ex;
        IdSet exclude;
        for (int e = 0; e < 3; ++e) {
            const auto& id = c.rows[rng.below(n)].id;
            ex.insert(id);
            exclude.insert(id);
        }
        const std::size_t k = 1 + rng.below(60);
        const auto want = oracle::search(c.rows, q, k, to_oracle(f), ex);
        for (const auto& got : {idx.search(q, k, f, &exclude), idx.search_exact_serial(q, k, f, &exclude)}) {
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, want[i].id);
                EXPECT_EQ(got[i].score, want[i].score);
            }
        }
    }
}

TEST(Search, TiesResolveToSmallerId) {
    embed::EmbeddingStore s(2, "t");
    MetaMap meta;
    for (const char* id : {"c", "a", "b"}) {
        s.add(id, std::vector<float>{1, 1});
        meta[id] = {2000, DocKind::kPaper};
    }
    for (auto cfg : {IndexConfig{}, hnsw_config()}) {
        const auto r = Index::build(s, meta, cfg).search(std::vector<float>{1, 1}, 3);
        ASSERT_EQ(r.size(), 3u);
        EXPECT_EQ(r[0].doc_id, "a");
        EXPECT_EQ(r[1].doc_id, "b");
        EXPECT_EQ(r[2].doc_id, "c");
    }
}

TEST(Search, MonotoneInK) {
    Rng rng(6);
    auto c = fixture::random_collection(1500, 24, 6, 0.05);
    const auto idx = Index::build(c.store, c.meta, {});
    for (int trial = 0; trial < 30; ++trial) {
        const auto q = fixture::random_unit(rng, 24);
        const auto f = random_filter(rng);
        const std::size_t a = 1 + rng.below(40), b = a + rng.below(40);
        const auto ra = idx.search(q, a, f), rb = idx.search(q, b, f);
        ASSERT_LE(ra.size(), rb.size());
        for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i], rb[i]);
    }
}

TEST(Hnsw, FilterSoundness) {
    Rng rng(7);
    auto c = fixture::random_collection(2000, 16, 7);
    const auto idx = Index::build(c.store, c.meta, hnsw_config());
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_filter(rng);
        IdSet ex{c.rows[rng.below(2000)].id};
        for (const auto& n : idx.search(fixture::random_unit(rng, 16), 20, f, &ex)) {
            const auto& m = c.meta.at(n.doc_id);
            EXPECT_TRUE(f.matches(m.pub_year, m.kind));
            EXPECT_FALSE(ex.count(n.doc_id));
        }
    }
}

TEST(Hnsw, FullBeamRecall) {
    Rng rng(8);
    auto c = fixture::random_collection(1000, 32, 8);
    const auto idx = Index::build(c.store, c.meta, hnsw_config(1000));
    double total = 0.0;
    const int queries = 100;
    for (int i = 0; i < queries; ++i) {
        const auto q = fixture::random_unit(rng, 32);
        total += recall(idx.search(q, 10), oracle::search(c.rows, q, 10, {}));
    }
    EXPECT_GE(total / queries, 0.999);
}

TEST(Hnsw, DefaultRecallSmall) {
    Rng rng(9);
    auto c = fixture::random_collection(3000, 32, 9);
    const auto idx = Index::build(c.store, c.meta, hnsw_config());
    double total = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto q = fixture::random_unit(rng, 32);
        total += recall(idx.search(q, 10), oracle::search(c.rows, q, 10, {}));
    }
    EXPECT_GE(total / 50, 0.95);
}

TEST(Hnsw, BuildIsDeterministic) {
    auto c = fixture::random_collection(800, 16, 10);
    EXPECT_EQ(Index::build(c.store, c.meta, hnsw_config()).serialize(),
              Index::build(c.store, c.meta, hnsw_config()).serialize());
}

TEST(Hnsw, LevelsFollowSeededHash) {
    EXPECT_EQ(HnswGraph::level_for("doc-1", 3, 16), HnswGraph::level_for("doc-1", 3, 16));
    std::size_t above = 0;
    for (int i = 0; i < 20000; ++i) above += HnswGraph::level_for("id" + std::to_string(i), 1, 16) > 0;
    // P(level > 0) = 1/m.
    EXPECT_NEAR(static_cast<double>(above) / 20000.0, 1.0 / 16.0, 0.01);
}

TEST(Hnsw, TooSmallM) {
    auto c = fixture::random_collection(10, 4, 11);
    auto cfg = hnsw_config();
    cfg.hnsw_m = 1;
    EXPECT_THROW(Index::build(c.store, c.meta, cfg), ConfigError);
}

// ---------------------------------------------------------------------------

TEST(Persistence, RoundTripBothModes) {
    const auto dir = fixture::temp_dir("index");
    auto c = fixture::random_collection(600, 16, 12);
    for (auto cfg : {IndexConfig{}, hnsw_config()}) {
        const auto idx = Index::build(c.store, c.meta, cfg);
        idx.save((dir / "i.spidx").string());
        const auto back = Index::load((dir / "i.spidx").string(), c.store);
        EXPECT_EQ(back, idx);
        EXPECT_EQ(back.serialize(), idx.serialize());
        const auto q = c.rows[3].v;
        EXPECT_EQ(back.search(q, 7), idx.search(q, 7));
    }
}

TEST(Persistence, RejectsForeignStoreAndCorruption) {
    auto c = fixture::random_collection(100, 8, 13);
    const auto bytes = Index::build(c.store, c.meta, hnsw_config()).serialize();
    auto other = fixture::random_collection(100, 8, 14);
    EXPECT_THROW(Index::deserialize(bytes, other.store), InputError);
    EXPECT_THROW(Index::deserialize(bytes + "z", c.store), InputError);
    EXPECT_THROW(Index::deserialize(std::string_view(bytes).substr(0, bytes.size() - 3), c.store), InputError);
    auto bad = bytes;
    bad[1] = 'X';
    EXPECT_THROW(Index::deserialize(bad, c.store), InputError);
}

// ---------------------------------------------------------------------------

TEST(Batch, SingletonEmptyAndThreadInvariance) {
    Rng rng(15);
    auto c = fixture::random_collection(2500, 16, 15);
    for (auto cfg : {IndexConfig{}, hnsw_config()}) {
        const auto idx = Index::build(c.store, c.meta, cfg);
        EXPECT_TRUE(batch_search(idx, {}, 5).empty());
        std::vector<BatchQuery> qs;
        for (int i = 0; i < 100; ++i) qs.push_back({fixture::random_unit(rng, 16), random_filter(rng)});
        const auto one = batch_search(idx, std::span(qs).first(1), 5);
        ASSERT_EQ(one.size(), 1u);
        EXPECT_EQ(one[0], idx.search(qs[0].vector, 5, qs[0].filter));
        const auto t8 = batch_search(idx, qs, 5, 8);
        const auto t1 = batch_search(idx, qs, 5, 1);
        EXPECT_EQ(t8, t1);
        EXPECT_EQ(t8, batch_search_serial(idx, qs, 5));
    }
}

TEST(Batch, ErrorsPropagate) {
    auto c = fixture::random_collection(30, 4, 16);
    const auto idx = Index::build(c.store, c.meta, {});
    std::vector<BatchQuery> qs{{std::vector<float>(4, 1.0f), {}}, {std::vector<float>(5, 1.0f), {}}};
    EXPECT_THROW(batch_search(idx, qs, 3), InputError);
}

// ---------------------------------------------------------------------------

TEST(Kernels, ParallelMatchesSerialBitwise) {
    Rng rng(17);
    auto c = fixture::random_collection(9000, 24, 17, 0.2);
    const auto data = c.store.data();
    const auto ns = kernels::row_norms_serial(data, 24);
    const auto np = kernels::row_norms_parallel(data, 24);
    EXPECT_EQ(ns, np);
    const kernels::MatrixView m{data, 24, ns};
    const auto q = fixture::random_unit(rng, 24);
    const double qn = kernels::l2_norm(q);
    std::vector<double> a(m.rows()), b(m.rows());
    kernels::score_all_serial(q, qn, m, a);
    kernels::score_all_parallel(q, qn, m, b);
    EXPECT_EQ(a, b);
    auto keep = [](std::uint32_t off) { return off % 3 != 0; };
    for (std::size_t k : {1u, 10u, 500u, 9000u}) {
        const auto s = kernels::top_k_serial(q, qn, m, k, keep);
        const auto p = kernels::top_k_parallel(q, qn, m, k, keep);
        ASSERT_EQ(s.size(), p.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_EQ(s[i].offset, p[i].offset);
            EXPECT_EQ(s[i].score, p[i].score);
        }
    }
}
