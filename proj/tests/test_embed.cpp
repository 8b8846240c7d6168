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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "spsim/binary_io.hpp"
#include "spsim/embed.hpp"
#include "spsim/hash.hpp"

using namespace spsim;
using namespace spsim::embed;

namespace {

// Published FNV-1a and splitmix64 reference values.
static_assert(fnv1a64("") == 0xcbf29ce484222325ULL);
static_assert(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
static_assert(fnv1a64("foobar") == 0x85944171f73967e8ULL);
static_assert(splitmix64(0) == 0xe220a8397b1dcdafULL);

// Feature hashing recomputed from the contract: lowercase alphanumeric tokens, seeded
// hash picks coordinate (low 63 bits mod dim) and sign (top bit), then L2 normalize.
std::vector<double> oracle_toy(const std::string& text, std::uint64_t seed, std::size_t dim) {
    std::vector<double> acc(dim, 0.0);
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : tok) h = (h ^ c) * 0x100000001b3ULL;
        std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL;
        s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
        s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
        s ^= s >> 31;
        std::uint64_t x = (h ^ s) + 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        x ^= x >> 31;
        acc[(x & 0x7fffffffffffffffULL) % dim] += (x >> 63) ? -1.0 : 1.0;
        tok.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) tok += static_cast<char>(std::tolower(c));
        else flush();
    }
    flush();
    double n = 0.0;
    for (double v : acc) n += v * v;
    for (double& v : acc) v /= std::sqrt(n);
    return acc;
}

std::vector<std::string> random_words(Rng& rng, std::size_t n, std::size_t vocab = 5000) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(rng.below(vocab)));
    return w;
}

std::string join(const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
    return s;
}

double cos_of(const EmbeddingVector& a, const EmbeddingVector& b) { return oracle::cosine(a.values(), b.values()); }

}  // namespace

TEST(Tokenize, LowercaseAlnumRuns) {
    EXPECT_EQ(tokenize("Hello, World! x2-y"), (std::vector<std::string>{"hello", "world", "x2", "y"}));
    EXPECT_TRUE(tokenize("  ,.;").empty());
}

TEST(ToyEmbed, MatchesIndependentFeatureHash) {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto text = join(random_words(rng, 1 + rng.below(60))) + ", Mixed CASE text.";
        const std::uint64_t seed = rng.next();
        const std::size_t dim = 16 + rng.below(200);
        const auto v = toy_embed(text, seed, dim);
        const auto o = oracle_toy(text, seed, dim);
        ASSERT_EQ(v.dim(), dim);
        for (std::size_t i = 0; i < dim; ++i) EXPECT_NEAR(v.values()[i], o[i], 1e-7);
    }
}

TEST(ToyEmbed, DeterministicAndUnitNorm) {
    const auto a = toy_embed("some words here", 9, 768);
    const auto b = toy_embed("some words here", 9, 768);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a.norm(), 1.0, 1e-6);
}

TEST(ToyEmbed, EmptyTokenStream) {
    try {
        toy_embed(" ... ", 1, 8);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_STREQ(e.what(), "empty token stream");
    }
}

TEST(ToyEmbed, SeedsDecorrelate) {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto text = join(random_words(rng, 20 + rng.below(40)));
        EXPECT_LT(cos_of(toy_embed(text, 1, 768), toy_embed(text, 2, 768)), 0.99);
    }
}

TEST(ToyEmbed, TokenOrderInvariant) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        auto w = random_words(rng, 1 + rng.below(50));
        const auto a = toy_embed(join(w), 5, 256);
        rng.shuffle(w);
        EXPECT_EQ(a, toy_embed(join(w), 5, 256));
    }
}

TEST(ToyEmbed, OverlapRaisesExpectedCosine) {
    Rng rng(4);
    double overlap = 0.0, disjoint = 0.0;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i) {
        const auto base = random_words(rng, 40, 100000);
        auto half = std::vector<std::string>(base.begin(), base.begin() + 20);
        auto fresh = random_words(rng, 20, 100000);
        half.insert(half.end(), fresh.begin(), fresh.end());
        const auto other = random_words(rng, 40, 100000);
        const auto e = toy_embed(join(base), 7, 768);
        overlap += cos_of(e, toy_embed(join(half), 7, 768));
        disjoint += cos_of(e, toy_embed(join(other), 7, 768));
    }
    EXPECT_GT(overlap / pairs, disjoint / pairs);
}

TEST(Sentences, SplitRule) {
    EXPECT_EQ(split_sentences("One. Two! Three? Four"), (std::vector<std::string>{"One.", "Two!", "Three?", "Four"}));
    EXPECT_EQ(split_sentences("v1.2 stays. ... . Next"), (std::vector<std::string>{"v1.2 stays.", "Next"}));
    EXPECT_TRUE(split_sentences(" . ! ").empty());
}

TEST(Pooling, SingleSentenceClsEqualsMean) {
    auto d = fixture::paper("W1", 2000, "");
    d.title = "just one sentence here";
    const auto emb = make_toy_embedder(3, 64);
    EXPECT_EQ(embed_document(d, Pooling::kCls, emb), embed_document(d, Pooling::kMean, emb));
}

// Toy embedding of the text with the title/abstract separator removed, so that
// sentence content alone drives the vector.
Embedder sep_blind_toy() {
    return [](std::string_view s) {
        std::string t(s);
        if (auto p = t.find("[SEP]"); p != std::string::npos) t.erase(p, 5);
        return toy_embed(t, 3, 64);
    };
}

TEST(Pooling, IdenticalSentencesEqualSingle) {
    const auto emb = sep_blind_toy();
    auto twice = fixture::paper("W1", 2000, "alpha beta gamma. alpha beta gamma.");
    twice.title = "";
    auto once = fixture::paper("W2", 2000, "alpha beta gamma.");
    once.title = "";
    const auto a = embed_document(twice, Pooling::kMean, emb);
    const auto b = embed_document(once, Pooling::kMean, emb);
    for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-7);
}

TEST(Pooling, OrthogonalSentencesClosedForm) {
    // Stub embedder: a sentence containing 'u' maps to e0, anything else to e1.
    const Embedder emb = [](std::string_view s) {
        std::vector<float> v(4, 0.0f);
        v[s.find('u') != std::string_view::npos ? 0 : 1] = 1.0f;
        return EmbeddingVector(v);
    };
    auto d = fixture::paper("W1", 2000, "u. w.");
    d.title = "";
    const auto m = embed_document(d, Pooling::kMean, emb);
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(m.values()[0], h, 1e-7);
    EXPECT_NEAR(m.values()[1], h, 1e-7);
    EXPECT_NEAR(m.values()[2], 0.0, 1e-12);
}

TEST(Pooling, CancellationIsAnError) {
    const Embedder emb = [](std::string_view s) {
        std::vector<float> v(2, 0.0f);
        v[0] = s.find('u') != std::string_view::npos ? 1.0f : -1.0f;
        return EmbeddingVector(v);
    };
    auto d = fixture::paper("W1", 2000, "u. w.");
    d.title = "";
    EXPECT_THROW(embed_document(d, Pooling::kMean, emb), InputError);
}

TEST(Pooling, AlwaysUnitNorm) {
    Rng rng(8);
    const auto emb = make_toy_embedder(1, 128);
    for (int i = 0; i < 100; ++i) {
        auto d = fixture::paper("W", 2000, join(random_words(rng, 5)) + ". " + join(random_words(rng, 7)) + "! x");
        for (auto p : {Pooling::kCls, Pooling::kMean}) EXPECT_NEAR(embed_document(d, p, emb).norm(), 1.0, 1e-6);
    }
}

// ---------------------------------------------------------------------------

namespace {

EmbeddingStore three_entry_store() {
    EmbeddingStore s(4, "toy-v1 seed=1");
    s.add("a", std::vector<float>{1, 0, 0, 0});
    s.add("b", std::vector<float>{0, 0.6f, 0.8f, 0});
    s.add("c", std::vector<float>{0.5f, 0.5f, 0.5f, 0.5f});
    return s;
}

}  // namespace

TEST(Store, RoundTripBitwise) {
    const auto dir = fixture::temp_dir("store");
    const auto s = three_entry_store();
    save_store(s, (dir / "s.bin").string());
    const auto back = load_store((dir / "s.bin").string());
    EXPECT_EQ(back, s);
    EXPECT_EQ(back.provenance(), "toy-v1 seed=1");
    EXPECT_EQ(serialize_store(back), serialize_store(s));
}

TEST(Store, WrongMagic) {
    auto bytes = serialize_store(three_entry_store());
    bytes[0] = 'X';
    EXPECT_THROW(deserialize_store(bytes), StoreFormatError);
}

TEST(Store, TruncatedNamesByteCounts) {
    const auto bytes = serialize_store(three_entry_store());
    try {
        deserialize_store(std::string_view(bytes).substr(0, bytes.size() - 5));
        FAIL();
    } catch (const TruncatedError& e) {
        EXPECT_EQ(e.actual() + 5, e.expected());
        EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
    }
}

TEST(Store, TrailingBytesRejected) {
    EXPECT_THROW(deserialize_store(serialize_store(three_entry_store()) + "x"), StoreFormatError);
}

TEST(Store, ZeroDimensionRejected) {
    EmbeddingStore empty(1, "p");
    auto bytes = serialize_store(empty);
    bytes[kStoreMagic.size()] = 0;  // dim is the u32 right after the magic
    EXPECT_THROW(deserialize_store(bytes), StoreDimensionError);
}

TEST(Store, AddValidation) {
    EmbeddingStore s(2, "p");
    s.add("x", std::vector<float>{1, 0});
    EXPECT_THROW(s.add("x", std::vector<float>{0, 1}), InputError);
    EXPECT_THROW(s.add("y", std::vector<float>{0, 1, 0}), InputError);
    EXPECT_THROW(s.vector("missing"), InputError);
}

TEST(Import, MinimalCsv) {
    const auto dir = fixture::temp_dir("import");
    write_file((dir / "v.csv").string(), "1,0,0,0\n0,1,0,0\n");
    write_file((dir / "ids.txt").string(), "p1\np2\n");
    const auto r = import_precomputed((dir / "v.csv").string(), (dir / "ids.txt").string());
    EXPECT_EQ(r.store.dim(), 4u);
    EXPECT_EQ(r.store.size(), 2u);
    EXPECT_EQ(r.store.provenance(), "imported");
    EXPECT_EQ(r.renormalized, 0u);
}

TEST(Import, CountMismatch) {
    const auto dir = fixture::temp_dir("import_mismatch");
    write_file((dir / "v.csv").string(), "1,0\n0,1\n");
    write_file((dir / "ids.txt").string(), "a\nb\nc\n");
    EXPECT_THROW(import_precomputed((dir / "v.csv").string(), (dir / "ids.txt").string()), InputError);
}

TEST(Import, ScaledVectorRenormalized) {
    const auto dir = fixture::temp_dir("import_scaled");
    write_file((dir / "v.csv").string(), "2,0\n0,1\n");
    write_file((dir / "ids.txt").string(), "a\nb\n");
    const auto r = import_precomputed((dir / "v.csv").string(), (dir / "ids.txt").string());
    EXPECT_EQ(r.renormalized, 1u);
    EXPECT_FLOAT_EQ(r.store.vector("a")[0], 1.0f);
}

TEST(Import, RawFloatBlockAndNaN) {
    const auto dir = fixture::temp_dir("import_raw");
    std::vector<float> block{0, 1, 1, 0, 0.6f, 0.8f};
    write_file((dir / "v.f32").string(),
               std::string_view(reinterpret_cast<const char*>(block.data()), block.size() * sizeof(float)));
    write_file((dir / "ids.txt").string(), "a\nb\nc\n");
    const auto r = import_precomputed((dir / "v.f32").string(), (dir / "ids.txt").string());
    EXPECT_EQ(r.store.dim(), 2u);
    write_file((dir / "bad.csv").string(), "nan,1\n");
    write_file((dir / "one.txt").string(), "a\n");
    EXPECT_THROW(import_precomputed((dir / "bad.csv").string(), (dir / "one.txt").string()), InputError);
}

TEST(EmbedDocuments, ParallelMatchesSerial) {
    std::vector<corpus::Document> docs;
    Rng rng(12);
    for (int i = 0; i < 300; ++i)
        docs.push_back(fixture::paper(fmt::format("W{:04d}", i), 2000, join(random_words(rng, 30)) + ". More text."));
    for (auto p : {Pooling::kCls, Pooling::kMean}) {
        const auto emb = make_toy_embedder(4, 96);
        EXPECT_EQ(embed_documents_parallel(docs, p, emb, 96, "x"), embed_documents_serial(docs, p, emb, 96, "x"));
    }
}
