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

// Serial reference vs OpenMP kernels, plus HNSW vs exact scan.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "spsim/evalbench.hpp"
#include "spsim/kernels.hpp"
#include "spsim/stats.hpp"
#include "spsim/synth.hpp"

using namespace spsim;

namespace {

constexpr std::size_t kDim = 128;

const fixture::RandomCollection& collection() {
    static const auto c = fixture::random_collection(50000, kDim, 1);
    return c;
}

const index::Index& exact_index() {
    static const auto idx = index::Index::build(collection().store, collection().meta, {});
    return idx;
}

const index::Index& hnsw_index() {
    static const auto idx = [] {
        index::IndexConfig cfg;
        cfg.mode = index::IndexMode::kHnsw;
        return index::Index::build(collection().store, collection().meta, cfg);
    }();
    return idx;
}

std::vector<std::vector<float>> queries(std::size_t n) {
    Rng rng(2);
    std::vector<std::vector<float>> q;
    for (std::size_t i = 0; i < n; ++i) q.push_back(fixture::random_unit(rng, kDim));
    return q;
}

kernels::MatrixView view(const std::vector<double>& norms) {
    return {collection().store.data(), kDim, norms};
}

}  // namespace

static void BM_RowNormsSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(kernels::row_norms_serial(collection().store.data(), kDim));
}
static void BM_RowNormsParallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(kernels::row_norms_parallel(collection().store.data(), kDim));
}
BENCHMARK(BM_RowNormsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowNormsParallel)->Unit(benchmark::kMillisecond);

static void BM_ScoreAllSerial(benchmark::State& st) {
    const auto norms = kernels::row_norms_serial(collection().store.data(), kDim);
    const auto q = queries(1).front();
    std::vector<double> out(collection().store.size());
    for (auto _ : st) kernels::score_all_serial(q, kernels::l2_norm(q), view(norms), out);
}
static void BM_ScoreAllParallel(benchmark::State& st) {
    const auto norms = kernels::row_norms_serial(collection().store.data(), kDim);
    const auto q = queries(1).front();
    std::vector<double> out(collection().store.size());
    for (auto _ : st) kernels::score_all_parallel(q, kernels::l2_norm(q), view(norms), out);
}
BENCHMARK(BM_ScoreAllSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreAllParallel)->Unit(benchmark::kMillisecond);

static void BM_TopKSerial(benchmark::State& st) {
    const auto norms = kernels::row_norms_serial(collection().store.data(), kDim);
    const auto q = queries(1).front();
    const auto k = static_cast<std::size_t>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::top_k_serial(q, kernels::l2_norm(q), view(norms), k, [](std::size_t) { return true; }));
}
static void BM_TopKParallel(benchmark::State& st) {
    const auto norms = kernels::row_norms_serial(collection().store.data(), kDim);
    const auto q = queries(1).front();
    const auto k = static_cast<std::size_t>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::top_k_parallel(q, kernels::l2_norm(q), view(norms), k, [](std::size_t) { return true; }));
}
BENCHMARK(BM_TopKSerial)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopKParallel)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SearchExactSerial(benchmark::State& st) {
    const auto q = queries(1).front();
    for (auto _ : st) benchmark::DoNotOptimize(exact_index().search_exact_serial(q, 10));
}
static void BM_SearchExact(benchmark::State& st) {
    const auto q = queries(1).front();
    for (auto _ : st) benchmark::DoNotOptimize(exact_index().search(q, 10));
}
static void BM_SearchHnsw(benchmark::State& st) {
    const auto q = queries(1).front();
    hnsw_index();
    for (auto _ : st) benchmark::DoNotOptimize(hnsw_index().search(q, 10));
}
BENCHMARK(BM_SearchExactSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SearchExact)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SearchHnsw)->Unit(benchmark::kMicrosecond);

static void BM_BatchSearchSerial(benchmark::State& st) {
    std::vector<index::BatchQuery> batch;
    for (auto& q : queries(64)) batch.push_back({q, {}});
    for (auto _ : st) benchmark::DoNotOptimize(index::batch_search_serial(exact_index(), batch, 10));
}
static void BM_BatchSearchParallel(benchmark::State& st) {
    std::vector<index::BatchQuery> batch;
    for (auto& q : queries(64)) batch.push_back({q, {}});
    for (auto _ : st) benchmark::DoNotOptimize(index::batch_search(exact_index(), batch, 10, 0));
}
BENCHMARK(BM_BatchSearchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchSearchParallel)->Unit(benchmark::kMillisecond);

namespace {
const std::vector<corpus::Document>& bundled_docs() {
    static const auto docs = synth::make_corpus(synth::bundled_options()).documents;
    return docs;
}
}  // namespace

static void BM_EmbedSerial(benchmark::State& st) {
    const auto e = embed::make_toy_embedder(0, 768);
    for (auto _ : st)
        benchmark::DoNotOptimize(embed::embed_documents_serial(bundled_docs(), embed::Pooling::kMean, e, 768, "toy"));
}
static void BM_EmbedParallel(benchmark::State& st) {
    const auto e = embed::make_toy_embedder(0, 768);
    for (auto _ : st)
        benchmark::DoNotOptimize(embed::embed_documents_parallel(bundled_docs(), embed::Pooling::kMean, e, 768, "toy"));
}
BENCHMARK(BM_EmbedSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbedParallel)->Unit(benchmark::kMillisecond);

namespace {
struct OlsProblem {
    stats::Matrix x{200000, 40};
    std::vector<double> y = std::vector<double>(200000);
    std::vector<std::string> names;
    OlsProblem() {
        Rng rng(3);
        for (std::size_t j = 0; j < 40; ++j) names.push_back(fmt::format("x{}", j));
        for (std::size_t i = 0; i < 200000; ++i) {
            for (std::size_t j = 0; j < 40; ++j) x(i, j) = j == 0 ? 1.0 : rng.normal();
            y[i] = x(i, 1) + rng.normal();
        }
    }
};
const OlsProblem& ols_problem() {
    static const OlsProblem p;
    return p;
}
}  // namespace

static void BM_OlsSerial(benchmark::State& st) {
    const auto& p = ols_problem();
    for (auto _ : st) benchmark::DoNotOptimize(stats::ols_fit_serial(p.x, p.y, p.names));
}
static void BM_OlsBlockedParallel(benchmark::State& st) {
    const auto& p = ols_problem();
    for (auto _ : st) benchmark::DoNotOptimize(stats::ols_fit(p.x, p.y, p.names));
}
BENCHMARK(BM_OlsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OlsBlockedParallel)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    // Fixtures are built up front so no timed iteration pays for them.
    exact_index();
    hnsw_index();
    bundled_docs();
    ols_problem();
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
