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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spsim/corpus.hpp"
#include "spsim/embed.hpp"
#include "spsim/stats.hpp"

namespace spsim::evalbench {

/// One ranking query: a focal patent and 30 candidate papers, 5 of them cited.
struct TripletTask {
    std::string task_id;  // family key
    std::string focal_patent_id;
    std::vector<std::string> positives;  // sorted
    std::vector<std::string> negatives;  // sorted
    int family_year = 0;

    /// positives and negatives merged, sorted by id.
    std::vector<std::string> candidates() const;
    bool operator==(const TripletTask&) const = default;
};

struct BuildOptions {
    std::uint64_t seed = 0;
    std::size_t positives = 5;
    std::size_t negatives = 25;
    int min_lag_years = 1;
    int max_lag_years = 38;
    int confidence = 10;
    std::optional<std::string> authority;  // restrict families to patents of this office
};

struct SkippedFamily {
    std::string family;
    std::string reason;
};

struct BuildResult {
    std::vector<TripletTask> tasks;  // sorted by task_id
    std::vector<SkippedFamily> skipped;
};

/// One task per qualifying family. Families are keyed by family_id (a patent without
/// one is its own family); family_year is the earliest member publication year; the
/// focal patent is the family representative. Positives are drawn from the papers
/// cited at the required confidence that have an English abstract; negatives from
/// English-abstract papers the family never cites, published in
/// [family_year - max_lag, family_year - min_lag]. Sampling uses a per-family stream
/// derived from the seed and the family key, so the qualifying set never depends on
/// the seed. Throws InputError when a citation names an unknown document.
BuildResult build_tasks(std::span<const corpus::CitationLink> citations, const corpus::Corpus& documents,
                        const BuildOptions& options);

struct Ranked {
    std::string paper_id;
    double score = 0.0;
    bool operator==(const Ranked&) const = default;
};

struct RankedList {
    std::string task_id;
    std::vector<Ranked> ordered;  // score descending, ties by ascending paper_id
};

/// Candidates sorted by cosine to the focal vector. Throws InputError naming any id
/// without an embedding.
RankedList rank_task(const TripletTask& task, const embed::EmbeddingStore& store,
                     std::span<const float> focal_vector);
RankedList rank_task(const TripletTask& task, const embed::EmbeddingStore& store);

/// 1-based rank of the first relevant id. Throws InputError when none is present.
std::size_t rfr(const RankedList& list, std::span<const std::string> relevant);

/// (1/R) * sum of precision@k over the positions k holding a relevant id. Throws
/// InputError when a relevant id is missing from the list.
double average_precision(const RankedList& list, std::span<const std::string> relevant);

/// 1/rfr when rfr <= 10, else 0.
double rr_at10(const RankedList& list, std::span<const std::string> relevant);

struct QueryMetrics {
    std::string task_id;
    std::size_t rfr = 0;
    double ap = 0.0;
    double rr10 = 0.0;
    bool operator==(const QueryMetrics&) const = default;
};

QueryMetrics evaluate(const RankedList& list, std::span<const std::string> relevant);

struct MetricReport {
    std::vector<QueryMetrics> per_query;  // sorted by task_id
    double avg_rfr = 0.0;
    double map = 0.0;
    double mrr10 = 0.0;
    std::size_t query_count = 0;
};

/// Means over queries, summed in task-id order. Throws InputError on empty input.
MetricReport aggregate(std::span<const QueryMetrics> per_query);

struct MetricRow {
    std::string task_id;
    std::string model;
    std::string pooling;
    std::size_t rfr = 0;
    double ap = 0.0;
    double rr10 = 0.0;
    bool operator==(const MetricRow&) const = default;
};

/// Ranks and scores every task against one store. Tasks run in parallel; output i
/// belongs to task i.
std::vector<QueryMetrics> run_bench(std::span<const TripletTask> tasks, const embed::EmbeddingStore& store);
std::vector<QueryMetrics> run_bench_serial(std::span<const TripletTask> tasks, const embed::EmbeddingStore& store);

enum class Metric { kRfr, kAp, kRr10 };
Metric parse_metric(std::string_view s);
const char* to_string(Metric m);

/// Stacks one row per (task, model) and regresses the metric on model dummies with
/// base_model as reference. Throws InputError listing tasks missing from any model
/// and ConfigError when base_model is absent.
stats::RegressionFit compare_models(const std::map<std::string, std::vector<QueryMetrics>>& per_model,
                                    const std::string& base_model, Metric metric);

void write_tasks_jsonl(std::ostream& out, std::span<const TripletTask> tasks);
std::vector<TripletTask> read_tasks_jsonl(const std::string& path);
std::vector<TripletTask> parse_tasks_jsonl(std::istream& in);

/// Columns: task_id, model, pooling, rfr, ap, rr10.
void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);
std::vector<MetricRow> read_metrics_csv(const std::string& path);

}  // namespace spsim::evalbench
