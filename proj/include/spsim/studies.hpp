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
#include <vector>

#include "spsim/corpus.hpp"
#include "spsim/embed.hpp"
#include "spsim/index.hpp"
#include "spsim/stats.hpp"

namespace spsim::studies {

enum class PairType : std::uint8_t { kPpp, kPpc };
const char* to_string(PairType t);

struct PairSimRecord {
    std::string patent_id;
    std::string paper_id;
    PairType pair_type = PairType::kPpp;
    double similarity = 0.0;
    bool operator==(const PairSimRecord&) const = default;
};

/// Fixed-width bins over [lo, hi); a value equal to hi lands in the last bin.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;

    Histogram() = default;
    Histogram(double lo, double hi, std::size_t bins) : lo(lo), hi(hi), counts(bins, 0) {}
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    void add(double x);
    std::uint64_t total() const;
};

inline constexpr double kSimilarityBinWidth = 0.005;
Histogram similarity_histogram();  // 400 bins over [-1, 1]

struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // sample (n - 1)
};

struct SimilarityStudy {
    std::vector<PairSimRecord> records;  // by pair type, then patent, then paper
    Histogram ppp_histogram;
    Histogram ppc_histogram;
    SampleStats ppp;
    SampleStats ppc;
    std::size_t ppc_excluded_as_ppp = 0;
    std::size_t ppp_missing_embedding = 0;
    std::size_t ppc_missing_embedding = 0;
    std::optional<stats::WelchResult> separation;  // PPP mean > PPC mean, when both have 2+ pairs
};

/// Cosine for every distinct PPP pair and every PPC pair that is not also a PPP.
/// Pairs lacking an embedding are counted per type. Throws InputError when no pair
/// remains to score.
SimilarityStudy ppp_ppc_similarity(std::span<const corpus::PPPRecord> ppps,
                                   std::span<const corpus::CitationLink> ppcs, const embed::EmbeddingStore& store);

struct PPPSearchOutcome {
    std::string patent_id;
    std::string paper_id;
    std::optional<std::size_t> rank;  // 1-based, absent when outside the top k
    int confidence_level = 0;
    bool scored = true;  // false when the patent has no embedding or metadata
    bool operator==(const PPPSearchOutcome&) const = default;
};

/// One column of the rank summary table. Rank statistics cover matched pairs only.
struct RankSummary {
    std::string level;  // "1".."4" or "total"
    std::size_t count = 0;
    std::size_t matched = 0;
    double share_pct = 0.0;
    std::optional<double> median;
    std::optional<double> mean;
    std::optional<double> std_dev;
    bool operator==(const RankSummary&) const = default;
};

/// (rank, share of scored pairs with rank <= that rank) at each observed rank.
struct EcdfPoint {
    std::size_t rank = 0;
    double share = 0.0;
    bool operator==(const EcdfPoint&) const = default;
};

struct PredictOptions {
    std::size_t k = 1000;
    int window_years = 9;
};

struct PredictResult {
    std::vector<PPPSearchOutcome> outcomes;  // by patent, then paper
    std::vector<RankSummary> summary;        // levels ascending, then total
    std::map<std::string, std::vector<EcdfPoint>> ecdf;  // keyed like RankSummary::level
    std::size_t unscored = 0;
};

/// For each patent, one search for papers published within window_years of the
/// patent's publication year; each paired paper's rank is looked up in that list.
/// patent_vectors supplies query vectors; meta supplies the patent publication year.
PredictResult predict_ppp(std::span<const corpus::PPPRecord> ppps, const index::Index& index,
                          const embed::EmbeddingStore& patent_vectors, const index::MetaMap& meta,
                          const PredictOptions& options = {});

/// Summary and ECDF from finished outcomes.
std::vector<RankSummary> summarize_ranks(std::span<const PPPSearchOutcome> outcomes);
std::map<std::string, std::vector<EcdfPoint>> rank_ecdf(std::span<const PPPSearchOutcome> outcomes);

struct PPCMatchRecord {
    std::string patent_id;
    std::string paper_id;
    bool matched = false;
    std::optional<std::size_t> rank;  // 1-based within the top k
    std::string authority;
    int filing_year = 0;
    corpus::CitationLocation location = corpus::CitationLocation::kFront;
    bool self_citation = false;
    int confidence = 0;
    std::string cpc_sections;
    std::size_t n_paper_citations = 0;
    bool operator==(const PPCMatchRecord&) const = default;
};

struct PatentShare {
    std::string patent_id;
    std::size_t matched = 0;
    std::size_t total = 0;
    double share() const { return total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0; }
    bool operator==(const PatentShare&) const = default;
};

struct MatchOptions {
    std::size_t k = 3000;
    std::size_t rank_threshold = 1000;
};

struct MatchResult {
    std::vector<PPCMatchRecord> records;  // by patent, then paper
    std::vector<PatentShare> shares;      // by patent
    Histogram share_histogram;            // 20 bins over [0, 1]
    std::size_t unscored = 0;             // links whose patent has no embedding
};

/// Family-level deduplication for the match study: links to papers without an English
/// abstract and links from families without an English member are dropped, and each
/// (family, paper) pair keeps the link of the citing member whose office ranks highest
/// (ties to the lower patent id). Unknown ids raise InputError.
std::vector<corpus::CitationLink> prepare_match_links(std::span<const corpus::CitationLink> links,
                                                      const corpus::Corpus& documents);

/// For each citing patent, one search for papers published in or before its filing
/// year; a link is matched when the cited paper ranks within the first
/// rank_threshold results. Query vectors come from patent_vectors, falling back to the
/// family representative's vector. Throws ConfigError when k < rank_threshold and
/// InputError when a citing patent is unknown or lacks a filing year or authority.
MatchResult ppc_match_study(std::span<const corpus::CitationLink> ppcs, const index::Index& index,
                            const embed::EmbeddingStore& patent_vectors, const corpus::Corpus& documents,
                            const MatchOptions& options = {});

inline constexpr std::string_view kCpcLetters = "ABCDEFGHY";

struct FrameOptions {
    std::string authority_reference = "EP";
    bool filing_year_fe = true;
    bool confidence_fe = true;
};

struct RegressionFrame {
    stats::DataFrame frame;
    stats::DesignMatrixSpec spec;
};

/// Response "matched"; terms authority, front_and_body, self_citation,
/// n_paper_citations, optional filing-year and confidence fixed effects, then the nine
/// CPC dummies cpc_A .. cpc_Y. Throws InputError listing rows whose authority is not a
/// two-letter upper-case code.
RegressionFrame build_regression_frame(std::span<const PPCMatchRecord> records, const FrameOptions& options = {});

void write_similarity_csv(std::ostream& out, std::span<const PairSimRecord> records);
void write_histograms_csv(std::ostream& out, const SimilarityStudy& study);
void write_outcomes_csv(std::ostream& out, std::span<const PPPSearchOutcome> outcomes);
void write_ecdf_csv(std::ostream& out, const std::map<std::string, std::vector<EcdfPoint>>& ecdf);
std::string rank_summary_json(std::span<const RankSummary> summary, std::size_t unscored);
void write_match_records_csv(std::ostream& out, std::span<const PPCMatchRecord> records);
std::vector<PPCMatchRecord> read_match_records_csv(const std::string& path);
void write_shares_csv(std::ostream& out, std::span<const PatentShare> shares);
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace spsim::studies
