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
#include <string>
#include <vector>

#include "spsim/corpus.hpp"

namespace spsim::synth {

/// Generator settings for a synthetic patent/paper corpus with planted structure:
/// PPP papers reuse ppp_overlap of their patent's content tokens and cited papers
/// reuse ppc_overlap; every other paper draws fresh tokens.
struct SynthOptions {
    std::uint64_t seed = 7;
    std::size_t families = 40;
    std::size_t max_family_size = 3;
    std::size_t min_citations = 5;     // confidence-10 citations per family
    std::size_t max_citations = 8;
    std::size_t short_families = 1;    // families citing only min_citations - 1 papers
    std::size_t ppp_pairs = 40;
    std::size_t decoy_papers = 150;
    std::size_t vocabulary = 4000;
    std::size_t content_tokens = 40;
    double ppp_overlap = 0.8;
    double ppc_overlap = 0.3;
    double non_english_share = 0.05;
    double low_confidence_share = 0.15;  // extra citations below confidence 10
};

struct SynthCorpus {
    std::vector<corpus::Document> documents;  // patents first, then papers, each id-sorted
    std::vector<corpus::CitationLink> citations;
    std::vector<corpus::PPPRecord> ppps;
};

SynthCorpus make_corpus(const SynthOptions& options);

/// Writes documents.jsonl, citations.tsv and ppps.tsv into dir (created if needed).
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

/// Options for the bundled 500-document corpus.
SynthOptions bundled_options();

}  // namespace spsim::synth
