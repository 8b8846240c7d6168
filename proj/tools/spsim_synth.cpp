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

// Writes a synthetic corpus (documents.jsonl, citations.tsv, ppps.tsv).

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spsim/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic patent/paper corpus"};
    std::string out_dir = "data/synthetic";
    bool bundled = false;
    spsim::synth::SynthOptions opt;
    app.add_option("--out-dir", out_dir)->capture_default_str();
    app.add_flag("--bundled", bundled, "Use the settings of the bundled 500-document corpus");
    app.add_option("--seed", opt.seed)->capture_default_str();
    app.add_option("--families", opt.families)->capture_default_str();
    app.add_option("--ppp-pairs", opt.ppp_pairs)->capture_default_str();
    app.add_option("--decoys", opt.decoy_papers)->capture_default_str();
    app.add_option("--content-tokens", opt.content_tokens)->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    try {
        if (bundled) opt = spsim::synth::bundled_options();
        const auto corpus = spsim::synth::make_corpus(opt);
        spsim::synth::write_corpus(corpus, out_dir);
        std::cout << fmt::format("{} documents, {} citations, {} pairs -> {}\n", corpus.documents.size(),
                                 corpus.citations.size(), corpus.ppps.size(), out_dir);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
