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

#include "spsim/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "spsim/rng.hpp"

namespace spsim::synth {

namespace {

constexpr const char* kSyllables[] = {"ba", "ke", "li", "mo", "nu", "pa", "re", "si",
                                      "tov", "vu", "da", "fe", "gi", "hox", "ju", "zel"};
constexpr const char* kAuthorities[] = {"EP", "WO", "US", "JP", "CN", "KR", "DE", "FR", "GB"};
constexpr std::string_view kCpc = "ABCDEFGHY";

std::string make_word(std::size_t i) {
    std::size_t v = i + 16;
    std::string w;
    while (v > 0) {
        w = kSyllables[v % 16] + w;
        v /= 16;
    }
    return w;
}

using Tokens = std::vector<std::string>;

struct Generator {
    const SynthOptions& opt;
    Rng rng;
    std::vector<std::string> vocab;
    std::set<std::string> used_ids;

    explicit Generator(const SynthOptions& o) : opt(o), rng(o.seed) {
        vocab.reserve(o.vocabulary);
        for (std::size_t i = 0; i < o.vocabulary; ++i) vocab.push_back(make_word(i));
    }

    Tokens fresh(std::size_t n) {
        Tokens t;
        t.reserve(n);
        for (std::size_t i = 0; i < n; ++i) t.push_back(vocab[rng.below(vocab.size())]);
        return t;
    }

    // share of the source tokens (by position, without replacement), rest fresh.
    Tokens overlap(const Tokens& source, double share) {
        const auto keep = static_cast<std::size_t>(std::lround(share * static_cast<double>(source.size())));
        Tokens t;
        for (auto i : rng.sample_indices(source.size(), keep)) t.push_back(source[i]);
        auto rest = fresh(source.size() - keep);
        t.insert(t.end(), rest.begin(), rest.end());
        rng.shuffle(t);
        return t;
    }

    std::string unique_id(const std::string& prefix, std::size_t digits, const std::string& suffix) {
        for (;;) {
            std::string num;
            for (std::size_t i = 0; i < digits; ++i) num += static_cast<char>('0' + rng.below(10));
            auto id = prefix + num + suffix;
            if (used_ids.insert(id).second) return id;
        }
    }

    std::chrono::year_month_day date(int year) {
        return std::chrono::year_month_day{std::chrono::year{year},
                                           std::chrono::month{static_cast<unsigned>(1 + rng.below(12))},
                                           std::chrono::day{static_cast<unsigned>(1 + rng.below(28))}};
    }
};

std::string render(const Tokens& t, bool german) {
    static constexpr const char* kEn[] = {"The", "", "", "of the", "", "and", "", "is", "", "", "with", "", "for", ""};
    static constexpr const char* kDe[] = {"Die", "", "", "der", "", "und", "", "ist", "", "", "mit", "", "f\xc3\xbcr", ""};
    const auto& frame = german ? kDe : kEn;
    std::string out;
    std::size_t ti = 0;
    while (ti < t.size()) {
        std::string sentence;
        for (const char* slot : frame) {
            if (ti >= t.size()) break;
            const std::string word = *slot ? std::string(slot) : t[ti++];
            if (!sentence.empty()) sentence += ' ';
            sentence += word;
        }
        if (!out.empty()) out += ' ';
        out += sentence + ".";
    }
    return out;
}

std::string title_of(const Tokens& t) {
    std::string s;
    for (std::size_t i = 0; i < std::min<std::size_t>(4, t.size()); ++i) s += (i ? " " : "") + t[i];
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

}  // namespace

SynthOptions bundled_options() {
    SynthOptions o;
    o.seed = 20240501;
    o.families = 40;
    o.ppp_pairs = 40;
    o.decoy_papers = 0;  // filled below
    SynthCorpus probe = make_corpus(o);
    const std::size_t have = probe.documents.size();
    o.decoy_papers = have < 500 ? 500 - have : 0;
    return o;
}

SynthCorpus make_corpus(const SynthOptions& opt) {
    if (opt.families == 0 || opt.max_family_size == 0 || opt.content_tokens < 8)
        throw ConfigError("synthetic corpus needs families, family members and at least 8 content tokens");
    if (opt.min_citations == 0 || opt.max_citations < opt.min_citations)
        throw ConfigError("synthetic corpus citation bounds are inconsistent");
    Generator g(opt);
    SynthCorpus out;
    std::vector<corpus::Document> patents, papers;
    std::vector<Tokens> patent_tokens;

    auto make_paper = [&](const Tokens& tokens, int year) {
        corpus::Document d;
        d.id = g.unique_id("W", 9, "");
        d.kind = DocKind::kPaper;
        const bool german = g.rng.uniform() < opt.non_english_share;
        d.title = title_of(tokens);
        d.abstract = render(tokens, german);
        if (german) {
            if (g.rng.below(2) == 0) d.lang = "de";
        } else {
            if (g.rng.uniform() < 0.7) d.lang = "en";
            const double u = g.rng.uniform();
            if (u < 0.15) d.abstract = "BACKGROUND: " + d.abstract;
            else if (u < 0.25) d.abstract = "<p>" + d.abstract + "</p>";
            if (g.rng.uniform() < 0.2) d.abstract += fmt::format(" \xc2\xa9 {} Elsevier B.V. All rights reserved.", year);
        }
        d.pub_date = g.date(year);
        return d;
    };

    struct Family {
        std::vector<std::size_t> members;  // indices into patents
        Tokens tokens;
        int filing_year = 0;
    };
    std::vector<Family> families(opt.families);
    for (std::size_t f = 0; f < opt.families; ++f) {
        auto& fam = families[f];
        fam.tokens = g.fresh(opt.content_tokens);
        fam.filing_year = 1998 + static_cast<int>(g.rng.below(22));
        const std::size_t size = 1 + g.rng.below(opt.max_family_size);
        const auto auths = g.rng.sample_indices(std::size(kAuthorities), std::min(size, std::size(kAuthorities)));
        const std::string family_id = g.unique_id("F", 8, "");
        std::string cpc;
        cpc += kCpc[f % kCpc.size()];
        for (std::size_t extra = g.rng.below(3); extra > 0; --extra) cpc += kCpc[g.rng.below(kCpc.size())];
        std::sort(cpc.begin(), cpc.end());
        cpc.erase(std::unique(cpc.begin(), cpc.end()), cpc.end());
        for (auto a : auths) {
            corpus::Document d;
            const std::string auth = kAuthorities[a];
            d.id = g.unique_id(auth, 7, auth == "US" ? "B2" : "A1");
            d.kind = DocKind::kPatent;
            const Tokens variant = g.overlap(fam.tokens, 0.9);
            d.title = title_of(variant);
            d.abstract = render(variant, false);
            d.lang = "en";
            d.filing_year = fam.filing_year;
            d.pub_date = g.date(fam.filing_year + 1 + static_cast<int>(g.rng.below(3)));
            d.authority = auth;
            d.family_id = family_id;
            d.application_id = std::to_string(10000000 + g.rng.below(90000000));
            d.cpc_sections = cpc;
            fam.members.push_back(patents.size());
            patents.push_back(std::move(d));
            patent_tokens.push_back(variant);
        }
    }

    auto citation = [&](const std::string& patent, const std::string& paper, int confidence) {
        corpus::CitationLink l;
        l.patent_id = patent;
        l.paper_id = paper;
        l.confidence = confidence;
        const double u = g.rng.uniform();
        l.location = u < 0.5 ? corpus::CitationLocation::kFront
                     : u < 0.7 ? corpus::CitationLocation::kBody
                               : corpus::CitationLocation::kFrontAndBody;
        l.self_citation = g.rng.uniform() < 0.1;
        out.citations.push_back(std::move(l));
    };

    for (std::size_t f = 0; f < families.size(); ++f) {
        const auto& fam = families[f];
        std::size_t n = opt.min_citations + g.rng.below(opt.max_citations - opt.min_citations + 1);
        if (f < opt.short_families) n = opt.min_citations - 1;
        for (std::size_t c = 0; c < n; ++c) {
            int year = fam.filing_year - 1 - static_cast<int>(g.rng.below(20));
            if (g.rng.uniform() < 0.05) year = fam.filing_year + 1 + static_cast<int>(g.rng.below(3));
            auto paper = make_paper(g.overlap(fam.tokens, opt.ppc_overlap), year);
            const auto& citing = patents[fam.members[g.rng.below(fam.members.size())]];
            citation(citing.id, paper.id, 10);
            papers.push_back(std::move(paper));
        }
    }

    const auto ppp_patents = g.rng.sample_indices(patents.size(), std::min(opt.ppp_pairs, patents.size()));
    for (std::size_t i = 0; i < ppp_patents.size(); ++i) {
        const auto& patent = patents[ppp_patents[i]];
        const int year = patent.pub_year() - 3 + static_cast<int>(g.rng.below(7));
        auto paper = make_paper(g.overlap(patent_tokens[ppp_patents[i]], opt.ppp_overlap), year);
        out.ppps.push_back({patent.id, paper.id, 1 + static_cast<int>(g.rng.below(4))});
        // Every tenth pair is also cited, so PPC-vs-PPP exclusion has work to do.
        if (i % 10 == 0) citation(patent.id, paper.id, 10);
        papers.push_back(std::move(paper));
    }

    const std::size_t cited_and_ppp = papers.size();
    for (std::size_t i = 0; i < opt.decoy_papers; ++i)
        papers.push_back(make_paper(g.fresh(opt.content_tokens), 1975 + static_cast<int>(g.rng.below(48))));

    const std::size_t decoys = papers.size() - cited_and_ppp;
    if (decoys > 0) {
        for (const auto& fam : families) {
            if (g.rng.uniform() >= opt.low_confidence_share) continue;
            const auto& citing = patents[fam.members.front()];
            const auto& paper = papers[cited_and_ppp + g.rng.below(decoys)];
            citation(citing.id, paper.id, 1 + static_cast<int>(g.rng.below(9)));
        }
    }

    auto by_id = [](const corpus::Document& a, const corpus::Document& b) { return a.id < b.id; };
    std::sort(patents.begin(), patents.end(), by_id);
    std::sort(papers.begin(), papers.end(), by_id);
    out.documents = std::move(patents);
    out.documents.insert(out.documents.end(), std::make_move_iterator(papers.begin()),
                         std::make_move_iterator(papers.end()));
    std::sort(out.citations.begin(), out.citations.end(), [](const auto& a, const auto& b) {
        return std::tie(a.patent_id, a.paper_id) < std::tie(b.patent_id, b.paper_id);
    });
    std::sort(out.ppps.begin(), out.ppps.end(), [](const auto& a, const auto& b) {
        return std::tie(a.patent_id, a.paper_id) < std::tie(b.patent_id, b.paper_id);
    });
    return out;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    auto open = [&](const char* name) {
        std::ofstream out(base / name, std::ios::binary);
        if (!out) throw InputError(fmt::format("cannot write {}", (base / name).string()));
        return out;
    };
    {
        auto out = open("documents.jsonl");
        corpus::write_documents(out, corpus.documents, corpus::DocFormat::kJsonl);
    }
    {
        auto out = open("citations.tsv");
        corpus::write_citations(out, corpus.citations);
    }
    {
        auto out = open("ppps.tsv");
        corpus::write_ppps(out, corpus.ppps);
    }
}

}  // namespace spsim::synth
