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

#include "spsim/studies.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

namespace spsim::studies {

const char* to_string(PairType t) { return t == PairType::kPpp ? "ppp" : "ppc"; }

void Histogram::add(double x) {
    if (counts.empty()) return;
    const double pos = (x - lo) * static_cast<double>(counts.size()) / (hi - lo);
    const auto last = static_cast<std::int64_t>(counts.size()) - 1;
    const auto bin = std::clamp(static_cast<std::int64_t>(std::floor(pos)), std::int64_t{0}, last);
    ++counts[static_cast<std::size_t>(bin)];
}

std::uint64_t Histogram::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

Histogram similarity_histogram() { return Histogram(-1.0, 1.0, 400); }

namespace {

using Key = std::pair<std::string, std::string>;

SampleStats sample_stats(std::span<const double> v) {
    SampleStats s;
    s.count = v.size();
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
void for_each_parallel(std::size_t n, Fn&& fn) {
    std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

std::unordered_map<std::string, std::size_t> rank_map(const std::vector<index::Neighbor>& hits) {
    std::unordered_map<std::string, std::size_t> ranks;
    ranks.reserve(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) ranks.emplace(hits[i].doc_id, i + 1);
    return ranks;
}

}  // namespace

// ---------------------------------------------------------------------------

SimilarityStudy ppp_ppc_similarity(std::span<const corpus::PPPRecord> ppps,
                                   std::span<const corpus::CitationLink> ppcs, const embed::EmbeddingStore& store) {
    std::set<Key> ppp_keys;
    for (const auto& p : ppps) ppp_keys.emplace(p.patent_id, p.paper_id);
    std::set<Key> ppc_keys;
    SimilarityStudy study;
    for (const auto& c : ppcs) {
        Key key{c.patent_id, c.paper_id};
        if (ppp_keys.contains(key)) {
            ++study.ppc_excluded_as_ppp;
            continue;
        }
        ppc_keys.insert(std::move(key));
    }
    study.ppp_histogram = similarity_histogram();
    study.ppc_histogram = similarity_histogram();
    std::vector<double> ppp_sims, ppc_sims;
    auto score = [&](const std::set<Key>& keys, PairType type, std::size_t& missing, std::vector<double>& sims,
                     Histogram& hist) {
        for (const auto& [patent, paper] : keys) {
            if (!store.contains(patent) || !store.contains(paper)) {
                ++missing;
                continue;
            }
            const double s = index::cosine(store.vector(patent), store.vector(paper));
            study.records.push_back({patent, paper, type, s});
            sims.push_back(s);
            hist.add(s);
        }
    };
    score(ppp_keys, PairType::kPpp, study.ppp_missing_embedding, ppp_sims, study.ppp_histogram);
    score(ppc_keys, PairType::kPpc, study.ppc_missing_embedding, ppc_sims, study.ppc_histogram);
    if (study.records.empty())
        throw InputError(fmt::format("no scorable pairs remain ({} PPP and {} PPC pairs lack embeddings)",
                                     study.ppp_missing_embedding, study.ppc_missing_embedding));
    study.ppp = sample_stats(ppp_sims);
    study.ppc = sample_stats(ppc_sims);
    if (ppp_sims.size() >= 2 && ppc_sims.size() >= 2) study.separation = stats::welch_t_test(ppp_sims, ppc_sims);
    return study;
}

// ---------------------------------------------------------------------------

std::vector<RankSummary> summarize_ranks(std::span<const PPPSearchOutcome> outcomes) {
    std::map<int, std::vector<const PPPSearchOutcome*>> by_level;
    std::vector<const PPPSearchOutcome*> all;
    for (const auto& o : outcomes) {
        if (!o.scored) continue;
        by_level[o.confidence_level].push_back(&o);
        all.push_back(&o);
    }
    auto summarize = [](std::string level, const std::vector<const PPPSearchOutcome*>& group) {
        RankSummary s;
        s.level = std::move(level);
        s.count = group.size();
        std::vector<double> ranks;
        for (const auto* o : group)
            if (o->rank) ranks.push_back(static_cast<double>(*o->rank));
        s.matched = ranks.size();
        s.share_pct = s.count ? 100.0 * static_cast<double>(s.matched) / static_cast<double>(s.count) : 0.0;
        if (!ranks.empty()) {
            const auto st = sample_stats(ranks);
            s.median = median_of(ranks);
            s.mean = st.mean;
            if (ranks.size() > 1) s.std_dev = st.std_dev;
        }
        return s;
    };
    std::vector<RankSummary> out;
    for (const auto& [level, group] : by_level) out.push_back(summarize(std::to_string(level), group));
    out.push_back(summarize("total", all));
    return out;
}

std::map<std::string, std::vector<EcdfPoint>> rank_ecdf(std::span<const PPPSearchOutcome> outcomes) {
    std::map<std::string, std::vector<std::size_t>> ranks;
    std::map<std::string, std::size_t> scored;
    for (const auto& o : outcomes) {
        if (!o.scored) continue;
        for (const std::string& level : {std::to_string(o.confidence_level), std::string("total")}) {
            ++scored[level];
            if (o.rank) ranks[level].push_back(*o.rank);
        }
    }
    std::map<std::string, std::vector<EcdfPoint>> out;
    for (const auto& [level, n] : scored) {
        auto& points = out[level];
        auto r = ranks[level];
        std::sort(r.begin(), r.end());
        for (std::size_t i = 0; i < r.size(); ++i)
            if (i + 1 == r.size() || r[i + 1] != r[i])
                points.push_back({r[i], static_cast<double>(i + 1) / static_cast<double>(n)});
    }
    return out;
}

PredictResult predict_ppp(std::span<const corpus::PPPRecord> ppps, const index::Index& index,
                          const embed::EmbeddingStore& patent_vectors, const index::MetaMap& meta,
                          const PredictOptions& options) {
    if (options.k == 0) throw ConfigError("k must be positive");
    if (options.window_years < 0) throw ConfigError("window_years must be non-negative");
    std::map<std::string, std::vector<const corpus::PPPRecord*>> by_patent;
    for (const auto& p : ppps) by_patent[p.patent_id].push_back(&p);
    std::vector<std::string> patents;
    for (const auto& [id, _] : by_patent) patents.push_back(id);

    std::vector<std::vector<PPPSearchOutcome>> per_patent(patents.size());
    for_each_parallel(patents.size(), [&](std::size_t i) {
        const auto& patent = patents[i];
        auto records = by_patent.at(patent);
        std::stable_sort(records.begin(), records.end(),
                         [](const auto* a, const auto* b) { return a->paper_id < b->paper_id; });
        auto& out = per_patent[i];
        const auto m = meta.find(patent);
        if (!patent_vectors.contains(patent) || m == meta.end()) {
            for (const auto* r : records) out.push_back({r->patent_id, r->paper_id, std::nullopt, r->confidence_level, false});
            return;
        }
        const int year = m->second.pub_year;
        index::SearchFilter filter{year - options.window_years, year + options.window_years, DocKind::kPaper};
        const auto ranks = rank_map(index.search(patent_vectors.vector(patent), options.k, filter));
        for (const auto* r : records) {
            std::optional<std::size_t> rank;
            if (auto it = ranks.find(r->paper_id); it != ranks.end()) rank = it->second;
            out.push_back({r->patent_id, r->paper_id, rank, r->confidence_level, true});
        }
    });

    PredictResult result;
    for (auto& group : per_patent)
        for (auto& o : group) {
            if (!o.scored) ++result.unscored;
            result.outcomes.push_back(std::move(o));
        }
    result.summary = summarize_ranks(result.outcomes);
    result.ecdf = rank_ecdf(result.outcomes);
    return result;
}

// ---------------------------------------------------------------------------

std::vector<corpus::CitationLink> prepare_match_links(std::span<const corpus::CitationLink> links,
                                                      const corpus::Corpus& documents) {
    auto family_of = [](const corpus::Document& d) { return d.family_id.value_or(d.id); };
    std::set<std::string> english_families;
    for (const auto& d : documents.documents())
        if (d.kind == DocKind::kPatent && corpus::has_english_abstract(d)) english_families.insert(family_of(d));

    std::map<std::pair<std::string, std::string>, const corpus::CitationLink*> best;
    std::vector<std::string> unknown;
    for (const auto& l : links) {
        const auto* patent = documents.find(l.patent_id);
        const auto* paper = documents.find(l.paper_id);
        if (!patent || !paper) {
            unknown.push_back(!patent ? l.patent_id : l.paper_id);
            continue;
        }
        if (!corpus::has_english_abstract(*paper) || !english_families.count(family_of(*patent))) continue;
        auto& slot = best[{family_of(*patent), l.paper_id}];
        if (!slot) {
            slot = &l;
            continue;
        }
        const auto* held = documents.find(slot->patent_id);
        const auto key = [](const corpus::Document& d) {
            return std::make_pair(corpus::authority_rank(d.authority.value_or("")), d.id);
        };
        if (key(*patent) < key(*held)) slot = &l;
    }
    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
        throw InputError(fmt::format("citations reference unknown documents: {}", fmt::join(unknown, ", ")));
    }
    std::vector<corpus::CitationLink> out;
    out.reserve(best.size());
    for (const auto& [key, l] : best) out.push_back(*l);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.patent_id, a.paper_id) < std::tie(b.patent_id, b.paper_id);
    });
    return out;
}

MatchResult ppc_match_study(std::span<const corpus::CitationLink> ppcs, const index::Index& index,
                            const embed::EmbeddingStore& patent_vectors, const corpus::Corpus& documents,
                            const MatchOptions& options) {
    if (options.rank_threshold == 0) throw ConfigError("rank_threshold must be positive");
    if (options.k < options.rank_threshold)
        throw ConfigError(fmt::format("k ({}) must be at least rank_threshold ({})", options.k, options.rank_threshold));

    std::map<std::string, std::vector<const corpus::CitationLink*>> by_patent;
    for (const auto& c : ppcs) by_patent[c.patent_id].push_back(&c);
    std::vector<std::string> patents;
    for (const auto& [id, links] : by_patent) {
        const auto* doc = documents.find(id);
        if (!doc) throw InputError(fmt::format("citing patent '{}' is not in the corpus", id));
        if (!doc->filing_year) throw InputError(fmt::format("citing patent '{}' has no filing year", id));
        if (!doc->authority) throw InputError(fmt::format("citing patent '{}' has no authority", id));
        patents.push_back(id);
    }
    const auto representatives = corpus::family_representatives(documents.documents());
    auto query_of = [&](const std::string& patent) -> std::optional<std::span<const float>> {
        if (patent_vectors.contains(patent)) return patent_vectors.vector(patent);
        auto it = representatives.find(patent);
        if (it != representatives.end() && patent_vectors.contains(it->second))
            return patent_vectors.vector(it->second);
        return std::nullopt;
    };

    std::vector<std::vector<PPCMatchRecord>> per_patent(patents.size());
    std::vector<std::size_t> unscored(patents.size(), 0);
    for_each_parallel(patents.size(), [&](std::size_t i) {
        const auto& patent = patents[i];
        auto links = by_patent.at(patent);
        std::stable_sort(links.begin(), links.end(),
                         [](const auto* a, const auto* b) { return a->paper_id < b->paper_id; });
        const auto query = query_of(patent);
        if (!query) {
            unscored[i] = links.size();
            return;
        }
        const auto& doc = documents.at(patent);
        index::SearchFilter filter{std::nullopt, *doc.filing_year, DocKind::kPaper};
        const auto ranks = rank_map(index.search(*query, options.k, filter));
        for (const auto* l : links) {
            PPCMatchRecord r;
            r.patent_id = l->patent_id;
            r.paper_id = l->paper_id;
            if (auto it = ranks.find(l->paper_id); it != ranks.end()) r.rank = it->second;
            r.matched = r.rank && *r.rank <= options.rank_threshold;
            r.authority = *doc.authority;
            r.filing_year = *doc.filing_year;
            r.location = l->location;
            r.self_citation = l->self_citation;
            r.confidence = l->confidence;
            r.cpc_sections = doc.cpc_sections;
            r.n_paper_citations = links.size();
            per_patent[i].push_back(std::move(r));
        }
    });

    MatchResult result;
    result.share_histogram = Histogram(0.0, 1.0, 20);
    for (std::size_t i = 0; i < patents.size(); ++i) {
        result.unscored += unscored[i];
        if (per_patent[i].empty()) continue;
        PatentShare share{patents[i], 0, per_patent[i].size()};
        for (auto& r : per_patent[i]) {
            share.matched += r.matched ? 1 : 0;
            result.records.push_back(std::move(r));
        }
        result.share_histogram.add(share.share());
        result.shares.push_back(std::move(share));
    }
    return result;
}

// ---------------------------------------------------------------------------

RegressionFrame build_regression_frame(std::span<const PPCMatchRecord> records, const FrameOptions& options) {
    if (records.empty()) throw InputError("cannot build a regression frame from zero records");
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& a = records[i].authority;
        if (a.size() != 2 || !std::isupper(static_cast<unsigned char>(a[0])) ||
            !std::isupper(static_cast<unsigned char>(a[1])))
            bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string list;
        for (std::size_t j = 0; j < std::min<std::size_t>(bad.size(), 10); ++j)
            list += fmt::format("{}row {} ('{}')", j ? ", " : "", bad[j] + 1, records[bad[j]].authority);
        if (bad.size() > 10) list += fmt::format(", ... ({} rows)", bad.size());
        throw InputError("unknown authority codes: " + list);
    }
    const std::size_t n = records.size();
    std::vector<double> matched(n), front_and_body(n), self_citation(n), n_cit(n), year(n), conf(n);
    std::vector<std::string> authority(n);
    std::vector<std::vector<double>> cpc(kCpcLetters.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        matched[i] = r.matched ? 1.0 : 0.0;
        authority[i] = r.authority;
        front_and_body[i] = r.location == corpus::CitationLocation::kFrontAndBody ? 1.0 : 0.0;
        self_citation[i] = r.self_citation ? 1.0 : 0.0;
        n_cit[i] = static_cast<double>(r.n_paper_citations);
        year[i] = r.filing_year;
        conf[i] = r.confidence;
        for (char c : r.cpc_sections) {
            const auto pos = kCpcLetters.find(c);
            if (pos == std::string_view::npos)
                throw InputError(fmt::format("row {}: unknown CPC section '{}'", i + 1, c));
            cpc[pos][i] = 1.0;
        }
    }
    RegressionFrame rf;
    rf.frame.add_numeric("matched", std::move(matched));
    rf.frame.add_text("authority", std::move(authority));
    rf.frame.add_numeric("front_and_body", std::move(front_and_body));
    rf.frame.add_numeric("self_citation", std::move(self_citation));
    rf.frame.add_numeric("n_paper_citations", std::move(n_cit));
    rf.frame.add_numeric("filing_year", std::move(year));
    rf.frame.add_numeric("confidence", std::move(conf));
    std::vector<std::string> cpc_names;
    for (std::size_t j = 0; j < kCpcLetters.size(); ++j) {
        cpc_names.push_back(fmt::format("cpc_{}", kCpcLetters[j]));
        rf.frame.add_numeric(cpc_names.back(), std::move(cpc[j]));
    }
    rf.spec.response = "matched";
    rf.spec.terms.push_back(stats::Term::categorical("authority", options.authority_reference));
    rf.spec.terms.push_back(stats::Term::dummy_block({"front_and_body", "self_citation"}));
    rf.spec.terms.push_back(stats::Term::continuous("n_paper_citations"));
    if (options.filing_year_fe) rf.spec.terms.push_back(stats::Term::categorical("filing_year"));
    if (options.confidence_fe) rf.spec.terms.push_back(stats::Term::categorical("confidence"));
    rf.spec.terms.push_back(stats::Term::dummy_block(cpc_names));
    return rf;
}

// ---------------------------------------------------------------------------

namespace {
std::string g17(double v) { return fmt::format("{:.17g}", v); }
}  // namespace

void write_similarity_csv(std::ostream& out, std::span<const PairSimRecord> records) {
    out << "patent_id,paper_id,pair_type,similarity\n";
    for (const auto& r : records)
        out << fmt::format("{},{},{},{}\n", stats::csv_escape(r.patent_id), stats::csv_escape(r.paper_id), to_string(r.pair_type), g17(r.similarity));
}

void write_histograms_csv(std::ostream& out, const SimilarityStudy& study) {
    out << "pair_type,bin_lo,bin_hi,count\n";
    for (const auto* h : {&study.ppp_histogram, &study.ppc_histogram}) {
        const char* type = h == &study.ppp_histogram ? "ppp" : "ppc";
        for (std::size_t b = 0; b < h->counts.size(); ++b)
            out << fmt::format("{},{:.3f},{:.3f},{}\n", type, h->lo + b * h->width(), h->lo + (b + 1) * h->width(),
                               h->counts[b]);
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << fmt::format("{:.3f},{:.3f},{}\n", h.lo + b * h.width(), h.lo + (b + 1) * h.width(), h.counts[b]);
}

void write_outcomes_csv(std::ostream& out, std::span<const PPPSearchOutcome> outcomes) {
    out << "patent_id,paper_id,rank,confidence_level,scored\n";
    for (const auto& o : outcomes)
        out << fmt::format("{},{},{},{},{}\n", stats::csv_escape(o.patent_id), stats::csv_escape(o.paper_id), o.rank ? std::to_string(*o.rank) : "",
                           o.confidence_level, o.scored ? 1 : 0);
}

void write_ecdf_csv(std::ostream& out, const std::map<std::string, std::vector<EcdfPoint>>& ecdf) {
    out << "level,rank,share\n";
    for (const auto& [level, points] : ecdf)
        for (const auto& p : points) out << fmt::format("{},{},{}\n", level, p.rank, g17(p.share));
}

std::string rank_summary_json(std::span<const RankSummary> summary, std::size_t unscored) {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& s : summary) {
        nlohmann::ordered_json c;
        c["level"] = s.level;
        c["count"] = s.count;
        c["matched"] = s.matched;
        c["share_pct"] = s.share_pct;
        c["median"] = s.median ? nlohmann::ordered_json(*s.median) : nlohmann::ordered_json(nullptr);
        c["mean"] = s.mean ? nlohmann::ordered_json(*s.mean) : nlohmann::ordered_json(nullptr);
        c["std_dev"] = s.std_dev ? nlohmann::ordered_json(*s.std_dev) : nlohmann::ordered_json(nullptr);
        j["columns"].push_back(std::move(c));
    }
    j["unscored"] = unscored;
    return j.dump(2) + "\n";
}

void write_match_records_csv(std::ostream& out, std::span<const PPCMatchRecord> records) {
    out << "patent_id,paper_id,matched,rank,authority,filing_year,location,self_citation,confidence,cpc_sections,"
           "n_paper_citations\n";
    for (const auto& r : records)
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", stats::csv_escape(r.patent_id), stats::csv_escape(r.paper_id), r.matched ? 1 : 0,
                           r.rank ? std::to_string(*r.rank) : "", r.authority, r.filing_year,
                           corpus::to_string(r.location), r.self_citation ? 1 : 0, r.confidence, r.cpc_sections,
                           r.n_paper_citations);
}

std::vector<PPCMatchRecord> read_match_records_csv(const std::string& path) {
    const auto df = stats::read_csv(path, {"patent_id", "paper_id", "rank", "authority", "location", "cpc_sections"});
    std::vector<PPCMatchRecord> out(df.rows());
    if (out.empty()) return out;
    const auto& matched = df.numeric("matched");
    const auto& rank = df.text("rank");
    const auto& year = df.numeric("filing_year");
    const auto& self = df.numeric("self_citation");
    const auto& conf = df.numeric("confidence");
    const auto& ncit = df.numeric("n_paper_citations");
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& r = out[i];
        r.patent_id = df.text("patent_id")[i];
        r.paper_id = df.text("paper_id")[i];
        r.matched = matched[i] != 0.0;
        if (!rank[i].empty()) {
            try {
                r.rank = static_cast<std::size_t>(std::stoull(rank[i]));
            } catch (const std::exception&) {
                throw ParseError(i + 2, "rank", fmt::format("not an integer: '{}'", rank[i]));
            }
        }
        r.authority = df.text("authority")[i];
        r.filing_year = static_cast<int>(year[i]);
        r.location = corpus::parse_location(df.text("location")[i]);
        r.self_citation = self[i] != 0.0;
        r.confidence = static_cast<int>(conf[i]);
        r.cpc_sections = df.text("cpc_sections")[i];
        r.n_paper_citations = static_cast<std::size_t>(ncit[i]);
    }
    return out;
}

void write_shares_csv(std::ostream& out, std::span<const PatentShare> shares) {
    out << "patent_id,matched,total,share\n";
    for (const auto& s : shares) out << fmt::format("{},{},{},{}\n", stats::csv_escape(s.patent_id), s.matched, s.total, g17(s.share()));
}

}  // namespace spsim::studies
