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

// spsim command-line entry point. Every artifact-producing subcommand writes its
// outputs into --out-dir together with <subcommand>.manifest.json.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "spsim/binary_io.hpp"
#include "spsim/corpus.hpp"
#include "spsim/embed.hpp"
#include "spsim/evalbench.hpp"
#include "spsim/hash.hpp"
#include "spsim/index.hpp"
#include "spsim/service.hpp"
#include "spsim/stats.hpp"
#include "spsim/studies.hpp"
#include "spsim/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace spsim;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 0;
};

class Run {
public:
    Run(std::string name, const CLI::App& sub, const Common& common)
        : name_(std::move(name)), sub_(sub), common_(common), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(common.out_dir);
    }

    const std::string& input(const std::string& path) {
        if (path.empty()) throw InputError(fmt::format("{}: a required input path is empty", name_));
        if (!fs::exists(path)) throw InputError(fmt::format("input not found: {}", path));
        inputs_[path] = to_hex(file_checksum(path));
        return path;
    }

    std::string output(const std::string& file) {
        const auto p = (fs::path(common_.out_dir) / file).string();
        outputs_.push_back(p);
        return p;
    }

    void write(const std::string& file, const std::string& content) { write_file(output(file), content); }

    void finish() {
        json m;
        m["subcommand"] = name_;
        m["version"] = kVersion;
        m["seed"] = common_.seed;
        m["config"] = sub_.config_to_str(true, false);
        m["inputs"] = json::object();
        for (const auto& [p, c] : inputs_) m["inputs"][p] = c;
        m["outputs"] = json::object();
        for (const auto& p : outputs_)
            if (fs::exists(p)) m["outputs"][p] = to_hex(file_checksum(p));
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file((fs::path(common_.out_dir) / (name_ + ".manifest.json")).string(), m.dump(2) + "\n");
    }

private:
    std::string name_;
    const CLI::App& sub_;
    const Common& common_;
    std::chrono::steady_clock::time_point start_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
};

template <typename F>
std::string to_text(F&& f) {
    std::ostringstream out;
    f(out);
    return out.str();
}

corpus::Corpus load_documents(Run& run, const std::string& path, const std::string& format = "jsonl") {
    return corpus::Corpus(corpus::ingest_documents(run.input(path), corpus::parse_doc_format(format)));
}

index::SearchFilter make_filter(const std::optional<int>& year_min, const std::optional<int>& year_max,
                                const std::string& kind) {
    index::SearchFilter f{year_min, year_max, std::nullopt};
    if (!kind.empty()) f.kind = parse_doc_kind(kind);
    f.validate();
    return f;
}

std::string fmt_metric(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spsim: patent/paper semantic similarity engine and evaluation bench"};
    app.set_version_flag("--version", std::string(kVersion));
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "INI configuration file; command-line flags override it");
    app.require_subcommand(1);

    Common common;
    app.add_option("--seed", common.seed, "Random seed recorded in every manifest")->capture_default_str();
    app.add_option("--out-dir", common.out_dir, "Directory for outputs and manifests")->capture_default_str();
    app.add_option("--threads", common.threads, "OpenMP threads (0 = runtime default)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate documents and write canonical JSONL");
    std::string in_path, in_format = "jsonl";
    ingest->add_option("--input", in_path, "Document file")->required();
    ingest->add_option("--format", in_format, "jsonl or tsv")->capture_default_str();

    // clean
    auto* clean = app.add_subcommand("clean", "Apply abstract cleaning rules");
    std::string clean_docs, clean_rules;
    clean->add_option("--documents", clean_docs, "Document JSONL")->required();
    clean->add_option("--rules", clean_rules, "Rule file (default: built-in rules)");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Embed documents or import precomputed vectors");
    std::string emb_docs, emb_kind = "toy", emb_vectors, emb_ids, emb_pooling = "cls";
    std::size_t emb_dim = embed::kDefaultDim;
    std::optional<std::uint64_t> emb_seed;
    embed_cmd->add_option("--documents", emb_docs, "Document JSONL (toy embedder)");
    embed_cmd->add_option("--embedder", emb_kind, "toy or imported")->capture_default_str();
    embed_cmd->add_option("--dim", emb_dim, "Toy embedding dimension")->capture_default_str();
    embed_cmd->add_option("--embed-seed", emb_seed, "Toy hashing seed (default: --seed)");
    embed_cmd->add_option("--pooling", emb_pooling, "cls or mean")->capture_default_str();
    embed_cmd->add_option("--vectors", emb_vectors, "Imported vectors (.csv or raw float32 block)");
    embed_cmd->add_option("--ids", emb_ids, "Imported ids, one per line");

    // index
    auto* index_cmd = app.add_subcommand("index", "Build a search index over a store");
    std::string idx_store, idx_docs, idx_mode = "exact";
    index::IndexConfig idx_cfg;
    index_cmd->add_option("--store", idx_store, "Embedding store")->required();
    index_cmd->add_option("--documents", idx_docs, "Document JSONL (year and kind metadata)")->required();
    index_cmd->add_option("--mode", idx_mode, "exact or hnsw")->capture_default_str();
    index_cmd->add_option("--m", idx_cfg.hnsw_m, "HNSW links per node")->capture_default_str();
    index_cmd->add_option("--ef-construction", idx_cfg.hnsw_ef_construction)->capture_default_str();
    index_cmd->add_option("--ef-search", idx_cfg.hnsw_ef_search)->capture_default_str();

    // search
    auto* search = app.add_subcommand("search", "Query an index");
    std::string s_store, s_index, s_query_id, s_kind;
    std::vector<std::string> s_exclude;
    std::size_t s_k = 10;
    std::optional<int> s_year_min, s_year_max;
    search->add_option("--store", s_store, "Embedding store")->required();
    search->add_option("--index", s_index, "Index file")->required();
    search->add_option("--query-id", s_query_id, "Stored id to use as the query")->required();
    search->add_option("--k", s_k)->capture_default_str();
    search->add_option("--year-min", s_year_min);
    search->add_option("--year-max", s_year_max);
    search->add_option("--kind", s_kind, "patent or paper");
    search->add_option("--exclude", s_exclude, "Ids to leave out");

    // bench-build
    auto* bench_build = app.add_subcommand("bench-build", "Build triplet ranking tasks");
    std::string bb_docs, bb_citations, bb_authority;
    evalbench::BuildOptions bb_opt;
    bench_build->add_option("--documents", bb_docs)->required();
    bench_build->add_option("--citations", bb_citations)->required();
    bench_build->add_option("--authority", bb_authority, "Only families with a member from this office");
    bench_build->add_option("--max-lag", bb_opt.max_lag_years)->capture_default_str();

    // bench-run
    auto* bench_run = app.add_subcommand("bench-run", "Rank tasks with one store and score them");
    std::string br_tasks, br_store, br_model = "toy", br_pooling = "cls";
    bench_run->add_option("--tasks", br_tasks)->required();
    bench_run->add_option("--store", br_store)->required();
    bench_run->add_option("--model", br_model, "Model label written to the metrics")->capture_default_str();
    bench_run->add_option("--pooling", br_pooling, "Pooling label written to the metrics")->capture_default_str();

    // bench-compare
    auto* bench_compare = app.add_subcommand("bench-compare", "Regress a metric on model dummies");
    std::vector<std::string> bc_metrics;
    std::string bc_base, bc_metric = "ap", bc_scheme = "appendix", bc_pooling;
    bench_compare->add_option("--metrics", bc_metrics, "Metrics CSV files")->required();
    bench_compare->add_option("--base", bc_base, "Reference model")->required();
    bench_compare->add_option("--metric", bc_metric, "rfr, ap or rr10")->capture_default_str();
    bench_compare->add_option("--scheme", bc_scheme, "table4 or appendix")->capture_default_str();
    bench_compare->add_option("--pooling", bc_pooling, "Keep only rows with this pooling");

    // study-ppp-sep
    auto* sep = app.add_subcommand("study-ppp-sep", "PPP vs PPC similarity distributions");
    std::string sep_ppps, sep_citations, sep_store;
    sep->add_option("--ppps", sep_ppps)->required();
    sep->add_option("--citations", sep_citations)->required();
    sep->add_option("--store", sep_store)->required();

    // study-ppp-predict
    auto* predict = app.add_subcommand("study-ppp-predict", "Rank of the paired paper in a windowed search");
    std::string pr_ppps, pr_store, pr_index, pr_docs;
    studies::PredictOptions pr_opt;
    predict->add_option("--ppps", pr_ppps)->required();
    predict->add_option("--store", pr_store)->required();
    predict->add_option("--index", pr_index)->required();
    predict->add_option("--documents", pr_docs)->required();
    predict->add_option("--k", pr_opt.k)->capture_default_str();
    predict->add_option("--window", pr_opt.window_years, "Years before and after")->capture_default_str();

    // study-ppc-match
    auto* match = app.add_subcommand("study-ppc-match", "Whether cited papers rank among the most similar");
    std::string m_citations, m_store, m_index, m_docs;
    studies::MatchOptions m_opt;
    bool m_keep_all = false;
    match->add_option("--citations", m_citations)->required();
    match->add_option("--store", m_store)->required();
    match->add_option("--index", m_index)->required();
    match->add_option("--documents", m_docs)->required();
    match->add_option("--k", m_opt.k)->capture_default_str();
    match->add_option("--rank-threshold", m_opt.rank_threshold)->capture_default_str();
    match->add_flag("--no-family-dedup", m_keep_all, "Skip family deduplication and English filtering");

    // regress
    auto* regress = app.add_subcommand("regress", "OLS of the match indicator on citation covariates");
    std::string r_records, r_scheme = "table4", r_reference = "EP";
    bool r_no_year = false, r_no_conf = false;
    regress->add_option("--records", r_records, "match_records.csv")->required();
    regress->add_option("--scheme", r_scheme)->capture_default_str();
    regress->add_option("--reference", r_reference, "Reference authority")->capture_default_str();
    regress->add_flag("--no-year-fe", r_no_year);
    regress->add_flag("--no-confidence-fe", r_no_conf);

    // serve
    auto* serve = app.add_subcommand("serve", "Read-only HTTP search service");
    std::string sv_store, sv_index, sv_docs, sv_host = "127.0.0.1";
    int sv_port = 8080;
    serve->add_option("--store", sv_store)->required();
    serve->add_option("--index", sv_index)->required();
    serve->add_option("--documents", sv_docs);
    serve->add_option("--host", sv_host)->capture_default_str();
    serve->add_option("--port", sv_port)->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "Aggregate metrics per model and pooling");
    std::vector<std::string> rp_metrics;
    report->add_option("--metrics", rp_metrics, "Metrics CSV files")->required();

    if (argc <= 1) {
        std::cerr << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    auto fail = [](const char* kind, const std::string& msg, int code) {
        json err;
        err["error"] = {{"kind", kind}, {"message", msg}};
        std::cerr << err.dump() << "\n";
        return code;
    };

    try {
        if (common.threads > 0) omp_set_num_threads(common.threads);

        if (*ingest) {
            Run run("ingest", *ingest, common);
            const auto docs = corpus::ingest_documents(run.input(in_path), corpus::parse_doc_format(in_format));
            run.write("documents.jsonl",
                      to_text([&](std::ostream& o) { corpus::write_documents(o, docs, corpus::DocFormat::kJsonl); }));
            std::size_t patents = 0;
            for (const auto& d : docs) patents += d.kind == DocKind::kPatent;
            std::cout << fmt::format("ingested {} documents ({} patents, {} papers)\n", docs.size(), patents,
                                     docs.size() - patents);
            run.finish();
        } else if (*clean) {
            Run run("clean", *clean, common);
            auto docs = corpus::ingest_documents(run.input(clean_docs), corpus::DocFormat::kJsonl);
            const auto rules = clean_rules.empty() ? corpus::CleaningRules::builtin()
                                                   : corpus::CleaningRules::load(run.input(clean_rules));
            std::size_t changed = 0;
            for (auto& d : docs) {
                auto cleaned = rules.apply(d.abstract);
                changed += cleaned != d.abstract;
                d.abstract = std::move(cleaned);
            }
            run.write("documents.clean.jsonl",
                      to_text([&](std::ostream& o) { corpus::write_documents(o, docs, corpus::DocFormat::kJsonl); }));
            std::cout << fmt::format("cleaned {} of {} abstracts with rule set version {}\n", changed, docs.size(),
                                     rules.version());
            run.finish();
        } else if (*embed_cmd) {
            Run run("embed", *embed_cmd, common);
            if (emb_kind == "toy") {
                const auto corpus = load_documents(run, emb_docs);
                const auto seed = emb_seed.value_or(common.seed);
                const auto pooling = embed::parse_pooling(emb_pooling);
                const auto store = embed::embed_documents_parallel(
                    corpus.documents(), pooling, embed::make_toy_embedder(seed, emb_dim), emb_dim,
                    fmt::format("toy-v1 dim={} seed={} pooling={}", emb_dim, seed, emb_pooling));
                embed::save_store(store, run.output("store.spsim"));
                std::cout << fmt::format("embedded {} documents (dim {}, {})\n", store.size(), store.dim(),
                                         emb_pooling);
            } else if (emb_kind == "imported") {
                auto result = embed::import_precomputed(run.input(emb_vectors), run.input(emb_ids));
                embed::save_store(result.store, run.output("store.spsim"));
                std::cout << fmt::format("imported {} vectors (dim {}), re-normalized {}\n", result.store.size(),
                                         result.store.dim(), result.renormalized);
            } else {
                throw ConfigError(fmt::format("unknown embedder '{}' (expected toy or imported)", emb_kind));
            }
            run.finish();
        } else if (*index_cmd) {
            Run run("index", *index_cmd, common);
            const auto store = embed::load_store(run.input(idx_store));
            const auto corpus = load_documents(run, idx_docs);
            idx_cfg.mode = index::parse_index_mode(idx_mode);
            idx_cfg.seed = common.seed;
            const auto idx = index::Index::build(store, index::meta_from_documents(corpus.documents()), idx_cfg);
            idx.save(run.output("index.spidx"));
            std::cout << fmt::format("indexed {} vectors ({})\n", idx.size(), idx_mode);
            run.finish();
        } else if (*search) {
            Run run("search", *search, common);
            const auto store = embed::load_store(run.input(s_store));
            const auto idx = index::Index::load(run.input(s_index), store);
            const service::SearchService svc(idx, store, nullptr);
            json req;
            req["query_id"] = s_query_id;
            req["k"] = s_k;
            const auto filter = make_filter(s_year_min, s_year_max, s_kind);
            req["filter"] = json::object();
            if (filter.year_min) req["filter"]["year_min"] = *filter.year_min;
            if (filter.year_max) req["filter"]["year_max"] = *filter.year_max;
            if (!s_kind.empty()) req["filter"]["kind"] = s_kind;
            req["exclude"] = s_exclude;
            const auto resp = svc.search(req.dump());
            if (resp.status != 200) throw InputError(json::parse(resp.body).at("error").get<std::string>());
            const auto body = json::parse(resp.body).dump(2) + "\n";
            run.write("search.json", body);
            std::cout << body;
            run.finish();
        } else if (*bench_build) {
            Run run("bench-build", *bench_build, common);
            const auto corpus = load_documents(run, bb_docs);
            const auto links = corpus::read_citations(run.input(bb_citations));
            bb_opt.seed = common.seed;
            if (!bb_authority.empty()) bb_opt.authority = bb_authority;
            const auto built = evalbench::build_tasks(links, corpus, bb_opt);
            run.write("tasks.jsonl", to_text([&](std::ostream& o) { evalbench::write_tasks_jsonl(o, built.tasks); }));
            std::string skipped = "family,reason\n";
            for (const auto& s : built.skipped) skipped += fmt::format("{},{}\n", stats::csv_escape(s.family), stats::csv_escape(s.reason));
            run.write("skipped_families.csv", skipped);
            std::cout << fmt::format("built {} tasks, skipped {} families\n", built.tasks.size(),
                                     built.skipped.size());
            run.finish();
        } else if (*bench_run) {
            Run run("bench-run", *bench_run, common);
            const auto tasks = evalbench::read_tasks_jsonl(run.input(br_tasks));
            const auto store = embed::load_store(run.input(br_store));
            const auto metrics = evalbench::run_bench(tasks, store);
            std::vector<evalbench::MetricRow> rows;
            for (const auto& q : metrics) rows.push_back({q.task_id, br_model, br_pooling, q.rfr, q.ap, q.rr10});
            std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
            run.write("metrics.csv", to_text([&](std::ostream& o) { evalbench::write_metrics_csv(o, rows); }));
            const auto rep = evalbench::aggregate(metrics);
            std::cout << fmt::format("{} ({}): Q={} avg RFR={} MAP={} MRR@10={}\n", br_model, br_pooling,
                                     rep.query_count, fmt_metric(rep.avg_rfr), fmt_metric(rep.map),
                                     fmt_metric(rep.mrr10));
            run.finish();
        } else if (*bench_compare) {
            Run run("bench-compare", *bench_compare, common);
            std::map<std::string, std::vector<evalbench::QueryMetrics>> per_model;
            std::map<std::string, std::set<std::string>> poolings;
            for (const auto& path : bc_metrics)
                for (const auto& r : evalbench::read_metrics_csv(run.input(path))) {
                    if (!bc_pooling.empty() && r.pooling != bc_pooling) continue;
                    per_model[r.model].push_back({r.task_id, r.rfr, r.ap, r.rr10});
                    poolings[r.model].insert(r.pooling);
                }
            for (const auto& [model, p] : poolings)
                if (p.size() > 1)
                    throw ConfigError(fmt::format("model '{}' has several poolings; select one with --pooling", model));
            const auto fit = evalbench::compare_models(per_model, bc_base, evalbench::parse_metric(bc_metric));
            const auto summary = stats::summarize(fit, stats::parse_star_scheme(bc_scheme), bc_metric);
            run.write("comparison.txt", summary.text);
            run.write("comparison.csv", summary.csv);
            std::cout << summary.text;
            run.finish();
        } else if (*sep) {
            Run run("study-ppp-sep", *sep, common);
            const auto ppps = corpus::read_ppps(run.input(sep_ppps));
            const auto links = corpus::read_citations(run.input(sep_citations));
            const auto store = embed::load_store(run.input(sep_store));
            const auto study = studies::ppp_ppc_similarity(ppps, links, store);
            run.write("pair_similarity.csv",
                      to_text([&](std::ostream& o) { studies::write_similarity_csv(o, study.records); }));
            run.write("similarity_histogram.csv",
                      to_text([&](std::ostream& o) { studies::write_histograms_csv(o, study); }));
            json j;
            j["ppp"] = {{"count", study.ppp.count}, {"mean", study.ppp.mean}, {"std_dev", study.ppp.std_dev}};
            j["ppc"] = {{"count", study.ppc.count}, {"mean", study.ppc.mean}, {"std_dev", study.ppc.std_dev}};
            j["ppc_excluded_as_ppp"] = study.ppc_excluded_as_ppp;
            j["ppp_missing_embedding"] = study.ppp_missing_embedding;
            j["ppc_missing_embedding"] = study.ppc_missing_embedding;
            if (study.separation)
                j["welch_ppp_greater"] = {{"t", study.separation->t},
                                          {"df", study.separation->df},
                                          {"p_value", study.separation->p_greater}};
            run.write("separation.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
            run.finish();
        } else if (*predict) {
            Run run("study-ppp-predict", *predict, common);
            const auto ppps = corpus::read_ppps(run.input(pr_ppps));
            const auto store = embed::load_store(run.input(pr_store));
            const auto idx = index::Index::load(run.input(pr_index), store);
            const auto corpus = load_documents(run, pr_docs);
            const auto res =
                studies::predict_ppp(ppps, idx, store, index::meta_from_documents(corpus.documents()), pr_opt);
            run.write("ppp_outcomes.csv",
                      to_text([&](std::ostream& o) { studies::write_outcomes_csv(o, res.outcomes); }));
            run.write("ppp_ecdf.csv", to_text([&](std::ostream& o) { studies::write_ecdf_csv(o, res.ecdf); }));
            const auto summary = studies::rank_summary_json(res.summary, res.unscored);
            run.write("ppp_rank_summary.json", summary);
            std::cout << summary;
            run.finish();
        } else if (*match) {
            Run run("study-ppc-match", *match, common);
            auto links = corpus::read_citations(run.input(m_citations));
            const auto store = embed::load_store(run.input(m_store));
            const auto idx = index::Index::load(run.input(m_index), store);
            const auto corpus = load_documents(run, m_docs);
            if (!m_keep_all) links = studies::prepare_match_links(links, corpus);
            const auto res = studies::ppc_match_study(links, idx, store, corpus, m_opt);
            run.write("match_records.csv",
                      to_text([&](std::ostream& o) { studies::write_match_records_csv(o, res.records); }));
            run.write("patent_shares.csv",
                      to_text([&](std::ostream& o) { studies::write_shares_csv(o, res.shares); }));
            run.write("share_histogram.csv",
                      to_text([&](std::ostream& o) { studies::write_histogram_csv(o, res.share_histogram); }));
            std::size_t matched = 0;
            for (const auto& r : res.records) matched += r.matched;
            std::cout << fmt::format("{} links scored, {} matched, {} unscored\n", res.records.size(), matched,
                                     res.unscored);
            run.finish();
        } else if (*regress) {
            Run run("regress", *regress, common);
            const auto records = studies::read_match_records_csv(run.input(r_records));
            studies::FrameOptions fo{r_reference, !r_no_year, !r_no_conf};
            const auto frame = studies::build_regression_frame(records, fo);
            const auto fit = stats::ols_fit(stats::encode_design(frame.frame, frame.spec));
            const auto summary = stats::summarize(fit, stats::parse_star_scheme(r_scheme), "matched");
            run.write("regression.txt", summary.text);
            run.write("regression.csv", summary.csv);
            std::cout << summary.text;
            run.finish();
        } else if (*serve) {
            const auto store = embed::load_store(sv_store);
            const auto idx = index::Index::load(sv_index, store);
            std::optional<corpus::Corpus> docs;
            if (!sv_docs.empty()) docs.emplace(corpus::ingest_documents(sv_docs, corpus::DocFormat::kJsonl));
            const service::SearchService svc(idx, store, docs ? &*docs : nullptr);
            service::HttpServer server(svc);
            std::cerr << fmt::format("serving {} vectors on http://{}:{} (index {})\n", idx.size(), sv_host, sv_port,
                                     svc.index_checksum());
            server.run(sv_host, sv_port);
        } else if (*report) {
            Run run("report", *report, common);
            std::map<std::pair<std::string, std::string>, std::vector<evalbench::QueryMetrics>> groups;
            for (const auto& path : rp_metrics)
                for (const auto& r : evalbench::read_metrics_csv(run.input(path)))
                    groups[{r.model, r.pooling}].push_back({r.task_id, r.rfr, r.ap, r.rr10});
            std::string csv = "model,pooling,queries,avg_rfr,map,mrr10\n";
            std::vector<std::vector<std::string>> rows{{"Model", "Pooling", "Q", "Avg. RFR", "MAP", "MRR@10"}};
            for (const auto& [key, qs] : groups) {
                const auto rep = evalbench::aggregate(qs);
                csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", stats::csv_escape(key.first), stats::csv_escape(key.second), rep.query_count,
                                   rep.avg_rfr, rep.map, rep.mrr10);
                rows.push_back({key.first, key.second, std::to_string(rep.query_count), fmt::format("{:.2f}", rep.avg_rfr),
                                fmt_metric(rep.map), fmt_metric(rep.mrr10)});
            }
            std::vector<std::size_t> w(rows.front().size(), 0);
            for (const auto& r : rows)
                for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
            std::string text;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                std::string line;
                for (std::size_t c = 0; c < rows[i].size(); ++c)
                    line += c < 2 ? fmt::format("{:<{}}  ", rows[i][c], w[c]) : fmt::format("{:>{}}  ", rows[i][c], w[c]);
                while (!line.empty() && line.back() == ' ') line.pop_back();
                text += line + "\n";
                if (i == 0) text += std::string(line.size(), '-') + "\n";
            }
            run.write("report.txt", text);
            run.write("report.csv", csv);
            std::cout << text;
            run.finish();
        }
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 1);
    } catch (const InputError& e) {
        return fail("input", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
    return 0;
}
