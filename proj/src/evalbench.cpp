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

#include "spsim/evalbench.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "spsim/hash.hpp"
#include "spsim/index.hpp"
#include "spsim/rng.hpp"

namespace spsim::evalbench {

std::vector<std::string> TripletTask::candidates() const {
    std::vector<std::string> all = positives;
    all.insert(all.end(), negatives.begin(), negatives.end());
    std::sort(all.begin(), all.end());
    return all;
}

namespace {

struct Family {
    std::vector<const corpus::Document*> members;
    std::set<std::string> cited_any;
    std::set<std::string> cited_certain;
};

}  // namespace

BuildResult build_tasks(std::span<const corpus::CitationLink> citations, const corpus::Corpus& documents,
                        const BuildOptions& options) {
    if (options.positives == 0) throw ConfigError("positives per task must be positive");
    if (options.min_lag_years > options.max_lag_years)
        throw ConfigError("min_lag_years exceeds max_lag_years");

    std::map<std::string, Family> families;
    std::unordered_map<std::string, std::string> family_of;
    for (const auto& d : documents.documents()) {
        if (d.kind != DocKind::kPatent) continue;
        const std::string key = d.family_id.value_or(d.id);
        families[key].members.push_back(&d);
        family_of.emplace(d.id, key);
    }

    std::unordered_map<std::string, bool> english;
    auto is_english = [&](const corpus::Document& d) {
        auto [it, inserted] = english.try_emplace(d.id, false);
        if (inserted) it->second = corpus::has_english_abstract(d);
        return it->second;
    };

    std::set<std::string> citing;
    for (const auto& link : citations) {
        const auto* patent = documents.find(link.patent_id);
        if (!patent) throw InputError(fmt::format("citation names unknown patent '{}'", link.patent_id));
        if (patent->kind != DocKind::kPatent)
            throw InputError(fmt::format("citation source '{}' is not a patent", link.patent_id));
        const auto* paper = documents.find(link.paper_id);
        if (!paper) throw InputError(fmt::format("citation names unknown paper '{}'", link.paper_id));
        if (paper->kind != DocKind::kPaper) continue;
        auto& fam = families.at(family_of.at(link.patent_id));
        fam.cited_any.insert(link.paper_id);
        if (link.confidence >= options.confidence && is_english(*paper)) fam.cited_certain.insert(link.paper_id);
        citing.insert(family_of.at(link.patent_id));
    }

    // English papers bucketed by year, ids sorted within a bucket.
    std::map<int, std::vector<std::string>> papers_by_year;
    for (const auto& d : documents.documents())
        if (d.kind == DocKind::kPaper && is_english(d)) papers_by_year[d.pub_year()].push_back(d.id);
    for (auto& [y, ids] : papers_by_year) std::sort(ids.begin(), ids.end());

    BuildResult result;
    for (const auto& key : citing) {
        const auto& fam = families.at(key);
        if (options.authority) {
            const bool any = std::any_of(fam.members.begin(), fam.members.end(), [&](const corpus::Document* m) {
                return m->authority == options.authority;
            });
            if (!any) {
                result.skipped.push_back({key, fmt::format("no {} member", *options.authority)});
                continue;
            }
        }
        if (fam.cited_certain.size() < options.positives) {
            result.skipped.push_back({key, fmt::format("{} qualifying cited papers, need {}", fam.cited_certain.size(),
                                                       options.positives)});
            continue;
        }
        int family_year = fam.members.front()->pub_year();
        std::vector<corpus::Document> members;
        members.reserve(fam.members.size());
        for (const auto* m : fam.members) {
            family_year = std::min(family_year, m->pub_year());
            members.push_back(*m);
        }
        const auto& focal = corpus::select_family_representative(members);

        std::vector<std::string> risk;
        for (auto it = papers_by_year.lower_bound(family_year - options.max_lag_years);
             it != papers_by_year.end() && it->first <= family_year - options.min_lag_years; ++it)
            for (const auto& id : it->second)
                if (!fam.cited_any.contains(id)) risk.push_back(id);
        if (risk.size() < options.negatives) {
            result.skipped.push_back(
                {key, fmt::format("risk set holds {} papers, need {}", risk.size(), options.negatives)});
            continue;
        }
        std::sort(risk.begin(), risk.end());

        Rng rng(splitmix64(options.seed ^ fnv1a64(key)));
        const std::vector<std::string> cited(fam.cited_certain.begin(), fam.cited_certain.end());
        TripletTask task;
        task.task_id = key;
        task.focal_patent_id = focal.id;
        task.family_year = family_year;
        for (auto i : rng.sample_indices(cited.size(), options.positives)) task.positives.push_back(cited[i]);
        for (auto i : rng.sample_indices(risk.size(), options.negatives)) task.negatives.push_back(risk[i]);
        std::sort(task.positives.begin(), task.positives.end());
        std::sort(task.negatives.begin(), task.negatives.end());
        result.tasks.push_back(std::move(task));
    }
    return result;
}

// ---------------------------------------------------------------------------

RankedList rank_task(const TripletTask& task, const embed::EmbeddingStore& store,
                     std::span<const float> focal_vector) {
    RankedList list;
    list.task_id = task.task_id;
    for (const auto& id : task.candidates()) {
        if (!store.contains(id)) throw InputError(fmt::format("task '{}': no embedding for '{}'", task.task_id, id));
        list.ordered.push_back({id, index::cosine(focal_vector, store.vector(id))});
    }
    std::sort(list.ordered.begin(), list.ordered.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.paper_id < b.paper_id;
    });
    return list;
}

RankedList rank_task(const TripletTask& task, const embed::EmbeddingStore& store) {
    if (!store.contains(task.focal_patent_id))
        throw InputError(fmt::format("task '{}': no embedding for '{}'", task.task_id, task.focal_patent_id));
    return rank_task(task, store, store.vector(task.focal_patent_id));
}

namespace {

bool contains(std::span<const std::string> set, const std::string& id) {
    return std::find(set.begin(), set.end(), id) != set.end();
}

}  // namespace

std::size_t rfr(const RankedList& list, std::span<const std::string> relevant) {
    if (relevant.empty()) throw InputError("relevant set is empty");
    for (std::size_t i = 0; i < list.ordered.size(); ++i)
        if (contains(relevant, list.ordered[i].paper_id)) return i + 1;
    throw InputError(fmt::format("task '{}': no relevant id in the ranked list", list.task_id));
}

double average_precision(const RankedList& list, std::span<const std::string> relevant) {
    if (relevant.empty()) throw InputError("relevant set is empty");
    const std::set<std::string> rel(relevant.begin(), relevant.end());
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < list.ordered.size(); ++i) {
        if (!rel.contains(list.ordered[i].paper_id)) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    if (hits != rel.size())
        throw InputError(fmt::format("task '{}': {} of {} relevant ids missing from the ranked list", list.task_id,
                                     rel.size() - hits, rel.size()));
    return sum / static_cast<double>(rel.size());
}

double rr_at10(const RankedList& list, std::span<const std::string> relevant) {
    const std::size_t r = rfr(list, relevant);
    return r <= 10 ? 1.0 / static_cast<double>(r) : 0.0;
}

QueryMetrics evaluate(const RankedList& list, std::span<const std::string> relevant) {
    const std::size_t r = rfr(list, relevant);
    return {list.task_id, r, average_precision(list, relevant), r <= 10 ? 1.0 / static_cast<double>(r) : 0.0};
}

MetricReport aggregate(std::span<const QueryMetrics> per_query) {
    if (per_query.empty()) throw InputError("cannot aggregate zero queries");
    MetricReport report;
    report.per_query.assign(per_query.begin(), per_query.end());
    std::stable_sort(report.per_query.begin(), report.per_query.end(),
                     [](const QueryMetrics& a, const QueryMetrics& b) { return a.task_id < b.task_id; });
    double rfr_sum = 0.0, ap_sum = 0.0, rr_sum = 0.0;
    for (const auto& q : report.per_query) {
        rfr_sum += static_cast<double>(q.rfr);
        ap_sum += q.ap;
        rr_sum += q.rr10;
    }
    const double n = static_cast<double>(report.per_query.size());
    report.query_count = report.per_query.size();
    report.avg_rfr = rfr_sum / n;
    report.map = ap_sum / n;
    report.mrr10 = rr_sum / n;
    return report;
}

std::vector<QueryMetrics> run_bench_serial(std::span<const TripletTask> tasks, const embed::EmbeddingStore& store) {
    std::vector<QueryMetrics> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(evaluate(rank_task(t, store), t.positives));
    return out;
}

std::vector<QueryMetrics> run_bench(std::span<const TripletTask> tasks, const embed::EmbeddingStore& store) {
    std::vector<QueryMetrics> out(tasks.size());
    std::vector<std::exception_ptr> failures(tasks.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
        const auto t = static_cast<std::size_t>(i);
        try {
            out[t] = evaluate(rank_task(tasks[t], store), tasks[t].positives);
        } catch (...) {
            failures[t] = std::current_exception();
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

Metric parse_metric(std::string_view s) {
    if (s == "rfr") return Metric::kRfr;
    if (s == "ap") return Metric::kAp;
    if (s == "rr10") return Metric::kRr10;
    throw ConfigError(fmt::format("unknown metric '{}' (expected rfr, ap or rr10)", s));
}

const char* to_string(Metric m) {
    switch (m) {
        case Metric::kRfr: return "rfr";
        case Metric::kAp: return "ap";
        case Metric::kRr10: return "rr10";
    }
    return "?";
}

stats::RegressionFit compare_models(const std::map<std::string, std::vector<QueryMetrics>>& per_model,
                                    const std::string& base_model, Metric metric) {
    if (!per_model.contains(base_model)) throw ConfigError(fmt::format("base model '{}' has no metrics", base_model));
    std::set<std::string> all_tasks;
    for (const auto& [model, rows] : per_model)
        for (const auto& q : rows) all_tasks.insert(q.task_id);
    std::vector<std::string> problems;
    for (const auto& [model, rows] : per_model) {
        std::set<std::string> have;
        for (const auto& q : rows)
            if (!have.insert(q.task_id).second)
                throw InputError(fmt::format("model '{}' reports task '{}' twice", model, q.task_id));
        std::vector<std::string> missing;
        std::set_difference(all_tasks.begin(), all_tasks.end(), have.begin(), have.end(), std::back_inserter(missing));
        if (!missing.empty()) {
            const std::size_t shown = std::min<std::size_t>(missing.size(), 10);
            std::string list;
            for (std::size_t i = 0; i < shown; ++i) list += (i ? ", " : "") + missing[i];
            if (missing.size() > shown) list += fmt::format(", ... ({} total)", missing.size());
            problems.push_back(fmt::format("model '{}' is missing tasks {}", model, list));
        }
    }
    if (!problems.empty()) {
        std::string msg = "models cover different task sets: ";
        for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        throw InputError(msg);
    }
    std::vector<std::string> model_col;
    std::vector<double> value_col;
    for (const auto& [model, rows] : per_model) {
        auto sorted = rows;
        std::sort(sorted.begin(), sorted.end(),
                  [](const QueryMetrics& a, const QueryMetrics& b) { return a.task_id < b.task_id; });
        for (const auto& q : sorted) {
            model_col.push_back(model);
            value_col.push_back(metric == Metric::kRfr  ? static_cast<double>(q.rfr)
                                : metric == Metric::kAp ? q.ap
                                                        : q.rr10);
        }
    }
    stats::DataFrame df;
    df.add_text("model", std::move(model_col));
    df.add_numeric(to_string(metric), std::move(value_col));
    stats::DesignMatrixSpec spec{to_string(metric), {stats::Term::categorical("model", base_model)}, true};
    return stats::ols_fit(stats::encode_design(df, spec));
}

// ---------------------------------------------------------------------------

void write_tasks_jsonl(std::ostream& out, std::span<const TripletTask> tasks) {
    for (const auto& t : tasks) {
        nlohmann::ordered_json j;
        j["task_id"] = t.task_id;
        j["focal_patent_id"] = t.focal_patent_id;
        j["family_year"] = t.family_year;
        j["positives"] = t.positives;
        j["negatives"] = t.negatives;
        out << j.dump() << '\n';
    }
}

std::vector<TripletTask> parse_tasks_jsonl(std::istream& in) {
    std::vector<TripletTask> tasks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, "*", e.what());
        }
        TripletTask t;
        auto field = [&](const char* name) -> const nlohmann::json& {
            if (!j.contains(name)) throw ParseError(line_no, name, "missing");
            return j.at(name);
        };
        try {
            t.task_id = field("task_id").get<std::string>();
            t.focal_patent_id = field("focal_patent_id").get<std::string>();
            t.family_year = field("family_year").get<int>();
            t.positives = field("positives").get<std::vector<std::string>>();
            t.negatives = field("negatives").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, "*", e.what());
        }
        std::set<std::string> seen;
        for (const auto& id : t.candidates())
            if (!seen.insert(id).second)
                throw ParseError(line_no, "negatives", fmt::format("candidate '{}' listed twice", id));
        if (seen.contains(t.focal_patent_id))
            throw ParseError(line_no, "focal_patent_id", "focal patent is also a candidate");
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::vector<TripletTask> read_tasks_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_tasks_jsonl(in);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
    out << "task_id,model,pooling,rfr,ap,rr10\n";
    for (const auto& r : rows)
        out << fmt::format("{},{},{},{},{:.17g},{:.17g}\n", stats::csv_escape(r.task_id), stats::csv_escape(r.model),
                           stats::csv_escape(r.pooling), r.rfr, r.ap, r.rr10);
}

std::vector<MetricRow> read_metrics_csv(const std::string& path) {
    const auto df = stats::read_csv(path, {"task_id", "model", "pooling"});
    for (const char* col : {"task_id", "model", "pooling", "rfr", "ap", "rr10"})
        if (!df.has(col)) throw InputError(fmt::format("{}: missing column '{}'", path, col));
    std::vector<MetricRow> rows(df.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].task_id = df.text("task_id")[i];
        rows[i].model = df.text("model")[i];
        rows[i].pooling = df.text("pooling")[i];
        rows[i].rfr = static_cast<std::size_t>(df.numeric("rfr")[i]);
        rows[i].ap = df.numeric("ap")[i];
        rows[i].rr10 = df.numeric("rr10")[i];
    }
    return rows;
}

}  // namespace spsim::evalbench
