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

#include "spsim/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace spsim::corpus {

using nlohmann::json;

namespace {

constexpr std::string_view kCpcLetters = "ABCDEFGHY";

const std::vector<std::string_view>& document_columns() {
    static const std::vector<std::string_view> cols = {
        "id",        "kind",      "title",          "abstract",       "lang",         "pub_date",
        "filing_year", "authority", "family_id",    "application_id", "cpc_sections"};
    return cols;
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Text fields in TSV escape backslash, tab, newline and carriage return.
std::string tsv_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tsv_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            const char n = s[++i];
            out += n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n;
        } else {
            out += s[i];
        }
    }
    return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int v{};
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
    return v;
}

std::string normalize_cpc(std::string_view raw, std::size_t line) {
    std::string out;
    for (char c : raw) {
        if (c == ' ' || c == ',') continue;
        if (kCpcLetters.find(c) == std::string_view::npos)
            throw ParseError(line, "cpc_sections", fmt::format("invalid CPC section '{}'", c));
        if (out.find(c) == std::string::npos) out += c;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_invariants(const Document& d, std::size_t line) {
    if (d.id.empty()) throw ParseError(line, "id", "must be non-empty");
    if (d.kind == DocKind::kPaper) {
        if (d.authority) throw ParseError(line, "authority", "papers carry no authority");
        if (d.family_id) throw ParseError(line, "family_id", "papers carry no family");
        if (d.filing_year) throw ParseError(line, "filing_year", "papers carry no filing year");
        if (!d.cpc_sections.empty()) throw ParseError(line, "cpc_sections", "papers carry no CPC sections");
    }
    if (d.lang && d.lang->size() != 2) throw ParseError(line, "lang", "expected a 2-letter code");
    if (d.authority && d.authority->size() != 2)
        throw ParseError(line, "authority", "expected a 2-letter office code");
    if (!d.pub_date.ok()) throw ParseError(line, "pub_date", "invalid calendar date");
}

std::optional<std::string> opt_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(line, key, "expected a string");
    auto s = it->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
}

std::map<std::string, std::vector<std::int64_t>> parse_inverted(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError(line, "abstract_inverted_index", "expected an object");
    std::map<std::string, std::vector<std::int64_t>> inv;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_array()) throw ParseError(line, "abstract_inverted_index", "positions must be an array");
        auto& pos = inv[it.key()];
        for (const auto& p : it.value()) {
            if (!p.is_number_integer() || p.get<std::int64_t>() < 0)
                throw ParseError(line, "abstract_inverted_index", "positions must be non-negative integers");
            pos.push_back(p.get<std::int64_t>());
        }
    }
    return inv;
}

Document document_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError(line, "<record>", "expected a JSON object");
    Document d;
    auto id = opt_string(j, "id", line);
    if (!id) throw ParseError(line, "id", "missing");
    d.id = *id;
    auto kind = opt_string(j, "kind", line);
    if (!kind) throw ParseError(line, "kind", "missing");
    if (*kind == "patent") d.kind = DocKind::kPatent;
    else if (*kind == "paper") d.kind = DocKind::kPaper;
    else throw ParseError(line, "kind", "expected 'patent' or 'paper'");
    d.title = opt_string(j, "title", line).value_or("");
    if (auto inv = j.find("abstract_inverted_index"); inv != j.end() && !inv->is_null()) {
        try {
            d.abstract = reconstruct_abstract(parse_inverted(*inv, line));
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw ParseError(line, "abstract_inverted_index", e.what());
        }
    } else {
        d.abstract = opt_string(j, "abstract", line).value_or("");
    }
    d.lang = opt_string(j, "lang", line);
    auto date = opt_string(j, "pub_date", line);
    if (!date) throw ParseError(line, "pub_date", "missing");
    auto ymd = parse_date(*date);
    if (!ymd) throw ParseError(line, "pub_date", "expected YYYY-MM-DD, got '" + *date + "'");
    d.pub_date = *ymd;
    if (auto it = j.find("filing_year"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw ParseError(line, "filing_year", "expected an integer");
        d.filing_year = it->get<int>();
    }
    d.authority = opt_string(j, "authority", line);
    d.family_id = opt_string(j, "family_id", line);
    d.application_id = opt_string(j, "application_id", line);
    if (auto it = j.find("cpc_sections"); it != j.end() && !it->is_null()) {
        std::string raw;
        if (it->is_string()) {
            raw = it->get<std::string>();
        } else if (it->is_array()) {
            for (const auto& s : *it) {
                if (!s.is_string()) throw ParseError(line, "cpc_sections", "expected strings");
                raw += s.get<std::string>();
            }
        } else {
            throw ParseError(line, "cpc_sections", "expected an array of letters");
        }
        d.cpc_sections = normalize_cpc(raw, line);
    }
    check_invariants(d, line);
    return d;
}

json document_json(const Document& d) {
    auto opt = [](const std::optional<std::string>& s) -> json { return s ? json(*s) : json(nullptr); };
    json cpc = json::array();
    for (char c : d.cpc_sections) cpc.push_back(std::string(1, c));
    json j;
    j["id"] = d.id;
    j["kind"] = to_string(d.kind);
    j["title"] = d.title;
    j["abstract"] = d.abstract;
    j["lang"] = opt(d.lang);
    j["pub_date"] = format_date(d.pub_date);
    j["filing_year"] = d.filing_year ? json(*d.filing_year) : json(nullptr);
    j["authority"] = opt(d.authority);
    j["family_id"] = opt(d.family_id);
    j["application_id"] = opt(d.application_id);
    j["cpc_sections"] = std::move(cpc);
    return j;
}

Document document_from_tsv(const std::vector<std::string>& fields, const std::vector<int>& col_of,
                           std::size_t line) {
    auto get = [&](std::size_t col) -> std::string {
        const int idx = col_of[col];
        return idx < 0 ? std::string() : tsv_unescape(fields[static_cast<std::size_t>(idx)]);
    };
    auto opt = [&](std::size_t col) -> std::optional<std::string> {
        auto s = get(col);
        if (s.empty()) return std::nullopt;
        return s;
    };
    Document d;
    d.id = get(0);
    const auto kind = get(1);
    if (kind == "patent") d.kind = DocKind::kPatent;
    else if (kind == "paper") d.kind = DocKind::kPaper;
    else throw ParseError(line, "kind", "expected 'patent' or 'paper'");
    d.title = get(2);
    d.abstract = get(3);
    d.lang = opt(4);
    const auto date = get(5);
    if (date.empty()) throw ParseError(line, "pub_date", "missing");
    auto ymd = parse_date(date);
    if (!ymd) throw ParseError(line, "pub_date", "expected YYYY-MM-DD, got '" + date + "'");
    d.pub_date = *ymd;
    if (auto fy = opt(6)) {
        auto v = parse_int<int>(*fy);
        if (!v) throw ParseError(line, "filing_year", "expected an integer");
        d.filing_year = *v;
    }
    d.authority = opt(7);
    d.family_id = opt(8);
    d.application_id = opt(9);
    d.cpc_sections = normalize_cpc(get(10), line);
    check_invariants(d, line);
    return d;
}

}  // namespace

const char* to_string(CitationLocation loc) {
    switch (loc) {
        case CitationLocation::kFront: return "front";
        case CitationLocation::kBody: return "body";
        case CitationLocation::kFrontAndBody: return "front_and_body";
    }
    return "front";
}

CitationLocation parse_location(std::string_view s) {
    if (s == "front") return CitationLocation::kFront;
    if (s == "body") return CitationLocation::kBody;
    if (s == "front_and_body") return CitationLocation::kFrontAndBody;
    throw InputError(fmt::format("unknown citation location '{}'", s));
}

DocFormat parse_doc_format(std::string_view s) {
    if (s == "jsonl") return DocFormat::kJsonl;
    if (s == "tsv") return DocFormat::kTsv;
    throw ConfigError(fmt::format("unknown document format '{}' (expected jsonl or tsv)", s));
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto y = parse_int<int>(s.substr(0, 4));
    auto m = parse_int<unsigned>(s.substr(5, 2));
    auto d = parse_int<unsigned>(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::string format_date(std::chrono::year_month_day d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                       static_cast<unsigned>(d.day()));
}

void validate(const Document& doc) { check_invariants(doc, 0); }

std::vector<Document> parse_documents(std::istream& in, DocFormat format) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string raw;
    std::size_t line_no = 0;
    std::vector<int> col_of;
    auto add = [&](Document d, std::size_t line) {
        if (!seen.insert(d.id).second)
            throw InputError(fmt::format("line {}: duplicate document id '{}'", line, d.id));
        docs.push_back(std::move(d));
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = strip_cr(raw);
        if (format == DocFormat::kJsonl) {
            if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ParseError(line_no, "<record>", std::string("invalid JSON: ") + e.what());
            }
            add(document_from_json(j, line_no), line_no);
        } else {
            auto fields = split_tabs(line);
            if (col_of.empty()) {
                const auto& cols = document_columns();
                col_of.assign(cols.size(), -1);
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    auto it = std::find(cols.begin(), cols.end(), fields[i]);
                    if (it == cols.end()) throw ParseError(line_no, fields[i], "unknown column");
                    col_of[static_cast<std::size_t>(it - cols.begin())] = static_cast<int>(i);
                }
                for (const char* required : {"id", "kind", "pub_date"}) {
                    auto it = std::find(cols.begin(), cols.end(), required);
                    if (col_of[static_cast<std::size_t>(it - cols.begin())] < 0)
                        throw ParseError(line_no, required, "required column missing from header");
                }
                continue;
            }
            if (line.empty()) continue;
            std::size_t ncols = 0;
            for (int c : col_of) ncols += c >= 0 ? 1 : 0;
            if (fields.size() != ncols)
                throw ParseError(line_no, "<record>",
                                 fmt::format("expected {} columns, got {}", ncols, fields.size()));
            add(document_from_tsv(fields, col_of, line_no), line_no);
        }
    }
    return docs;
}

std::vector<Document> ingest_documents(const std::string& path, DocFormat format) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_documents(in, format);
}

std::string document_to_json(const Document& doc) { return document_json(doc).dump(); }

void write_documents(std::ostream& out, std::span<const Document> docs, DocFormat format) {
    if (format == DocFormat::kJsonl) {
        for (const auto& d : docs) out << document_json(d).dump() << '\n';
        return;
    }
    const auto& cols = document_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
    out << '\n';
    for (const auto& d : docs) {
        out << tsv_escape(d.id) << '\t' << to_string(d.kind) << '\t' << tsv_escape(d.title) << '\t'
            << tsv_escape(d.abstract) << '\t' << d.lang.value_or("") << '\t' << format_date(d.pub_date) << '\t'
            << (d.filing_year ? std::to_string(*d.filing_year) : "") << '\t' << d.authority.value_or("")
            << '\t' << tsv_escape(d.family_id.value_or("")) << '\t' << tsv_escape(d.application_id.value_or(""))
            << '\t' << d.cpc_sections << '\n';
    }
}

// ---------------------------------------------------------------------------

namespace {

void expect_header(std::string_view line, const std::vector<std::string_view>& expected, const char* what) {
    auto fields = split_tabs(line);
    if (fields.size() != expected.size() || !std::equal(fields.begin(), fields.end(), expected.begin()))
        throw ParseError(1, "<header>", fmt::format("{} header must be '{}'", what, fmt::join(expected, "\\t")));
}

}  // namespace

std::vector<CitationLink> parse_citations(std::istream& in) {
    static const std::vector<std::string_view> kHeader = {"patent_id", "paper_id", "confidence", "location",
                                                          "self_citation"};
    std::vector<CitationLink> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = strip_cr(raw);
        if (line_no == 1) {
            expect_header(line, kHeader, "citation TSV");
            continue;
        }
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != kHeader.size())
            throw ParseError(line_no, "<record>", fmt::format("expected 5 columns, got {}", f.size()));
        CitationLink c;
        c.patent_id = f[0];
        c.paper_id = f[1];
        if (c.patent_id.empty()) throw ParseError(line_no, "patent_id", "must be non-empty");
        if (c.paper_id.empty()) throw ParseError(line_no, "paper_id", "must be non-empty");
        if (c.patent_id == c.paper_id) throw ParseError(line_no, "paper_id", "equals patent_id");
        auto conf = parse_int<int>(f[2]);
        if (!conf || *conf < 1 || *conf > 10) throw ParseError(line_no, "confidence", "expected integer in [1,10]");
        c.confidence = *conf;
        try {
            c.location = parse_location(f[3]);
        } catch (const InputError& e) {
            throw ParseError(line_no, "location", e.what());
        }
        if (f[4] != "0" && f[4] != "1") throw ParseError(line_no, "self_citation", "expected 0 or 1");
        c.self_citation = f[4] == "1";
        out.push_back(std::move(c));
    }
    if (line_no == 0) throw ParseError(1, "<header>", "citation TSV requires a header row");
    return out;
}

std::vector<CitationLink> read_citations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_citations(in);
}

void write_citations(std::ostream& out, std::span<const CitationLink> links) {
    out << "patent_id\tpaper_id\tconfidence\tlocation\tself_citation\n";
    for (const auto& c : links)
        out << c.patent_id << '\t' << c.paper_id << '\t' << c.confidence << '\t' << to_string(c.location) << '\t'
            << (c.self_citation ? 1 : 0) << '\n';
}

std::vector<PPPRecord> parse_ppps(std::istream& in) {
    static const std::vector<std::string_view> kHeader = {"patent_id", "paper_id", "confidence_level"};
    std::vector<PPPRecord> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = strip_cr(raw);
        if (line_no == 1) {
            expect_header(line, kHeader, "PPP TSV");
            continue;
        }
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != kHeader.size())
            throw ParseError(line_no, "<record>", fmt::format("expected 3 columns, got {}", f.size()));
        PPPRecord r;
        r.patent_id = f[0];
        r.paper_id = f[1];
        if (r.patent_id.empty()) throw ParseError(line_no, "patent_id", "must be non-empty");
        if (r.paper_id.empty()) throw ParseError(line_no, "paper_id", "must be non-empty");
        auto lvl = parse_int<int>(f[2]);
        if (!lvl || *lvl < 1 || *lvl > 4) throw ParseError(line_no, "confidence_level", "expected integer in [1,4]");
        r.confidence_level = *lvl;
        out.push_back(std::move(r));
    }
    if (line_no == 0) throw ParseError(1, "<header>", "PPP TSV requires a header row");
    return out;
}

std::vector<PPPRecord> read_ppps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_ppps(in);
}

void write_ppps(std::ostream& out, std::span<const PPPRecord> records) {
    out << "patent_id\tpaper_id\tconfidence_level\n";
    for (const auto& r : records) out << r.patent_id << '\t' << r.paper_id << '\t' << r.confidence_level << '\n';
}

// ---------------------------------------------------------------------------

std::string reconstruct_abstract(const std::map<std::string, std::vector<std::int64_t>>& inverted) {
    std::vector<std::pair<std::int64_t, const std::string*>> placed;
    for (const auto& [token, positions] : inverted)
        for (auto p : positions) {
            if (p < 0) throw InputError(fmt::format("negative position {} for token '{}'", p, token));
            placed.emplace_back(p, &token);
        }
    std::sort(placed.begin(), placed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out;
    for (std::size_t i = 0; i < placed.size(); ++i) {
        if (i > 0 && placed[i].first == placed[i - 1].first)
            throw InputError(fmt::format("position {} claimed by both '{}' and '{}'", placed[i].first,
                                         *placed[i - 1].second, *placed[i].second));
        if (i > 0) out += ' ';
        out += *placed[i].second;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kPeckingOrder[] = {"EP", "WO", "US", "JP", "CN", "KR", "DE",
                                              "FR", "GB", "IT", "ES", "SE", "NL"};

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// <0 when a orders before b.
int compare_application_ids(std::string_view a, std::string_view b) {
    if (all_digits(a) && all_digits(b)) {
        auto strip = [](std::string_view s) {
            const auto nz = s.find_first_not_of('0');
            return nz == std::string_view::npos ? std::string_view("0") : s.substr(nz);
        };
        a = strip(a);
        b = strip(b);
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    }
    return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

bool representative_before(const Document& a, const Document& b) {
    const int ra = authority_rank(a.authority.value_or(""));
    const int rb = authority_rank(b.authority.value_or(""));
    if (ra != rb) return ra < rb;
    const int c = compare_application_ids(a.application_id.value_or(""), b.application_id.value_or(""));
    if (c != 0) return c < 0;
    return a.id < b.id;
}

}  // namespace

int authority_rank(std::string_view authority) {
    for (std::size_t i = 0; i < std::size(kPeckingOrder); ++i)
        if (kPeckingOrder[i] == authority) return static_cast<int>(i);
    return static_cast<int>(std::size(kPeckingOrder));
}

const Document& select_family_representative(std::span<const Document> members) {
    if (members.empty()) throw ConfigError("select_family_representative: empty family");
    const Document* best = &members.front();
    for (const auto& m : members.subspan(1))
        if (representative_before(m, *best)) best = &m;
    return *best;
}

std::unordered_map<std::string, std::string> family_representatives(std::span<const Document> docs) {
    std::map<std::string, std::vector<std::size_t>> families;
    std::unordered_map<std::string, std::string> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& d = docs[i];
        if (d.kind != DocKind::kPatent) continue;
        if (d.family_id) families[*d.family_id].push_back(i);
        else out.emplace(d.id, d.id);
    }
    for (const auto& [fam, idx] : families) {
        std::vector<Document> members;
        members.reserve(idx.size());
        for (auto i : idx) members.push_back(docs[i]);
        const auto& rep = select_family_representative(members);
        for (auto i : idx) out.emplace(docs[i].id, rep.id);
    }
    return out;
}

std::string build_model_input(const Document& doc, std::string_view separator) {
    if (doc.title.empty() && doc.abstract.empty())
        throw InputError(fmt::format("document '{}' has neither title nor abstract", doc.id));
    std::string out = doc.title;
    out += separator;
    out += clean_abstract(doc.abstract);
    return out;
}

bool has_english_abstract(const Document& doc) {
    if (doc.abstract.empty()) return false;
    if (doc.lang) return *doc.lang == "en";
    return detect_language(doc.abstract).code == "en";
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    by_id_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i)
        if (!by_id_.emplace(docs_[i].id, i).second)
            throw InputError(fmt::format("duplicate document id '{}'", docs_[i].id));
}

const Document* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const Document& Corpus::at(std::string_view id) const {
    const auto* d = find(id);
    if (!d) throw InputError(fmt::format("unknown document id '{}'", id));
    return *d;
}

}  // namespace spsim::corpus
