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

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spsim/common.hpp"

namespace spsim::corpus {

/// A patent or paper record. Papers carry no patent-office metadata.
struct Document {
    std::string id;
    DocKind kind = DocKind::kPaper;
    std::string title;
    std::string abstract;
    std::optional<std::string> lang;
    std::chrono::year_month_day pub_date{};
    std::optional<int> filing_year;
    std::optional<std::string> authority;
    std::optional<std::string> family_id;
    std::optional<std::string> application_id;
    std::string cpc_sections;  // sorted, unique letters from "ABCDEFGHY"

    int pub_year() const { return static_cast<int>(pub_date.year()); }
    bool operator==(const Document&) const = default;
};

enum class CitationLocation : std::uint8_t { kFront, kBody, kFrontAndBody };

const char* to_string(CitationLocation loc);
CitationLocation parse_location(std::string_view s);

struct CitationLink {
    std::string patent_id;
    std::string paper_id;
    int confidence = 10;  // 1..10
    CitationLocation location = CitationLocation::kFront;
    bool self_citation = false;

    bool operator==(const CitationLink&) const = default;
};

/// Verified patent-paper pair with confidence level 1 (low) .. 4 (very high).
struct PPPRecord {
    std::string patent_id;
    std::string paper_id;
    int confidence_level = 4;

    bool operator==(const PPPRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Ingestion and serialization

enum class DocFormat { kJsonl, kTsv };

DocFormat parse_doc_format(std::string_view s);

/// Reads documents from a local file. Each record is validated; the first malformed
/// record raises ParseError with its line number and field, duplicate ids raise
/// InputError naming the id. Input order is preserved.
std::vector<Document> ingest_documents(const std::string& path, DocFormat format);
std::vector<Document> parse_documents(std::istream& in, DocFormat format);

void write_documents(std::ostream& out, std::span<const Document> docs, DocFormat format);

/// One JSON object (single line) for a document, same schema as the JSONL format.
std::string document_to_json(const Document& doc);

std::vector<CitationLink> read_citations(const std::string& path);
std::vector<CitationLink> parse_citations(std::istream& in);
void write_citations(std::ostream& out, std::span<const CitationLink> links);

std::vector<PPPRecord> read_ppps(const std::string& path);
std::vector<PPPRecord> parse_ppps(std::istream& in);
void write_ppps(std::ostream& out, std::span<const PPPRecord> records);

/// Checks the Document invariants; throws InputError naming the field.
void validate(const Document& doc);

/// Parses "YYYY-MM-DD" into a valid calendar date.
std::optional<std::chrono::year_month_day> parse_date(std::string_view s);
std::string format_date(std::chrono::year_month_day d);

// ---------------------------------------------------------------------------
// Text preparation

/// Rebuilds an abstract from a token -> positions map. Positions are placed in
/// ascending order and joined by single spaces; gaps collapse.
std::string reconstruct_abstract(const std::map<std::string, std::vector<std::int64_t>>& inverted);

/// Ordered regex rules that strip structural headings, copyright statements and markup
/// from abstracts. Loaded from the versioned rule file (data/cleaning_rules.txt); the
/// same file is compiled in as the default set.
class CleaningRules {
public:
    enum class Action { kStrip, kSpace, kKeepFirstGroup };

    struct Rule {
        Action action;
        std::string pattern;
        bool icase;
        std::regex re;
    };

    static CleaningRules parse(std::string_view text);
    static CleaningRules load(const std::string& path);
    static const CleaningRules& builtin();

    int version() const { return version_; }
    std::span<const Rule> rules() const { return rules_; }

    /// Applies every rule in order, then collapses whitespace and trims, repeating
    /// until the text no longer changes.
    std::string apply(std::string_view raw) const;

private:
    int version_ = 0;
    std::vector<Rule> rules_;
};

std::string clean_abstract(std::string_view raw);

/// Collapses runs of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

struct LanguageGuess {
    std::string code;  // "und" when undetermined
    double confidence = 0.0;

    bool determined() const { return code != "und"; }
};

/// Stopword-profile language scoring over {en, de, fr, es} plus a CJK character-share
/// heuristic for zh. Texts shorter than min_chars code points are undetermined.
LanguageGuess detect_language(std::string_view text, std::size_t min_chars = 20);

/// Language flag when present (taken as-is), otherwise detection on the abstract.
/// Documents without an abstract are never English.
bool has_english_abstract(const Document& doc);

/// Position of an office in the family pecking order; unknown offices rank last.
int authority_rank(std::string_view authority);

/// Picks the family member whose office ranks highest; ties go to the lower
/// application id (numeric when both are all digits, else lexicographic), then to
/// the lower document id. Throws ConfigError on an empty family.
const Document& select_family_representative(std::span<const Document> members);

/// Maps every patent id to the id of its family representative. Patents without a
/// family id are their own representative.
std::unordered_map<std::string, std::string> family_representatives(std::span<const Document> docs);

/// title + separator + cleaned abstract. Throws InputError when both are empty.
std::string build_model_input(const Document& doc, std::string_view separator = "[SEP]");

/// Read-only id lookup over an ingested document list.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    std::span<const Document> documents() const { return docs_; }
    const Document* find(std::string_view id) const;
    const Document& at(std::string_view id) const;
    std::size_t size() const { return docs_.size(); }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace spsim::corpus
