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

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "spsim/binary_io.hpp"
#include "spsim/corpus.hpp"

using namespace spsim;
using namespace spsim::corpus;

namespace {

std::vector<Document> parse_jsonl(const std::string& text) {
    std::istringstream in(text);
    return parse_documents(in, DocFormat::kJsonl);
}

const char* kThreePatents =
    R"({"id":"EP1","kind":"patent","title":"A","abstract":"x y","pub_date":"2001-02-03","filing_year":2000,"authority":"EP","family_id":"F1","application_id":"11","cpc_sections":["A","G"],"lang":"en"})"
    "\n"
    R"({"id":"US2","kind":"patent","title":"B","abstract":"z","pub_date":"2002-03-04","authority":"US"})"
    "\n"
    R"({"id":"JP3","kind":"patent","title":"C","abstract":"","pub_date":"2003-12-31","cpc_sections":["Y"]})"
    "\n";

}  // namespace

TEST(Ingest, EmptyInputGivesEmptySequence) { EXPECT_TRUE(parse_jsonl("").empty()); }

TEST(Ingest, ThreePatentsFieldByField) {
    const auto docs = parse_jsonl(kThreePatents);
    ASSERT_EQ(docs.size(), 3u);
    for (const auto& d : docs) EXPECT_EQ(d.kind, DocKind::kPatent);
    EXPECT_EQ(docs[0].id, "EP1");
    EXPECT_EQ(docs[0].title, "A");
    EXPECT_EQ(docs[0].abstract, "x y");
    EXPECT_EQ(docs[0].pub_date, fixture::ymd(2001, 2, 3));
    EXPECT_EQ(docs[0].filing_year, 2000);
    EXPECT_EQ(docs[0].authority, "EP");
    EXPECT_EQ(docs[0].family_id, "F1");
    EXPECT_EQ(docs[0].application_id, "11");
    EXPECT_EQ(docs[0].cpc_sections, "AG");
    EXPECT_EQ(docs[0].lang, "en");
    EXPECT_EQ(docs[1].id, "US2");
    EXPECT_FALSE(docs[1].family_id.has_value());
    EXPECT_FALSE(docs[1].lang.has_value());
    EXPECT_EQ(docs[2].pub_date, fixture::ymd(2003, 12, 31));
    EXPECT_EQ(docs[2].cpc_sections, "Y");
}

TEST(Ingest, MissingPubDateReportsLine) {
    const std::string text = std::string(kThreePatents) + R"({"id":"P4","kind":"paper","title":"t","abstract":"a"})" + "\n";
    try {
        parse_jsonl(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.field(), "pub_date");
    }
}

TEST(Ingest, DuplicateIdNamesId) {
    const std::string line = R"({"id":"W1","kind":"paper","title":"t","abstract":"a","pub_date":"2000-01-01"})";
    try {
        parse_jsonl(line + "\n" + line + "\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("W1"), std::string::npos);
    }
}

TEST(Ingest, InvalidCalendarDateRejected) {
    EXPECT_THROW(parse_jsonl(R"({"id":"W1","kind":"paper","title":"t","abstract":"a","pub_date":"2001-02-30"})"),
                 ParseError);
}

TEST(Ingest, InvertedAbstractIsReconstructed) {
    const auto docs = parse_jsonl(
        R"({"id":"W1","kind":"paper","title":"t","abstract_inverted_index":{"a":[0,2],"b":[1]},"pub_date":"2000-01-01"})");
    ASSERT_EQ(docs.size(), 1u);
    EXPECT_EQ(docs[0].abstract, "a b a");
}

TEST(Ingest, RoundTripBothFormats) {
    spsim::Rng rng(3);
    std::vector<Document> docs;
    for (int i = 0; i < 60; ++i) {
        auto d = i % 3 ? fixture::paper(fmt::format("W{:03d}", i), 1980 + i, "Some text, with \"quotes\"\tand tabs")
                       : fixture::patent(fmt::format("EP{:03d}", i), 1990 + i % 30, "EP", "F" + std::to_string(i % 7),
                                         std::to_string(100 + i));
        if (i % 5 == 0) d.lang.reset();
        if (i % 3 == 0 && i % 2 == 0) d.cpc_sections = "ACY";
        docs.push_back(d);
    }
    for (auto fmt_kind : {DocFormat::kJsonl, DocFormat::kTsv}) {
        std::ostringstream out;
        write_documents(out, docs, fmt_kind);
        std::istringstream in(out.str());
        EXPECT_EQ(parse_documents(in, fmt_kind), docs);
    }
}

TEST(Citations, RoundTripAndHeader) {
    std::vector<CitationLink> links{{"EP1", "W1", 10, CitationLocation::kFrontAndBody, true},
                                    {"EP1", "W2", 3, CitationLocation::kBody, false}};
    std::ostringstream out;
    write_citations(out, links);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "patent_id\tpaper_id\tconfidence\tlocation\tself_citation");
    std::istringstream in(out.str());
    EXPECT_EQ(parse_citations(in), links);
}

TEST(Citations, ConfidenceOutOfRangeRejected) {
    std::istringstream in("patent_id\tpaper_id\tconfidence\tlocation\tself_citation\nEP1\tW1\t11\tfront\t0\n");
    EXPECT_THROW(parse_citations(in), InputError);
}

TEST(Ppps, RoundTrip) {
    std::vector<PPPRecord> recs{{"EP1", "W1", 1}, {"US2", "W9", 4}};
    std::ostringstream out;
    write_ppps(out, recs);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_ppps(in), recs);
}

// ---------------------------------------------------------------------------

TEST(Reconstruct, Examples) {
    EXPECT_EQ(reconstruct_abstract({{"Hello", {0}}, {"world", {1}}}), "Hello world");
    EXPECT_EQ(reconstruct_abstract({{"a", {0, 2}}, {"b", {1}}}), "a b a");
    EXPECT_EQ(reconstruct_abstract({{"a", {0}}, {"b", {7}}}), "a b");
}

TEST(Reconstruct, DuplicatePositionNamesPosition) {
    try {
        reconstruct_abstract({{"x", {0}}, {"y", {0}}});
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find('0'), std::string::npos);
    }
}

TEST(Reconstruct, ReinversionRoundTripProperty) {
    spsim::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::map<std::string, std::vector<std::int64_t>> inv;
        for (std::size_t pos = 0; pos < n; ++pos) inv["t" + std::to_string(rng.below(8))].push_back(static_cast<std::int64_t>(pos));
        const auto text = reconstruct_abstract(inv);
        std::map<std::string, std::vector<std::int64_t>> back;
        std::istringstream words(text);
        std::string w;
        std::int64_t pos = 0;
        while (words >> w) back[w].push_back(pos++);
        EXPECT_EQ(back, inv);
    }
}

TEST(Clean, Examples) {
    EXPECT_EQ(clean_abstract("BACKGROUND: We study X. \xc2\xa9 2020 Elsevier."), "We study X.");
    EXPECT_EQ(clean_abstract("plain abstract"), "plain abstract");
    EXPECT_EQ(clean_abstract("  a   b  "), "a b");
    EXPECT_EQ(clean_abstract(""), "");
    EXPECT_EQ(clean_abstract("<p>Some <i>marked</i> text</p>"), "Some marked text");
    EXPECT_EQ(clean_abstract("We find Y. (c) 2019 The Authors."), "We find Y.");
}

TEST(Clean, IdempotentAndNeverLonger) {
    const std::vector<std::string> pieces{"BACKGROUND:", "OBJECTIVE:", "METHODS:", "<p>", "</p>", "word", "We",
                                          "\xc2\xa9 2011 Elsevier Ltd.", "  ", "\t", "(c) 1999", "results.", "<b>"};
    spsim::Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        for (std::size_t i = 0, n = rng.below(12); i < n; ++i) s += pieces[rng.below(pieces.size())] + " ";
        const auto once = clean_abstract(s);
        EXPECT_EQ(clean_abstract(once), once) << s;
        EXPECT_LE(once.size(), s.size());
    }
}

TEST(Clean, BundledRuleFileMatchesBuiltin) {
    const auto rules = CleaningRules::load(std::string(SPSIM_SOURCE_DIR) + "/data/cleaning_rules.txt");
    EXPECT_EQ(rules.version(), CleaningRules::builtin().version());
    EXPECT_EQ(rules.rules().size(), CleaningRules::builtin().rules().size());
}

TEST(Language, Examples) {
    const auto en = detect_language("the quick brown fox jumps over the lazy dog repeatedly");
    EXPECT_EQ(en.code, "en");
    EXPECT_GE(en.confidence, 0.9);
    EXPECT_FALSE(detect_language("").determined());
    const auto de = detect_language(
        "Die Erfindung betrifft ein Verfahren zur Herstellung von einem Werkstoff, der mit dem Wasser und "
        "nicht mit der Luft reagiert, und die Vorrichtung ist auch für das Verfahren geeignet.");
    EXPECT_NE(de.code, "en");
    EXPECT_EQ(detect_language("the quick brown fox jumps over the lazy dog repeatedly").confidence, en.confidence);
}

TEST(Language, FlagTakesPrecedence) {
    auto d = fixture::paper("W1", 2000, "Die Erfindung betrifft ein Verfahren und die Vorrichtung mit dem Wasser", "en");
    EXPECT_TRUE(has_english_abstract(d));
    d.lang.reset();
    EXPECT_FALSE(has_english_abstract(d));
    d.abstract.clear();
    d.lang = "en";
    EXPECT_FALSE(has_english_abstract(d));
}

// ---------------------------------------------------------------------------

TEST(Family, PaperExamples) {
    auto pick = [](std::vector<Document> m) { return select_family_representative(m).id; };
    EXPECT_EQ(pick({fixture::patent("US-123", 2000, "US"), fixture::patent("EP-456", 2000, "EP")}), "EP-456");
    EXPECT_EQ(pick({fixture::patent("WO-1", 2000, "WO"), fixture::patent("JP-2", 2000, "JP")}), "WO-1");
    EXPECT_EQ(pick({fixture::patent("US-5", 2000, "US", "F", "5"), fixture::patent("US-3", 2000, "US", "F", "3")}),
              "US-3");
    EXPECT_THROW(select_family_representative({}), ConfigError);
}

TEST(Family, NumericVersusLexicographicApplicationIds) {
    auto pick = [](std::vector<Document> m) { return select_family_representative(m).id; };
    EXPECT_EQ(pick({fixture::patent("a", 2000, "US", "F", "10"), fixture::patent("b", 2000, "US", "F", "9")}), "b");
    EXPECT_EQ(pick({fixture::patent("a", 2000, "US", "F", "10"), fixture::patent("b", 2000, "US", "F", "9x")}), "a");
}

TEST(Family, PermutationInvariant) {
    const std::vector<std::string> offices{"EP", "WO", "US", "JP", "CN", "KR", "DE", "FR", "GB", "IT", "ES", "SE", "NL", "AT"};
    spsim::Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Document> members;
        for (std::size_t i = 0, n = 1 + rng.below(6); i < n; ++i)
            members.push_back(fixture::patent(fmt::format("P{}", i), 2000, offices[rng.below(offices.size())], "F",
                                              std::to_string(rng.below(5))));
        const auto expected = select_family_representative(members).id;
        for (int p = 0; p < 5; ++p) {
            rng.shuffle(members);
            EXPECT_EQ(select_family_representative(members).id, expected);
        }
    }
}

TEST(Family, RepresentativeMap) {
    std::vector<Document> docs{fixture::patent("US1", 2000, "US", "F1", "1"), fixture::patent("EP1", 2000, "EP", "F1", "2"),
                               fixture::patent("JP9", 2000, "JP"), fixture::paper("W1", 1999)};
    const auto reps = family_representatives(docs);
    EXPECT_EQ(reps.at("US1"), "EP1");
    EXPECT_EQ(reps.at("EP1"), "EP1");
    EXPECT_EQ(reps.at("JP9"), "JP9");
    EXPECT_FALSE(reps.count("W1"));
}

TEST(ModelInput, Examples) {
    auto d = fixture::paper("W1", 2000, "A");
    d.title = "T";
    EXPECT_EQ(build_model_input(d), "T[SEP]A");
    d.abstract = "";
    EXPECT_EQ(build_model_input(d), "T[SEP]");
    d.title = "";
    EXPECT_THROW(build_model_input(d), InputError);
}

TEST(CorpusLookup, FindAndAt) {
    Corpus c({fixture::paper("W2", 2000), fixture::paper("W1", 2001)});
    EXPECT_EQ(c.size(), 2u);
    ASSERT_NE(c.find("W1"), nullptr);
    EXPECT_EQ(c.find("W1")->pub_year(), 2001);
    EXPECT_EQ(c.find("nope"), nullptr);
    EXPECT_THROW(c.at("nope"), InputError);
}
