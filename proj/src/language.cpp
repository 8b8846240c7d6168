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

#include <array>
#include <unordered_set>

#include "spsim/corpus.hpp"

namespace spsim::corpus {

namespace {

struct Profile {
    const char* code;
    std::unordered_set<std::string_view> stopwords;
};

const std::array<Profile, 4>& profiles() {
    static const std::array<Profile, 4> p = {{
        {"en", {"the",  "of",   "and",   "to",    "in",   "is",    "that", "for",  "with", "as",
                "on",   "by",   "are",   "this",  "be",   "from",  "at",   "an",   "which", "was",
                "were", "it",   "or",    "we",    "these", "have", "has",  "not",  "can",  "our",
                "their", "its", "been",  "than",  "also", "between", "over", "into", "using", "based"}},
        {"de", {"der",  "die",  "das",   "und",   "ist",  "nicht", "mit",  "von",  "zu",   "den",
                "dem",  "ein",  "eine",  "einer", "des",  "im",    "auf",  "f\xc3\xbcr", "sich", "auch",
                "werden", "wird", "wir", "es",    "bei",  "durch", "aus",  "oder", "sind", "als",
                "nach", "\xc3\xbc" "ber", "dieser", "diese", "zur", "zum", "wurde", "wurden"}},
        {"fr", {"le",   "la",   "les",   "et",    "des",  "du",    "un",   "une",  "est",  "que",
                "pour", "dans", "sur",   "par",   "au",   "aux",   "avec", "ce",   "cette", "sont",
                "nous", "qui",  "pas",   "ou",    "plus", "\xc3\xa9t\xc3\xa9", "ces", "leur", "entre", "sont"}},
        {"es", {"el",   "los",  "las",   "y",     "del",  "que",   "por",  "para", "con",  "una",
                "es",   "se",   "al",    "su",    "sus",  "como",  "m\xc3\xa1s", "este", "esta", "son",
                "fue",  "entre", "sobre", "pero", "tambi\xc3\xa9n", "estos", "estas", "han"}},
    }};
    return p;
}

// Decodes one UTF-8 code point starting at i; malformed bytes count as one point each.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = c >= 0xF0 ? 3 : c >= 0xE0 ? 2 : c >= 0xC0 ? 1 : 0;
    if (i + static_cast<std::size_t>(extra) >= s.size()) extra = 0;
    char32_t cp = extra == 0 ? c : extra == 1 ? (c & 0x1F) : extra == 2 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
    i += static_cast<std::size_t>(extra) + 1;
    return cp;
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0xF900 && cp <= 0xFAFF);
}

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr double kCjkShareThreshold = 0.3;

}  // namespace

LanguageGuess detect_language(std::string_view text, std::size_t min_chars) {
    std::size_t points = 0, visible = 0, cjk = 0;
    for (std::size_t i = 0; i < text.size();) {
        const char32_t cp = next_code_point(text, i);
        ++points;
        if (cp > 0x20) ++visible;
        if (is_cjk(cp)) ++cjk;
    }
    if (points < min_chars || visible == 0) return {"und", 0.0};
    const double cjk_share = static_cast<double>(cjk) / static_cast<double>(visible);
    if (cjk_share >= kCjkShareThreshold) return {"zh", cjk_share};

    std::array<std::size_t, 4> hits{};
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        for (std::size_t p = 0; p < profiles().size(); ++p)
            if (profiles()[p].stopwords.contains(token)) ++hits[p];
        token.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) token += (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : ch;
        else flush();
    }
    flush();

    std::size_t total = 0, best = 0;
    for (std::size_t p = 0; p < hits.size(); ++p) {
        total += hits[p];
        if (hits[p] > hits[best]) best = p;
    }
    if (total == 0) return {"und", 0.0};
    return {profiles()[best].code, static_cast<double>(hits[best]) / static_cast<double>(total)};
}

}  // namespace spsim::corpus
