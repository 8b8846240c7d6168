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

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spsim/binary_io.hpp"
#include "spsim/corpus.hpp"

#include "cleaning_rules.inc"

namespace spsim::corpus {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

constexpr int kMaxPasses = 8;

}  // namespace

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

CleaningRules CleaningRules::parse(std::string_view text) {
    CleaningRules rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_version = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(line_no, "<rule>", "expected '<action>\\t<pattern>'");
        std::string action = line.substr(0, tab);
        std::string pattern = line.substr(tab + 1);
        if (action == "version") {
            try {
                rules.version_ = std::stoi(pattern);
            } catch (const std::exception&) {
                throw ParseError(line_no, "version", "expected an integer");
            }
            have_version = true;
            continue;
        }
        bool icase = false;
        if (action.size() > 2 && action.ends_with("/i")) {
            icase = true;
            action.resize(action.size() - 2);
        }
        Rule r{Action::kStrip, pattern, icase, {}};
        if (action == "strip") r.action = Action::kStrip;
        else if (action == "space") r.action = Action::kSpace;
        else if (action == "keep1") r.action = Action::kKeepFirstGroup;
        else throw ParseError(line_no, "action", "unknown action '" + action + "'");
        auto flags = std::regex::ECMAScript | std::regex::optimize;
        if (icase) flags |= std::regex::icase;
        try {
            r.re = std::regex(pattern, flags);
        } catch (const std::regex_error& e) {
            throw ParseError(line_no, "pattern", e.what());
        }
        rules.rules_.push_back(std::move(r));
    }
    if (!have_version) throw ParseError(line_no, "version", "rule file must declare a version");
    return rules;
}

CleaningRules CleaningRules::load(const std::string& path) { return parse(read_file(path)); }

const CleaningRules& CleaningRules::builtin() {
    static const CleaningRules rules = parse(kBuiltinCleaningRules);
    return rules;
}

std::string CleaningRules::apply(std::string_view raw) const {
    std::string cur(raw);
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        std::string next = cur;
        for (const auto& r : rules_) {
            const char* fmt = r.action == Action::kStrip ? "" : r.action == Action::kSpace ? " " : "$1";
            next = std::regex_replace(next, r.re, fmt);
        }
        next = normalize_whitespace(next);
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

std::string clean_abstract(std::string_view raw) { return CleaningRules::builtin().apply(raw); }

}  // namespace spsim::corpus
