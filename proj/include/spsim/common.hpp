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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spsim {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, missing, or inconsistent input data (files, records, vectors).
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or configuration supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A record-level parse failure with its 1-based line number and the offending field.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, std::string field, const std::string& detail)
        : InputError("line " + std::to_string(line) + ", field '" + field + "': " + detail),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

enum class DocKind : std::uint8_t { kPatent = 0, kPaper = 1 };

inline const char* to_string(DocKind kind) {
    return kind == DocKind::kPatent ? "patent" : "paper";
}

inline DocKind parse_doc_kind(const std::string& s) {
    if (s == "patent") return DocKind::kPatent;
    if (s == "paper") return DocKind::kPaper;
    throw InputError("unknown document kind '" + s + "'");
}

}  // namespace spsim
