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

#include <bit>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "spsim/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian; big-endian hosts need byte swapping");

namespace spsim {

class TruncatedError : public InputError {
public:
    TruncatedError(std::uint64_t expected, std::uint64_t actual, const std::string& what)
        : InputError("truncated " + what + ": expected " + std::to_string(expected) +
                     " bytes, got " + std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}
    std::uint64_t expected() const noexcept { return expected_; }
    std::uint64_t actual() const noexcept { return actual_; }

private:
    std::uint64_t expected_;
    std::uint64_t actual_;
};

/// Appends little-endian scalars to a byte buffer.
class ByteWriter {
public:
    template <typename T>
        requires std::is_arithmetic_v<T>
    void put(T v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.append(p, sizeof(T));
    }

    void put_bytes(std::string_view bytes) { buf_.append(bytes); }

    /// u32 length prefix followed by the raw bytes.
    void put_string(std::string_view s) {
        put(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }

    template <typename T>
    void put_span(std::span<const T> values) {
        buf_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
    }

    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

/// Bounds-checked little-endian reader over an in-memory buffer. Running past the end
/// raises TruncatedError with the total size the read would have required.
class ByteReader {
public:
    ByteReader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

    template <typename T>
        requires std::is_arithmetic_v<T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string_view get_bytes(std::size_t n) {
        need(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::string get_string() {
        const auto n = get<std::uint32_t>();
        return std::string(get_bytes(n));
    }

    template <typename T>
    void get_into(std::span<T> out) {
        need(out.size_bytes());
        std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
        pos_ += out.size_bytes();
    }

    void need(std::uint64_t n) const {
        if (n > data_.size() - pos_) throw TruncatedError(pos_ + n, data_.size(), what_);
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::string_view data_;
    std::string what_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace spsim
