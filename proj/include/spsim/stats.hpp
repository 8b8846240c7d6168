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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spsim/common.hpp"

namespace spsim::stats {

/// Named columns of equal length, each either numeric or text.
class DataFrame {
public:
    void add_numeric(std::string name, std::vector<double> values);
    void add_text(std::string name, std::vector<std::string> values);

    std::size_t rows() const { return rows_; }
    const std::vector<std::string>& names() const { return order_; }
    bool has(std::string_view name) const;
    bool is_numeric(std::string_view name) const;
    const std::vector<double>& numeric(std::string_view name) const;
    const std::vector<std::string>& text(std::string_view name) const;

private:
    void check_new(const std::string& name, std::size_t n);

    std::size_t rows_ = 0;
    std::vector<std::string> order_;
    std::unordered_map<std::string, std::vector<double>> numeric_;
    std::unordered_map<std::string, std::vector<std::string>> text_;
};

/// Comma-separated file with a header row; a column is numeric when every cell parses
/// as a number, otherwise text. Columns named in text_columns always stay text.
/// Double-quoted cells may contain commas and "" escapes.
DataFrame read_csv(const std::string& path, const std::vector<std::string>& text_columns = {});
DataFrame parse_csv(std::string_view content, const std::vector<std::string>& text_columns = {});

/// A CSV cell: quoted (with "" escapes) when it holds a comma, quote or line break.
std::string csv_escape(std::string_view cell);

struct Term {
    enum class Kind { kContinuous, kCategorical, kDummyBlock };

    Kind kind = Kind::kContinuous;
    std::string name;
    std::optional<std::string> reference;  // categorical; smallest level when absent
    std::vector<std::string> columns;      // dummy block

    static Term continuous(std::string name) { return {Kind::kContinuous, std::move(name), {}, {}}; }
    static Term categorical(std::string name, std::optional<std::string> reference = {}) {
        return {Kind::kCategorical, std::move(name), std::move(reference), {}};
    }
    static Term dummy_block(std::vector<std::string> columns) {
        return {Kind::kDummyBlock, {}, {}, std::move(columns)};
    }
};

struct DesignMatrixSpec {
    std::string response;
    std::vector<Term> terms;
    bool intercept = true;
};

inline constexpr std::string_view kInterceptName = "const";

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct Design {
    Matrix x;
    std::vector<std::string> columns;
    std::vector<double> y;
};

/// Level order used for categorical expansion: numeric when every level parses as a
/// number, else lexicographic.
std::vector<std::string> sorted_levels(std::vector<std::string> levels);

/// Expands the spec into a design matrix. Intercept first, then terms in order;
/// categorical levels become "name[level]" columns for every non-reference level.
/// Throws InputError on empty rows, missing columns, NaN, or non 0/1 dummies, and
/// ConfigError on duplicate column names or a reference level absent from the data.
Design encode_design(const DataFrame& rows, const DesignMatrixSpec& spec);

struct RegressionFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    std::size_t n = 0;
    double rss = 0.0;
    double residual_variance = 0.0;
    double log_likelihood = 0.0;
    double bic = 0.0;
    double r_squared = 0.0;
    double r_squared_adj = 0.0;

    std::size_t p() const { return coefficients.size(); }
    std::optional<std::size_t> find(std::string_view name) const;
    double coefficient(std::string_view name) const;
    double std_error(std::string_view name) const;
    double p_value(std::string_view name) const;
};

class RankDeficientError : public InputError {
public:
    RankDeficientError(std::string column)
        : InputError("design matrix is rank deficient: column '" + column + "' is linearly dependent on earlier columns"),
          column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

struct OlsOptions {
    std::size_t block_rows = 4096;
    double rank_tolerance = 1e-10;
};

/// Least squares through a Householder QR of [X | y]. Row blocks are factorized in
/// parallel and their R factors merged in block order, so the result does not depend
/// on the thread count. Throws RankDeficientError naming the first dependent column,
/// InputError on NaN/Inf or fewer rows than columns.
RegressionFit ols_fit(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                      const OlsOptions& options = {});
RegressionFit ols_fit(const Design& design, const OlsOptions& options = {});

/// Single Householder QR over the whole matrix; reference for ols_fit.
RegressionFit ols_fit_serial(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                             const OlsOptions& options = {});

enum class StarScheme { kTable4, kAppendix };

StarScheme parse_star_scheme(std::string_view s);
const char* to_string(StarScheme s);

/// table4: *** p<.01, ** p<.05, * p<.1. appendix: *** p<.001, ** p<.01, * p<.05.
std::string significance_stars(double p_value, StarScheme scheme);

struct NamedFit {
    std::string label;
    const RegressionFit* fit = nullptr;
};

struct Summary {
    std::string text;
    std::string csv;
};

/// Regression table: one "estimate stars" row and one "(std_error)" row per
/// coefficient, then N, BIC and Log-Likelihood. Estimates are rounded to 2 decimals
/// (table4) or 3 (appendix) in text; the CSV keeps full precision.
Summary summarize(const RegressionFit& fit, StarScheme scheme, const std::string& label = "model");
Summary summarize(std::span<const NamedFit> fits, StarScheme scheme);

struct WelchResult {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p_greater = 1.0;    // H1: mean_a > mean_b
    double p_two_sided = 1.0;
};

/// Two-sample t test with unequal variances. Each sample needs at least 2 values.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace spsim::stats
