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

#include "spsim/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "spsim/binary_io.hpp"

namespace spsim::stats {

namespace {

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_level(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) return fmt::format("{:.0f}", v);
    return fmt::format("{:.17g}", v);
}

}  // namespace

// ---------------------------------------------------------------------------
// DataFrame

void DataFrame::check_new(const std::string& name, std::size_t n) {
    if (has(name)) throw ConfigError(fmt::format("duplicate column '{}'", name));
    if (!order_.empty() && n != rows_)
        throw InputError(fmt::format("column '{}' has {} rows, frame has {}", name, n, rows_));
    rows_ = n;
    order_.push_back(name);
}

void DataFrame::add_numeric(std::string name, std::vector<double> values) {
    check_new(name, values.size());
    numeric_.emplace(std::move(name), std::move(values));
}

void DataFrame::add_text(std::string name, std::vector<std::string> values) {
    check_new(name, values.size());
    text_.emplace(std::move(name), std::move(values));
}

bool DataFrame::has(std::string_view name) const {
    const std::string key(name);
    return numeric_.contains(key) || text_.contains(key);
}

bool DataFrame::is_numeric(std::string_view name) const { return numeric_.contains(std::string(name)); }

const std::vector<double>& DataFrame::numeric(std::string_view name) const {
    auto it = numeric_.find(std::string(name));
    if (it == numeric_.end()) {
        if (has(name)) throw InputError(fmt::format("column '{}' is not numeric", name));
        throw InputError(fmt::format("missing column '{}'", name));
    }
    return it->second;
}

const std::vector<std::string>& DataFrame::text(std::string_view name) const {
    auto it = text_.find(std::string(name));
    if (it == text_.end()) {
        if (has(name)) throw InputError(fmt::format("column '{}' is not text", name));
        throw InputError(fmt::format("missing column '{}'", name));
    }
    return it->second;
}

std::string csv_escape(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

DataFrame parse_csv(std::string_view content, const std::vector<std::string>& text_columns) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (any || !cell.empty()) {
                row.push_back(std::move(cell));
                records.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    if (quoted) throw InputError("csv: unterminated quoted field");
    if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        records.push_back(std::move(row));
    }
    if (records.empty()) throw InputError("csv: missing header row");
    const auto& header = records.front();
    for (std::size_t r = 1; r < records.size(); ++r)
        if (records[r].size() != header.size())
            throw ParseError(r + 1, "*",
                             fmt::format("row has {} cells, header has {}", records[r].size(), header.size()));
    DataFrame df;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::vector<double> nums;
        bool numeric = records.size() > 1 &&
                       std::find(text_columns.begin(), text_columns.end(), header[c]) == text_columns.end();
        for (std::size_t r = 1; r < records.size() && numeric; ++r) {
            auto v = parse_number(records[r][c]);
            if (!v) numeric = false;
            else nums.push_back(*v);
        }
        if (numeric) {
            df.add_numeric(header[c], std::move(nums));
        } else {
            std::vector<std::string> texts;
            texts.reserve(records.size() - 1);
            for (std::size_t r = 1; r < records.size(); ++r) texts.push_back(records[r][c]);
            df.add_text(header[c], std::move(texts));
        }
    }
    return df;
}

DataFrame read_csv(const std::string& path, const std::vector<std::string>& text_columns) {
    return parse_csv(read_file(path), text_columns);
}

// ---------------------------------------------------------------------------
// Design encoding

std::vector<std::string> sorted_levels(std::vector<std::string> levels) {
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const bool all_numeric =
        std::all_of(levels.begin(), levels.end(), [](const std::string& s) { return parse_number(s).has_value(); });
    if (all_numeric)
        std::stable_sort(levels.begin(), levels.end(),
                         [](const std::string& a, const std::string& b) { return *parse_number(a) < *parse_number(b); });
    return levels;
}

Design encode_design(const DataFrame& rows, const DesignMatrixSpec& spec) {
    const std::size_t n = rows.rows();
    if (n == 0 || rows.names().empty()) throw InputError("cannot encode a design from zero rows");

    struct Source {
        const std::vector<double>* values = nullptr;       // continuous or dummy
        const std::vector<std::string>* levels = nullptr;  // categorical text
        std::vector<std::string> formatted;                // categorical numeric
        std::string level;
    };
    std::vector<std::string> columns;
    std::vector<Source> sources;

    auto check_finite = [&](const std::string& name, const std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(v[i])) throw InputError(fmt::format("column '{}' row {} is not finite", name, i + 1));
    };

    if (spec.intercept) {
        columns.emplace_back(kInterceptName);
        sources.push_back({});
    }
    for (const auto& term : spec.terms) {
        switch (term.kind) {
            case Term::Kind::kContinuous: {
                const auto& v = rows.numeric(term.name);
                check_finite(term.name, v);
                columns.push_back(term.name);
                sources.push_back({&v, nullptr, {}, {}});
                break;
            }
            case Term::Kind::kDummyBlock: {
                for (const auto& name : term.columns) {
                    const auto& v = rows.numeric(name);
                    for (std::size_t i = 0; i < n; ++i)
                        if (v[i] != 0.0 && v[i] != 1.0)
                            throw InputError(fmt::format("dummy column '{}' row {} is not 0/1", name, i + 1));
                    columns.push_back(name);
                    sources.push_back({&v, nullptr, {}, {}});
                }
                break;
            }
            case Term::Kind::kCategorical: {
                std::vector<std::string> formatted;
                const std::vector<std::string>* values = nullptr;
                if (rows.is_numeric(term.name)) {
                    const auto& v = rows.numeric(term.name);
                    check_finite(term.name, v);
                    formatted.reserve(n);
                    for (double x : v) formatted.push_back(format_level(x));
                } else {
                    values = &rows.text(term.name);
                }
                const auto& cells = values ? *values : formatted;
                const auto levels = sorted_levels(cells);
                const std::string reference = term.reference.value_or(levels.front());
                if (std::find(levels.begin(), levels.end(), reference) == levels.end())
                    throw ConfigError(
                        fmt::format("reference level '{}' of '{}' does not occur in the data", reference, term.name));
                for (const auto& level : levels) {
                    if (level == reference) continue;
                    columns.push_back(fmt::format("{}[{}]", term.name, level));
                    Source s;
                    s.levels = values;
                    s.formatted = values ? std::vector<std::string>{} : formatted;
                    s.level = level;
                    sources.push_back(std::move(s));
                }
                break;
            }
        }
    }
    {
        std::set<std::string> seen;
        for (const auto& c : columns)
            if (!seen.insert(c).second) throw ConfigError(fmt::format("duplicate design column '{}'", c));
    }

    Design d;
    d.columns = columns;
    d.x = Matrix(n, columns.size());
    for (std::size_t j = 0; j < sources.size(); ++j) {
        const auto& s = sources[j];
        for (std::size_t i = 0; i < n; ++i) {
            double v = 1.0;
            if (s.values) v = (*s.values)[i];
            else if (s.levels) v = (*s.levels)[i] == s.level ? 1.0 : 0.0;
            else if (!s.level.empty()) v = s.formatted[i] == s.level ? 1.0 : 0.0;
            d.x(i, j) = v;
        }
    }
    const auto& y = rows.numeric(spec.response);
    check_finite(spec.response, y);
    d.y = y;
    return d;
}

// ---------------------------------------------------------------------------
// OLS

namespace {

// In-place Householder QR of a column-major m x c block; returns the c x c upper
// triangular R (row-major), zero-padded when m < c.
std::vector<double> householder_r(std::vector<double>& a, std::size_t m, std::size_t c) {
    const std::size_t steps = std::min(m, c);
    for (std::size_t j = 0; j < steps; ++j) {
        double* col = a.data() + j * m;
        double sq = 0.0;
        for (std::size_t i = j; i < m; ++i) sq += col[i] * col[i];
        const double norm = std::sqrt(sq);
        if (norm == 0.0) continue;
        const double alpha = col[j] >= 0.0 ? -norm : norm;
        const double v0 = col[j] - alpha;
        const double vnorm2 = sq - col[j] * col[j] + v0 * v0;
        if (vnorm2 == 0.0) continue;
        col[j] = v0;
        for (std::size_t k = j + 1; k < c; ++k) {
            double* other = a.data() + k * m;
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) s += col[i] * other[i];
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < m; ++i) other[i] -= f * col[i];
        }
        col[j] = alpha;
        for (std::size_t i = j + 1; i < m; ++i) col[i] = 0.0;
    }
    std::vector<double> r(c * c, 0.0);
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t j = i; j < c; ++j) r[i * c + j] = a[j * m + i];
    return r;
}

// R factor of [x | y] rows [begin, end).
std::vector<double> block_r(const Matrix& x, std::span<const double> y, std::size_t begin, std::size_t end) {
    const std::size_t m = end - begin;
    const std::size_t c = x.cols + 1;
    std::vector<double> a(m * c);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = x.data.data() + (begin + i) * x.cols;
        for (std::size_t j = 0; j < x.cols; ++j) a[j * m + i] = row[j];
        a[x.cols * m + i] = y[begin + i];
    }
    return householder_r(a, m, c);
}

// R factor of the stacked pair [top; bottom].
std::vector<double> merge_r(const std::vector<double>& top, const std::vector<double>& bottom, std::size_t c) {
    const std::size_t m = 2 * c;
    std::vector<double> a(m * c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            a[j * m + i] = top[i * c + j];
            a[j * m + c + i] = bottom[i * c + j];
        }
    return householder_r(a, m, c);
}

void check_inputs(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names) {
    if (x.cols == 0) throw InputError("design matrix has no columns");
    if (y.size() != x.rows) throw InputError(fmt::format("response has {} rows, design has {}", y.size(), x.rows));
    if (names.size() != x.cols)
        throw InputError(fmt::format("{} column names for {} design columns", names.size(), x.cols));
    if (x.rows < x.cols)
        throw InputError(fmt::format("{} rows cannot identify {} coefficients", x.rows, x.cols));
    for (std::size_t i = 0; i < x.rows; ++i) {
        if (!std::isfinite(y[i])) throw InputError(fmt::format("response row {} is NaN or Inf", i + 1));
        for (std::size_t j = 0; j < x.cols; ++j)
            if (!std::isfinite(x(i, j)))
                throw InputError(fmt::format("design column '{}' row {} is NaN or Inf", names[j], i + 1));
    }
}

bool has_constant_column(const Matrix& x) {
    for (std::size_t j = 0; j < x.cols; ++j) {
        const double first = x(0, j);
        if (first == 0.0) continue;
        bool constant = true;
        for (std::size_t i = 1; i < x.rows && constant; ++i) constant = x(i, j) == first;
        if (constant) return true;
    }
    return false;
}

double two_sided_p(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

RegressionFit finish(const std::vector<double>& r, const Matrix& x, std::span<const double> y,
                     const std::vector<std::string>& names, const OlsOptions& options) {
    const std::size_t p = x.cols;
    const std::size_t c = p + 1;
    const std::size_t n = x.rows;
    auto R = [&](std::size_t i, std::size_t j) { return r[i * c + j]; };

    for (std::size_t j = 0; j < p; ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i <= j; ++i) sq += R(i, j) * R(i, j);
        const double col_norm = std::sqrt(sq);
        if (col_norm == 0.0 || std::abs(R(j, j)) <= options.rank_tolerance * col_norm)
            throw RankDeficientError(names[j]);
    }

    RegressionFit fit;
    fit.names = names;
    fit.n = n;
    fit.coefficients.assign(p, 0.0);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = R(jj, p);
        for (std::size_t k = jj + 1; k < p; ++k) s -= R(jj, k) * fit.coefficients[k];
        fit.coefficients[jj] = s / R(jj, jj);
    }
    fit.rss = R(p, p) * R(p, p);

    // Rows of R^-1; diag((X'X)^-1)_j = |row j of R^-1|^2.
    std::vector<double> rinv(p * p, 0.0);
    for (std::size_t col = 0; col < p; ++col) {
        rinv[col * p + col] = 1.0 / R(col, col);
        for (std::size_t ii = col; ii-- > 0;) {
            double s = 0.0;
            for (std::size_t k = ii + 1; k <= col; ++k) s += R(ii, k) * rinv[k * p + col];
            rinv[ii * p + col] = -s / R(ii, ii);
        }
    }
    const double df = static_cast<double>(n) - static_cast<double>(p);
    fit.residual_variance = df > 0 ? fit.rss / df : std::numeric_limits<double>::quiet_NaN();
    fit.std_errors.resize(p);
    fit.t_stats.resize(p);
    fit.p_values.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        double sq = 0.0;
        for (std::size_t k = j; k < p; ++k) sq += rinv[j * p + k] * rinv[j * p + k];
        const double se = std::sqrt(fit.residual_variance * sq);
        const double est = fit.coefficients[j];
        double t;
        if (se == 0.0) t = est == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), est);
        else t = est / se;
        fit.std_errors[j] = se;
        fit.t_stats[j] = t;
        fit.p_values[j] = (se == 0.0 && est == 0.0) ? 1.0 : two_sided_p(t, df);
    }

    const double dn = static_cast<double>(n);
    fit.log_likelihood = -0.5 * dn * (std::log(2.0 * M_PI) + std::log(fit.rss / dn) + 1.0);
    fit.bic = -2.0 * fit.log_likelihood + static_cast<double>(p) * std::log(dn);

    const bool centered = has_constant_column(x);
    double mean = 0.0;
    if (centered) {
        for (double v : y) mean += v;
        mean /= dn;
    }
    double tss = 0.0;
    for (double v : y) tss += (v - mean) * (v - mean);
    fit.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : std::numeric_limits<double>::quiet_NaN();
    const double dof_total = centered ? dn - 1.0 : dn;
    fit.r_squared_adj = df > 0 ? 1.0 - (1.0 - fit.r_squared) * dof_total / df : std::numeric_limits<double>::quiet_NaN();
    return fit;
}

}  // namespace

RegressionFit ols_fit(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                      const OlsOptions& options) {
    check_inputs(x, y, names);
    const std::size_t c = x.cols + 1;
    const std::size_t block = std::max<std::size_t>(options.block_rows, c);
    const std::size_t nblocks = (x.rows + block - 1) / block;
    const std::size_t wave = 64;
    std::vector<double> r;
    for (std::size_t w0 = 0; w0 < nblocks; w0 += wave) {
        const std::size_t w1 = std::min(nblocks, w0 + wave);
        std::vector<std::vector<double>> parts(w1 - w0);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = static_cast<std::int64_t>(w0); b < static_cast<std::int64_t>(w1); ++b) {
            const auto bi = static_cast<std::size_t>(b);
            parts[bi - w0] = block_r(x, y, bi * block, std::min(x.rows, (bi + 1) * block));
        }
        for (auto& part : parts) r = r.empty() ? std::move(part) : merge_r(r, part, c);
    }
    return finish(r, x, y, names, options);
}

RegressionFit ols_fit(const Design& design, const OlsOptions& options) {
    return ols_fit(design.x, design.y, design.columns, options);
}

RegressionFit ols_fit_serial(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                             const OlsOptions& options) {
    check_inputs(x, y, names);
    return finish(block_r(x, y, 0, x.rows), x, y, names, options);
}

std::optional<std::size_t> RegressionFit::find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    return std::nullopt;
}

namespace {
std::size_t require(const RegressionFit& fit, std::string_view name) {
    auto i = fit.find(name);
    if (!i) throw ConfigError(fmt::format("fit has no coefficient '{}'", name));
    return *i;
}
}  // namespace

double RegressionFit::coefficient(std::string_view name) const { return coefficients[require(*this, name)]; }
double RegressionFit::std_error(std::string_view name) const { return std_errors[require(*this, name)]; }
double RegressionFit::p_value(std::string_view name) const { return p_values[require(*this, name)]; }

// ---------------------------------------------------------------------------
// Reporting

StarScheme parse_star_scheme(std::string_view s) {
    if (s == "table4") return StarScheme::kTable4;
    if (s == "appendix") return StarScheme::kAppendix;
    throw ConfigError(fmt::format("unknown star scheme '{}' (expected table4 or appendix)", s));
}

const char* to_string(StarScheme s) { return s == StarScheme::kTable4 ? "table4" : "appendix"; }

std::string significance_stars(double p, StarScheme scheme) {
    const double t3 = scheme == StarScheme::kTable4 ? 0.01 : 0.001;
    const double t2 = scheme == StarScheme::kTable4 ? 0.05 : 0.01;
    const double t1 = scheme == StarScheme::kTable4 ? 0.10 : 0.05;
    if (std::isnan(p)) return "";
    if (p < t3) return "***";
    if (p < t2) return "**";
    if (p < t1) return "*";
    return "";
}

namespace {

std::string fixed(double v, int decimals) {
    std::string s = fmt::format("{:.{}f}", v, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

Summary summarize(const RegressionFit& fit, StarScheme scheme, const std::string& label) {
    const NamedFit one{label, &fit};
    return summarize(std::span<const NamedFit>(&one, 1), scheme);
}

Summary summarize(std::span<const NamedFit> fits, StarScheme scheme) {
    const int decimals = scheme == StarScheme::kTable4 ? 2 : 3;
    std::vector<std::string> terms;
    for (const auto& f : fits)
        for (const auto& name : f.fit->names)
            if (std::find(terms.begin(), terms.end(), name) == terms.end()) terms.push_back(name);

    // rows[i][0] is the label column.
    std::vector<std::vector<std::string>> body;
    for (const auto& term : terms) {
        std::vector<std::string> est{term};
        std::vector<std::string> se{""};
        for (const auto& f : fits) {
            auto i = f.fit->find(term);
            if (!i) {
                est.emplace_back();
                se.emplace_back();
                continue;
            }
            est.push_back(fixed(f.fit->coefficients[*i], decimals) + significance_stars(f.fit->p_values[*i], scheme));
            se.push_back("(" + fixed(f.fit->std_errors[*i], decimals) + ")");
        }
        body.push_back(std::move(est));
        body.push_back(std::move(se));
    }
    std::vector<std::vector<std::string>> footer;
    {
        std::vector<std::string> n{"N"}, bic{"BIC"}, ll{"Log-Likelihood"};
        for (const auto& f : fits) {
            n.push_back(std::to_string(f.fit->n));
            bic.push_back(fixed(f.fit->bic, decimals));
            ll.push_back(fixed(f.fit->log_likelihood, decimals));
        }
        footer = {n, bic, ll};
    }
    std::vector<std::string> header{""};
    for (const auto& f : fits) header.push_back(f.label);

    std::vector<std::size_t> width(fits.size() + 1, 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    };
    widen(header);
    for (const auto& row : body) widen(row);
    for (const auto& row : footer) widen(row);

    std::size_t total = width[0];
    for (std::size_t c = 1; c < width.size(); ++c) total += 2 + width[c];
    const std::string rule(total, '-');
    std::string text;
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line = fmt::format("{:<{}}", row[0], width[0]);
        for (std::size_t c = 1; c < row.size(); ++c) line += fmt::format("  {:>{}}", row[c], width[c]);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        text += line + "\n";
    };
    emit(header);
    text += rule + "\n";
    for (const auto& row : body) emit(row);
    text += rule + "\n";
    for (const auto& row : footer) emit(row);
    text += rule + "\n";
    text += scheme == StarScheme::kTable4 ? "Standard errors in parentheses. *** p<0.01, ** p<0.05, * p<0.1\n"
                                          : "Standard errors in parentheses. *** p<0.001, ** p<0.01, * p<0.05\n";

    std::string csv = "model,term,estimate,std_error,t_stat,p_value,stars\n";
    for (const auto& f : fits) {
        for (std::size_t i = 0; i < f.fit->p(); ++i)
            csv += fmt::format("{},{},{},{},{},{},{}\n", csv_escape(f.label), csv_escape(f.fit->names[i]), csv_number(f.fit->coefficients[i]),
                               csv_number(f.fit->std_errors[i]), csv_number(f.fit->t_stats[i]),
                               csv_number(f.fit->p_values[i]), significance_stars(f.fit->p_values[i], scheme));
        csv += fmt::format("{},N,{},,,,\n", csv_escape(f.label), f.fit->n);
        csv += fmt::format("{},BIC,{},,,,\n", csv_escape(f.label), csv_number(f.fit->bic));
        csv += fmt::format("{},Log-Likelihood,{},,,,\n", csv_escape(f.label), csv_number(f.fit->log_likelihood));
    }
    return {text, csv};
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InputError("welch_t_test needs at least 2 values per sample");
    auto moments = [](std::span<const double> s) {
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double ss = 0.0;
        for (double v : s) ss += (v - mean) * (v - mean);
        return std::pair{mean, ss / static_cast<double>(s.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    WelchResult res;
    res.mean_a = ma;
    res.mean_b = mb;
    const double qa = va / na;
    const double qb = vb / nb;
    const double se = std::sqrt(qa + qb);
    const double diff = ma - mb;
    if (se == 0.0) {
        res.df = na + nb - 2.0;
        res.t = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        res.p_greater = diff > 0.0 ? 0.0 : (diff < 0.0 ? 1.0 : 0.5);
        res.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.t = diff / se;
    res.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    boost::math::students_t dist(res.df);
    res.p_greater = boost::math::cdf(boost::math::complement(dist, res.t));
    res.p_two_sided = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t))));
    return res;
}

}  // namespace spsim::stats
