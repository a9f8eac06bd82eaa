#include <charconv>
#include <cmath>
#include <sstream>

#include "nmqj/errors.hpp"
#include "nmqj/harness.hpp"

namespace nmqj {

namespace {

void append_number(std::string& out, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

void append_number(std::string& out, std::int64_t x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view s, std::size_t row, std::size_t col) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("CSV row " + std::to_string(row) + " column " + std::to_string(col) +
                             ": cannot parse '" + std::string(s) + "'",
                         static_cast<int>(row), "");
    }
    return value;
}

std::string label(std::size_t i) { return std::string(1, static_cast<char>('a' + i)); }

}  // namespace

std::string series_to_csv(const TrajectorySeries& s) {
    const std::size_t d = s.dim;
    const std::size_t nch = s.rates.empty() ? 0 : s.rates.front().size();
    const std::size_t nent = s.counts.empty() ? 0 : s.counts.front().size();
    std::string out = "t";
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto idx = std::to_string(i) + std::to_string(j);
            out += ",re_rho_" + idx + ",im_rho_" + idx;
        }
    }
    for (std::size_t j = 0; j < nch; ++j) {
        out += ",delta_" + std::to_string(j + 1);
    }
    for (std::size_t a = 0; a < nent; ++a) {
        out += ",n_" + std::to_string(a);
    }
    out += '\n';
    for (std::size_t k = 0; k < s.size(); ++k) {
        append_number(out, s.times[k]);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                out += ',';
                append_number(out, s.rho[k](i, j).real());
                out += ',';
                append_number(out, s.rho[k](i, j).imag());
            }
        }
        for (std::size_t j = 0; j < nch; ++j) {
            out += ',';
            append_number(out, s.rates[k][j]);
        }
        for (std::size_t a = 0; a < nent; ++a) {
            out += ',';
            append_number(out, s.counts[k][a]);
        }
        out += '\n';
    }
    return out;
}

TrajectorySeries series_from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    if (lines.empty()) {
        throw ParseError("CSV is empty", 0, "");
    }
    const auto header = split(lines[0], ',');
    if (header.empty() || header[0] != "t") {
        throw ParseError("CSV header must start with 't'", 1, "t");
    }
    std::size_t rho_cols = 0, nch = 0, nent = 0;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].starts_with("re_rho_") || header[c].starts_with("im_rho_")) {
            ++rho_cols;
        } else if (header[c].starts_with("delta_")) {
            ++nch;
        } else if (header[c].starts_with("n_")) {
            ++nent;
        } else {
            throw ParseError("unknown CSV column '" + std::string(header[c]) + "'", 1,
                             std::string(header[c]));
        }
    }
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(rho_cols / 2.0)));
    if (2 * d * d != rho_cols) {
        throw ParseError("CSV density-matrix columns do not form a square matrix", 1, "");
    }

    TrajectorySeries s;
    s.dim = d;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split(lines[r], ',');
        if (f.size() != header.size()) {
            throw ParseError("CSV row " + std::to_string(r + 1) + " has " +
                                 std::to_string(f.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             static_cast<int>(r + 1), "");
        }
        std::size_t c = 0;
        auto next_double = [&] {
            ++c;
            return parse_field<double>(f[c - 1], r + 1, c);
        };
        s.times.push_back(next_double());
        DensityMatrix rho(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double re = next_double();
                const double im = next_double();
                rho(i, j) = {re, im};
            }
        }
        s.rho.push_back(std::move(rho));
        std::vector<double> rates;
        for (std::size_t j = 0; j < nch; ++j) {
            rates.push_back(next_double());
        }
        s.rates.push_back(std::move(rates));
        if (nent > 0) {
            std::vector<std::int64_t> counts;
            for (std::size_t a = 0; a < nent; ++a) {
                ++c;
                counts.push_back(parse_field<std::int64_t>(f[c - 1], r + 1, c));
            }
            s.counts.push_back(std::move(counts));
        }
        if (s.times.size() > 1 && !(s.times.back() > s.times[s.times.size() - 2])) {
            throw ParseError("CSV times must be strictly increasing", static_cast<int>(r + 1), "t");
        }
    }
    return s;
}

std::string events_to_ndjson(std::span<const JumpEvent> events) {
    std::string out;
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["step"] = e.step;
        j["time"] = e.time;
        j["channel"] = e.channel;
        j["direction"] = e.direction == JumpDirection::Forward ? "forward" : "reverse";
        j["source"] = e.source;
        j["target"] = e.target;
        j["members"] = e.members;
        out += j.dump();
        out += '\n';
    }
    return out;
}

CompareReport compare_series(const TrajectorySeries& a, const TrajectorySeries& b, double tol,
                             std::optional<double> until) {
    if (a.dim != b.dim) {
        throw GridMismatch("series have different dimensions");
    }
    if (a.size() != b.size()) {
        throw GridMismatch("series have different numbers of samples");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a.times[k] - b.times[k]) > 1e-9 * std::max(1.0, std::abs(a.times[k]))) {
            throw GridMismatch("series time grids differ at sample " + std::to_string(k));
        }
    }
    CompareReport report;
    report.tolerance = tol;
    const std::size_t d = a.dim;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            ElementDeviation dev;
            dev.element = i == j ? "rho_" + label(i) + label(j)
                                 : "|rho_" + label(i) + label(j) + "|";
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (until && a.times[k] > *until) {
                    break;
                }
                const double x = i == j ? a.rho[k](i, i).real() : std::abs(a.rho[k](i, j));
                const double y = i == j ? b.rho[k](i, i).real() : std::abs(b.rho[k](i, j));
                dev.max_deviation = std::max(dev.max_deviation, std::abs(x - y));
                report.compared_until = a.times[k];
            }
            report.max_deviation = std::max(report.max_deviation, dev.max_deviation);
            report.elements.push_back(std::move(dev));
        }
    }
    report.pass = report.max_deviation < tol;
    return report;
}

}  // namespace nmqj
