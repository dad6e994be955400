#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sdooop/model.hpp"
#include "sdooop/stream_gen.hpp"

namespace sdooop::io {

// Malformed input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Shortest decimal that parses back to the same double.
inline std::string format_double(double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t'))
            f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
            f.remove_suffix(1);
    }
    return out;
}

inline double parse_double(std::string_view field, std::size_t line, std::string_view column)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParseError(line, "column '" + std::string(column) + "': cannot parse '" + std::string(field) +
                                   "' as a number");
    return value;
}

inline bool read_line(std::istream& in, std::string& line)
{
    if (!std::getline(in, line))
        return false;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return true;
}

struct StreamRow {
    double t = 0.0;
    std::vector<double> v;
    std::optional<int> label;
    std::size_t line = 0;
};

// Reads the stream format row by row:
//   t,f0,...,f{D-1}[,label]
// Label values are 0 (normal), 1 (spatial outlier), 2 (contextual outlier).
class StreamReader {
public:
    explicit StreamReader(std::istream& in) : in_(in)
    {
        std::string header;
        if (!read_line(in_, header))
            throw ParseError(1, "missing header row");
        line_no_ = 1;
        columns_.clear();
        for (auto f : split_fields(header))
            columns_.emplace_back(f);
        if (columns_.empty() || columns_.front() != "t")
            throw ParseError(1, "first column must be 't'");
        has_label_ = columns_.back() == "label";
        const std::size_t features = columns_.size() - 1 - (has_label_ ? 1 : 0);
        if (features == 0)
            throw ParseError(1, "no feature columns");
        dims_ = features;
    }

    std::optional<StreamRow> next()
    {
        std::string line;
        while (read_line(in_, line)) {
            ++line_no_;
            if (line.empty())
                continue;
            const auto fields = split_fields(line);
            if (fields.size() != columns_.size())
                throw ParseError(line_no_, "expected " + std::to_string(columns_.size()) + " columns, found " +
                                               std::to_string(fields.size()));
            StreamRow row;
            row.line = line_no_;
            row.t = parse_double(fields[0], line_no_, columns_[0]);
            row.v.resize(dims_);
            for (std::size_t d = 0; d < dims_; ++d)
                row.v[d] = parse_double(fields[d + 1], line_no_, columns_[d + 1]);
            if (has_label_) {
                const double l = parse_double(fields.back(), line_no_, "label");
                if (l != 0.0 && l != 1.0 && l != 2.0)
                    throw ParseError(line_no_, "label must be 0, 1 or 2");
                row.label = static_cast<int>(l);
            }
            return row;
        }
        return std::nullopt;
    }

    std::size_t dims() const { return dims_; }
    bool has_label() const { return has_label_; }
    std::size_t line() const { return line_no_; }

private:
    std::istream& in_;
    std::vector<std::string> columns_;
    std::size_t dims_ = 0;
    bool has_label_ = false;
    std::size_t line_no_ = 0;
};

inline void write_stream_header(std::ostream& out, std::size_t dims, bool with_label)
{
    out << 't';
    for (std::size_t d = 0; d < dims; ++d)
        out << ",f" << d;
    if (with_label)
        out << ",label";
    out << '\n';
}

inline void write_stream_row(std::ostream& out, double t, std::span<const double> v, std::optional<int> label)
{
    out << format_double(t);
    for (double f : v)
        out << ',' << format_double(f);
    if (label)
        out << ',' << *label;
    out << '\n';
}

inline void write_labeled_point(std::ostream& out, const LabeledPoint& p)
{
    write_stream_row(out, p.t, p.v, static_cast<int>(p.label));
}

// Score format: t,score,warmup,n_active,sampled
inline void write_score_header(std::ostream& out) { out << "t,score,warmup,n_active,sampled\n"; }

inline void write_score_row(std::ostream& out, const ScoreRecord& r)
{
    out << format_double(r.t) << ',' << format_double(r.score) << ',' << (r.warmup ? 1 : 0) << ',' << r.n_active
        << ',' << (r.sampled ? 1 : 0) << '\n';
}

class ScoreReader {
public:
    explicit ScoreReader(std::istream& in) : in_(in)
    {
        std::string header;
        if (!read_line(in_, header))
            throw ParseError(1, "missing header row");
        line_no_ = 1;
        const auto fields = split_fields(header);
        static constexpr std::string_view expected[] = {"t", "score", "warmup", "n_active", "sampled"};
        if (fields.size() != 5)
            throw ParseError(1, "score header must be t,score,warmup,n_active,sampled");
        for (std::size_t i = 0; i < 5; ++i)
            if (fields[i] != expected[i])
                throw ParseError(1, "score header must be t,score,warmup,n_active,sampled");
    }

    std::optional<ScoreRecord> next()
    {
        std::string line;
        while (read_line(in_, line)) {
            ++line_no_;
            if (line.empty())
                continue;
            const auto f = split_fields(line);
            if (f.size() != 5)
                throw ParseError(line_no_, "expected 5 columns, found " + std::to_string(f.size()));
            ScoreRecord r;
            r.t = parse_double(f[0], line_no_, "t");
            r.score = parse_double(f[1], line_no_, "score");
            r.warmup = parse_flag(f[2], "warmup");
            const double n = parse_double(f[3], line_no_, "n_active");
            if (n < 0.0 || n != static_cast<double>(static_cast<std::size_t>(n)))
                throw ParseError(line_no_, "column 'n_active' must be a non-negative integer");
            r.n_active = static_cast<std::size_t>(n);
            r.sampled = parse_flag(f[4], "sampled");
            return r;
        }
        return std::nullopt;
    }

    std::size_t line() const { return line_no_; }

private:
    bool parse_flag(std::string_view field, std::string_view column) const
    {
        if (field == "0")
            return false;
        if (field == "1")
            return true;
        throw ParseError(line_no_, "column '" + std::string(column) + "' must be 0 or 1");
    }

    std::istream& in_;
    std::size_t line_no_ = 0;
};

} // namespace sdooop::io
