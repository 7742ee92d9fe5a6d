#include "betheperm/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "betheperm/errors.hpp"

namespace betheperm {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    // trailing newline produces one empty tail entry; drop trailing blanks
    while (!lines.empty() && lines.back().find_first_not_of(" \t\r") == std::string_view::npos)
        lines.pop_back();
    return lines;
}

std::vector<std::string_view> tokenize(std::string_view line, char sep) {
    std::vector<std::string_view> tokens;
    if (sep == ' ') {
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
                ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r')
                ++end;
            tokens.push_back(line.substr(pos, end - pos));
            pos = end;
        }
    } else {
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(sep, start);
            auto field = pos == std::string_view::npos ? line.substr(start)
                                                       : line.substr(start, pos - start);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
                field.remove_prefix(1);
            while (!field.empty() &&
                   (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
                field.remove_suffix(1);
            tokens.push_back(field);
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    }
    return tokens;
}

double parse_real(std::string_view token) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw parse_error("malformed number: '" + std::string(token) + "'");
    return value;
}

std::size_t parse_dimension(std::string_view token) {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw parse_error("malformed dimension: '" + std::string(token) + "'");
    return n;
}

SquareMatrix from_rows(std::vector<std::vector<double>> rows) {
    const std::size_t n = rows.size();
    std::vector<double> entries;
    entries.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw shape_error("row length does not match row count");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return SquareMatrix(n, std::move(entries));
}

SquareMatrix parse_dense_text(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw parse_error("empty input");
    const auto header = tokenize(lines[0], ' ');
    if (header.size() != 1) throw parse_error("expected a single dimension on the first line");
    const std::size_t n = parse_dimension(header[0]);
    if (n == 0) throw shape_error("matrix dimension must be positive");
    if (lines.size() != n + 1)
        throw shape_error("expected " + std::to_string(n) + " rows, got " +
                          std::to_string(lines.size() - 1));
    std::vector<double> entries;
    entries.reserve(n * n);
    for (std::size_t i = 1; i <= n; ++i) {
        const auto tokens = tokenize(lines[i], ' ');
        if (tokens.size() != n)
            throw shape_error("row " + std::to_string(i) + " has " +
                              std::to_string(tokens.size()) + " entries, expected " +
                              std::to_string(n));
        for (auto t : tokens) entries.push_back(parse_real(t));
    }
    return SquareMatrix(n, std::move(entries));
}

SquareMatrix parse_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw parse_error("empty input");
    std::vector<std::vector<double>> rows;
    for (auto line : lines) {
        std::vector<double> row;
        for (auto t : tokenize(line, ',')) row.push_back(parse_real(t));
        rows.push_back(std::move(row));
    }
    return from_rows(std::move(rows));
}

SquareMatrix parse_json_matrix(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("invalid json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("rows"))
        throw parse_error("expected an object with \"n\" and \"rows\"");
    if (!doc["n"].is_number_integer() || !doc["rows"].is_array())
        throw parse_error("\"n\" must be an integer and \"rows\" an array");
    const auto n = doc["n"].get<long long>();
    if (n <= 0) throw shape_error("matrix dimension must be positive");
    std::vector<std::vector<double>> rows;
    for (const auto& r : doc["rows"]) {
        if (!r.is_array()) throw parse_error("rows must be arrays of numbers");
        std::vector<double> row;
        for (const auto& v : r) {
            if (!v.is_number()) throw parse_error("rows must be arrays of numbers");
            row.push_back(v.get<double>());
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() != static_cast<std::size_t>(n))
        throw shape_error("\"n\" does not match the number of rows");
    return from_rows(std::move(rows));
}

// Shortest decimal form that parses back to the same double.
std::string render(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string serialize_grid(const SquareMatrix& m, char sep, bool header) {
    std::string out;
    const std::size_t n = m.size();
    if (header) {
        out += std::to_string(n);
        out += '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out += sep;
            out += render(m(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

MatrixFormat parse_format(std::string_view name) {
    if (name == "dense-text") return MatrixFormat::dense_text;
    if (name == "csv") return MatrixFormat::csv;
    if (name == "json") return MatrixFormat::json;
    throw domain_error("unknown matrix format: '" + std::string(name) + "'");
}

std::string format_name(MatrixFormat format) {
    switch (format) {
        case MatrixFormat::dense_text: return "dense-text";
        case MatrixFormat::csv: return "csv";
        case MatrixFormat::json: return "json";
    }
    return "?";
}

SquareMatrix parse_matrix(std::string_view text, MatrixFormat format) {
    switch (format) {
        case MatrixFormat::dense_text: return parse_dense_text(text);
        case MatrixFormat::csv: return parse_csv(text);
        case MatrixFormat::json: return parse_json_matrix(text);
    }
    throw domain_error("unknown matrix format");
}

std::string serialize_matrix(const SquareMatrix& m, MatrixFormat format) {
    switch (format) {
        case MatrixFormat::dense_text: return serialize_grid(m, ' ', true);
        case MatrixFormat::csv: return serialize_grid(m, ',', false);
        case MatrixFormat::json: {
            nlohmann::ordered_json doc;
            doc["n"] = m.size();
            auto rows = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < m.size(); ++i) {
                auto row = nlohmann::ordered_json::array();
                for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
                rows.push_back(std::move(row));
            }
            doc["rows"] = std::move(rows);
            return doc.dump() + "\n";
        }
    }
    throw domain_error("unknown matrix format");
}

}  // namespace betheperm
