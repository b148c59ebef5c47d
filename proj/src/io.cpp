#include "pvfsr/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pvfsr/errors.hpp"

namespace pvfsr {

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, field_started = false, after_quote = false;
    std::size_t line = 1, record_line = 1;
    bool any = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = after_quote = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = record.size() == 1 && record[0].empty();
        if (!blank) {
            if (t.header.empty()) {
                t.header = std::move(record);
            } else {
                if (record.size() != t.header.size())
                    throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                                         std::to_string(record.size()),
                                     record_line);
                t.rows.push_back(std::move(record));
                t.row_lines.push_back(record_line);
            }
        }
        record.clear();
        any = false;
    };

    char c;
    while (in.get(c)) {
        if (!any) {
            record_line = line;
            any = true;
        }
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && in.peek() == '\n') in.get(c);
            end_record();
            ++line;
        } else if (c == '"') {
            if (field_started) throw ParseError("stray quote inside an unquoted field", line);
            quoted = true;
            field_started = true;
        } else {
            if (after_quote) throw ParseError("text after a closing quote", line);
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", record_line);
    if (any) end_record();
    if (t.header.empty()) throw ParseError("empty input: a header row is required", 1);
    for (const std::string& h : t.header)
        if (h.empty()) throw ParseError("empty column name in header", 1);
    return t;
}

CsvTable parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_csv(in);
}

namespace {

double to_number(const std::string& cell, const std::string& column, std::size_t line) {
    std::string s = cell;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    if (s.empty()) throw ParseError("missing value in column '" + column + "'", line);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ParseError("non-numeric value '" + cell + "' in column '" + column + "'", line);
    return v;
}

std::size_t column_index(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw ParseError("no column named '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

Dataset load_dataset(const CsvTable& table, Family family, const std::string& response,
                     const std::optional<std::string>& status) {
    if (family == Family::cox && !status) throw ParseError("the cox family needs a status column");
    const std::size_t yc = column_index(table, response);
    std::optional<std::size_t> sc;
    if (status) {
        sc = column_index(table, *status);
        if (*sc == yc) throw ParseError("response and status name the same column");
    }

    std::vector<std::size_t> cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (j != yc && (!sc || j != *sc)) {
            cols.push_back(j);
            names.push_back(table.header[j]);
        }
    if (cols.empty()) throw ParseError("no predictor columns left after removing the response", 1);

    const auto n = static_cast<Index>(table.rows.size());
    Eigen::MatrixXd xv(n, static_cast<Index>(cols.size()));
    Eigen::VectorXd y(n), d(n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        const std::size_t line = table.row_lines[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < cols.size(); ++k)
            xv(i, static_cast<Index>(k)) = to_number(row[cols[k]], table.header[cols[k]], line);
        y(i) = to_number(row[yc], response, line);
        if (sc) {
            d(i) = to_number(row[*sc], *status, line);
            if (d(i) != 0.0 && d(i) != 1.0)
                throw ParseError("status column '" + *status + "' must hold 0 or 1", line);
        }
        if (family == Family::logistic && y(i) != 0.0 && y(i) != 1.0)
            throw ParseError("binary response '" + response + "' must hold 0 or 1", line);
    }

    Dataset out;
    out.x = make_design(xv, names);
    out.response_column = response;
    switch (family) {
        case Family::linear: out.y = Response::continuous(y); break;
        case Family::logistic: out.y = Response::binary(y); break;
        case Family::cox:
            out.y = Response::survival(y, d);
            out.status_column = *status;
            break;
    }
    validate_response(out.y, n);
    return out;
}

}  // namespace pvfsr
