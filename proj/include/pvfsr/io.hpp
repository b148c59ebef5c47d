#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr {

/// Header plus string cells, as read from an RFC-4180 file.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  ///< 1-based source line where each record starts
};

/// Quoted fields, doubled quotes, embedded separators and line breaks, CRLF or LF.
/// Every record must have as many fields as the header.
CsvTable parse_csv(std::istream& in);
CsvTable parse_csv_string(const std::string& text);
CsvTable read_csv_file(const std::string& path);

struct Dataset {
    DesignMatrix x;
    Response y;
    std::string response_column;
    std::string status_column;
};

/// Uses every column other than the response (and status) as a predictor.
/// Non-numeric cells raise ParseError naming the column and line.
Dataset load_dataset(const CsvTable& table, Family family, const std::string& response,
                     const std::optional<std::string>& status = std::nullopt);

}  // namespace pvfsr
