// csv.hpp: RFC-4180 tables: CRLF records, quoted fields where needed

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qhe {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a column, or −1.
    int column(const std::string& name) const;
};

// 17 significant digits; "nan" and "inf"/"-inf" for non-finite values.
std::string format_number(double x);

std::string quote_field(const std::string& field);

void write_csv(std::ostream& os, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

// Accepts CRLF or LF line ends. Throws ConfigError on malformed quoting or
// ragged rows.
Table read_csv(std::istream& is);
Table read_csv_file(const std::string& path);

} // namespace qhe
