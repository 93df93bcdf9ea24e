// csv.cpp: Table serialisation

#include "qhe/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qhe/types.hpp"

namespace qhe {

int Table::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quote_field(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& os, const Table& table)
{
    auto record = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os << ',';
            os << quote_field(fields[i]);
        }
        os << "\r\n";
    };
    record(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw Error("CSV row width does not match header");
        record(row);
    }
}

void write_csv_file(const std::string& path, const Table& table)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    write_csv(os, table);
    if (!os) throw ConfigError("failed writing '" + path + "'");
}

Table read_csv(std::istream& is)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false, any = false;
    char c;
    auto end_record = [&] {
        fields.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(fields));
        fields.clear();
        any = false;
    };
    while (is.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            if (!field.empty()) throw ConfigError("CSV: quote inside unquoted field");
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (is.peek() == '\n') is.get(c);
            end_record();
        } else if (c == '\n') {
            end_record();
        } else {
            field += c;
        }
    }
    if (quoted) throw ConfigError("CSV: unterminated quoted field");
    if (any) end_record();

    Table t;
    if (records.empty()) throw ConfigError("CSV: empty input");
    t.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != t.header.size()) {
            std::ostringstream os;
            os << "CSV: record " << i + 1 << " has " << records[i].size() << " fields, header has "
               << t.header.size();
            throw ConfigError(os.str());
        }
        t.rows.push_back(std::move(records[i]));
    }
    return t;
}

Table read_csv_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    return read_csv(is);
}

} // namespace qhe
