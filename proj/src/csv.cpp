#include "nbhd/csv.hpp"

#include "nbhd/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace nbhd::csv {

namespace {

// Splits the stream into records, honouring quoted fields that span lines.
bool next_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) {
        return false;
    }

    std::string field;
    bool quoted = false;
    bool field_started = false;
    char ch;
    while (in.get(ch)) {
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }

        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n') {
                in.get(ch);
            }
            break;
        } else {
            field.push_back(ch);
            field_started = true;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

bool blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields.front().empty();
}

}  // namespace

Table parse(std::istream& in, const std::string& source_name) {
    // Skip a UTF-8 BOM.
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
            throw Error(ErrorKind::Format, source_name + ": unexpected leading bytes");
        }
    }

    Table table;
    std::vector<std::string> fields;
    while (next_record(in, fields)) {
        if (!blank(fields)) {
            table.header = fields;
            break;
        }
    }
    if (table.header.empty()) {
        throw Error(ErrorKind::Format, source_name + ": empty file (no header row)");
    }

    std::size_t line = 1;
    while (next_record(in, fields)) {
        ++line;
        if (blank(fields)) {
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw Error(ErrorKind::Format, source_name + ": record " + std::to_string(table.records.size() + 1) +
                                               " has " + std::to_string(fields.size()) + " fields, header has " +
                                               std::to_string(table.header.size()));
        }
        table.records.push_back(fields);
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    return parse(in, path);
}

bool parse_double(std::string_view field, double& out) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    if (field.empty()) {
        return false;
    }
    // from_chars does not accept R-style spellings.
    if (field == "NA" || field == "NaN" || field == "nan") {
        out = std::nan("");
        return true;
    }
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw Error(ErrorKind::Format, "failed to format number");
    }
    return std::string(buf, ptr);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace nbhd::csv
