#ifndef NBHD_CSV_HPP
#define NBHD_CSV_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nbhd::csv {

/** One parsed CSV file: header plus data records, all as raw strings. */
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> records;
};

/**
 * Parse RFC 4180 style CSV: comma separator, optional double-quoted fields with
 * `""` escapes, LF or CRLF line endings. A UTF-8 byte order mark is skipped.
 * Throws `Error(Format)` on an empty input or a record whose width differs from the header.
 */
Table parse(std::istream& in, const std::string& source_name = "<stream>");

Table read_file(const std::string& path);

/** Locale-independent dot-decimal parse of the whole field. Returns false on any leftover characters. */
bool parse_double(std::string_view field, double& out);

/** Shortest decimal string that round-trips to the same double. */
std::string format_double(double value);

/** Quote a field if it contains a comma, quote, or line break. */
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace nbhd::csv

#endif
