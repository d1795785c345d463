#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mincerlab/records.hpp"

namespace mincer::csv {

/// Header of the microdata schema, in canonical order.
const std::vector<std::string>& record_columns();

/// Reads microdata rows. The header is required; columns may appear in any
/// order but must match the schema exactly. Malformed rows are collected
/// (up to a cap) and reported together in a SchemaError that names each
/// offending row and column.
std::vector<PersonRecord> read_records(std::istream& in, const std::string& source_name);
std::vector<PersonRecord> read_records_file(const std::string& path);

void write_records(std::ostream& out, const std::vector<PersonRecord>& records);
void write_records_file(const std::string& path, const std::vector<PersonRecord>& records);

/// One-column side file of reals (used for the generated-ability export).
void write_value_column(std::ostream& out, const std::string& header,
                        const std::vector<double>& values);
void write_value_column_file(const std::string& path, const std::string& header,
                             const std::vector<double>& values);

/// Reads a two-column CSV with header "label,<value_header>"; order preserved.
std::vector<std::pair<std::string, double>> read_labeled_values(std::istream& in,
                                                                const std::string& value_header,
                                                                const std::string& source_name);
std::vector<std::pair<std::string, double>> read_labeled_values_file(
    const std::string& path, const std::string& value_header);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace mincer::csv
