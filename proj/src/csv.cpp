#include "mincerlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mincerlab/errors.hpp"

namespace mincer::csv {

namespace {

constexpr std::size_t kMaxReportedErrors = 20;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int_strict(const std::string& s, int& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_bool01(const std::string& s, bool& out) {
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

class ErrorCollector {
 public:
  explicit ErrorCollector(std::string source) : source_(std::move(source)) {}

  void add(std::size_t line_no, const std::string& column, const std::string& detail) {
    ++count_;
    if (messages_.size() < kMaxReportedErrors) {
      std::ostringstream msg;
      msg << source_ << ":" << line_no;
      if (!column.empty()) msg << ": column '" << column << "'";
      msg << ": " << detail;
      messages_.push_back(msg.str());
    }
  }

  bool any() const { return count_ > 0; }

  [[noreturn]] void throw_all() const {
    std::ostringstream msg;
    msg << count_ << " malformed row(s):";
    for (const auto& m : messages_) msg << "\n  " << m;
    if (count_ > messages_.size()) msg << "\n  ... and " << (count_ - messages_.size()) << " more";
    throw SchemaError(msg.str());
  }

 private:
  std::string source_;
  std::size_t count_ = 0;
  std::vector<std::string> messages_;
};

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "age",   "gender", "married",   "hours_per_week", "weeks_worked", "big_town",
      "urban", "edu_level", "he_field", "gross_income",  "employed"};
  return cols;
}

std::vector<PersonRecord> read_records(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(source_name + ": empty file, header required");

  const std::vector<std::string> header = split_line(strip_cr(line));
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (position.count(header[i]))
      throw SchemaError(source_name + ": duplicate column '" + header[i] + "'");
    position[header[i]] = i;
  }
  for (const std::string& want : record_columns()) {
    if (!position.count(want)) throw SchemaError(source_name + ": missing column '" + want + "'");
  }
  if (position.size() != record_columns().size()) {
    for (const auto& [name, idx] : position) {
      bool known = false;
      for (const std::string& want : record_columns()) known = known || want == name;
      if (!known) throw SchemaError(source_name + ": unknown column '" + name + "'");
    }
  }

  std::vector<PersonRecord> records;
  ErrorCollector errors(source_name);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream d;
      d << "expected " << header.size() << " fields, found " << fields.size();
      errors.add(line_no, "", d.str());
      continue;
    }
    auto field = [&](const std::string& name) -> const std::string& {
      return fields[position.at(name)];
    };

    PersonRecord r;
    bool row_ok = true;
    auto fail = [&](const std::string& col, const std::string& detail) {
      errors.add(line_no, col, detail);
      row_ok = false;
    };

    if (!parse_int_strict(field("age"), r.age)) fail("age", "not an integer");
    if (auto g = parse_gender(field("gender"))) {
      r.gender = *g;
    } else {
      fail("gender", "expected 'male' or 'female'");
    }
    if (!parse_bool01(field("married"), r.married)) fail("married", "expected 0 or 1");
    if (!parse_double_strict(field("hours_per_week"), r.hours_per_week))
      fail("hours_per_week", "not a number");
    if (!parse_double_strict(field("weeks_worked"), r.weeks_worked))
      fail("weeks_worked", "not a number");
    if (!parse_bool01(field("big_town"), r.big_town)) fail("big_town", "expected 0 or 1");
    if (!parse_bool01(field("urban"), r.urban)) fail("urban", "expected 0 or 1");
    if (auto lvl = parse_education_level(field("edu_level"))) {
      r.edu_level = *lvl;
    } else {
      fail("edu_level", "unknown education level '" + field("edu_level") + "'");
    }
    const std::string& he = field("he_field");
    if (he.empty()) {
      r.he_field.reset();
    } else if (auto f = parse_higher_ed_field(he)) {
      r.he_field = *f;
    } else {
      fail("he_field", "unknown field '" + he + "'");
    }
    if (!parse_double_strict(field("gross_income"), r.gross_income))
      fail("gross_income", "not a number");
    if (!parse_bool01(field("employed"), r.employed)) fail("employed", "expected 0 or 1");

    if (row_ok) {
      if (auto violation = validate(r)) {
        errors.add(line_no, "", *violation);
        continue;
      }
      records.push_back(r);
    }
  }

  if (errors.any()) errors.throw_all();
  return records;
}

std::vector<PersonRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return read_records(in, path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_records(std::ostream& out, const std::vector<PersonRecord>& records) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const PersonRecord& r : records) {
    out << r.age << ',' << to_string(r.gender) << ',' << (r.married ? 1 : 0) << ','
        << format_double(r.hours_per_week) << ',' << format_double(r.weeks_worked) << ','
        << (r.big_town ? 1 : 0) << ',' << (r.urban ? 1 : 0) << ',' << to_string(r.edu_level) << ','
        << (r.he_field ? to_string(*r.he_field) : std::string()) << ','
        << format_double(r.gross_income) << ',' << (r.employed ? 1 : 0) << "\n";
  }
}

void write_records_file(const std::string& path, const std::vector<PersonRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path + "'");
  write_records(out, records);
}

void write_value_column(std::ostream& out, const std::string& header,
                        const std::vector<double>& values) {
  out << header << "\n";
  for (double v : values) out << format_double(v) << "\n";
}

void write_value_column_file(const std::string& path, const std::string& header,
                             const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path + "'");
  write_value_column(out, header, values);
}

std::vector<std::pair<std::string, double>> read_labeled_values(std::istream& in,
                                                                const std::string& value_header,
                                            const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(source_name + ": empty file, header required");
  const auto header = split_line(strip_cr(line));
  if (header.size() != 2 || header[0] != "label" || header[1] != value_header) {
    throw SchemaError(source_name + ": expected header 'label," + value_header + "'");
  }

  std::vector<std::pair<std::string, double>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    std::ostringstream where;
    where << source_name << ":" << line_no;
    if (fields.size() != 2) throw SchemaError(where.str() + ": expected 2 fields");
    double v = 0.0;
    if (fields[0].empty()) throw SchemaError(where.str() + ": empty label");
    if (!parse_double_strict(fields[1], v))
      throw SchemaError(where.str() + ": '" + fields[1] + "' is not a number");
    out.emplace_back(fields[0], v);
  }
  return out;
}

std::vector<std::pair<std::string, double>> read_labeled_values_file(
    const std::string& path, const std::string& value_header) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return read_labeled_values(in, value_header, path);
}

}  // namespace mincer::csv
