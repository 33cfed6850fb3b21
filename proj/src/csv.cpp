#include "sdaas/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace sdaas::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

static std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool saw_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != expected_header)
        throw ParseError(path + ": expected header '" + expected_header + "', got '" +
                         line + "'");
      saw_header = true;
      continue;
    }
    rows.push_back(split(line));
  }
  if (!saw_header) throw ParseError(path + ": missing header '" + expected_header + "'");
  return rows;
}

double to_double(const std::string& field, const std::string& context) {
  if (field.empty()) throw ParseError(context + ": empty numeric field");
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size())
    throw ParseError(context + ": bad number '" + field + "'");
  return v;
}

std::int64_t to_int(const std::string& field, const std::string& context) {
  if (field.empty()) throw ParseError(context + ": empty integer field");
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(field.c_str(), &end, 10);
  if (errno != 0 || end != field.c_str() + field.size())
    throw ParseError(context + ": bad integer '" + field + "'");
  return v;
}

std::string num(double v) {
  if (v == static_cast<std::int64_t>(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<std::int64_t>(v));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // trim trailing zeros, keep at least one decimal
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

Writer::Writer(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw ParseError("cannot write " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void Writer::close() {
  out_.close();
  if (out_.fail()) throw ParseError("failed writing " + path_);
}

}  // namespace sdaas::csv
