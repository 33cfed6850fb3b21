#pragma once

#include "sdaas/types.hpp"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace sdaas::csv {

// Splits one CSV line on commas. No quoting; fields in this project never
// contain commas.
std::vector<std::string> split(const std::string& line);

// Reads all data rows of a CSV file, skipping blank lines and '#' comments.
// Checks the header matches `expected_header` exactly.
std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header);

double to_double(const std::string& field, const std::string& context);
std::int64_t to_int(const std::string& field, const std::string& context);

// Fixed numeric formatting so identical values always serialize to
// identical bytes.
std::string num(double v);

class Writer {
public:
  explicit Writer(const std::string& path);
  void row(const std::vector<std::string>& fields);
  void close();

private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace sdaas::csv
