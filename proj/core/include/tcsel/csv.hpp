#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tcsel::csv {

// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trippable decimal representation of a double.
std::string format_double(double value);

// Header-addressed table loaded from an RFC 4180 style file.
class Table {
 public:
  static Table parse(std::string_view text, const std::string& origin);
  static Table load(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  bool has_column(std::string_view name) const;
  // Throws DataError naming the column when it is absent.
  std::size_t column(std::string_view name) const;

 private:
  std::string origin_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

double parse_double(const std::string& text, const std::string& context);
long long parse_int(const std::string& text, const std::string& context);

}  // namespace tcsel::csv
