#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hetcache::csv {

/// Shortest round-trip text for a double, '.' decimal, independent of locale.
std::string format(double v);

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// RFC-4180 style writer: header row first, '\n' line endings, quoting only when needed.
class Writer {
 public:
  Writer(std::ostream& out, std::initializer_list<std::string_view> header);
  Writer(std::ostream& out, const std::vector<std::string>& header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  void write_field(const Cell& c);
  std::ostream& out_;
  std::size_t columns_;
};

/// Splits one line into fields (handles double-quoted fields).
std::vector<std::string> split_line(std::string_view line);

}  // namespace hetcache::csv
