#include "hetcache/csv.hpp"

#include <charconv>
#include <cmath>

#include "hetcache/errors.hpp"

namespace hetcache::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ConsistencyError("to_chars failed");
  return std::string(buf, ptr);
}

namespace {

std::string quote_if_needed(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

Writer::Writer(std::ostream& out, std::initializer_list<std::string_view> header)
    : Writer(out, std::vector<std::string>(header.begin(), header.end())) {}

Writer::Writer(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_if_needed(header[i]);
  }
  out_ << '\n';
}

void Writer::write_field(const Cell& c) {
  std::visit(
      [this](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          out_ << format(v);
        else if constexpr (std::is_same_v<T, std::string>)
          out_ << quote_if_needed(v);
        else
          out_ << v;
      },
      c);
}

void Writer::row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw ConsistencyError("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    write_field(cells[i]);
  }
  out_ << '\n';
}

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace hetcache::csv
