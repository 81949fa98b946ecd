#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace revboost::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Throws DataError on an unterminated quote.
std::vector<Record> read(std::istream& in);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace revboost::csv
