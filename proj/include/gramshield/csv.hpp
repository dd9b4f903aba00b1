#ifndef GRAMSHIELD_CSV_HPP
#define GRAMSHIELD_CSV_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gramshield {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal comma-separated reader: UTF-8 text, `#` comment lines and blank
// lines skipped, no quoting (none of our formats need it). The row callback
// receives trimmed fields plus the 1-based line number for error reporting.
void for_each_csv_row(
    const std::string& path,
    const std::function<void(const std::vector<std::string>&, int line)>& fn);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace gramshield

#endif
