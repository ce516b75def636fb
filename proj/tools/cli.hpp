#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hqp::cli {

/// Exit codes of the hqp tool.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // an identity check reported FAIL, or an internal cross-check tripped
  kInvalid = 2,
  kResource = 3,
};

/// Runs the tool on `args` (without the program name). CSV goes to `out`
/// unless --out names a file; PASS/FAIL lines and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step", inclusive of b when step divides b - a.
std::vector<double> parse_grid(const std::string& text);

/// "0,1;1,0" -> rows split on ';', entries on ','.
std::vector<std::vector<double>> parse_matrix(const std::string& text);

/// RFC 4180 field quoting: wraps in double quotes when the field holds a
/// comma, quote, CR or LF, doubling embedded quotes.
std::string csv_field(const std::string& field);

/// %.12g
std::string format_double(double v);

}  // namespace hqp::cli
