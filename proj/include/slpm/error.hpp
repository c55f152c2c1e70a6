#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slpm {

/// Raised for bad input data or an infeasible configuration of a fit.
/// The CLI maps it to exit code 1.
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// File-format problem with a 1-based line number (0 when not line-bound).
class ParseError : public DataError
{
public:
  ParseError(const std::string& what, std::size_t line)
    : DataError(line ? "line " + std::to_string(line) + ": " + what : what), mLine(line)
  {}

  std::size_t line() const noexcept { return mLine; }

private:
  std::size_t mLine;
};

} // namespace slpm
