#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qidforge {

enum class Errc {
    ZeroSeries,
    NonUnitLeadingCoefficient,
    NotDivisible,
    VanishingFactor,
    NonconvergentBase,
    SumDivergence,
    UnboundedBelow,
    WrongParameter,
    DivisionByZero,
    ParseError,
    DuplicateId,
    UnresolvedReference,
    InvariantViolation,
    IoError,
    UsageError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

// Parse failures carry a 1-based source position and the token class the
// parser was looking for.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& expected, const std::string& got)
        : Error(Errc::ParseError, "line " + std::to_string(line) + ", col " +
                                      std::to_string(column) + ": expected " + expected +
                                      ", got " + got),
          line_(line), column_(column), expected_(expected) {}

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& expected() const { return expected_; }

private:
    int line_;
    int column_;
    std::string expected_;
};

} // namespace qidforge
