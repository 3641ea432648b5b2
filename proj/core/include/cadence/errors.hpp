#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cadence {

/// Base class for every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- series construction / slicing ----------------------------------------

class NonMonotonicTimestamps : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

// ---- period estimation / fitting -------------------------------------------

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class NoPeriodFound : public Error {
public:
    using Error::Error;
};

class PeriodUnresolved : public Error {
public:
    using Error::Error;
};

class SingularDesign : public Error {
public:
    using Error::Error;
};

// ---- authentication ---------------------------------------------------------

class UnknownAction : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

class WindowPrecedesTraining : public Error {
public:
    using Error::Error;
};

class InsufficientCycles : public Error {
public:
    using Error::Error;
};

// ---- file I/O ----------------------------------------------------------------

class FileNotFound : public Error {
public:
    using Error::Error;
};

/// Malformed input row; carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason),
          line_(line),
          reason_(reason) {}

    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class AxisMisalignment : public Error {
public:
    using Error::Error;
};

class TimestampMismatch : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cadence
