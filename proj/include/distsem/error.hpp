#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distsem {

// Base of every error raised by the library. The CLI maps kind() onto exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind { validation, computation };

    explicit Error(const std::string& what, Kind kind = Kind::computation)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Input that cannot be decoded as UTF-8.
class DecodeError : public Error {
public:
    DecodeError(std::size_t byte_offset, const std::string& what)
        : Error("invalid UTF-8 at byte " + std::to_string(byte_offset) + ": " + what,
                Kind::validation),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Malformed record in an input file. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what, Kind::validation), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what, Kind::validation) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, Kind::validation) {}
};

// Requested target/word/category row is absent.
class MissingRowError : public Error {
public:
    explicit MissingRowError(const std::string& what) : Error(what) {}
};

class EmptyProfileError : public Error {
public:
    explicit EmptyProfileError(const std::string& what) : Error(what) {}
};

// A statistic or measure whose formula has a zero denominator for the given input.
class UndefinedError : public Error {
public:
    explicit UndefinedError(const std::string& what) : Error(what) {}
};

class IncompatibleProfilesError : public Error {
public:
    explicit IncompatibleProfilesError(const std::string& what) : Error(what) {}
};

class NoPathError : public Error {
public:
    explicit NoPathError(const std::string& what) : Error(what) {}
};

class StalenessError : public Error {
public:
    explicit StalenessError(const std::string& what) : Error(what) {}
};

class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& what) : Error(what) {}
};

class OutOfVocabularyError : public Error {
public:
    explicit OutOfVocabularyError(const std::string& what) : Error(what) {}
};

}  // namespace distsem
