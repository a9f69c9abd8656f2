#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hashprompt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyTable : public Error {
public:
    EmptyTable() : Error("table text is empty") {}
};

class RaggedTable : public Error {
public:
    explicit RaggedTable(std::size_t row)
        : Error("row " + std::to_string(row) + " does not match the header width"), row_(row) {}
    /// 1-based data-row index (the header is row 0).
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class NotCrossColumnUnique : public Error {
public:
    explicit NotCrossColumnUnique(const std::string& value)
        : Error("value '" + value + "' occurs in more than one column"), value_(value) {}
    const std::string& value() const noexcept { return value_; }

private:
    std::string value_;
};

class IncompleteBijection : public Error {
public:
    explicit IncompleteBijection(const std::string& value)
        : Error("bijection has no image for '" + value + "'"), value_(value) {}
    const std::string& value() const noexcept { return value_; }

private:
    std::string value_;
};

class NotInjective : public Error {
public:
    explicit NotInjective(const std::string& detail) : Error("bijection is not injective: " + detail) {}
};

class OracleTooLarge : public Error {
public:
    OracleTooLarge(std::size_t values, std::size_t limit)
        : Error("brute-force oracle limited to " + std::to_string(limit) + " distinct values, table has " +
                std::to_string(values)) {}
};

class DuplicateSurface : public Error {
public:
    explicit DuplicateSurface(const std::string& surface)
        : Error("duplicate surface '" + surface + "'"), surface_(surface) {}
    const std::string& surface() const noexcept { return surface_; }

private:
    std::string surface_;
};

class IdentifierCollision : public Error {
public:
    explicit IdentifierCollision(const std::string& identifier)
        : Error("identifier '" + identifier + "' already occurs in the source text"), identifier_(identifier) {}
    const std::string& identifier() const noexcept { return identifier_; }

private:
    std::string identifier_;
};

class InvalidScheme : public Error {
public:
    using Error::Error;
};

class UnknownVariant : public Error {
public:
    explicit UnknownVariant(const std::string& name) : Error("unknown prompt variant '" + name + "'") {}
};

class InvalidLength : public Error {
public:
    explicit InvalidLength(int length)
        : Error("itemset length " + std::to_string(length) + " outside 1..5") {}
};

class TransportError : public Error {
public:
    using Error::Error;
};

class Refusal : public Error {
public:
    using Error::Error;
};

class CassetteMiss : public Error {
public:
    explicit CassetteMiss(const std::string& key) : Error("cassette has no entry for " + key), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class MixedAggregation : public Error {
public:
    MixedAggregation(const std::string& a, const std::string& b)
        : Error("cannot aggregate records of experiments '" + a + "' and '" + b + "'") {}
};

class DegenerateTable : public Error {
public:
    DegenerateTable() : Error("contingency table has a zero row or column margin") {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hashprompt
