#pragma once

#include <stdexcept>
#include <string>

namespace weyllab {

// Exit codes used by the command-line tool; each error class carries one.
enum class ErrorKind { config = 2, resource = 3, numeric = 4, verification = 5, domain = 2, unsupported = 2 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }
    virtual const char* tag() const noexcept = 0;

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
    const char* tag() const noexcept override { return "domain"; }
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
    const char* tag() const noexcept override { return "config"; }
};

class UnsupportedModelError : public Error {
public:
    explicit UnsupportedModelError(const std::string& w) : Error(ErrorKind::unsupported, w) {}
    const char* tag() const noexcept override { return "unsupported_model"; }
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& w, double hint = 0.0) : Error(ErrorKind::resource, w), hint_(hint) {}
    const char* tag() const noexcept override { return "resource"; }
    // Command-specific suggestion, e.g. the smallest admissible t for heat_eval.
    double hint() const noexcept { return hint_; }

private:
    double hint_;
};

class NumericError : public Error {
public:
    NumericError(const std::string& w, double achieved = 0.0) : Error(ErrorKind::numeric, w), achieved_(achieved) {}
    const char* tag() const noexcept override { return "numeric"; }
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class VerificationError : public Error {
public:
    explicit VerificationError(const std::string& w) : Error(ErrorKind::verification, w) {}
    const char* tag() const noexcept override { return "verification"; }
};

} // namespace weyllab
