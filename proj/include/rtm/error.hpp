#pragma once

#include <stdexcept>
#include <string>

namespace rtm {

enum class ErrorKind { config, domain, precondition, resource, numerical, contract };

// Base of every error raised by the library. The kind maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    const char* kind_name() const noexcept;

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorKind::config, m) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorKind::domain, m) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& m) : Error(ErrorKind::precondition, m) {}
};
struct ResourceError : Error {
    explicit ResourceError(const std::string& m) : Error(ErrorKind::resource, m) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& m) : Error(ErrorKind::numerical, m) {}
};
struct ContractError : Error {
    explicit ContractError(const std::string& m) : Error(ErrorKind::contract, m) {}
};

// 0 ok, 2 config, 3 resource, 4 numerical
int exit_code(ErrorKind kind) noexcept;

}  // namespace rtm
