#ifndef ITLM_ERRORS_HPP
#define ITLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace itlm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or violated call precondition. CLI exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Numerical failure (rank deficiency, degenerate instance). CLI exit code 3.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// File or stream failure. CLI exit code 4.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace itlm

#endif // ITLM_ERRORS_HPP
