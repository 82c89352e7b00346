#ifndef CCSK_ERROR_HPP
#define CCSK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ccsk {

// Invalid configuration or argument (CLI maps this to exit code 1).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A chaotic map was handed a state outside its valid interval.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Corrupt or mismatched checkpoint / CSV content.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite activation or loss inside the neural engine.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw ParameterError(msg);
}

} // namespace ccsk

#endif
