#ifndef DANKU_ERRORS_HPP
#define DANKU_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace danku {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedGroupError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class ArithmeticOverflowError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration; `field()` names the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace danku

#endif  // DANKU_ERRORS_HPP
