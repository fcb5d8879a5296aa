#pragma once

#include <stdexcept>
#include <string>

namespace magnus {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DegenerateModel : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, std::string axis = {})
        : Error(what), axis_(std::move(axis)) {}
    const std::string& axis() const { return axis_; }

private:
    std::string axis_;
};

class GridTooNarrow : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    OutOfRange(const std::string& what, double value) : Error(what), value_(value) {}
    double value() const { return value_; }

private:
    double value_;
};

class NotConverged : public Error {
public:
    NotConverged(const std::string& what, double ratio) : Error(what), ratio_(ratio) {}
    // Ratio of successive state changes under step doubling (4 for a clean second-order scheme).
    double ratio() const { return ratio_; }

private:
    double ratio_;
};

class BasisMismatch : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace magnus
