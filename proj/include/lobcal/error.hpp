#ifndef LOBCAL_ERROR_HPP
#define LOBCAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lobcal {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or optimizer parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (budget below population size, bad grid, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Messages carry the 1-based line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A feature required downstream is absent from a feature matrix.
class MissingFeatureError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (open, write, rename).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lobcal

#endif  // LOBCAL_ERROR_HPP
