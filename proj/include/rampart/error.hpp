#pragma once

#include <stdexcept>
#include <string>

namespace rampart {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data: shape mismatch, non-finite values, bad labels,
// unparsable CSV rows.
class DataError : public Error {
public:
    using Error::Error;
};

// A parameter outside its documented domain (k > M, n > N, p_correct <= 1/2, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rampart
