#pragma once

#include <stdexcept>
#include <string>

namespace gfsc {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (shapes, labels, manifests).
class DatasetError : public Error
{
public:
    using Error::Error;
};

/// Non-finite values or a failed factorization/eigensolve.
class NumericsError : public Error
{
public:
    using Error::Error;
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

class MetricError : public Error
{
public:
    using Error::Error;
};

/// Invalid arguments (hyperparameters, cluster counts, configuration).
class InputError : public Error
{
public:
    using Error::Error;
};

namespace detail {

[[noreturn]] void throw_dimension(const std::string& what, long expected, long actual);

} // namespace detail

} // namespace gfsc
