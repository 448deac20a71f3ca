#pragma once

#include <stdexcept>
#include <string>

namespace superres {

/// Base class for all numeric/domain failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of its panel budget before meeting tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// The four-vector SLD basis cannot be built (sources coincide, or a basis
/// norm came out negative beyond rounding).
class DegenerateBasis : public Error {
public:
    using Error::Error;
};

class NotGaussianPsf : public Error {
public:
    using Error::Error;
};

/// An estimator was asked to act on a record with no detected photons.
class ZeroPhotons : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace superres
