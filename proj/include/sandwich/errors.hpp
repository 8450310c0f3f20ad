#pragma once

#include <stdexcept>
#include <string>

namespace sandwich {

// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite or negative quantity where a valid magnitude is required.
struct InvalidInput : Error {
    using Error::Error;
};

// Depth / reserve parameter is zero or negative.
struct InvalidDepth : Error {
    using Error::Error;
};

// A swap would drain a CPMM reserve to (or below) zero.
struct DepletionError : Error {
    using Error::Error;
};

// Active tick carries no liquidity.
struct ZeroLiquidity : Error {
    using Error::Error;
};

// Requested optimisation has no feasible point.
struct InfeasibleError : Error {
    using Error::Error;
};

// Swap event lacks the fields needed to resolve an actor id.
struct AttributionError : Error {
    using Error::Error;
};

// Input file could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

// Input parsed but violates a documented schema constraint.
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace sandwich
