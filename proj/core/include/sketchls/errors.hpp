#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchls {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad caller input: domain violations, bad probabilities, mismatched shapes.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failure while computing: rank deficiency, no convergence, ...
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed input data (CSV ingestion, config files).
class DataError : public Error {
public:
    using Error::Error;
};

class RankDeficient : public NumericalError {
public:
    RankDeficient(std::size_t diagonal_index, double ratio)
        : NumericalError("rank deficient: |R(" + std::to_string(diagonal_index) + "," +
                         std::to_string(diagonal_index) + ")| / |R(0,0)| = " +
                         std::to_string(ratio) + " below tolerance"),
          diagonal_index(diagonal_index) {}
    std::size_t diagonal_index;
};

class NoConvergence : public NumericalError {
public:
    explicit NoConvergence(std::size_t iteration_cap)
        : NumericalError("iteration cap " + std::to_string(iteration_cap) + " reached"),
          iteration_cap(iteration_cap) {}
    std::size_t iteration_cap;
};

class NotPowerOfTwo : public InvalidArgument {
public:
    explicit NotPowerOfTwo(std::size_t n)
        : InvalidArgument("length " + std::to_string(n) + " is not a power of two") {}
};

class OutOfDomain : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class BadProbabilities : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class MTooLarge : public InvalidArgument {
public:
    MTooLarge(std::size_t m, std::size_t n)
        : InvalidArgument("sketch size m = " + std::to_string(m) +
                          " exceeds n = " + std::to_string(n)) {}
};

class DuplicateRowIndex : public InvalidArgument {
public:
    explicit DuplicateRowIndex(std::size_t index)
        : InvalidArgument("row index " + std::to_string(index) + " seen more than once"),
          index(index) {}
    std::size_t index;
};

class SketchTooSmall : public NumericalError {
public:
    SketchTooSmall(std::size_t rows_out, std::size_t needed)
        : NumericalError("sketch produced " + std::to_string(rows_out) +
                         " rows, need at least " + std::to_string(needed)) {}
};

class NotIdentified : public InvalidArgument {
public:
    NotIdentified(std::size_t q, std::size_t p)
        : InvalidArgument("q = " + std::to_string(q) + " instruments cannot identify p = " +
                          std::to_string(p) + " coefficients") {}
};

class ZeroVariance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroEffect : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class BadRatio : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class UnsupportedScheme : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class SingularBlock : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConditionIVFailed : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t row, std::size_t col, const std::string& detail)
        : DataError("parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": " + detail),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

class MissingColumn : public DataError {
public:
    explicit MissingColumn(const std::string& name)
        : DataError("column '" + name + "' not found in header") {}
};

class NonNumericCell : public DataError {
public:
    NonNumericCell(std::size_t row, std::size_t col, const std::string& cell)
        : DataError("non-numeric cell at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": '" + cell + "'"),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

class ConfigError : public DataError {
public:
    using DataError::DataError;
};

} // namespace sketchls
