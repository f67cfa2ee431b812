#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Base of all library errors. The three intermediate categories map onto
// CLI exit codes: ConfigError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// panel
class MalformedRow : public DataError {
public:
    using DataError::DataError;
};
class UnequalSpacing : public DataError {
public:
    using DataError::DataError;
};
class DuplicateLabel : public DataError {
public:
    using DataError::DataError;
};
class EmptyLog : public DataError {
public:
    using DataError::DataError;
};
class InvalidPanel : public DataError {
public:
    using DataError::DataError;
};
class AllExcluded : public DataError {
public:
    using DataError::DataError;
};
class ZeroVariance : public DataError {
public:
    explicit ZeroVariance(const std::string& label)
        : DataError("zero variance in series \"" + label + "\""), label_(label) {}
    const std::string& label() const { return label_; }

private:
    std::string label_;
};

// correlation / spectrum
class DimensionMismatch : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class QOutOfRange : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class ConvergenceFailure : public NumericError {
public:
    using NumericError::NumericError;
};

// unfolding / statistics
class TooFewEigenvalues : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class WindowTooLarge : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class EmptySample : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// eigenmodes
class NotNormalized : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// stability
class WindowTooLong : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class NoDeviating : public DataError {
public:
    using DataError::DataError;
};

// synth
class IndexOutOfBounds : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class SpanOutOfBounds : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// cli / detect
class IncompatibleReports : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class IoError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace rmt
