#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cathsim {

// Root of every error raised by the library. Callers that only care about
// "something in the simulator failed" can catch this one.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error
{
public:
    using Error::Error;
};

class PreconditionError : public Error
{
public:
    using Error::Error;
};

class LimitError : public Error
{
public:
    using Error::Error;
};

class CalibrationError : public Error
{
public:
    using Error::Error;
};

class EmptyInputError : public Error
{
public:
    using Error::Error;
};

// The 6x6 strain-rate system could not be inverted at a rod node.
class NumericalSingularityError : public Error
{
public:
    NumericalSingularityError(std::size_t node, const std::string &what)
        : Error(what + " (node " + std::to_string(node) + ")"), node_(node)
    {
    }

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class ConvergenceError : public Error
{
public:
    ConvergenceError(double residual, const std::string &what)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Wire protocol family.
class ProtocolError : public Error
{
public:
    using Error::Error;
};

class FramingError : public ProtocolError
{
public:
    using ProtocolError::ProtocolError;
};

class CorruptionError : public ProtocolError
{
public:
    using ProtocolError::ProtocolError;
};

class LinkError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace cathsim
