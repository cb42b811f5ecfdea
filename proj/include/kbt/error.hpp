#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kbt {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A condition referenced a variable the input does not bind.
class EvaluationError : public Error
{
public:
    EvaluationError(std::string variable, const std::string& what)
        : Error(what), variable_(std::move(variable))
    {
    }

    const std::string& variable() const noexcept { return variable_; }

private:
    std::string variable_;
};

// Malformed model rejected at construction time (empty children, unknown values, ...).
class ConstructionError : public Error
{
public:
    using Error::Error;
};

class StyleError : public ConstructionError
{
public:
    using ConstructionError::ConstructionError;
};

// An FSM revisited a state while settling under a single input.
class CycleError : public Error
{
public:
    CycleError(std::vector<std::string> loop, const std::string& what)
        : Error(what), loop_(std::move(loop))
    {
    }

    const std::vector<std::string>& loop() const noexcept { return loop_; }

private:
    std::vector<std::string> loop_;
};

// A teleo-reactive program had no satisfied condition.
class NoRuleError : public Error
{
public:
    using Error::Error;
};

class StackError : public Error
{
public:
    using Error::Error;
};

class BudgetError : public Error
{
public:
    using Error::Error;
};

struct SourceLocation
{
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Diagnostic
{
    SourceLocation location;
    std::string message;
};

std::string to_string(const Diagnostic& d);

class ParseError : public Error
{
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

} // namespace kbt
