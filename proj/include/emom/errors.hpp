/**
 * @file
 * Exception types raised by the solver kit.
 */

#ifndef EMOM_ERRORS_HPP_
#define EMOM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emom
{

/// Argument outside the admissible state space or parameter range.
class DomainError : public std::domain_error
{
public:
	using std::domain_error::domain_error;
};

/// Invalid or infeasible configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// A rate law returned a non-finite value.
class EvaluationError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// Numerical failure during time stepping (maps to CLI exit code 3).
class NumericalError : public std::runtime_error
{
public:
	NumericalError(const std::string& what, std::size_t stepIndex)
		: std::runtime_error(what + " (step " + std::to_string(stepIndex) + ")"), _step(stepIndex)
	{
	}

	std::size_t step() const noexcept { return _step; }

private:
	std::size_t _step;
};

/// Radicand of a characteristic step became nonpositive.
class StepError : public NumericalError
{
public:
	using NumericalError::NumericalError;
};

/// A concentration became non-finite (or negative in strict mode).
class DivergenceError : public NumericalError
{
public:
	using NumericalError::NumericalError;
};

} // namespace emom

#endif // EMOM_ERRORS_HPP_
