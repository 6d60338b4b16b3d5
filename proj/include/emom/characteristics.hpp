/**
 * @file
 * Discrete characteristics of the coprecipitation growth field.
 *
 * For a concentration path on a grid t_0 < ... < t_{N-1} the growth rates are frozen at the
 * left end of each interval. The radius then has the closed form
 *
 *     r(k -> i)^(1-n) = r^(1-n) + (1-n) * (S_i - S_k),   S_k = sum_{l<k} (G1 + G2)_l * dt_l
 *
 * and the composition is advanced interval by interval with the radius frozen at the left end:
 *
 *     f <- (3 G1 dt / r^(1-n) + f) * exp(-3 (G1 + G2) dt / r^(1-n)).
 *
 * Backward evaluation (i < k) applies the exact inverse of each interval update, so the forward
 * and backward maps on one grid are inverse to each other and compose as a semigroup.
 */

#ifndef EMOM_CHARACTERISTICS_HPP_
#define EMOM_CHARACTERISTICS_HPP_

#include "emom/errors.hpp"
#include "emom/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace emom
{

/// r^(1-n), with the common n = 0 case kept exact.
inline double radius_power(double radius, double exponent)
{
	return exponent == 0.0 ? radius : std::pow(radius, 1.0 - exponent);
}

/// Inverse of radius_power.
inline double radius_from_power(double u, double exponent)
{
	return exponent == 0.0 ? u : std::pow(u, 1.0 / (1.0 - exponent));
}

/**
 * @brief Advance a radius by an accumulated rate increment sum (G1 + G2) * dt
 * @throws StepError when the radicand r^(1-n) + (1-n) * increment is not positive
 */
inline double step_radius(double radius, double totalIncrement, double exponent, std::size_t index = 0)
{
	if (!(radius > 0.0))
		throw DomainError("step_radius: radius must be positive");
	if (exponent == 1.0)
		throw DomainError("step_radius: exponent must differ from 1");
	const double u = radius_power(radius, exponent) + (1.0 - exponent) * totalIncrement;
	if (!(u > 0.0))
		throw StepError("nonpositive radicand in radius update", index);
	return radius_from_power(u, exponent);
}

/// One composition update with rates frozen over the interval; @p x.radius is the radius at the interval start.
inline double step_composition(const DisperseState& x, double g1Increment, double totalIncrement, double exponent)
{
	if (!(x.radius > 0.0))
		throw DomainError("step_composition: radius must be positive");
	const double u = radius_power(x.radius, exponent);
	return (3.0 * g1Increment / u + x.composition) * std::exp(-3.0 * totalIncrement / u);
}

/// Radius ratio and exponential factor whose product converts q0 into q along a characteristic.
struct JacobianFactor
{
	/// exp(3 * sum_l (G1 + G2)_l dt_l / r_l^(1-n)) along the characteristic.
	double psi = 1.0;
	/// Initial radius over radius at the evaluation time.
	double radiusRatio = 1.0;
	double exponent = 0.0;

	/// (r_initial / r_final)^n * psi, i.e. q(t, x_t) / q0(x_0).
	double densityFactor() const { return std::pow(radiusRatio, exponent) * psi; }
};

/**
 * @brief Discrete characteristic flow for a fixed concentration path
 * @details Rates are evaluated once per grid interval from the path values at the interval start,
 *          with negative concentrations clamped to zero (matching the solver's default policy).
 */
class CharacteristicMap
{
public:
	CharacteristicMap(const ConcentrationPath& path, const GrowthLaw& law, double minRadius = 0.0,
	                  bool clampNegative = true)
		: _exponent(law.exponent()), _minRadius(minRadius), _times(path.times)
	{
		const std::size_t nt = path.size();
		if (nt == 0)
			throw DomainError("empty concentration path");
		_g1.resize(nt - 1);
		_total.resize(nt - 1);
		_rates.resize(nt);
		_cumulative.assign(nt, 0.0);
		for (std::size_t k = 0; k < nt; ++k)
		{
			ConcentrationPair c = path.at(k);
			if (clampNegative)
				c = {std::max(c[0], 0.0), std::max(c[1], 0.0)};
			_rates[k] = law.rates(c);
		}
		for (std::size_t l = 0; l + 1 < nt; ++l)
		{
			const double dt = path.time(l + 1) - path.time(l);
			_g1[l] = _rates[l].g1 * dt;
			_total[l] = _rates[l].total() * dt;
			_cumulative[l + 1] = _cumulative[l] + _total[l];
		}
	}

	std::size_t size() const noexcept { return _cumulative.size(); }
	double exponent() const noexcept { return _exponent; }
	double minRadius() const noexcept { return _minRadius; }
	const std::vector<double>& times() const noexcept { return _times; }
	const RatePair& rates(std::size_t k) const { return _rates[k]; }

	/// r^(1-n) of the characteristic through radius @p radius at index @p from, evaluated at index @p to.
	double radiusPower(std::size_t from, double radius, std::size_t to) const
	{
		return radius_power(radius, _exponent) + (1.0 - _exponent) * (_cumulative[to] - _cumulative[from]);
	}

	/// Radius component of the discrete characteristic; empty if the radicand is not positive.
	std::optional<double> radius(std::size_t from, double radius, std::size_t to) const
	{
		checkIndex(from);
		checkIndex(to);
		const double u = radiusPower(from, radius, to);
		if (!(u > 0.0))
			return std::nullopt;
		return radius_from_power(u, _exponent);
	}

	/**
	 * @brief Discrete characteristic through @p x at index @p from, evaluated at index @p to
	 * @details Returns empty when a backward evaluation leaves the admissible set (no ancestor).
	 */
	std::optional<DisperseState> map(std::size_t from, const DisperseState& x, std::size_t to) const
	{
		checkIndex(from);
		checkIndex(to);
		if (!(x.radius > 0.0))
			throw DomainError("characteristic start radius must be positive");
		if (from == to)
			return x;

		const double base = radius_power(x.radius, _exponent);
		const double shift = _cumulative[from];
		double f = x.composition;
		if (from < to)
		{
			for (std::size_t l = from; l < to; ++l)
			{
				const double u = base + (1.0 - _exponent) * (_cumulative[l] - shift);
				if (!(u > 0.0))
					return std::nullopt;
				f = (3.0 * _g1[l] / u + f) * std::exp(-3.0 * _total[l] / u);
			}
		}
		else
		{
			for (std::size_t l = from; l-- > to;)
			{
				const double u = base + (1.0 - _exponent) * (_cumulative[l] - shift);
				if (!(u > 0.0))
					return std::nullopt;
				f = f * std::exp(3.0 * _total[l] / u) - 3.0 * _g1[l] / u;
			}
		}

		const double u = base + (1.0 - _exponent) * (_cumulative[to] - shift);
		if (!(u > 0.0))
			return std::nullopt;
		DisperseState y{radius_from_power(u, _exponent), f};
		if (from > to && !admissible(y))
			return std::nullopt;
		return y;
	}

	/// Forward trajectory of @p x from index 0 through every grid index.
	std::vector<DisperseState> trajectory(const DisperseState& x) const
	{
		std::vector<DisperseState> states(size());
		states[0] = x;
		const double base = radius_power(x.radius, _exponent);
		double f = x.composition;
		for (std::size_t l = 0; l + 1 < size(); ++l)
		{
			const double u = base + (1.0 - _exponent) * _cumulative[l];
			if (!(u > 0.0))
				throw StepError("nonpositive radicand along trajectory", l);
			f = (3.0 * _g1[l] / u + f) * std::exp(-3.0 * _total[l] / u);
			const double next = base + (1.0 - _exponent) * _cumulative[l + 1];
			if (!(next > 0.0))
				throw StepError("nonpositive radicand along trajectory", l + 1);
			states[l + 1] = {radius_from_power(next, _exponent), f};
		}
		return states;
	}

	/**
	 * @brief Jacobian factor of the characteristic through @p x at index @p from, up to index @p to
	 * @details psi = exp(3 sum_{l<to} (G1+G2)_l dt_l / r(from -> l)^(1-n)) and radiusRatio = r(from -> 0) / r(from -> to).
	 *          With from = 0 this converts q0(x) into q(t_to, x_to); with from = to it converts
	 *          q0(ancestor of x) into q(t_to, x).
	 */
	std::optional<JacobianFactor> jacobian(std::size_t from, const DisperseState& x, std::size_t to) const
	{
		checkIndex(from);
		checkIndex(to);
		const double base = radius_power(x.radius, _exponent);
		const double shift = _cumulative[from];
		double sum = 0.0;
		for (std::size_t l = 0; l < to; ++l)
		{
			const double u = base + (1.0 - _exponent) * (_cumulative[l] - shift);
			if (!(u > 0.0))
				return std::nullopt;
			sum += _total[l] / u;
		}
		const double u0 = base + (1.0 - _exponent) * (_cumulative[0] - shift);
		const double uk = base + (1.0 - _exponent) * (_cumulative[to] - shift);
		if (!(u0 > 0.0) || !(uk > 0.0))
			return std::nullopt;
		return JacobianFactor{std::exp(3.0 * sum), radius_from_power(u0, _exponent) / radius_from_power(uk, _exponent),
		                      _exponent};
	}

private:
	void checkIndex(std::size_t k) const
	{
		if (k >= size())
			throw DomainError("time index out of range");
	}

	bool admissible(DisperseState& y) const
	{
		constexpr double tol = 1e-12;
		if (!(y.radius >= _minRadius) || !(y.composition >= -tol) || !(y.composition <= 1.0 + tol))
			return false;
		y.composition = std::clamp(y.composition, 0.0, 1.0);
		return true;
	}

	double _exponent;
	double _minRadius;
	std::vector<double> _times;
	std::vector<RatePair> _rates;
	std::vector<double> _g1;
	std::vector<double> _total;
	std::vector<double> _cumulative;
};

/// Free-function form of CharacteristicMap::map.
inline std::optional<DisperseState> xi_multi_step(std::size_t from, const DisperseState& x, std::size_t to,
                                                  const ConcentrationPath& path, const GrowthLaw& law,
                                                  double minRadius = 0.0)
{
	return CharacteristicMap(path, law, minRadius).map(from, x, to);
}

/// Free-function form of CharacteristicMap::jacobian.
inline std::optional<JacobianFactor> jacobian_factor(std::size_t from, const DisperseState& x, std::size_t to,
                                                     const ConcentrationPath& path, const GrowthLaw& law)
{
	return CharacteristicMap(path, law).jacobian(from, x, to);
}

} // namespace emom

#endif // EMOM_CHARACTERISTICS_HPP_
