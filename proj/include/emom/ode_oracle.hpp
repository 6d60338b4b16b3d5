/**
 * @file
 * Reference integrator for the characteristic ODE dx/dt = growth_field(c(t), x).
 *
 * Adaptive Dormand-Prince 5(4) from Boost.Odeint. Used by tests and benchmarks as an
 * independent check of the discrete characteristics; never called by the solver.
 */

#ifndef EMOM_ODE_ORACLE_HPP_
#define EMOM_ODE_ORACLE_HPP_

#include "emom/errors.hpp"
#include "emom/model.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <functional>
#include <span>
#include <vector>

namespace emom
{

using ConcentrationFunction = std::function<ConcentrationPair(double)>;

/**
 * @brief Integrate the characteristic through @p x at @p tStart up to @p tEnd
 * @param breakpoints Times at which the concentration jumps. When given, the concentration is
 *        treated as constant on each segment between consecutive breakpoints.
 * @throws StepError when the step size controller cannot meet @p tol
 */
inline DisperseState ode_oracle(const GrowthLaw& law, double tStart, const DisperseState& x, double tEnd,
                                const ConcentrationFunction& concentration, double tol,
                                std::span<const double> breakpoints = {})
{
	namespace odeint = boost::numeric::odeint;
	using State = std::array<double, 2>;

	if (!(tol > 0.0))
		throw DomainError("ode_oracle: tolerance must be positive");
	if (tEnd == tStart)
		return x;

	const double sign = tEnd > tStart ? 1.0 : -1.0;
	std::vector<double> stops{tStart};
	for (double b : breakpoints)
	{
		if ((b - tStart) * sign > 0.0 && (tEnd - b) * sign > 0.0)
			stops.push_back(b);
	}
	std::sort(stops.begin(), stops.end(), [sign](double a, double b) { return a * sign < b * sign; });
	stops.push_back(tEnd);

	State s{x.radius, x.composition};
	auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
	for (std::size_t seg = 0; seg + 1 < stops.size(); ++seg)
	{
		const double a = stops[seg];
		const double b = stops[seg + 1];
		const bool piecewise = !breakpoints.empty();
		const ConcentrationPair cMid = concentration(0.5 * (a + b));
		auto rhs = [&](const State& y, State& dy, double t) {
			const ConcentrationPair c = piecewise ? cMid : concentration(t);
			const Velocity v = growth_field(law, c, {y[0], y[1]});
			dy = {v.radius, v.composition};
		};
		try
		{
			odeint::integrate_adaptive(stepper, rhs, s, a, b, (b - a) * 1e-3);
		}
		catch (const odeint::odeint_error& e)
		{
			throw StepError(std::string("ode_oracle step size control failed: ") + e.what(), seg);
		}
	}
	return {s[0], s[1]};
}

/// Piecewise-constant concentration taken from the left end of each interval of @p path.
inline ConcentrationFunction piecewise_constant(const ConcentrationPath& path)
{
	return [&path](double t) {
		const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
		const std::size_t k = it == path.times.begin() ? 0 : static_cast<std::size_t>(it - path.times.begin()) - 1;
		return path.at(std::min(k, path.size() - 1));
	};
}

} // namespace emom

#endif // EMOM_ODE_ORACLE_HPP_
