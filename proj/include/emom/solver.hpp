/**
 * @file
 * Explicit time stepping of the integral fixed-point problem for the solute concentrations.
 *
 * The particle population is represented by the characteristics through the quadrature points
 * of the initial density. Each step advances every characteristic with the growth rates frozen
 * at the current concentrations and then closes the mass balance
 *
 *     V * C_i(t_{k+1}) = m_i(t_{k+1}) - rho_i * sum_l V_i(state_l(t_{k+1})) * q0(x_l) * w_l.
 *
 * Cost per step is linear in the number of quadrature points.
 */

#ifndef EMOM_SOLVER_HPP_
#define EMOM_SOLVER_HPP_

#include "emom/characteristics.hpp"
#include "emom/errors.hpp"
#include "emom/model.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace emom
{

enum class NegativeConcentrationPolicy
{
	/// Evaluate rates at max(c, 0) and count the event.
	Clamp,
	/// Abort with DivergenceError.
	Abort
};

struct SolverOptions
{
	NegativeConcentrationPolicy negativePolicy = NegativeConcentrationPolicy::Clamp;
	/// Permit negative growth rates. Composition bounds are no longer guaranteed.
	bool allowNegativeRates = false;
	/// Neumaier-compensated summation inside each reduction block.
	bool compensatedSum = false;
	int threads = 1;
};

/// Immutable description of one fixed-point problem: process, kinetics and discretized initial population.
class Problem
{
public:
	Problem(ProcessConfig cfg, GrowthLaw law, InitialDensity q0, Quadrature quad)
		: _cfg(std::move(cfg)), _law(std::move(law)), _q0(std::move(q0)), _quad(std::move(quad))
	{
		_cfg.validate();
		_q0.validate(_cfg.minRadius);
		if (_quad.points.size() != _quad.weights.size())
			throw ConfigError("quadrature points and weights differ in length");
		for (std::size_t l = 0; l < _quad.size(); ++l)
		{
			if (!(_quad.weights[l] > 0.0))
				throw ConfigError("quadrature weights must be positive");
			if (!(_quad.points[l].radius >= _cfg.minRadius))
				throw ConfigError("quadrature point below the minimal radius");
		}

		_numbers = particle_numbers(_q0, _quad);
		_radiusPower.resize(_quad.size());
		_initialComposition.resize(_quad.size());
		for (std::size_t l = 0; l < _quad.size(); ++l)
		{
			_radiusPower[l] = radius_power(_quad.points[l].radius, _law.exponent());
			_initialComposition[l] = _quad.points[l].composition;
		}

		for (int i = 0; i < 2; ++i)
		{
			if (_cfg.feedMass[i])
			{
				_feed[i] = _cfg.feedMass[i];
				continue;
			}
			double particles = 0.0;
			for (std::size_t l = 0; l < _quad.size(); ++l)
				particles += component_volume(i, _quad.points[l]) * _numbers[l];
			const double m = _cfg.reactorVolume * _cfg.initialConcentrations[i] + _cfg.densities[i] * particles;
			_feed[i] = [m](double) { return m; };
		}
	}

	const ProcessConfig& config() const noexcept { return _cfg; }
	const GrowthLaw& law() const noexcept { return _law; }
	const InitialDensity& initialDensity() const noexcept { return _q0; }
	const Quadrature& quadrature() const noexcept { return _quad; }

	/// q0(x_l) * w_l for each quadrature point.
	const std::vector<double>& particleNumbers() const noexcept { return _numbers; }
	const std::vector<double>& initialRadiusPower() const noexcept { return _radiusPower; }
	const std::vector<double>& initialComposition() const noexcept { return _initialComposition; }

	double feedMass(int i, double t) const { return _feed[i](t); }

private:
	ProcessConfig _cfg;
	GrowthLaw _law;
	InitialDensity _q0;
	Quadrature _quad;
	std::vector<double> _numbers;
	std::vector<double> _radiusPower;
	std::vector<double> _initialComposition;
	std::array<std::function<double(double)>, 2> _feed;
};

/**
 * @brief One time slice of the characteristic field plus the concentrations
 * @details Radii are stored implicitly: r_l^(1-n) = r_l(0)^(1-n) + (1-n) * cumulativeIncrement.
 */
struct SolverState
{
	std::size_t index = 0;
	double time = 0.0;
	ConcentrationPair concentrations{0.0, 0.0};
	/// sum over past intervals of (G1 + G2) * dt.
	double cumulativeIncrement = 0.0;
	std::vector<double> composition;
	double exponent = 0.0;
	std::span<const double> initialRadiusPower;

	std::size_t size() const noexcept { return composition.size(); }

	double radius(std::size_t l) const
	{
		return radius_from_power(initialRadiusPower[l] + (1.0 - exponent) * cumulativeIncrement, exponent);
	}

	DisperseState state(std::size_t l) const { return {radius(l), composition[l]}; }
};

namespace detail
{

constexpr std::size_t reductionBlock = 1024;

struct BlockSums
{
	double v0 = 0.0;
	double v1 = 0.0;
};

/// Neumaier summation step.
inline void compensated_add(double& sum, double& carry, double value) noexcept
{
	const double t = sum + value;
	if (std::abs(sum) >= std::abs(value))
		carry += (sum - t) + value;
	else
		carry += (value - t) + sum;
	sum = t;
}

/**
 * Deterministic reduction: fixed blocks of reductionBlock entries, block partials summed in
 * ascending order. Results do not depend on the thread count.
 */
template <typename BlockFn>
BlockSums blocked_reduce(std::size_t n, int threads, BlockFn&& block)
{
	const std::size_t nBlocks = (n + reductionBlock - 1) / reductionBlock;
	std::vector<BlockSums> partial(nBlocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1)) if (threads > 1)
#else
	(void)threads;
#endif
	for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nBlocks); ++b)
	{
		const std::size_t lo = static_cast<std::size_t>(b) * reductionBlock;
		partial[static_cast<std::size_t>(b)] = block(lo, std::min(n, lo + reductionBlock));
	}
	BlockSums total;
	for (const BlockSums& p : partial)
	{
		total.v0 += p.v0;
		total.v1 += p.v1;
	}
	return total;
}

} // namespace detail

/// Component volumes held by the particle phase, sum_l V_i(state_l) * q0(x_l) * w_l, for both components.
inline std::array<double, 2> particle_volumes(const Problem& problem, const SolverState& s, const SolverOptions& opt = {})
{
	const auto& numbers = problem.particleNumbers();
	const detail::BlockSums sums = detail::blocked_reduce(s.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
		detail::BlockSums acc;
		double c0 = 0.0, c1 = 0.0;
		for (std::size_t l = lo; l < hi; ++l)
		{
			const DisperseState x = s.state(l);
			const double v0 = component_volume(0, x) * numbers[l];
			const double v1 = component_volume(1, x) * numbers[l];
			if (opt.compensatedSum)
			{
				detail::compensated_add(acc.v0, c0, v0);
				detail::compensated_add(acc.v1, c1, v1);
			}
			else
			{
				acc.v0 += v0;
				acc.v1 += v1;
			}
		}
		acc.v0 += c0;
		acc.v1 += c1;
		return acc;
	});
	return {sums.v0, sums.v1};
}

namespace detail
{

inline ConcentrationPair close_mass_balance(const Problem& problem, double t, const std::array<double, 2>& volumes)
{
	const ProcessConfig& cfg = problem.config();
	return {problem.feedMass(0, t) / cfg.reactorVolume - cfg.densities[0] / cfg.reactorVolume * volumes[0],
	        problem.feedMass(1, t) / cfg.reactorVolume - cfg.densities[1] / cfg.reactorVolume * volumes[1]};
}

} // namespace detail

/**
 * @brief Initial slice: characteristics at the quadrature points and concentrations from the mass balance
 * @throws ConfigError if an initial concentration comes out negative
 */
inline SolverState initialize(const Problem& problem, const SolverOptions& opt = {})
{
	SolverState s;
	s.exponent = problem.law().exponent();
	s.initialRadiusPower = problem.initialRadiusPower();
	s.composition = problem.initialComposition();
	s.concentrations = detail::close_mass_balance(problem, 0.0, particle_volumes(problem, s, opt));
	if (!(s.concentrations[0] >= 0.0) || !(s.concentrations[1] >= 0.0))
		throw ConfigError("initial mass balance yields a negative concentration");
	return s;
}

/// Diagnostics collected while stepping.
struct StepDiagnostics
{
	std::size_t negativeConcentrationEvents = 0;
};

/**
 * @brief Advance @p s from its time to @p nextTime
 * @throws DivergenceError on non-finite concentrations or, in Abort mode, negative ones
 * @throws StepError on a nonpositive radius radicand (negative rates only)
 */
inline void step(const Problem& problem, SolverState& s, double nextTime, const SolverOptions& opt = {},
                 StepDiagnostics* diag = nullptr)
{
	const double dt = nextTime - s.time;
	if (!(dt > 0.0))
		throw DomainError("step: time must increase");

	ConcentrationPair c = s.concentrations;
	if (c[0] < 0.0 || c[1] < 0.0)
	{
		if (opt.negativePolicy == NegativeConcentrationPolicy::Abort)
			throw DivergenceError("negative concentration", s.index);
		if (diag)
			++diag->negativeConcentrationEvents;
		c = {std::max(c[0], 0.0), std::max(c[1], 0.0)};
	}
	const RatePair rates = problem.law().rates(c);
	if (!opt.allowNegativeRates && (rates.g1 < 0.0 || rates.g2 < 0.0))
		throw NumericalError("negative growth rate with allowNegativeRates disabled", s.index);

	const double n = s.exponent;
	const double g1dt = rates.g1 * dt;
	const double gdt = rates.total() * dt;
	const double before = s.cumulativeIncrement;
	const double after = before + gdt;
	const auto base = s.initialRadiusPower;
	const auto& numbers = problem.particleNumbers();
	double* f = s.composition.data();
	std::atomic<bool> badRadicand{false};

	const detail::BlockSums sums = detail::blocked_reduce(s.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
		detail::BlockSums acc;
		double c0 = 0.0, c1 = 0.0;
		for (std::size_t l = lo; l < hi; ++l)
		{
			const double u = base[l] + (1.0 - n) * before;
			const double uNext = base[l] + (1.0 - n) * after;
			if (!(uNext > 0.0))
			{
				badRadicand.store(true, std::memory_order_relaxed);
				continue;
			}
			f[l] = (3.0 * g1dt / u + f[l]) * std::exp(-3.0 * gdt / u);
			const DisperseState x{radius_from_power(uNext, n), f[l]};
			const double v0 = component_volume(0, x) * numbers[l];
			const double v1 = component_volume(1, x) * numbers[l];
			if (opt.compensatedSum)
			{
				detail::compensated_add(acc.v0, c0, v0);
				detail::compensated_add(acc.v1, c1, v1);
			}
			else
			{
				acc.v0 += v0;
				acc.v1 += v1;
			}
		}
		acc.v0 += c0;
		acc.v1 += c1;
		return acc;
	});
	if (badRadicand.load())
		throw StepError("nonpositive radius radicand", s.index);

	s.cumulativeIncrement = after;
	s.time = nextTime;
	++s.index;
	s.concentrations = detail::close_mass_balance(problem, nextTime, {sums.v0, sums.v1});
	if (!std::isfinite(s.concentrations[0]) || !std::isfinite(s.concentrations[1]))
		throw DivergenceError("non-finite concentration", s.index);
}

struct SolveResult
{
	ConcentrationPath path;
	SolverState finalState;
	StepDiagnostics diagnostics;
};

using SolverObserver = std::function<void(const SolverState&)>;

/**
 * @brief Run the explicit scheme over @p grid
 * @param observer Called with every slice, including the initial one.
 */
inline SolveResult solve(const Problem& problem, const TimeGrid& grid, const SolverOptions& opt = {},
                         const SolverObserver& observer = {})
{
	SolveResult result;
	result.path.times.assign(grid.times().begin(), grid.times().end());
	result.path.values.reserve(grid.size());

	SolverState s = initialize(problem, opt);
	result.path.values.push_back(s.concentrations);
	if (observer)
		observer(s);
	for (std::size_t k = 0; k + 1 < grid.size(); ++k)
	{
		step(problem, s, grid[k + 1], opt, &result.diagnostics);
		result.path.values.push_back(s.concentrations);
		if (observer)
			observer(s);
	}
	result.finalState = std::move(s);
	return result;
}

} // namespace emom

#endif // EMOM_SOLVER_HPP_
