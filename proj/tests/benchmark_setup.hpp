// The standard two-component growth benchmark: G1 = c, G2 = ratio * c, n = 0, c(0) = (2, 2), bump datum.

#pragma once

#include "emom/model.hpp"
#include "emom/solver.hpp"

#include <array>

namespace emom::test
{

inline ProcessConfig benchmark_process(double horizon = 0.01, double minRadius = 0.05)
{
	ProcessConfig cfg;
	cfg.reactorVolume = 1.0;
	cfg.densities = {1.0, 1.0};
	cfg.initialConcentrations = {2.0, 2.0};
	cfg.minRadius = minRadius;
	cfg.horizon = horizon;
	return cfg;
}

inline GrowthLaw benchmark_law(double ratio = 5.0)
{
	return GrowthLaw::linear(1.0, ratio, 0.0);
}

inline InitialDensity benchmark_datum()
{
	return InitialDensity::bump({0.1, 0.75}, {0.05, 0.25});
}

inline Problem benchmark_problem(std::size_t m, double ratio = 5.0, double horizon = 0.01)
{
	const InitialDensity q0 = benchmark_datum();
	return Problem(benchmark_process(horizon), benchmark_law(ratio), q0, build_quadrature(q0, {m, m}));
}

inline SolveResult benchmark_solve(std::size_t m, std::size_t timePoints, double ratio = 5.0, double horizon = 0.01,
                                   const SolverObserver& observer = {})
{
	const Problem p = benchmark_problem(m, ratio, horizon);
	return solve(p, TimeGrid::uniform(horizon, timePoints), {}, observer);
}

} // namespace emom::test
