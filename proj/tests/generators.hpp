// Seeded random generators for property tests.

#pragma once

#include "emom/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace emom::test
{

class Gen
{
public:
	explicit Gen(std::uint64_t seed) : _rng(seed) {}

	double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(_rng); }

	/// log-uniform on [lo, hi], lo > 0
	double logUniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

	std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(_rng); }

	bool coin() { return uniform(0.0, 1.0) < 0.5; }

	DisperseState state(double rLo = 0.01, double rHi = 1.0)
	{
		double f = uniform(0.0, 1.0);
		// hit the boundaries now and then
		const double u = uniform(0.0, 1.0);
		if (u < 0.05)
			f = 0.0;
		else if (u < 0.1)
			f = 1.0;
		return {uniform(rLo, rHi), f};
	}

	RatePair rates(double hi = 10.0)
	{
		RatePair r{uniform(0.0, hi), uniform(0.0, hi)};
		const double u = uniform(0.0, 1.0);
		if (u < 0.05)
			r.g1 = 0.0;
		else if (u < 0.1)
			r.g2 = 0.0;
		return r;
	}

	/// Strictly increasing grid on [0, horizon] with random spacing.
	std::vector<double> times(std::size_t points, double horizon)
	{
		std::vector<double> w(points - 1);
		double s = 0.0;
		for (double& x : w)
		{
			x = uniform(0.2, 1.0);
			s += x;
		}
		std::vector<double> t(points, 0.0);
		for (std::size_t k = 1; k < points; ++k)
			t[k] = t[k - 1] + w[k - 1] / s * horizon;
		t.back() = horizon;
		return t;
	}

	/// Random nonnegative concentration path on a random grid.
	ConcentrationPath path(std::size_t points, double horizon, double cMax = 3.0)
	{
		ConcentrationPath p;
		p.times = times(points, horizon);
		for (std::size_t k = 0; k < points; ++k)
			p.values.push_back({uniform(0.0, cMax), uniform(0.0, cMax)});
		return p;
	}

	std::mt19937_64& engine() { return _rng; }

private:
	std::mt19937_64 _rng;
};

} // namespace emom::test
