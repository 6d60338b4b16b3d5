/**
 * @file
 * Domain types for two-component (radius x composition) particle populations:
 * growth kinetics, process parameters, initial number densities, quadrature
 * rules over their support and concentration paths.
 *
 * Indices in code are zero-based: time index k runs over 0..N_t-1 and the
 * quadrature index over 0..N_x-1. Component indices are 0 and 1.
 */

#ifndef EMOM_MODEL_HPP_
#define EMOM_MODEL_HPP_

#include "emom/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace emom
{

/// A point of the disperse property space: particle radius and volume fraction of component 1.
struct DisperseState
{
	double radius = 0.0;
	double composition = 0.0;

	friend bool operator==(const DisperseState&, const DisperseState&) = default;
};

/// Time derivative of a DisperseState.
struct Velocity
{
	double radius = 0.0;
	double composition = 0.0;
};

using ConcentrationPair = std::array<double, 2>;

/// Growth rates (G1, G2) evaluated at one concentration pair.
struct RatePair
{
	double g1 = 0.0;
	double g2 = 0.0;

	double total() const noexcept { return g1 + g2; }
};

/**
 * @brief Coprecipitation growth kinetics
 * @details dr/dt = (G1(c1) + G2(c2)) r^n. Each component deposits at its own rate,
 *          which induces the composition velocity returned by growth_field().
 */
class GrowthLaw
{
public:
	using RateFunction = std::function<double(double)>;

	GrowthLaw(RateFunction rate1, RateFunction rate2, double exponent, bool nonnegative = false)
		: _rate1(std::move(rate1)), _rate2(std::move(rate2)), _exponent(exponent), _nonnegative(nonnegative)
	{
		if (!_rate1 || !_rate2)
			throw ConfigError("growth law needs two rate functions");
		if (!std::isfinite(exponent) || exponent == 1.0)
			throw ConfigError("growth exponent must be finite and different from 1");
	}

	/// G_i(c) = k_i * max(c, 0)
	static GrowthLaw linear(double k1, double k2, double exponent)
	{
		return power(k1, 1.0, k2, 1.0, exponent);
	}

	/// G_i(c) = k_i * max(c, 0)^p_i
	static GrowthLaw power(double k1, double p1, double k2, double p2, double exponent)
	{
		auto make = [](double k, double p) -> RateFunction {
			return [k, p](double c) { return k * std::pow(std::max(c, 0.0), p); };
		};
		return GrowthLaw(make(k1, p1), make(k2, p2), exponent, k1 >= 0.0 && k2 >= 0.0);
	}

	RatePair rates(const ConcentrationPair& c) const
	{
		const RatePair r{_rate1(c[0]), _rate2(c[1])};
		if (!std::isfinite(r.g1) || !std::isfinite(r.g2))
			throw EvaluationError("growth rate evaluated to a non-finite value");
		return r;
	}

	double rate1(double c) const { return _rate1(c); }
	double rate2(double c) const { return _rate2(c); }
	double exponent() const noexcept { return _exponent; }

	/// True when the rate functions are known to be nonnegative for every concentration.
	bool nonnegative() const noexcept { return _nonnegative; }

private:
	RateFunction _rate1;
	RateFunction _rate2;
	double _exponent;
	bool _nonnegative;
};

/**
 * @brief Growth vector field in the (radius, composition) plane
 * @details Returns ((G1+G2) r^n, 3 (G1 - (G1+G2) f) r^(n-1)).
 */
inline Velocity growth_field(const RatePair& rates, double exponent, const DisperseState& x)
{
	if (!(x.radius > 0.0))
		throw DomainError("growth_field: radius must be positive");
	const double g = rates.total();
	const double rn = std::pow(x.radius, exponent);
	return {g * rn, 3.0 * (rates.g1 - g * x.composition) * rn / x.radius};
}

inline Velocity growth_field(const GrowthLaw& law, const ConcentrationPair& c, const DisperseState& x)
{
	return growth_field(law.rates(c), law.exponent(), x);
}

/// Axis-aligned rectangle [lo1, hi1] x [lo2, hi2] of the state space.
struct Box
{
	double lo1 = 0.0;
	double hi1 = 0.0;
	double lo2 = 0.0;
	double hi2 = 0.0;

	double area() const noexcept { return (hi1 - lo1) * (hi2 - lo2); }

	bool contains(const DisperseState& x) const noexcept
	{
		return x.radius >= lo1 && x.radius <= hi1 && x.composition >= lo2 && x.composition <= hi2;
	}
};

/// Process parameters of a batch (or fed) coprecipitation reactor.
struct ProcessConfig
{
	double reactorVolume = 1.0;
	std::array<double, 2> densities{1.0, 1.0};
	std::array<double, 2> initialConcentrations{0.0, 0.0};
	/// Total mass m_i(t) of each component. Empty entries are calibrated to a constant
	/// from the initial concentration and the initial particle population.
	std::array<std::function<double(double)>, 2> feedMass{};
	double minRadius = 1e-3;
	double horizon = 1.0;
	std::string units = "dimensionless";

	void validate() const
	{
		if (!(reactorVolume > 0.0))
			throw ConfigError("process.reactor_volume must be positive");
		if (!(densities[0] > 0.0) || !(densities[1] > 0.0))
			throw ConfigError("process.densities must be positive");
		if (!(minRadius > 0.0))
			throw ConfigError("process.x_min must be positive");
		if (!(horizon >= 0.0) || !std::isfinite(horizon))
			throw ConfigError("process.horizon must be nonnegative");
	}
};

/// Volume of a sphere of the given radius.
inline double sphere_volume(double radius) noexcept
{
	return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

/**
 * @brief Volume of component @p i (0 or 1) inside a particle of state @p x
 * @details States outside the admissible set evaluate to zero volume: radii below zero give 0
 *          and the composition is clamped to [0, 1].
 */
inline double component_volume(int i, const DisperseState& x)
{
	if (i != 0 && i != 1)
		throw DomainError("component index must be 0 or 1");
	if (x.radius <= 0.0)
		return 0.0;
	const double f = std::clamp(x.composition, 0.0, 1.0);
	return sphere_volume(x.radius) * (i == 0 ? f : 1.0 - f);
}

/**
 * @brief Initial number density q0 with an explicit bounding box of its support
 * @details Three kinds: the elliptical bump max{1 - |(x - center)/halfWidth|^2, 0}^2,
 *          a Dirac seed (a point mass carrying a number concentration) and an arbitrary
 *          user function restricted to a box.
 */
class InitialDensity
{
public:
	enum class Kind
	{
		Bump,
		Dirac,
		Custom
	};

	static InitialDensity bump(DisperseState center, std::array<double, 2> halfWidths, double amplitude = 1.0)
	{
		if (!(halfWidths[0] > 0.0) || !(halfWidths[1] > 0.0))
			throw ConfigError("initial_datum.half_widths must be positive");
		InitialDensity q;
		q._kind = Kind::Bump;
		q._center = center;
		q._halfWidths = halfWidths;
		q._amplitude = amplitude;
		q._support = {center.radius - halfWidths[0], center.radius + halfWidths[0],
		              std::max(0.0, center.composition - halfWidths[1]), std::min(1.0, center.composition + halfWidths[1])};
		return q;
	}

	static InitialDensity dirac(DisperseState location, double number)
	{
		if (!(number >= 0.0))
			throw ConfigError("initial_datum.number must be nonnegative");
		InitialDensity q;
		q._kind = Kind::Dirac;
		q._center = location;
		q._amplitude = number;
		q._support = {location.radius, location.radius, location.composition, location.composition};
		return q;
	}

	static InitialDensity custom(std::function<double(const DisperseState&)> density, Box support)
	{
		InitialDensity q;
		q._kind = Kind::Custom;
		q._custom = std::move(density);
		q._support = support;
		return q;
	}

	/// Density value; zero outside the support box. A Dirac seed has no pointwise density.
	double operator()(const DisperseState& x) const
	{
		switch (_kind)
		{
			case Kind::Bump:
			{
				if (!_support.contains(x))
					return 0.0;
				const double d1 = (x.radius - _center.radius) / _halfWidths[0];
				const double d2 = (x.composition - _center.composition) / _halfWidths[1];
				const double s = std::max(1.0 - d1 * d1 - d2 * d2, 0.0);
				return _amplitude * s * s;
			}
			case Kind::Custom:
				return _support.contains(x) ? std::max(_custom(x), 0.0) : 0.0;
			case Kind::Dirac:
				return 0.0;
		}
		return 0.0;
	}

	Kind kind() const noexcept { return _kind; }
	bool isDirac() const noexcept { return _kind == Kind::Dirac; }
	const Box& support() const noexcept { return _support; }

	/// Seed location (Dirac) or bump center.
	const DisperseState& center() const noexcept { return _center; }
	const std::array<double, 2>& halfWidths() const noexcept { return _halfWidths; }

	/// Bump amplitude, or number concentration of a Dirac seed.
	double amplitude() const noexcept { return _amplitude; }

	/// Closed-form zeroth moment for Bump and Dirac kinds (pi/3 * w1 * w2 * amplitude for the bump).
	double totalNumber() const
	{
		switch (_kind)
		{
			case Kind::Bump:
				return std::numbers::pi / 3.0 * _halfWidths[0] * _halfWidths[1] * _amplitude;
			case Kind::Dirac:
				return _amplitude;
			case Kind::Custom:
				break;
		}
		throw DomainError("totalNumber has no closed form for a custom density");
	}

	void validate(double minRadius) const
	{
		if (_support.lo1 < minRadius)
			throw ConfigError("initial datum support reaches below the minimal radius");
		if (_support.lo2 < 0.0 || _support.hi2 > 1.0)
			throw ConfigError("initial datum support leaves the composition range [0, 1]");
		if (_support.hi1 < _support.lo1 || _support.hi2 < _support.lo2)
			throw ConfigError("initial datum support box is empty");
	}

private:
	InitialDensity() = default;

	Kind _kind = Kind::Bump;
	DisperseState _center{};
	std::array<double, 2> _halfWidths{0.0, 0.0};
	double _amplitude = 1.0;
	Box _support{};
	std::function<double(const DisperseState&)> _custom;
};

enum class QuadratureRule
{
	Midpoint,
	GaussLegendre
};

/// Points and positive weights of a quadrature rule over the support of q0.
struct Quadrature
{
	std::vector<DisperseState> points;
	std::vector<double> weights;

	std::size_t size() const noexcept { return points.size(); }
};

namespace detail
{

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration on P_n.
inline void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights)
{
	nodes.assign(n, 0.0);
	weights.assign(n, 0.0);
	const double dn = static_cast<double>(n);
	for (std::size_t i = 0; i < (n + 1) / 2; ++i)
	{
		double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
		double dp = 0.0;
		for (int iter = 0; iter < 100; ++iter)
		{
			double p0 = 1.0;
			double p1 = 0.0;
			for (std::size_t j = 1; j <= n; ++j)
			{
				const double p2 = p1;
				p1 = p0;
				const double dj = static_cast<double>(j);
				p0 = ((2.0 * dj - 1.0) * z * p1 - (dj - 1.0) * p2) / dj;
			}
			dp = dn * (z * p0 - p1) / (z * z - 1.0);
			const double dz = p0 / dp;
			z -= dz;
			if (std::abs(dz) < 1e-15)
				break;
		}
		nodes[i] = -z;
		nodes[n - 1 - i] = z;
		weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
	}
}

inline void axis_rule(QuadratureRule rule, std::size_t n, double lo, double hi, std::vector<double>& x, std::vector<double>& w)
{
	const double h = hi - lo;
	if (rule == QuadratureRule::Midpoint)
	{
		x.resize(n);
		w.assign(n, h / static_cast<double>(n));
		for (std::size_t i = 0; i < n; ++i)
			x[i] = lo + h * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
		return;
	}
	gauss_legendre(n, x, w);
	for (std::size_t i = 0; i < n; ++i)
	{
		x[i] = lo + 0.5 * h * (x[i] + 1.0);
		w[i] *= 0.5 * h;
	}
}

} // namespace detail

/**
 * @brief Tensor-product rule over the support box of @p q0
 * @details Points are ordered radius-major. A Dirac seed yields its location as the single
 *          point with unit weight.
 */
inline Quadrature build_quadrature(const InitialDensity& q0, std::array<std::size_t, 2> resolution,
                                   QuadratureRule rule = QuadratureRule::Midpoint)
{
	if (resolution[0] < 1 || resolution[1] < 1)
		throw DomainError("quadrature resolution must be at least 1 per axis");
	if (q0.isDirac())
		return {{q0.center()}, {1.0}};

	const Box& box = q0.support();
	if (!(box.area() > 0.0))
		throw DomainError("quadrature support box is empty");

	std::vector<double> x1, w1, x2, w2;
	detail::axis_rule(rule, resolution[0], box.lo1, box.hi1, x1, w1);
	detail::axis_rule(rule, resolution[1], box.lo2, box.hi2, x2, w2);

	Quadrature quad;
	quad.points.reserve(resolution[0] * resolution[1]);
	quad.weights.reserve(resolution[0] * resolution[1]);
	for (std::size_t i = 0; i < resolution[0]; ++i)
	{
		for (std::size_t j = 0; j < resolution[1]; ++j)
		{
			quad.points.push_back({x1[i], x2[j]});
			quad.weights.push_back(w1[i] * w2[j]);
		}
	}
	return quad;
}

/// Number of particles carried by each quadrature point, q0(x_l) * w_l.
inline std::vector<double> particle_numbers(const InitialDensity& q0, const Quadrature& quad)
{
	if (q0.isDirac())
		return std::vector<double>(quad.size(), q0.amplitude());
	std::vector<double> n(quad.size());
	for (std::size_t l = 0; l < quad.size(); ++l)
		n[l] = q0(quad.points[l]) * quad.weights[l];
	return n;
}

/// Strictly increasing time grid starting at 0.
class TimeGrid
{
public:
	explicit TimeGrid(std::vector<double> times) : _t(std::move(times))
	{
		if (_t.empty() || _t.front() != 0.0)
			throw ConfigError("time grid must start at 0");
		for (std::size_t k = 1; k < _t.size(); ++k)
		{
			if (!(_t[k] > _t[k - 1]))
				throw ConfigError("time grid must be strictly increasing");
		}
	}

	/// @p points grid points on [0, horizon]; a zero horizon yields the single point 0.
	static TimeGrid uniform(double horizon, std::size_t points)
	{
		if (horizon == 0.0 || points <= 1)
		{
			if (horizon != 0.0)
				throw ConfigError("a positive horizon needs at least two time points");
			return TimeGrid({0.0});
		}
		std::vector<double> t(points);
		const double dt = horizon / static_cast<double>(points - 1);
		for (std::size_t k = 0; k < points; ++k)
			t[k] = dt * static_cast<double>(k);
		t.back() = horizon;
		return TimeGrid(std::move(t));
	}

	std::size_t size() const noexcept { return _t.size(); }
	double operator[](std::size_t k) const { return _t[k]; }
	double step(std::size_t k) const { return _t[k + 1] - _t[k]; }
	double horizon() const { return _t.back(); }
	std::span<const double> times() const noexcept { return _t; }

private:
	std::vector<double> _t;
};

/// Concentration of both components on a time grid.
struct ConcentrationPath
{
	std::vector<double> times;
	std::vector<ConcentrationPair> values;

	std::size_t size() const noexcept { return times.size(); }
	double time(std::size_t k) const { return times[k]; }
	const ConcentrationPair& at(std::size_t k) const { return values[k]; }

	/// Piecewise-linear interpolation in time; clamps outside the grid.
	ConcentrationPair interpolate(double t) const
	{
		if (t <= times.front())
			return values.front();
		if (t >= times.back())
			return values.back();
		const auto it = std::upper_bound(times.begin(), times.end(), t);
		const std::size_t k = static_cast<std::size_t>(it - times.begin());
		const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
		return {values[k - 1][0] + s * (values[k][0] - values[k - 1][0]),
		        values[k - 1][1] + s * (values[k][1] - values[k - 1][1])};
	}
};

} // namespace emom

#endif // EMOM_MODEL_HPP_
