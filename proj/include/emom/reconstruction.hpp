/**
 * @file
 * Post-processing of a solved concentration path: number density snapshots along discrete
 * characteristics, moments, and inner-particle radial composition profiles.
 */

#ifndef EMOM_RECONSTRUCTION_HPP_
#define EMOM_RECONSTRUCTION_HPP_

#include "emom/characteristics.hpp"
#include "emom/errors.hpp"
#include "emom/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace emom
{

/**
 * @brief q(t_k, x): trace x back to t_0 and transport q0 along the characteristic
 * @return 0 when x has no ancestor in the admissible set, or for a Dirac seed
 */
inline double evaluate_q_backward(const CharacteristicMap& map, const InitialDensity& q0, std::size_t k, const DisperseState& x)
{
	if (q0.isDirac())
		return 0.0;
	const auto ancestor = map.map(k, x, 0);
	if (!ancestor)
		return 0.0;
	const double base = q0(*ancestor);
	if (base == 0.0)
		return 0.0;
	const auto jac = map.jacobian(k, x, k);
	if (!jac)
		return 0.0;
	return base * jac->densityFactor();
}

/// Push a point of the initial support forward to t_k; returns the mapped state and q there.
inline std::pair<DisperseState, double> evaluate_q_forward(const CharacteristicMap& map, const InitialDensity& q0,
                                                           std::size_t k, const DisperseState& x)
{
	const auto image = map.map(0, x, k);
	if (!image)
		throw StepError("forward characteristic left the admissible set", k);
	if (q0.isDirac())
		return {*image, 0.0};
	const auto jac = map.jacobian(0, x, k);
	if (!jac)
		throw StepError("forward characteristic left the admissible set", k);
	return {*image, q0(x) * jac->densityFactor()};
}

enum class SnapshotMode
{
	BackwardGrid,
	ForwardFromSupport
};

/// Number density samples at one time index, with the shape-space measure carried by each sample.
struct PsdSnapshot
{
	std::size_t index = 0;
	SnapshotMode mode = SnapshotMode::BackwardGrid;
	std::vector<DisperseState> states;
	std::vector<double> values;
	std::vector<double> weights;

	std::size_t size() const noexcept { return states.size(); }
};

/**
 * @brief Midpoint grid over @p window evaluated by the backward formula
 * @details Samples are ordered radius-major; weights are the cell areas.
 */
inline PsdSnapshot backward_snapshot(const CharacteristicMap& map, const InitialDensity& q0, std::size_t k, const Box& window,
                                     std::array<std::size_t, 2> resolution)
{
	if (resolution[0] < 1 || resolution[1] < 1 || !(window.area() > 0.0))
		throw DomainError("snapshot window and resolution must be nonempty");
	PsdSnapshot snap;
	snap.index = k;
	snap.mode = SnapshotMode::BackwardGrid;
	const double h1 = (window.hi1 - window.lo1) / static_cast<double>(resolution[0]);
	const double h2 = (window.hi2 - window.lo2) / static_cast<double>(resolution[1]);
	const std::size_t n = resolution[0] * resolution[1];
	snap.states.resize(n);
	snap.values.resize(n);
	snap.weights.assign(n, h1 * h2);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
	for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(resolution[0]); ++i)
	{
		for (std::size_t j = 0; j < resolution[1]; ++j)
		{
			const std::size_t idx = static_cast<std::size_t>(i) * resolution[1] + j;
			const DisperseState x{window.lo1 + h1 * (static_cast<double>(i) + 0.5), window.lo2 + h2 * (static_cast<double>(j) + 0.5)};
			snap.states[idx] = x;
			snap.values[idx] = x.radius >= map.minRadius() ? evaluate_q_backward(map, q0, k, x) : 0.0;
		}
	}
	return snap;
}

/**
 * @brief Push every quadrature point of q0 forward to t_k
 * @details Each sample carries the image of its quadrature cell, w_l / densityFactor, so sums of
 *          value * weight reproduce the quadrature of q0 exactly. A Dirac seed is a single sample
 *          with value equal to its number concentration and unit weight.
 */
inline PsdSnapshot forward_snapshot(const CharacteristicMap& map, const InitialDensity& q0, const Quadrature& quad, std::size_t k)
{
	PsdSnapshot snap;
	snap.index = k;
	snap.mode = SnapshotMode::ForwardFromSupport;
	snap.states.resize(quad.size());
	snap.values.resize(quad.size());
	snap.weights.resize(quad.size());
	for (std::size_t l = 0; l < quad.size(); ++l)
	{
		const auto image = map.map(0, quad.points[l], k);
		const auto jac = map.jacobian(0, quad.points[l], k);
		if (!image || !jac)
			throw StepError("forward characteristic left the admissible set", k);
		snap.states[l] = *image;
		if (q0.isDirac())
		{
			snap.values[l] = q0.amplitude();
			snap.weights[l] = 1.0;
			continue;
		}
		const double factor = jac->densityFactor();
		snap.values[l] = q0(quad.points[l]) * factor;
		snap.weights[l] = quad.weights[l] / factor;
	}
	return snap;
}

/// Bounding box of the image of the support of q0 at t_k, widened by @p margin (relative) and clipped to [0, 1] in composition.
inline Box image_window(const CharacteristicMap& map, const InitialDensity& q0, std::size_t k, double margin = 0.05,
                        std::size_t samplesPerEdge = 256)
{
	const Box& s = q0.support();
	Box b{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), std::numeric_limits<double>::max(),
	      std::numeric_limits<double>::lowest()};
	auto include = [&](const DisperseState& x) {
		const auto y = map.map(0, x, k);
		if (!y)
			return;
		b.lo1 = std::min(b.lo1, y->radius);
		b.hi1 = std::max(b.hi1, y->radius);
		b.lo2 = std::min(b.lo2, y->composition);
		b.hi2 = std::max(b.hi2, y->composition);
	};
	for (std::size_t e = 0; e <= samplesPerEdge; ++e)
	{
		const double a = static_cast<double>(e) / static_cast<double>(samplesPerEdge);
		const double r = s.lo1 + a * (s.hi1 - s.lo1);
		const double f = s.lo2 + a * (s.hi2 - s.lo2);
		include({r, s.lo2});
		include({r, s.hi2});
		include({s.lo1, f});
		include({s.hi1, f});
	}
	const double w1 = std::max(b.hi1 - b.lo1, 1e-12);
	const double w2 = std::max(b.hi2 - b.lo2, 1e-12);
	return {b.lo1 - margin * w1, b.hi1 + margin * w1, std::max(0.0, b.lo2 - margin * w2), std::min(1.0, b.hi2 + margin * w2)};
}

/// Inner-particle composition: component-1 fraction deposited at each radius of one particle.
struct RadialProfile
{
	DisperseState seed;
	std::size_t finalIndex = 0;
	std::vector<double> radii;
	std::vector<double> fractions;
	/// Time indices skipped because G1 + G2 vanished.
	std::size_t undefinedCount = 0;
};

/**
 * @brief Radial composition of the particle grown from @p seed
 * @details At grid index k the shell at radius r_k is deposited with fraction G1 / (G1 + G2) of
 *          the rates at C_k. Indices with vanishing total rate are skipped and counted.
 */
inline RadialProfile radial_composition(const CharacteristicMap& map, const DisperseState& seed)
{
	RadialProfile p;
	p.seed = seed;
	p.finalIndex = map.size() - 1;
	for (std::size_t k = 0; k < map.size(); ++k)
	{
		const RatePair& r = map.rates(k);
		if (r.g1 < 0.0 || r.g2 < 0.0)
			throw DomainError("radial composition requires nonnegative growth rates");
		const double total = r.total();
		if (!(total > 0.0))
		{
			++p.undefinedCount;
			continue;
		}
		const auto radius = map.radius(0, seed.radius, k);
		if (!radius)
			throw StepError("nonpositive radius radicand", k);
		p.radii.push_back(*radius);
		p.fractions.push_back(r.g1 / total);
	}
	return p;
}

/// sum of x1^a * x2^b * q * weight.
inline double raw_moment(const PsdSnapshot& snap, double a, double b)
{
	double s = 0.0;
	for (std::size_t i = 0; i < snap.size(); ++i)
	{
		const DisperseState& x = snap.states[i];
		s += std::pow(x.radius, a) * std::pow(x.composition, b) * snap.values[i] * snap.weights[i];
	}
	return s;
}

struct MomentTable
{
	double number = 0.0;
	double meanRadius = 0.0;
	double meanComposition = 0.0;
	/// sum V_i(x) q weight: volume held by the particle phase, per component.
	std::array<double, 2> componentVolumes{0.0, 0.0};
	/// Requested raw moments, in the order of the requested exponent pairs.
	std::vector<double> raw;
};

inline MomentTable moments(const PsdSnapshot& snap, std::span<const std::array<double, 2>> orders = {})
{
	if (snap.size() == 0)
		throw DomainError("moments of an empty snapshot");
	MomentTable m;
	double r = 0.0;
	double f = 0.0;
	for (std::size_t i = 0; i < snap.size(); ++i)
	{
		const double w = snap.values[i] * snap.weights[i];
		m.number += w;
		r += snap.states[i].radius * w;
		f += snap.states[i].composition * w;
		m.componentVolumes[0] += component_volume(0, snap.states[i]) * w;
		m.componentVolumes[1] += component_volume(1, snap.states[i]) * w;
	}
	if (m.number > 0.0)
	{
		m.meanRadius = r / m.number;
		m.meanComposition = f / m.number;
	}
	for (const auto& o : orders)
		m.raw.push_back(raw_moment(snap, o[0], o[1]));
	return m;
}

} // namespace emom

#endif // EMOM_RECONSTRUCTION_HPP_
