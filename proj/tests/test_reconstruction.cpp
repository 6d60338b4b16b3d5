#include "emom/reconstruction.hpp"
#include "emom/solver.hpp"

#include "benchmark_setup.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace emom;
using emom::test::Gen;

namespace
{

ConcentrationPath constant_path(std::size_t points, double horizon, ConcentrationPair c)
{
	ConcentrationPath p;
	const TimeGrid g = TimeGrid::uniform(horizon, points);
	p.times.assign(g.times().begin(), g.times().end());
	p.values.assign(points, c);
	return p;
}

} // namespace

TEST(EvaluateQ, IndexZeroIsInitialDatum)
{
	const InitialDensity q0 = test::benchmark_datum();
	const CharacteristicMap map(constant_path(11, 0.01, {2.0, 2.0}), test::benchmark_law(), 0.05);
	Gen g(51);
	for (int trial = 0; trial < 500; ++trial)
	{
		const DisperseState x{g.uniform(0.05, 0.2), g.uniform(0.0, 1.0)};
		EXPECT_DOUBLE_EQ(evaluate_q_backward(map, q0, 0, x), q0(x));
		const auto [y, q] = evaluate_q_forward(map, q0, 0, x);
		EXPECT_EQ(y, x);
		EXPECT_DOUBLE_EQ(q, q0(x));
	}
}

TEST(EvaluateQ, NoAncestorGivesZero)
{
	const InitialDensity q0 = test::benchmark_datum();
	const CharacteristicMap map(constant_path(11, 0.01, {2.0, 2.0}), test::benchmark_law(), 0.05);
	EXPECT_DOUBLE_EQ(evaluate_q_backward(map, q0, 10, {0.1, 0.75}), 0.0);
	// radicand below zero: the radius cannot be traced back at all
	const CharacteristicMap fast(constant_path(11, 1.0, {2.0, 2.0}), test::benchmark_law(), 0.05);
	EXPECT_FALSE(fast.radius(10, 1.0, 0).has_value());
	EXPECT_DOUBLE_EQ(evaluate_q_backward(fast, q0, 10, {1.0, 0.75}), 0.0);
}

TEST(EvaluateQ, ForwardAndBackwardAgree)
{
	const InitialDensity q0 = test::benchmark_datum();
	const SolveResult r = test::benchmark_solve(40, 201);
	const CharacteristicMap map(r.path, test::benchmark_law(), 0.05);
	Gen g(52);
	for (int trial = 0; trial < 1000; ++trial)
	{
		const DisperseState x{g.uniform(0.051, 0.149), g.uniform(0.51, 0.99)};
		const std::size_t k = g.index(0, map.size() - 1);
		const auto [y, q] = evaluate_q_forward(map, q0, k, x);
		const double back = evaluate_q_backward(map, q0, k, y);
		EXPECT_NEAR(back, q, 1e-10 * std::max(q, 1e-300)) << "k = " << k;
	}
}

TEST(Snapshot, NumberConservedOnBackwardGrid)
{
	const InitialDensity q0 = test::benchmark_datum();
	const SolveResult r = test::benchmark_solve(50, 1001, 1.0);
	const CharacteristicMap map(r.path, test::benchmark_law(1.0), 0.05);
	const std::size_t k = map.size() - 1;
	const PsdSnapshot snap = backward_snapshot(map, q0, k, image_window(map, q0, k), {200, 200});
	for (double v : snap.values)
		ASSERT_GE(v, 0.0);
	EXPECT_NEAR(moments(snap).number, q0.totalNumber(), 5e-3 * q0.totalNumber());
}

TEST(Snapshot, ForwardSnapshotReproducesQuadrature)
{
	const InitialDensity q0 = test::benchmark_datum();
	const Quadrature quad = build_quadrature(q0, {60, 60});
	const SolveResult r = test::benchmark_solve(60, 201);
	const CharacteristicMap map(r.path, test::benchmark_law(), 0.05);
	const MomentTable initial = moments(forward_snapshot(map, q0, quad, 0));
	const MomentTable final = moments(forward_snapshot(map, q0, quad, map.size() - 1));
	EXPECT_NEAR(final.number, initial.number, 1e-13 * initial.number);
}

TEST(Snapshot, MeanCompositionDriftsTowardFasterComponent)
{
	const InitialDensity q0 = test::benchmark_datum();
	const Quadrature quad = build_quadrature(q0, {40, 40});
	const SolveResult r = test::benchmark_solve(40, 401);
	const CharacteristicMap map(r.path, test::benchmark_law(5.0), 0.05);
	double previous = 1.0;
	for (std::size_t k = 0; k < map.size(); k += 50)
	{
		const double f = moments(forward_snapshot(map, q0, quad, k)).meanComposition;
		EXPECT_LT(f, previous);
		previous = f;
	}
	// component 2 grows five times faster, so the fraction of component 1 falls well below its start
	EXPECT_LT(previous, 0.5);
}

TEST(Snapshot, ComponentVolumesCloseTheMassBalance)
{
	const InitialDensity q0 = test::benchmark_datum();
	const Problem p = test::benchmark_problem(60);
	const SolveResult r = solve(p, TimeGrid::uniform(0.01, 501));
	const CharacteristicMap map(r.path, test::benchmark_law(), 0.05);
	const std::size_t k = map.size() - 1;
	const PsdSnapshot snap = backward_snapshot(map, q0, k, image_window(map, q0, k), {300, 300});
	const MomentTable m = moments(snap);
	for (int i = 0; i < 2; ++i)
	{
		const double mass = p.feedMass(i, 0.01);
		EXPECT_NEAR(r.path.values.back()[i] + m.componentVolumes[i], mass, 5e-3 * mass);
	}
}

TEST(Snapshot, DiracPushedForward)
{
	const auto q0 = InitialDensity::dirac({0.1, 0.5}, 12.0);
	const Quadrature quad = build_quadrature(q0, {1, 1});
	const CharacteristicMap map(constant_path(11, 0.01, {2.0, 2.0}), test::benchmark_law(), 0.05);
	const PsdSnapshot snap = forward_snapshot(map, q0, quad, 10);
	ASSERT_EQ(snap.size(), 1u);
	EXPECT_NEAR(snap.states[0].radius, 0.22, 1e-15);
	EXPECT_DOUBLE_EQ(moments(snap).number, 12.0);
	EXPECT_DOUBLE_EQ(evaluate_q_backward(map, q0, 10, snap.states[0]), 0.0);
}

TEST(Moments, ZeroDensityAndErrors)
{
	PsdSnapshot empty;
	EXPECT_THROW(moments(empty), DomainError);
	PsdSnapshot zero;
	zero.states = {{0.1, 0.5}, {0.2, 0.3}};
	zero.values = {0.0, 0.0};
	zero.weights = {1.0, 1.0};
	const std::array<std::array<double, 2>, 2> orders{{{1.0, 0.0}, {3.0, 1.0}}};
	const MomentTable m = moments(zero, orders);
	EXPECT_DOUBLE_EQ(m.number, 0.0);
	EXPECT_DOUBLE_EQ(m.meanRadius, 0.0);
	EXPECT_DOUBLE_EQ(m.componentVolumes[0], 0.0);
	ASSERT_EQ(m.raw.size(), 2u);
	EXPECT_DOUBLE_EQ(m.raw[1], 0.0);
}

TEST(RadialProfile, SymmetricRatesGiveHalf)
{
	// any path with c1 == c2 makes G1 == G2 for a symmetric law
	Gen g(53);
	ConcentrationPath p = g.path(300, 0.01);
	for (auto& c : p.values)
		c[1] = c[0];
	const CharacteristicMap map(p, test::benchmark_law(1.0));
	const RadialProfile prof = radial_composition(map, {0.1, 0.3});
	ASSERT_EQ(prof.radii.size() + prof.undefinedCount, 300u);
	for (double f : prof.fractions)
		EXPECT_EQ(f, 0.5);
}

TEST(RadialProfile, PureComponentGivesOne)
{
	const CharacteristicMap map(constant_path(50, 0.01, {2.0, 2.0}), GrowthLaw::linear(1.0, 0.0, 0.0));
	const RadialProfile prof = radial_composition(map, {0.1, 0.5});
	for (double f : prof.fractions)
		EXPECT_EQ(f, 1.0);
}

TEST(RadialProfile, ConstantRatioGivesOneOverOnePlusRatio)
{
	const CharacteristicMap map(constant_path(50, 0.01, {2.0, 2.0}), test::benchmark_law(5.0));
	const RadialProfile prof = radial_composition(map, {0.1, 0.5});
	ASSERT_EQ(prof.fractions.size(), 50u);
	for (std::size_t k = 0; k < prof.fractions.size(); ++k)
	{
		EXPECT_NEAR(prof.fractions[k], 1.0 / 6.0, 1e-12);
		if (k > 0)
			EXPECT_GT(prof.radii[k], prof.radii[k - 1]);
	}
	EXPECT_DOUBLE_EQ(prof.radii.front(), 0.1);
}

TEST(RadialProfile, VanishingRatesAreSkipped)
{
	ConcentrationPath p = constant_path(10, 0.01, {2.0, 2.0});
	p.values[3] = {0.0, 0.0};
	p.values[7] = {0.0, 0.0};
	const CharacteristicMap map(p, test::benchmark_law(5.0));
	const RadialProfile prof = radial_composition(map, {0.1, 0.5});
	EXPECT_EQ(prof.undefinedCount, 2u);
	EXPECT_EQ(prof.fractions.size(), 8u);
}

TEST(RadialProfile, NegativeRatesRejected)
{
	const GrowthLaw law([](double) { return -1.0; }, [](double c) { return c; }, 0.0);
	const CharacteristicMap map(constant_path(10, 0.01, {2.0, 2.0}), law, 0.0, false);
	EXPECT_THROW(radial_composition(map, {0.5, 0.5}), DomainError);
}

TEST(RadialProfile, ProfilesOrderedByRatio)
{
	// fraction of component 1 deposited at every shell falls with G2 / G1
	std::vector<RadialProfile> profiles;
	for (double ratio : {1.0, 2.0, 5.0})
	{
		const SolveResult r = test::benchmark_solve(30, 201, ratio);
		profiles.push_back(radial_composition(CharacteristicMap(r.path, test::benchmark_law(ratio)), {0.1, 0.75}));
	}
	for (std::size_t k = 0; k < profiles[0].fractions.size(); ++k)
	{
		EXPECT_GT(profiles[0].fractions[k], profiles[1].fractions[k]);
		EXPECT_GT(profiles[1].fractions[k], profiles[2].fractions[k]);
	}
	EXPECT_LT(profiles[1].radii.back(), profiles[2].radii.back());
}
