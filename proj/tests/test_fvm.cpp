#include "emom/bench.hpp"
#include "emom/fvm.hpp"
#include "emom/reconstruction.hpp"

#include "benchmark_setup.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace emom;
using emom::test::Gen;

namespace
{

double grid_sum(const FvmGrid& g)
{
	const auto v = g.values();
	return std::accumulate(v.begin(), v.end(), 0.0);
}

std::array<double, 2> grid_centroid(const FvmGrid& g)
{
	double n = 0.0, r = 0.0, f = 0.0;
	for (std::size_t i = 0; i < g.cellsRadius(); ++i)
		for (std::size_t j = 0; j < g.cellsComposition(); ++j)
		{
			n += g(i, j);
			r += g(i, j) * g.centerRadius(i);
			f += g(i, j) * g.centerComposition(j);
		}
	return {r / n, f / n};
}

struct FineRun
{
	FvmResult fvm;
	SolveResult emom;
};

// One 256 x 256 FVM run shared by the tests that need it.
const FineRun& fine_run()
{
	static const FineRun run = [] {
		FvmSpec spec;
		spec.cellsRadius = 256;
		spec.cellsComposition = 256;
		FineRun r{fvm_solve(test::benchmark_process(), test::benchmark_law(), test::benchmark_datum(), spec),
		          test::benchmark_solve(100, 1001)};
		return r;
	}();
	return run;
}

} // namespace

TEST(VanLeer, Limiter)
{
	EXPECT_DOUBLE_EQ(van_leer(-1.0), 0.0);
	EXPECT_DOUBLE_EQ(van_leer(0.0), 0.0);
	EXPECT_DOUBLE_EQ(van_leer(1.0), 1.0);
	EXPECT_NEAR(van_leer(1e12), 2.0, 1e-11);
	for (double t = 0.01; t < 100.0; t *= 1.3)
		EXPECT_NEAR(van_leer(t), t * van_leer(1.0 / t), 1e-12);
}

TEST(FvmStep, ZeroVelocityLeavesGridUnchanged)
{
	FvmGrid g(0.05, 0.5, 16, 16);
	project_initial_density(g, test::benchmark_datum());
	const std::vector<double> before(g.values().begin(), g.values().end());
	const RatePair still{0.0, 0.0};
	EXPECT_DOUBLE_EQ(cfl_dt(g, still, 0.0, 0.5, 0.25), 0.25);
	const FvmStepReport rep = fvm_step(g, still, 0.0, 0.25);
	EXPECT_EQ(rep.outflow, 0.0);
	for (std::size_t k = 0; k < before.size(); ++k)
		EXPECT_EQ(g.values()[k], before[k]);
}

TEST(AdvectLine, TotalVariationNonIncreasingAtConstantVelocity)
{
	Gen g(41);
	std::vector<double> flux;
	for (int trial = 0; trial < 2000; ++trial)
	{
		const std::size_t m = g.index(3, 60);
		std::vector<double> line(m);
		const bool smooth = g.coin();
		for (std::size_t k = 0; k < m; ++k)
			line[k] = smooth ? std::max(0.0, std::sin(3.0 * static_cast<double>(k) / static_cast<double>(m)) + 0.3)
			                 : g.uniform(0.0, 1.0);
		const double a = g.coin() ? g.uniform(0.1, 2.0) : -g.uniform(0.1, 2.0);
		const std::vector<double> faces(m + 1, a);
		const double ratio = g.uniform(0.01, 0.5) / std::abs(a);
		const auto scheme = g.coin() ? FvmScheme::ForwardEuler : FvmScheme::LaxWendroff;
		// the zero exterior state is part of the line
		std::vector<double> padded(line);
		padded.insert(padded.begin(), 0.0);
		padded.push_back(0.0);
		const double before = total_variation(padded);
		advect_line(line, faces, ratio, flux, scheme);
		padded.assign(line.begin(), line.end());
		padded.insert(padded.begin(), 0.0);
		padded.push_back(0.0);
		ASSERT_LE(total_variation(padded), before * (1.0 + 1e-12) + 1e-15);
		for (double v : line)
			ASSERT_GE(v, -1e-15);
	}
}

TEST(FvmStep, ConservationTelescopes)
{
	Gen g(42);
	for (int trial = 0; trial < 50; ++trial)
	{
		FvmGrid grid(0.05, 0.4, g.index(4, 40), g.index(4, 40));
		for (double& v : grid.values())
			v = g.uniform(0.0, 1.0);
		const RatePair rates = g.rates(3.0);
		const double n = g.uniform(-1.0, 0.5);
		const double before = grid_sum(grid) * grid.cellArea();
		const double dt = cfl_dt(grid, rates, n, 0.5, 1.0);
		const FvmStepReport rep = fvm_step(grid, rates, n, dt);
		const double after = grid_sum(grid) * grid.cellArea();
		EXPECT_NEAR(after + rep.outflow, before, 1e-13 * before);
		EXPECT_GE(rep.outflow, 0.0);
	}
}

TEST(FvmStep, ClosedDomainConservesExactly)
{
	// density away from the outer radius: composition faces point inward, so nothing leaves
	FvmGrid grid(0.05, 1.0, 32, 32);
	project_initial_density(grid, test::benchmark_datum());
	const double before = grid.totalNumber();
	const RatePair rates{2.0, 10.0};
	for (int k = 0; k < 10; ++k)
	{
		const FvmStepReport rep = fvm_step(grid, rates, 0.0, cfl_dt(grid, rates, 0.0, 0.5, 1.0));
		EXPECT_EQ(rep.outflow, 0.0);
	}
	EXPECT_NEAR(grid.totalNumber(), before, 1e-14 * before);
}

TEST(FvmStep, CflViolationIsAnError)
{
	FvmGrid grid(0.05, 0.4, 16, 16);
	const RatePair rates{1.0, 5.0};
	const double dt = cfl_dt(grid, rates, 0.0, 1.0, 1.0);
	EXPECT_THROW(fvm_step(grid, rates, 0.0, 1.5 * dt), DomainError);
	EXPECT_NO_THROW(fvm_step(grid, rates, 0.0, dt));
}

TEST(CflDt, Formula)
{
	// radius axis: v = 1 on cells of width 0.1
	FvmGrid grid(0.5, 1.5, 10, 4);
	const RatePair rates{1.0, 0.0};
	const double composition = 3.0 / 0.55 / 0.25;
	EXPECT_NEAR(cfl_dt(grid, rates, 0.0, 0.5, 1.0), 0.5 / (1.0 / 0.1 + composition), 1e-15);
	EXPECT_THROW(cfl_dt(grid, rates, 0.0, 0.0, 1.0), DomainError);
	EXPECT_THROW(cfl_dt(grid, rates, 0.0, 1.5, 1.0), DomainError);
}

TEST(CflDt, RefinementHalvesStep)
{
	const RatePair rates{2.0, 10.0};
	for (std::size_t m : {32u, 64u, 128u})
	{
		const double coarse = cfl_dt(FvmGrid(0.05, 0.3, m, m), rates, 0.0, 0.5, 1.0);
		const double fine = cfl_dt(FvmGrid(0.05, 0.3, 2 * m, 2 * m), rates, 0.0, 0.5, 1.0);
		EXPECT_NEAR(fine / coarse, 0.5, 0.03);
	}
}

TEST(ProjectInitialDensity, PreservesNumber)
{
	FvmGrid grid(0.05, 0.3, 64, 64);
	const InitialDensity q0 = test::benchmark_datum();
	project_initial_density(grid, q0);
	EXPECT_NEAR(grid.totalNumber(), q0.totalNumber(), 1e-4 * q0.totalNumber());
	const auto dirac = InitialDensity::dirac({0.2, 0.5}, 7.0);
	project_initial_density(grid, dirac);
	EXPECT_NEAR(grid.totalNumber(), 7.0, 1e-13);
}

TEST(FvmSolve, NoParticlesKeepsConcentrations)
{
	const auto q0 = InitialDensity::custom([](const DisperseState&) { return 0.0; }, {0.05, 0.15, 0.5, 1.0});
	FvmSpec spec;
	spec.cellsRadius = spec.cellsComposition = 16;
	spec.maxRadius = 0.5;
	const FvmResult r = fvm_solve(test::benchmark_process(), test::benchmark_law(), q0, spec);
	for (const auto& c : r.path.values)
	{
		EXPECT_DOUBLE_EQ(c[0], 2.0);
		EXPECT_DOUBLE_EQ(c[1], 2.0);
	}
}

TEST(FvmSolve, PositivityAndBalance)
{
	FvmSpec spec;
	spec.cellsRadius = spec.cellsComposition = 32;
	const ProcessConfig cfg = test::benchmark_process();
	const FvmResult r = fvm_solve(cfg, test::benchmark_law(), test::benchmark_datum(), spec);
	const double peak = *std::max_element(r.grid.values().begin(), r.grid.values().end());
	for (double v : r.grid.values())
		ASSERT_GE(v, -1e-14 * peak);
	EXPECT_NEAR(r.path.times.back(), cfg.horizon, 0.0);
	const auto v = r.grid.componentVolumes();
	for (int i = 0; i < 2; ++i)
		EXPECT_NEAR(cfg.reactorVolume * r.path.values.back()[i] + cfg.densities[i] * v[i], r.feedMass[i], 1e-13 * r.feedMass[i]);
	// outflow negligible with the 20% radius margin
	EXPECT_LT(r.outflow, 1e-10 * test::benchmark_datum().totalNumber());
}

TEST(FvmSolve, RejectsTimeDependentFeed)
{
	ProcessConfig cfg = test::benchmark_process();
	cfg.feedMass[0] = [](double t) { return 3.0 + t; };
	EXPECT_THROW(fvm_solve(cfg, test::benchmark_law(), test::benchmark_datum(), {}), ConfigError);
}

TEST(FvmSolve, DefaultMaxRadius)
{
	// largest seed radius 0.15 carried over t = 0.01 at rate 12, plus 20%
	EXPECT_NEAR(default_max_radius(test::benchmark_process(), test::benchmark_law(), test::benchmark_datum()),
	            1.2 * 0.27, 1e-14);
}

TEST(FvmSolve, FineGridCentroidMatchesCharacteristics)
{
	const FineRun& run = fine_run();
	const CharacteristicMap map(run.emom.path, test::benchmark_law(), 0.05);
	const InitialDensity q0 = test::benchmark_datum();
	const PsdSnapshot snap = forward_snapshot(map, q0, build_quadrature(q0, {100, 100}), map.size() - 1);
	const MomentTable m = moments(snap);
	const auto c = grid_centroid(run.fvm.grid);
	EXPECT_LE(std::abs(c[0] - m.meanRadius), 2.0 * run.fvm.grid.widthRadius());
	EXPECT_LE(std::abs(c[1] - m.meanComposition), 2.0 * run.fvm.grid.widthComposition());
}

TEST(FvmSolve, FineGridAgreesWithEmom)
{
	const FineRun& run = fine_run();
	const ErrorNorms e = error_norms(run.fvm.path, run.emom.path, true);
	// relative to the consumed amount, the part of the path that carries information
	const double consumed1 = 2.0 - run.emom.path.values.back()[0];
	const double consumed2 = 2.0 - run.emom.path.values.back()[1];
	const double l2scale = std::sqrt(0.01);
	EXPECT_LE(e.l2[0], 0.01 * consumed1 * l2scale);
	EXPECT_LE(e.l2[1], 0.01 * consumed2 * l2scale);
}

TEST(FvmSolve, CoarseGridIsDiffusive)
{
	FvmSpec coarse;
	coarse.cellsRadius = coarse.cellsComposition = 16;
	const FvmResult r = fvm_solve(test::benchmark_process(), test::benchmark_law(), test::benchmark_datum(), coarse);
	const double coarsePeak = *std::max_element(r.grid.values().begin(), r.grid.values().end());
	const FvmGrid& fine = fine_run().fvm.grid;
	const double finePeak = *std::max_element(fine.values().begin(), fine.values().end());
	EXPECT_LT(coarsePeak, 0.8 * finePeak);
}
