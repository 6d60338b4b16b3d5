// Experiment configuration for emom-md: JSON with sections process, kinetics, initial_datum, grids, run.

#pragma once

#include "emom/fvm.hpp"
#include "emom/model.hpp"
#include "emom/solver.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace emom::app
{

struct KineticsConfig
{
	std::string law = "linear";
	std::array<double, 2> coefficients{1.0, 1.0};
	std::array<double, 2> powers{1.0, 1.0};
	double exponent = 0.0;
	bool allowNegativeRates = false;

	GrowthLaw build() const;
};

struct InitialDatumConfig
{
	std::string kind = "bump";
	std::array<double, 2> center{0.1, 0.75};
	std::array<double, 2> halfWidths{0.05, 0.25};
	double amplitude = 1.0;
	double number = 1.0;

	InitialDensity build() const;
};

struct EmomLevel
{
	std::size_t timePoints = 0;
	std::array<std::size_t, 2> quadrature{0, 0};
};

struct SnapshotConfig
{
	std::array<std::size_t, 2> resolution{200, 200};
	/// Time indices to export; empty means the last one.
	std::vector<std::size_t> indices;
	double margin = 0.05;
};

struct GridsConfig
{
	std::size_t timePoints = 1001;
	std::array<std::size_t, 2> quadrature{100, 100};
	QuadratureRule rule = QuadratureRule::Midpoint;
	SnapshotConfig snapshot;
	FvmSpec fvm;
	EmomLevel reference{100001, {100, 100}};
	std::vector<std::size_t> timeLadder;
	std::vector<EmomLevel> emomLadder;
	std::vector<std::array<std::size_t, 2>> fvmLadder;
};

struct RunSettings
{
	int threads = 1;
	bool reproducible = false;
	bool compensatedSum = false;
	NegativeConcentrationPolicy negativePolicy = NegativeConcentrationPolicy::Clamp;
	int repetitions = 3;
	/// Seed of the radial profile; defaults to the datum center.
	std::optional<std::array<double, 2>> seed;
	bool interpolate = true;

	SolverOptions solverOptions(bool allowNegativeRates) const;
};

struct ExperimentConfig
{
	ProcessConfig process;
	KineticsConfig kinetics;
	InitialDatumConfig initialDatum;
	GridsConfig grids;
	RunSettings run;
	nlohmann::json source;
};

/// Parse and validate; throws ConfigError naming the offending key path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

} // namespace emom::app
