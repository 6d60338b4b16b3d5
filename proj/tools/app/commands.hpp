// Subcommands of emom-md.

#pragma once

#include "app/config.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace emom::app
{

struct Invocation
{
	std::string subcommand;
	std::string configPath;
	std::string outDir;
	std::optional<int> threads;
	bool reproducible = false;
};

enum ExitCode : int
{
	Success = 0,
	Failure = 1,
	ConfigFailure = 2,
	NumericalFailure = 3
};

/// Run one subcommand, writing outputs and manifest.json into the output directory.
/// Errors are reported on @p err and mapped to an exit code.
int run(const Invocation& inv, std::ostream& err);

} // namespace emom::app
