#include "app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
	CLI::App cli{"Moving-characteristics solver for multi-dimensional coprecipitation growth"};
	cli.require_subcommand(1);
	emom::app::Invocation inv;
	int threads = 0;

	for (const char* name : {"solve", "reconstruct", "radial", "compare", "convergence"})
	{
		CLI::App* sub = cli.add_subcommand(name);
		sub->add_option("--config", inv.configPath, "Experiment config (JSON)")->required();
		sub->add_option("--out", inv.outDir, "Output directory")->required();
		sub->add_option("--threads", threads, "Solver threads")->check(CLI::PositiveNumber);
		sub->add_flag("--reproducible", inv.reproducible, "Fixed summation order; omit timing tables");
		sub->callback([&inv, sub] { inv.subcommand = sub->get_name(); });
	}

	try
	{
		cli.parse(argc, argv);
	}
	catch (const CLI::ParseError& e)
	{
		const int code = cli.exit(e);
		return code == 0 ? 0 : emom::app::ConfigFailure;
	}
	if (threads > 0)
		inv.threads = threads;
	return emom::app::run(inv, std::cerr);
}
