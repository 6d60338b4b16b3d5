#include "app/commands.hpp"

#include "emom/bench.hpp"
#include "emom/characteristics.hpp"
#include "emom/errors.hpp"
#include "emom/fvm.hpp"
#include "emom/reconstruction.hpp"
#include "emom/solver.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#ifndef EMOM_GIT_REVISION
#define EMOM_GIT_REVISION "unknown"
#endif
#ifndef EMOM_VERSION
#define EMOM_VERSION "0.0.0"
#endif

namespace emom::app
{

namespace
{

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string utc_now()
{
	const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&t, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

std::string cpu_model()
{
	std::ifstream f("/proc/cpuinfo");
	std::string line;
	while (std::getline(f, line))
	{
		if (line.rfind("model name", 0) == 0)
		{
			const auto colon = line.find(':');
			if (colon != std::string::npos)
				return line.substr(line.find_first_not_of(' ', colon + 1));
		}
	}
	return "unknown";
}

json hardware_note()
{
	return {{"cpu", cpu_model()},
	        {"hardware_threads", std::thread::hardware_concurrency()},
	        {"note", "absolute timings are machine specific; compare slopes, not seconds"}};
}

json build_info()
{
#ifdef _OPENMP
	const bool openmp = true;
#else
	const bool openmp = false;
#endif
	return {{"version", EMOM_VERSION},
	        {"git_revision", EMOM_GIT_REVISION},
	        {"compiler", __VERSION__},
	        {"openmp", openmp}};
}

const char* scheme_name(FvmScheme s)
{
	return s == FvmScheme::ForwardEuler ? "forward_euler" : "lax_wendroff";
}

class Runner
{
public:
	Runner(const Invocation& inv, ExperimentConfig cfg) : _inv(inv), _cfg(std::move(cfg))
	{
		if (inv.threads)
		{
			if (*inv.threads < 1)
				throw ConfigError("--threads must be at least 1");
			_cfg.run.threads = *inv.threads;
		}
		if (inv.reproducible)
			_cfg.run.reproducible = true;
		_law = std::make_unique<GrowthLaw>(_cfg.kinetics.build());
		_q0 = std::make_unique<InitialDensity>(_cfg.initialDatum.build());
		_options = _cfg.run.solverOptions(_cfg.kinetics.allowNegativeRates);
		_out = inv.outDir;
		fs::create_directories(_out);
	}

	json& manifest() { return _manifest; }

	void execute()
	{
		static const std::map<std::string, void (Runner::*)()> table{{"solve", &Runner::solve},
		                                                            {"reconstruct", &Runner::reconstruct},
		                                                            {"radial", &Runner::radial},
		                                                            {"compare", &Runner::compare},
		                                                            {"convergence", &Runner::convergence}};
		const auto it = table.find(_inv.subcommand);
		if (it == table.end())
			throw ConfigError("unknown subcommand " + _inv.subcommand);
		_manifest["run"] = {{"threads", _cfg.run.threads},
		                    {"reproducible", _cfg.run.reproducible},
		                    {"compensated_sum", _cfg.run.compensatedSum},
		                    {"repetitions", _cfg.run.repetitions}};
		(this->*it->second)();
		_manifest["outputs"] = _outputs;
	}

private:
	struct EmomRun
	{
		SolveResult result;
		double seconds = 0.0;
		double dof = 0.0;
	};

	struct FvmRun
	{
		FvmResult result;
		double seconds = 0.0;
	};

	EmomRun runEmom(const EmomLevel& level, int repetitions)
	{
		const Problem problem(_cfg.process, *_law, *_q0, build_quadrature(*_q0, level.quadrature, _cfg.grids.rule));
		const TimeGrid grid = TimeGrid::uniform(_cfg.process.horizon, level.timePoints);
		EmomRun r;
		r.seconds = median_seconds([&] { r.result = emom::solve(problem, grid, _options); }, repetitions);
		r.dof = static_cast<double>(grid.size()) * static_cast<double>(problem.quadrature().size());
		return r;
	}

	FvmRun runFvm(const std::array<std::size_t, 2>& cells, int repetitions)
	{
		FvmSpec spec = _cfg.grids.fvm;
		spec.cellsRadius = cells[0];
		spec.cellsComposition = cells[1];
		std::optional<FvmResult> res;
		const double seconds = median_seconds([&] { res = fvm_solve(_cfg.process, *_law, *_q0, spec); }, repetitions);
		return {std::move(*res), seconds};
	}

	EmomLevel primaryLevel() const { return {_cfg.grids.timePoints, _cfg.grids.quadrature}; }

	void write(const std::string& name, const CsvTable& table)
	{
		write_csv((_out / name).string(), table);
		_outputs.push_back(name);
	}

	json gridNote(const EmomLevel& l) const
	{
		return {{"time_points", l.timePoints},
		        {"quadrature", l.quadrature},
		        {"rule", _cfg.grids.rule == QuadratureRule::Midpoint ? "midpoint" : "gauss_legendre"}};
	}

	EmomRun solvePrimary()
	{
		const EmomLevel level = primaryLevel();
		EmomRun r = runEmom(level, _cfg.run.repetitions);
		_manifest["grids"] = gridNote(level);
		_manifest["timing"] = {{"solve_seconds_median", r.seconds}, {"dof", r.dof}};
		_manifest["diagnostics"] = {{"negative_concentration_events", r.result.diagnostics.negativeConcentrationEvents}};
		write("concentrations.csv", concentration_table(r.result.path));
		return r;
	}

	void solve() { solvePrimary(); }

	void reconstruct()
	{
		const EmomRun r = solvePrimary();
		const CharacteristicMap map(r.result.path, *_law, _cfg.process.minRadius);
		std::vector<std::size_t> indices = _cfg.grids.snapshot.indices;
		if (indices.empty())
			indices.push_back(map.size() - 1);
		const Quadrature quad = build_quadrature(*_q0, _cfg.grids.quadrature, _cfg.grids.rule);
		const double initialNumber = moments(forward_snapshot(map, *_q0, quad, 0)).number;
		json snaps = json::array();
		for (std::size_t i = 0; i < indices.size(); ++i)
		{
			const std::size_t k = indices[i];
			if (k >= map.size())
				throw ConfigError("grids.snapshot.indices[" + std::to_string(i) + "]: index beyond the time grid");
			PsdSnapshot snap;
			json window;
			if (_q0->isDirac())
				snap = forward_snapshot(map, *_q0, quad, k);
			else
			{
				const Box w = image_window(map, *_q0, k, _cfg.grids.snapshot.margin);
				window = {w.lo1, w.hi1, w.lo2, w.hi2};
				snap = backward_snapshot(map, *_q0, k, w, _cfg.grids.snapshot.resolution);
			}
			CsvTable t{{"x1", "x2", "q"}, {}};
			for (std::size_t l = 0; l < snap.size(); ++l)
				t.add(std::vector<double>{snap.states[l].radius, snap.states[l].composition, snap.values[l]});
			const std::string name = "psd_t" + std::to_string(k) + ".csv";
			write(name, t);
			const MomentTable m = moments(snap);
			snaps.push_back({{"index", k},
			                 {"time", map.times()[k]},
			                 {"file", name},
			                 {"window", window},
			                 {"number", m.number},
			                 {"initial_number", initialNumber},
			                 {"mean_radius", m.meanRadius},
			                 {"mean_composition", m.meanComposition}});
		}
		_manifest["snapshots"] = snaps;
	}

	void radial()
	{
		const EmomRun r = solvePrimary();
		const CharacteristicMap map(r.result.path, *_law, _cfg.process.minRadius);
		const auto s = _cfg.run.seed.value_or(_cfg.initialDatum.center);
		if (!(s[0] >= _cfg.process.minRadius))
			throw ConfigError("run.seed: radius below process.x_min");
		const RadialProfile p = radial_composition(map, {s[0], s[1]});
		CsvTable t{{"radius", "fraction"}, {}};
		for (std::size_t i = 0; i < p.radii.size(); ++i)
			t.add(std::vector<double>{p.radii[i], p.fractions[i]});
		write("radial_profile.csv", t);
		_manifest["radial"] = {{"seed", s}, {"undefined_fraction_instants", p.undefinedCount}};
	}

	EmomRun reference()
	{
		EmomRun ref = runEmom(_cfg.grids.reference, 1);
		_manifest["reference"] = gridNote(_cfg.grids.reference);
		_manifest["reference"]["solve_seconds"] = ref.seconds;
		return ref;
	}

	static CsvTable slopeTable() { return {{"series", "slope", "intercept", "stderr", "ci_low", "ci_high", "points"}, {}}; }

	static void addSlope(CsvTable& t, const std::string& series, const SlopeFit& f)
	{
		t.add({series, format_double(f.slope), format_double(f.intercept), format_double(f.stderror), format_double(f.lower),
		       format_double(f.upper), std::to_string(f.points)});
	}

	void convergence()
	{
		if (_cfg.grids.timeLadder.size() < 3)
			throw ConfigError("grids.ladder.time_points: at least 3 levels required");
		const EmomRun ref = reference();
		CsvTable errors{{"time_points", "quadrature_points", "dof", "linf_c1", "linf_c2", "linf", "l2_c1", "l2_c2", "l2"}, {}};
		CsvTable timings{{"time_points", "dof", "seconds"}, {}};
		std::vector<std::pair<double, double>> linf, l2, time;
		for (std::size_t nt : _cfg.grids.timeLadder)
		{
			const EmomLevel level{nt, _cfg.grids.quadrature};
			const EmomRun r = runEmom(level, _cfg.run.repetitions);
			const ErrorNorms e = error_norms(r.result.path, ref.result.path, _cfg.run.interpolate);
			const double nx = static_cast<double>(_cfg.grids.quadrature[0] * _cfg.grids.quadrature[1]);
			errors.add(std::vector<double>{static_cast<double>(nt), nx, r.dof, e.linf[0], e.linf[1], e.maxLinf(), e.l2[0], e.l2[1],
			                               e.combinedL2()});
			timings.add(std::vector<double>{static_cast<double>(nt), r.dof, r.seconds});
			linf.emplace_back(static_cast<double>(nt), e.maxLinf());
			l2.emplace_back(static_cast<double>(nt), e.combinedL2());
			time.emplace_back(r.dof, r.seconds);
		}
		CsvTable slopes = slopeTable();
		addSlope(slopes, "linf_vs_time_points", fit_slope(linf));
		addSlope(slopes, "l2_vs_time_points", fit_slope(l2));
		write("errors.csv", errors);
		write("slopes.csv", slopes);
		writeTimings(timings, fit_slope(time));
	}

	void compare()
	{
		if (_cfg.grids.emomLadder.size() < 3 || _cfg.grids.fvmLadder.size() < 3)
			throw ConfigError("grids.ladder: compare needs at least 3 emom and 3 fvm levels");
		const EmomRun ref = reference();
		CsvTable errors{{"method", "level", "time_points", "cells", "dof", "l2_c1", "l2_c2", "l2", "linf"}, {}};
		CsvTable timings{{"method", "level", "dof", "seconds"}, {}};
		std::vector<std::pair<double, double>> emomErr, fvmErr, emomTime, fvmTime;
		for (std::size_t i = 0; i < _cfg.grids.emomLadder.size(); ++i)
		{
			const EmomLevel& level = _cfg.grids.emomLadder[i];
			const EmomRun r = runEmom(level, _cfg.run.repetitions);
			const ErrorNorms e = error_norms(r.result.path, ref.result.path, _cfg.run.interpolate);
			errors.add({"emom", std::to_string(i), std::to_string(level.timePoints),
			            std::to_string(level.quadrature[0] * level.quadrature[1]), format_double(r.dof), format_double(e.l2[0]),
			            format_double(e.l2[1]), format_double(e.combinedL2()), format_double(e.maxLinf())});
			timings.add({"emom", std::to_string(i), format_double(r.dof), format_double(r.seconds)});
			emomErr.emplace_back(r.dof, e.combinedL2());
			emomTime.emplace_back(r.seconds, e.combinedL2());
		}
		double rMax = 0.0;
		for (std::size_t i = 0; i < _cfg.grids.fvmLadder.size(); ++i)
		{
			const FvmRun r = runFvm(_cfg.grids.fvmLadder[i], _cfg.run.repetitions);
			// FVM steps are not nested in the reference grid.
			const ErrorNorms e = error_norms(r.result.path, ref.result.path, true);
			errors.add({"fvm", std::to_string(i), std::to_string(r.result.steps + 1), std::to_string(r.result.grid.cells()),
			            format_double(r.result.dof()), format_double(e.l2[0]), format_double(e.l2[1]),
			            format_double(e.combinedL2()), format_double(e.maxLinf())});
			timings.add({"fvm", std::to_string(i), format_double(r.result.dof()), format_double(r.seconds)});
			fvmErr.emplace_back(r.result.dof(), e.combinedL2());
			fvmTime.emplace_back(r.seconds, e.combinedL2());
			rMax = r.result.grid.maxRadius();
		}
		CsvTable slopes = slopeTable();
		addSlope(slopes, "emom_l2_vs_dof", fit_slope(emomErr));
		addSlope(slopes, "fvm_l2_vs_dof", fit_slope(fvmErr));
		write("errors.csv", errors);
		write("slopes.csv", slopes);
		const MatchedComparison m = compare_at_matched_dof(emomErr, fvmErr);
		_manifest["fvm"] = {{"scheme", scheme_name(_cfg.grids.fvm.scheme)},
		                    {"limiter", "van_leer"},
		                    {"splitting", "godunov"},
		                    {"cfl", _cfg.grids.fvm.cfl},
		                    {"max_radius", rMax}};
		_manifest["matched_dof"] = {{"matched", m.matched}, {"emom_not_lower", m.violations}, {"worst_ratio", m.worstRatio}};
		if (!_cfg.run.reproducible)
		{
			write("timings.csv", timings);
			_manifest["runtime_slopes"] = {{"emom", fit_slope(emomTime).slope}, {"fvm", fit_slope(fvmTime).slope}};
		}
	}

	void writeTimings(const CsvTable& timings, const SlopeFit& fit)
	{
		_manifest["timing"] = {{"seconds_vs_dof_slope", fit.slope}};
		if (!_cfg.run.reproducible)
			write("timings.csv", timings);
	}

	const Invocation& _inv;
	ExperimentConfig _cfg;
	std::unique_ptr<GrowthLaw> _law;
	std::unique_ptr<InitialDensity> _q0;
	SolverOptions _options;
	fs::path _out;
	json _manifest = json::object();
	std::vector<std::string> _outputs;
};

void write_manifest(const fs::path& dir, const json& manifest)
{
	std::error_code ec;
	fs::create_directories(dir, ec);
	std::ofstream f(dir / "manifest.json");
	if (f)
		f << manifest.dump(2) << '\n';
}

} // namespace

int run(const Invocation& inv, std::ostream& err)
{
	const auto started = std::chrono::steady_clock::now();
	json manifest = {{"subcommand", inv.subcommand},
	                 {"config_path", inv.configPath},
	                 {"build", build_info()},
	                 {"hardware", hardware_note()},
	                 {"started_utc", utc_now()}};
	int code = Success;
	try
	{
		ExperimentConfig cfg = load_config(inv.configPath);
		manifest["config"] = cfg.source;
		Runner runner(inv, std::move(cfg));
		try
		{
			runner.execute();
		}
		catch (...)
		{
			manifest.update(runner.manifest());
			throw;
		}
		manifest.update(runner.manifest());
		manifest["status"] = "ok";
	}
	catch (const ConfigError& e)
	{
		err << "config error: " << e.what() << '\n';
		manifest["status"] = "config_error";
		manifest["error"] = e.what();
		code = ConfigFailure;
	}
	catch (const NumericalError& e)
	{
		err << "numerical failure at step " << e.step() << ": " << e.what() << '\n';
		manifest["status"] = "numerical_failure";
		manifest["error"] = e.what();
		manifest["step"] = e.step();
		code = NumericalFailure;
	}
	catch (const DomainError& e)
	{
		err << "numerical failure: " << e.what() << '\n';
		manifest["status"] = "numerical_failure";
		manifest["error"] = e.what();
		code = NumericalFailure;
	}
	catch (const EvaluationError& e)
	{
		err << "numerical failure: " << e.what() << '\n';
		manifest["status"] = "numerical_failure";
		manifest["error"] = e.what();
		code = NumericalFailure;
	}
	catch (const std::exception& e)
	{
		err << "error: " << e.what() << '\n';
		manifest["status"] = "error";
		manifest["error"] = e.what();
		code = Failure;
	}
	manifest["finished_utc"] = utc_now();
	manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
	if (!inv.outDir.empty())
		write_manifest(inv.outDir, manifest);
	return code;
}

} // namespace emom::app
