#include "app/config.hpp"

#include "emom/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace emom::app
{

namespace
{

using json = nlohmann::json;

// Object view that remembers which keys were read, so leftovers can be reported.
class Node
{
public:
	Node(const json& j, std::string path) : _j(j), _path(std::move(path))
	{
		if (!_j.is_object())
			throw ConfigError(where() + ": expected an object");
	}

	bool has(const std::string& key) const { return _j.contains(key); }

	std::string child(const std::string& key) const { return _path.empty() ? key : _path + "." + key; }

	const json& raw(const std::string& key)
	{
		_used.insert(key);
		const auto it = _j.find(key);
		if (it == _j.end())
			throw ConfigError(child(key) + ": missing required key");
		return *it;
	}

	Node object(const std::string& key) { return Node(raw(key), child(key)); }

	double number(const std::string& key) { return as_number(raw(key), child(key)); }

	double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

	std::size_t count(const std::string& key) { return as_count(raw(key), child(key)); }

	std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

	bool flag(const std::string& key, bool fallback)
	{
		if (!has(key))
			return fallback;
		const json& v = raw(key);
		if (!v.is_boolean())
			throw ConfigError(child(key) + ": expected true or false");
		return v.get<bool>();
	}

	std::string text(const std::string& key, const std::string& fallback)
	{
		if (!has(key))
			return fallback;
		const json& v = raw(key);
		if (!v.is_string())
			throw ConfigError(child(key) + ": expected a string");
		return v.get<std::string>();
	}

	std::array<double, 2> pair(const std::string& key)
	{
		const json& v = raw(key);
		if (!v.is_array() || v.size() != 2)
			throw ConfigError(child(key) + ": expected an array of two numbers");
		return {as_number(v[0], child(key) + "[0]"), as_number(v[1], child(key) + "[1]")};
	}

	std::array<double, 2> pair(const std::string& key, std::array<double, 2> fallback)
	{
		return has(key) ? pair(key) : fallback;
	}

	std::array<std::size_t, 2> countPair(const std::string& key)
	{
		return as_count_pair(raw(key), child(key));
	}

	std::array<std::size_t, 2> countPair(const std::string& key, std::array<std::size_t, 2> fallback)
	{
		return has(key) ? countPair(key) : fallback;
	}

	const json& array(const std::string& key)
	{
		const json& v = raw(key);
		if (!v.is_array())
			throw ConfigError(child(key) + ": expected an array");
		return v;
	}

	void finish() const
	{
		for (auto it = _j.begin(); it != _j.end(); ++it)
		{
			if (!_used.contains(it.key()))
				throw ConfigError(child(it.key()) + ": unknown key");
		}
	}

	static double as_number(const json& v, const std::string& path)
	{
		if (!v.is_number())
			throw ConfigError(path + ": expected a number");
		const double d = v.get<double>();
		if (!std::isfinite(d))
			throw ConfigError(path + ": expected a finite number");
		return d;
	}

	static std::size_t as_count(const json& v, const std::string& path)
	{
		if (!v.is_number_integer() || v.get<long long>() < 1)
			throw ConfigError(path + ": expected a positive integer");
		return static_cast<std::size_t>(v.get<long long>());
	}

	static std::array<std::size_t, 2> as_count_pair(const json& v, const std::string& path)
	{
		if (!v.is_array() || v.size() != 2)
			throw ConfigError(path + ": expected an array of two positive integers");
		return {as_count(v[0], path + "[0]"), as_count(v[1], path + "[1]")};
	}

private:
	std::string where() const { return _path.empty() ? "config" : _path; }

	const json& _j;
	std::string _path;
	std::set<std::string> _used;
};

std::string indexed(const std::string& path, std::size_t i)
{
	return path + "[" + std::to_string(i) + "]";
}

void parse_process(Node n, ProcessConfig& p)
{
	p.reactorVolume = n.number("reactor_volume", p.reactorVolume);
	p.densities = n.pair("densities", p.densities);
	p.initialConcentrations = n.pair("initial_concentrations");
	p.minRadius = n.number("x_min", p.minRadius);
	p.horizon = n.number("horizon");
	p.units = n.text("units", p.units);
	n.finish();
	for (int i = 0; i < 2; ++i)
	{
		if (p.initialConcentrations[i] < 0.0)
			throw ConfigError(n.child("initial_concentrations") + ": concentrations must be nonnegative");
	}
	p.validate();
}

void parse_kinetics(Node n, KineticsConfig& k)
{
	k.law = n.text("law", k.law);
	k.coefficients = n.pair("coefficients");
	if (k.law == "power")
		k.powers = n.pair("powers");
	else if (k.law != "linear")
		throw ConfigError(n.child("law") + ": expected \"linear\" or \"power\"");
	k.exponent = n.number("exponent", k.exponent);
	k.allowNegativeRates = n.flag("allow_negative_rates", k.allowNegativeRates);
	n.finish();
	if (k.exponent == 1.0)
		throw ConfigError(n.child("exponent") + ": must differ from 1");
	if (!k.allowNegativeRates && (k.coefficients[0] < 0.0 || k.coefficients[1] < 0.0))
		throw ConfigError(n.child("coefficients") + ": negative rates require allow_negative_rates");
}

void parse_datum(Node n, InitialDatumConfig& d)
{
	d.kind = n.text("kind", d.kind);
	if (d.kind == "bump")
	{
		d.center = n.pair("center");
		d.halfWidths = n.pair("half_widths");
		d.amplitude = n.number("amplitude", d.amplitude);
		if (!(d.amplitude >= 0.0))
			throw ConfigError(n.child("amplitude") + ": must be nonnegative");
	}
	else if (d.kind == "dirac")
	{
		d.center = n.pair("location");
		d.number = n.number("number", d.number);
	}
	else
		throw ConfigError(n.child("kind") + ": expected \"bump\" or \"dirac\"");
	n.finish();
}

EmomLevel parse_level(Node n)
{
	EmomLevel l;
	l.timePoints = n.count("time_points");
	l.quadrature = n.countPair("quadrature");
	n.finish();
	if (l.timePoints < 2)
		throw ConfigError(n.child("time_points") + ": at least 2 time points");
	return l;
}

void parse_grids(Node n, GridsConfig& g)
{
	g.timePoints = n.count("time_points", g.timePoints);
	g.quadrature = n.countPair("quadrature", g.quadrature);
	const std::string rule = n.text("rule", "midpoint");
	if (rule == "midpoint")
		g.rule = QuadratureRule::Midpoint;
	else if (rule == "gauss_legendre")
		g.rule = QuadratureRule::GaussLegendre;
	else
		throw ConfigError(n.child("rule") + ": expected \"midpoint\" or \"gauss_legendre\"");

	if (n.has("snapshot"))
	{
		Node s = n.object("snapshot");
		g.snapshot.resolution = s.countPair("resolution", g.snapshot.resolution);
		if (s.has("indices"))
		{
			const auto& a = s.array("indices");
			for (std::size_t i = 0; i < a.size(); ++i)
			{
				const std::string p = indexed(s.child("indices"), i);
				if (!a[i].is_number_integer() || a[i].get<long long>() < 0)
					throw ConfigError(p + ": expected a nonnegative integer");
				g.snapshot.indices.push_back(static_cast<std::size_t>(a[i].get<long long>()));
			}
		}
		g.snapshot.margin = s.number("margin", g.snapshot.margin);
		s.finish();
	}

	if (n.has("fvm"))
	{
		Node f = n.object("fvm");
		const auto cells = f.countPair("cells", {g.fvm.cellsRadius, g.fvm.cellsComposition});
		g.fvm.cellsRadius = cells[0];
		g.fvm.cellsComposition = cells[1];
		g.fvm.cfl = f.number("cfl", g.fvm.cfl);
		if (!(g.fvm.cfl > 0.0 && g.fvm.cfl <= 1.0))
			throw ConfigError(f.child("cfl") + ": must lie in (0, 1]");
		const std::string scheme = f.text("scheme", "forward_euler");
		if (scheme == "forward_euler")
			g.fvm.scheme = FvmScheme::ForwardEuler;
		else if (scheme == "lax_wendroff")
			g.fvm.scheme = FvmScheme::LaxWendroff;
		else
			throw ConfigError(f.child("scheme") + ": expected \"forward_euler\" or \"lax_wendroff\"");
		if (f.has("max_radius"))
			g.fvm.maxRadius = f.number("max_radius");
		f.finish();
	}

	if (n.has("reference"))
		g.reference = parse_level(n.object("reference"));

	if (n.has("ladder"))
	{
		Node l = n.object("ladder");
		if (l.has("time_points"))
		{
			const auto& a = l.array("time_points");
			for (std::size_t i = 0; i < a.size(); ++i)
				g.timeLadder.push_back(Node::as_count(a[i], indexed(l.child("time_points"), i)));
		}
		if (l.has("emom"))
		{
			const auto& a = l.array("emom");
			for (std::size_t i = 0; i < a.size(); ++i)
				g.emomLadder.push_back(parse_level(Node(a[i], indexed(l.child("emom"), i))));
		}
		if (l.has("fvm"))
		{
			const auto& a = l.array("fvm");
			for (std::size_t i = 0; i < a.size(); ++i)
				g.fvmLadder.push_back(Node::as_count_pair(a[i], indexed(l.child("fvm"), i)));
		}
		l.finish();
	}
	n.finish();
}

void parse_run(Node n, RunSettings& r)
{
	if (n.has("threads"))
		r.threads = static_cast<int>(n.count("threads"));
	r.reproducible = n.flag("reproducible", r.reproducible);
	r.compensatedSum = n.flag("compensated_sum", r.compensatedSum);
	const std::string policy = n.text("negative_policy", "clamp");
	if (policy == "clamp")
		r.negativePolicy = NegativeConcentrationPolicy::Clamp;
	else if (policy == "abort")
		r.negativePolicy = NegativeConcentrationPolicy::Abort;
	else
		throw ConfigError(n.child("negative_policy") + ": expected \"clamp\" or \"abort\"");
	if (n.has("repetitions"))
		r.repetitions = static_cast<int>(n.count("repetitions"));
	if (n.has("seed"))
		r.seed = n.pair("seed");
	r.interpolate = n.flag("interpolate", r.interpolate);
	n.finish();
}

} // namespace

GrowthLaw KineticsConfig::build() const
{
	if (law == "power")
		return GrowthLaw::power(coefficients[0], powers[0], coefficients[1], powers[1], exponent);
	return GrowthLaw::linear(coefficients[0], coefficients[1], exponent);
}

InitialDensity InitialDatumConfig::build() const
{
	if (kind == "dirac")
		return InitialDensity::dirac({center[0], center[1]}, number);
	return InitialDensity::bump({center[0], center[1]}, halfWidths, amplitude);
}

SolverOptions RunSettings::solverOptions(bool allowNegativeRates) const
{
	SolverOptions o;
	o.negativePolicy = negativePolicy;
	o.allowNegativeRates = allowNegativeRates;
	o.compensatedSum = compensatedSum;
	o.threads = threads;
	return o;
}

ExperimentConfig parse_config(const nlohmann::json& j)
{
	ExperimentConfig c;
	c.source = j;
	Node root(j, "");
	parse_process(root.object("process"), c.process);
	parse_kinetics(root.object("kinetics"), c.kinetics);
	parse_datum(root.object("initial_datum"), c.initialDatum);
	if (root.has("grids"))
		parse_grids(root.object("grids"), c.grids);
	if (root.has("run"))
		parse_run(root.object("run"), c.run);
	root.finish();

	// Catch support and radius problems here so they surface as configuration errors.
	c.initialDatum.build().validate(c.process.minRadius);
	c.kinetics.build();
	return c;
}

ExperimentConfig parse_config_text(const std::string& text)
{
	nlohmann::json j;
	try
	{
		j = nlohmann::json::parse(text);
	}
	catch (const nlohmann::json::parse_error& e)
	{
		throw ConfigError(std::string("config is not valid JSON: ") + e.what());
	}
	return parse_config(j);
}

ExperimentConfig load_config(const std::string& path)
{
	std::ifstream f(path);
	if (!f)
		throw ConfigError("cannot read config file " + path);
	std::ostringstream s;
	s << f.rdbuf();
	return parse_config_text(s.str());
}

} // namespace emom::app
