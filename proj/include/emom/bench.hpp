/**
 * @file
 * Error norms between concentration paths, log-log slope fits, wall-clock timing and CSV I/O.
 */

#ifndef EMOM_BENCH_HPP_
#define EMOM_BENCH_HPP_

#include "emom/errors.hpp"
#include "emom/model.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace emom
{

struct ErrorNorms
{
	std::array<double, 2> linf{0.0, 0.0};
	std::array<double, 2> l2{0.0, 0.0};

	/// Largest componentwise L-infinity error.
	double maxLinf() const { return std::max(linf[0], linf[1]); }
	/// Euclidean combination of the componentwise L2 errors.
	double combinedL2() const { return std::hypot(l2[0], l2[1]); }
};

/**
 * @brief Errors of @p path against @p reference, measured on the grid of @p path
 * @details L-infinity is the maximum over the grid of @p path. L2 is the square root of the
 *          trapezoidal time integral of the squared difference. Without @p interpolate every
 *          time of @p path must also be a time of @p reference (up to 1e-9 of the horizon).
 *          With it, the reference is interpolated linearly.
 * @throws DomainError on empty paths or incompatible grids
 */
inline ErrorNorms error_norms(const ConcentrationPath& path, const ConcentrationPath& reference, bool interpolate = false)
{
	if (path.size() == 0 || reference.size() == 0 || path.values.size() != path.size() ||
	    reference.values.size() != reference.size())
		throw DomainError("error_norms: empty or malformed path");
	const double span = std::max(std::abs(reference.times.back() - reference.times.front()), 1.0);
	const double tol = 1e-9 * span;
	if (path.times.front() < reference.times.front() - tol || path.times.back() > reference.times.back() + tol)
		throw DomainError("error_norms: path extends beyond the reference grid");

	std::vector<std::array<double, 2>> diff(path.size());
	std::size_t cursor = 0;
	for (std::size_t k = 0; k < path.size(); ++k)
	{
		const double t = path.time(k);
		ConcentrationPair ref{};
		if (interpolate)
			ref = reference.interpolate(t);
		else
		{
			while (cursor < reference.size() && reference.time(cursor) < t - tol)
				++cursor;
			if (cursor == reference.size() || std::abs(reference.time(cursor) - t) > tol)
				throw DomainError("error_norms: reference grid does not refine the path grid");
			ref = reference.at(cursor);
		}
		diff[k] = {path.at(k)[0] - ref[0], path.at(k)[1] - ref[1]};
	}

	ErrorNorms e;
	for (int i = 0; i < 2; ++i)
	{
		double integral = 0.0;
		for (std::size_t k = 0; k < path.size(); ++k)
		{
			e.linf[i] = std::max(e.linf[i], std::abs(diff[k][i]));
			if (k > 0)
				integral += 0.5 * (path.time(k) - path.time(k - 1)) * (diff[k][i] * diff[k][i] + diff[k - 1][i] * diff[k - 1][i]);
		}
		e.l2[i] = std::sqrt(integral);
	}
	return e;
}

struct SlopeFit
{
	double slope = 0.0;
	double intercept = 0.0;
	/// Standard error of the slope.
	double stderror = 0.0;
	/// 95% confidence interval of the slope.
	double lower = 0.0;
	double upper = 0.0;
	std::size_t points = 0;
};

/**
 * @brief Least-squares line through (log10 x, log10 y)
 * @throws DomainError for fewer than 3 points, nonpositive values or no spread in x
 */
inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points)
{
	const std::size_t n = points.size();
	if (n < 3)
		throw DomainError("fit_slope: at least 3 points required");
	std::vector<double> x(n), y(n);
	for (std::size_t i = 0; i < n; ++i)
	{
		if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
			throw DomainError("fit_slope: values must be positive");
		x[i] = std::log10(points[i].first);
		y[i] = std::log10(points[i].second);
	}
	double mx = 0.0, my = 0.0;
	for (std::size_t i = 0; i < n; ++i)
	{
		mx += x[i];
		my += y[i];
	}
	mx /= static_cast<double>(n);
	my /= static_cast<double>(n);
	double sxx = 0.0, sxy = 0.0;
	for (std::size_t i = 0; i < n; ++i)
	{
		sxx += (x[i] - mx) * (x[i] - mx);
		sxy += (x[i] - mx) * (y[i] - my);
	}
	if (!(sxx > 1e-24 * static_cast<double>(n)))
		throw DomainError("fit_slope: degenerate spread in x");

	SlopeFit f;
	f.points = n;
	f.slope = sxy / sxx;
	f.intercept = my - f.slope * mx;
	double ssr = 0.0;
	for (std::size_t i = 0; i < n; ++i)
	{
		const double r = y[i] - (f.intercept + f.slope * x[i]);
		ssr += r * r;
	}
	const double dof = static_cast<double>(n - 2);
	f.stderror = dof > 0 ? std::sqrt(ssr / dof / sxx) : 0.0;
	const double q = boost::math::quantile(boost::math::students_t(std::max(dof, 1.0)), 0.975);
	f.lower = f.slope - q * f.stderror;
	f.upper = f.slope + q * f.stderror;
	return f;
}

struct MatchedComparison
{
	/// Points of the second ladder whose DoF lies inside the DoF range of the first.
	std::size_t matched = 0;
	/// Matched points where the first ladder's error is not lower.
	std::size_t violations = 0;
	/// Largest ratio error_first / error_second over matched points.
	double worstRatio = 0.0;
};

/**
 * @brief Compare two (DoF, error) ladders at the DoF values of @p second
 * @details The error of @p first is interpolated linearly in log-log coordinates.
 */
inline MatchedComparison compare_at_matched_dof(std::vector<std::pair<double, double>> first,
                                                const std::vector<std::pair<double, double>>& second)
{
	if (first.size() < 2)
		throw DomainError("compare_at_matched_dof: first ladder needs at least 2 points");
	std::sort(first.begin(), first.end());
	MatchedComparison m;
	for (const auto& [dof, err] : second)
	{
		if (dof < first.front().first || dof > first.back().first)
			continue;
		auto hi = std::lower_bound(first.begin(), first.end(), std::make_pair(dof, -1.0));
		if (hi == first.begin())
			++hi;
		const auto lo = hi - 1;
		const double s = (std::log(dof) - std::log(lo->first)) / (std::log(hi->first) - std::log(lo->first));
		const double e = std::exp(std::log(lo->second) + s * (std::log(hi->second) - std::log(lo->second)));
		++m.matched;
		const double ratio = e / err;
		m.worstRatio = std::max(m.worstRatio, ratio);
		if (!(ratio < 1.0))
			++m.violations;
	}
	return m;
}

/// Median wall-clock seconds of @p repetitions calls of @p fn.
inline double median_seconds(const std::function<void()>& fn, int repetitions = 3)
{
	if (repetitions < 1)
		throw DomainError("median_seconds: at least one repetition");
	std::vector<double> t;
	for (int r = 0; r < repetitions; ++r)
	{
		const auto start = std::chrono::steady_clock::now();
		fn();
		t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
	}
	std::sort(t.begin(), t.end());
	return t[t.size() / 2];
}

/// Shortest decimal form with 17 significant digits; round-trips through strtod.
inline std::string format_double(double v)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

/// Header plus rows of text cells. Numeric cells are written with format_double.
struct CsvTable
{
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;

	void add(std::vector<std::string> row)
	{
		if (row.size() != header.size())
			throw DomainError("csv row width differs from header");
		rows.push_back(std::move(row));
	}

	void add(const std::vector<double>& row)
	{
		std::vector<std::string> cells;
		cells.reserve(row.size());
		for (double v : row)
			cells.push_back(format_double(v));
		add(std::move(cells));
	}

	std::size_t column(const std::string& name) const
	{
		const auto it = std::find(header.begin(), header.end(), name);
		if (it == header.end())
			throw DomainError("csv column not found: " + name);
		return static_cast<std::size_t>(it - header.begin());
	}

	double number(std::size_t row, std::size_t col) const
	{
		const std::string& s = rows.at(row).at(col);
		char* end = nullptr;
		const double v = std::strtod(s.c_str(), &end);
		if (s.empty() || end != s.c_str() + s.size())
			throw DomainError("csv cell is not a number: " + s);
		return v;
	}
};

inline std::string to_csv(const CsvTable& table)
{
	std::ostringstream out;
	auto line = [&out](const std::vector<std::string>& cells) {
		for (std::size_t i = 0; i < cells.size(); ++i)
			out << (i ? "," : "") << cells[i];
		out << '\n';
	};
	line(table.header);
	for (const auto& r : table.rows)
		line(r);
	return out.str();
}

inline void write_csv(const std::string& path, const CsvTable& table)
{
	std::ofstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot open " + path + " for writing");
	f << to_csv(table);
	if (!f)
		throw std::runtime_error("failed writing " + path);
}

/// Comma-separated cells, no quoting.
inline CsvTable parse_csv(const std::string& text)
{
	CsvTable t;
	std::istringstream in(text);
	std::string line;
	bool first = true;
	while (std::getline(in, line))
	{
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		if (line.empty())
			continue;
		std::vector<std::string> cells;
		std::string cell;
		std::istringstream ls(line);
		while (std::getline(ls, cell, ','))
			cells.push_back(cell);
		if (line.back() == ',')
			cells.emplace_back();
		if (first)
		{
			t.header = std::move(cells);
			first = false;
		}
		else
			t.add(std::move(cells));
	}
	return t;
}

inline CsvTable read_csv(const std::string& path)
{
	std::ifstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot open " + path);
	std::ostringstream s;
	s << f.rdbuf();
	return parse_csv(s.str());
}

inline CsvTable concentration_table(const ConcentrationPath& path)
{
	CsvTable t{{"t", "c1", "c2"}, {}};
	for (std::size_t k = 0; k < path.size(); ++k)
		t.add(std::vector<double>{path.time(k), path.at(k)[0], path.at(k)[1]});
	return t;
}

inline ConcentrationPath concentration_path(const CsvTable& t)
{
	ConcentrationPath p;
	const std::size_t ct = t.column("t"), c1 = t.column("c1"), c2 = t.column("c2");
	for (std::size_t r = 0; r < t.rows.size(); ++r)
	{
		p.times.push_back(t.number(r, ct));
		p.values.push_back({t.number(r, c1), t.number(r, c2)});
	}
	return p;
}

} // namespace emom

#endif // EMOM_BENCH_HPP_
