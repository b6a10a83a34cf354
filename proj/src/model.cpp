#include "impstop/model.hpp"

#include <algorithm> // std::min
#include <cmath>     // std::isfinite, std::exp
#include <fstream>   // std::ifstream
#include <random>    // std::mt19937_64
#include <sstream>   // std::ostringstream

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace impstop {

Sense parse_sense(const std::string &text) {
	if (text == "min" || text == "minimize")
		return Sense::minimize;
	if (text == "max" || text == "maximize")
		return Sense::maximize;
	throw SpecError("unknown optimization sense '" + text + "'");
}

const char *to_string(Sense sense) {
	return sense == Sense::minimize ? "minimize" : "maximize";
}

double LevyDiffusionSpec::total_intensity() const {
	double total = 0.;
	for (const auto &atom : levy_measure)
		total += atom.intensity;
	return total;
}

double PayoffSpec::G(double s, const Vec &x) const {
	return std::exp(-discount * s) * (bequest ? bequest(x) : 0.);
}

double PayoffSpec::f(double s, const Vec &x) const {
	return std::exp(-discount * s) * (running ? running(x) : 0.);
}

bool Box::contains(const Vec &x) const {
	for (std::size_t i = 0; i < x.size() && i < lo.size(); ++i)
		if (x[i] < lo[i] || x[i] > hi[i])
			return false;
	return true;
}

double GameSpec::impulse_cashflow(std::size_t player, const Vec &x,
		double z) const {
	const auto &payoff = payoffs.at(player);
	if (payoff.impulse_cashflow)
		return payoff.impulse_cashflow(x, z);
	const double c = intervention.cost ? intervention.cost(0., z) : 0.;
	return payoff.controller_sense == Sense::minimize ? c : -c;
}

bool ValidationReport::ok() const {
	for (const auto &check : checks)
		if (!check.pass)
			return false;
	return true;
}

std::string ValidationReport::to_text() const {
	std::ostringstream out;
	for (const auto &check : checks)
		out << (check.pass ? "PASS " : "FAIL ") << check.id << "  "
				<< check.description << "  " << check.detail << "\n";
	return out.str();
}

////////////////////////////////////////////////////////////////////////////////

namespace {

double norm(const Vec &x) {
	double s = 0.;
	for (double v : x)
		s += v * v;
	return std::sqrt(s);
}

double distance(const Vec &x, const Vec &y) {
	double s = 0.;
	for (std::size_t i = 0; i < x.size(); ++i)
		s += (x[i] - y[i]) * (x[i] - y[i]);
	return std::sqrt(s);
}

double frobenius_distance(const std::vector<Vec> &a, const std::vector<Vec> &b) {
	double s = 0.;
	for (std::size_t i = 0; i < a.size(); ++i)
		for (std::size_t j = 0; j < a[i].size(); ++j)
			s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
	return std::sqrt(s);
}

double frobenius(const std::vector<Vec> &a) {
	double s = 0.;
	for (const auto &row : a)
		for (double v : row)
			s += v * v;
	return std::sqrt(s);
}

void require_finite(const Vec &v, const char *what) {
	for (double x : v)
		if (!std::isfinite(x))
			throw SpecError(std::string("non-finite ") + what
					+ " coefficient");
}

std::string fmt_double(double x) {
	std::ostringstream out;
	out.precision(6);
	out << x;
	return out.str();
}

} // namespace

ValidationReport validate_spec(const GameSpec &spec,
		const ValidationOptions &options) {
	ValidationReport report;
	const auto &diffusion = spec.diffusion;
	const int p = diffusion.dimension;
	if (p < 1 || p > 4)
		throw SpecError("state dimension must be in 1..4");
	if ((int) spec.solvency.lo.size() != p || (int) spec.solvency.hi.size() != p)
		throw SpecError("solvency box dimension mismatch");
	if (spec.payoffs.empty() || spec.payoffs.size() > 2)
		throw SpecError("a game carries one (zero-sum) or two payoff specs");

	std::mt19937_64 rng(options.seed);
	auto sample_state = [&]() {
		Vec x(p);
		for (int i = 0; i < p; ++i) {
			// Unbounded sides are truncated to the sampling extent.
			std::uniform_real_distribution<double> u(
					std::max(spec.solvency.lo[i], -options.sample_extent),
					std::min(spec.solvency.hi[i], options.sample_extent));
			x[i] = u(rng);
		}
		return x;
	};

	// A.1: Lipschitz and linear growth of drift and volatility.
	double worst_mu = 0., worst_sigma = 0., growth_mu = 0., growth_sigma = 0.;
	for (int k = 0; k < options.samples; ++k) {
		const Vec x = sample_state(), y = sample_state();
		const Vec mx = diffusion.drift(0., x), my = diffusion.drift(0., y);
		const auto sx = diffusion.volatility(0., x);
		const auto sy = diffusion.volatility(0., y);
		require_finite(mx, "drift");
		require_finite(my, "drift");
		for (const auto &row : sx)
			require_finite(row, "volatility");
		const double d = distance(x, y);
		if (d > 0.) {
			worst_mu = std::max(worst_mu, distance(mx, my) / d);
			worst_sigma = std::max(worst_sigma, frobenius_distance(sx, sy) / d);
		}
		growth_mu = std::max(growth_mu, norm(mx) / (1. + norm(x)));
		growth_sigma = std::max(growth_sigma, frobenius(sx) / (1. + norm(x)));
	}
	report.checks.push_back({"A.1a", "drift Lipschitz on sampled pairs",
			worst_mu <= options.c_mu,
			"max ratio " + fmt_double(worst_mu) + " vs c_mu "
					+ fmt_double(options.c_mu)});
	report.checks.push_back({"A.1b", "volatility Lipschitz on sampled pairs",
			worst_sigma <= options.c_sigma,
			"max ratio " + fmt_double(worst_sigma) + " vs c_sigma "
					+ fmt_double(options.c_sigma)});
	report.checks.push_back({"A.1c", "linear growth of drift and volatility",
			growth_mu <= options.d_mu && growth_sigma <= options.d_sigma,
			"mu " + fmt_double(growth_mu) + ", sigma "
					+ fmt_double(growth_sigma)});

	// A.2: finite-activity Levy measure.
	bool intensities_ok = true;
	for (const auto &atom : diffusion.levy_measure) {
		if (!std::isfinite(atom.intensity) || !std::isfinite(atom.mark))
			throw SpecError("non-finite Levy atom");
		if (atom.intensity < 0.)
			intensities_ok = false;
		if (diffusion.jump_amplitude) {
			for (int k = 0; k < 16; ++k)
				require_finite(diffusion.jump_amplitude(sample_state(),
								atom.mark), "jump amplitude");
		}
	}
	report.checks.push_back({"A.2", "Levy intensities nonnegative and finite",
			intensities_ok,
			"total intensity " + fmt_double(diffusion.total_intensity())});

	// A.3 / A.4: intervention cost structure.
	const auto &iv = spec.intervention;
	if (iv.enabled && iv.cost) {
		const double T = diffusion.horizon;
		std::uniform_real_distribution<double> us(0., T);
		std::uniform_real_distribution<double> uz(iv.z_lo, iv.z_hi);
		bool monotone = true, subadditive = true;
		double infimum = std::min(iv.cost(T, iv.z_lo), iv.cost(0., iv.z_lo));
		for (int k = 0; k < options.samples; ++k) {
			double s = us(rng), s2 = us(rng);
			if (s > s2)
				std::swap(s, s2);
			const double z = uz(rng), z2 = uz(rng);
			const double c = iv.cost(s, z);
			if (!std::isfinite(c))
				throw SpecError("non-finite intervention cost");
			infimum = std::min(infimum, c);
			if (c < iv.cost(s2, z) - 1e-12 * (1. + std::abs(c)))
				monotone = false;
			if (z + z2 <= iv.z_hi
					&& iv.cost(s, z + z2) > c + iv.cost(s, z2) + 1e-12)
				subadditive = false;
		}
		report.checks.push_back({"A.3a", "cost nonincreasing in time",
				monotone, ""});
		report.checks.push_back({"A.3b", "cost subadditive in the impulse",
				subadditive, ""});
		const bool floor_ok = infimum > 0. && infimum >= iv.cost_floor
				- 1e-12 * std::abs(iv.cost_floor);
		report.checks.push_back({"A.4", "cost bounded below by lambda_c > 0",
				floor_ok, "lambda_c = " + fmt_double(infimum)});
	} else {
		report.checks.push_back({"A.3a", "cost nonincreasing in time", true,
				"no impulses"});
		report.checks.push_back({"A.3b", "cost subadditive in the impulse",
				true, "no impulses"});
		report.checks.push_back({"A.4", "cost bounded below by lambda_c > 0",
				true, "no impulses"});
	}

	// Payoff structure.
	bool discount_ok = true;
	for (const auto &payoff : spec.payoffs)
		if (!(payoff.discount > 0. && payoff.discount <= 1.))
			discount_ok = false;
	report.checks.push_back({"P.1", "discount in (0,1], G(s,x) -> 0",
			discount_ok, ""});
	if (spec.zero_sum()) {
		const auto &payoff = spec.payoffs.front();
		report.checks.push_back({"P.2", "zero-sum senses are opposite",
				payoff.controller_sense != payoff.stopper_sense
						|| !payoff.stopping_enabled || !iv.enabled,
				std::string(to_string(payoff.controller_sense)) + "/"
						+ to_string(payoff.stopper_sense)});
	}
	for (int k = 0; k < 64; ++k) {
		const Vec x = sample_state();
		for (const auto &payoff : spec.payoffs)
			if (!std::isfinite(payoff.G(0., x)) || !std::isfinite(payoff.f(0., x)))
				throw SpecError("non-finite payoff coefficient");
	}
	return report;
}

////////////////////////////////////////////////////////////////////////////////

ConfigError::ConfigError(const std::string &field_, const std::string &message)
		: std::runtime_error(field_ + ": " + message), field(field_) {}

Config Config::parse(const std::string &text) {
	std::istringstream in(text);
	boost::property_tree::ptree tree;
	try {
		boost::property_tree::ini_parser::read_ini(in, tree);
	} catch (const boost::property_tree::ini_parser_error &e) {
		throw ConfigError("line " + std::to_string(e.line()), e.message());
	}
	Config config;
	for (const auto &[section, body] : tree) {
		if (body.empty())
			throw ConfigError(section, "key outside of a section");
		for (const auto &[key, value] : body) {
			std::string v = value.get_value<std::string>();
			const auto hash = v.find('#');
			if (hash != std::string::npos)
				v.erase(hash);
			boost::algorithm::trim(v);
			config.sections_[section][key] = v;
		}
	}
	return config;
}

Config Config::load(const std::string &path) {
	boost::property_tree::ptree tree;
	std::ifstream in(path);
	if (!in)
		throw ConfigError(path, "cannot open config file");
	std::ostringstream buffer;
	buffer << in.rdbuf();
	return parse(buffer.str());
}

bool Config::has(const std::string &section, const std::string &key) const {
	const auto it = sections_.find(section);
	return it != sections_.end() && it->second.count(key);
}

std::string Config::get_string(const std::string &section,
		const std::string &key) const {
	if (!has(section, key))
		throw ConfigError(section + "." + key, "missing required field");
	return sections_.at(section).at(key);
}

std::string Config::get_string(const std::string &section,
		const std::string &key, const std::string &fallback) const {
	return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double Config::get_double(const std::string &section,
		const std::string &key) const {
	const std::string text = get_string(section, key);
	try {
		std::size_t used = 0;
		const double value = std::stod(text, &used);
		if (used != text.size())
			throw std::invalid_argument(text);
		return value;
	} catch (const std::exception &) {
		throw ConfigError(section + "." + key, "not a number: '" + text + "'");
	}
}

double Config::get_double(const std::string &section, const std::string &key,
		double fallback) const {
	return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string &section, const std::string &key,
		long long fallback) const {
	if (!has(section, key))
		return fallback;
	const double value = get_double(section, key);
	if (value != std::floor(value))
		throw ConfigError(section + "." + key, "expected an integer");
	return (long long) value;
}

std::vector<double> Config::get_list(const std::string &section,
		const std::string &key) const {
	std::vector<double> out;
	if (!has(section, key))
		return out;
	std::vector<std::string> parts;
	const std::string text = get_string(section, key);
	boost::algorithm::split(parts, text, boost::is_any_of(","));
	for (auto part : parts) {
		boost::algorithm::trim(part);
		if (part.empty())
			continue;
		try {
			out.push_back(std::stod(part));
		} catch (const std::exception &) {
			throw ConfigError(section + "." + key,
					"not a number list: '" + text + "'");
		}
	}
	return out;
}

} // namespace impstop
