#pragma once

#include <cstdint>    // std::uint64_t
#include <functional> // std::function
#include <map>        // std::map
#include <stdexcept>  // std::runtime_error
#include <string>     // std::string
#include <vector>     // std::vector

namespace impstop {

/// State vector (dimension p <= 4).
using Vec = std::vector<double>;

enum class Sense { minimize, maximize };

Sense parse_sense(const std::string &text);
const char *to_string(Sense sense);

/// One atom (z_j, nu_j) of a finite-activity Levy measure.
struct LevyAtom {
	double mark = 0.;
	double intensity = 0.;
};

/// Coefficients of the controlled jump-diffusion
///   dX = mu(s,X) ds + sigma(s,X) dB + int gamma(X,z) Ntilde(ds,dz).
struct LevyDiffusionSpec {
	int dimension = 1;
	int noise_dimension = 1;
	std::function<Vec(double, const Vec &)> drift;
	/// p x m matrix stored row-major as p rows.
	std::function<std::vector<Vec>(double, const Vec &)> volatility;
	std::function<Vec(const Vec &, double)> jump_amplitude;
	std::vector<LevyAtom> levy_measure;
	double horizon = 1.;

	/// Geometric dynamics: component i follows
	///   dX_i = a_i X_i ds + b_i X_i dB_i + (jumps)
	/// which allows exact exponential stepping in the simulator.
	bool geometric = false;
	Vec geometric_drift;
	Vec geometric_volatility;

	double total_intensity() const;
};

/// Impulse set [z_lo, z_hi], response Gamma and cost c(s, z) >= lambda_c.
struct InterventionSpec {
	bool enabled = true;
	double z_lo = 0.;
	double z_hi = 0.;
	std::function<Vec(const Vec &, double)> response;
	/// Cost of an impulse of size z at time s; checked against the standing
	/// assumptions (monotone in time, subadditive, bounded below).
	std::function<double(double, double)> cost;
	double cost_floor = 0.;
};

/// Payoff of one player. Running cost f and bequest G are the stationary
/// parts: the time-s values are e^{-delta s} f(x) and e^{-delta s} G(x).
struct PayoffSpec {
	std::function<double(const Vec &)> running;
	std::function<double(const Vec &)> bequest;
	/// Undiscounted amount added to this player's payoff at each impulse of
	/// size z. When empty, a minimizing controller pays +c(0,z) and a
	/// maximizing controller receives -c(0,z).
	std::function<double(const Vec &, double)> impulse_cashflow;
	double discount = 0.1;
	Sense controller_sense = Sense::maximize;
	Sense stopper_sense = Sense::minimize;
	bool stopping_enabled = true;

	double G(double s, const Vec &x) const;
	double f(double s, const Vec &x) const;
};

/// Axis-aligned box in state space.
struct Box {
	Vec lo;
	Vec hi;
	bool contains(const Vec &x) const;
};

struct GameSpec {
	LevyDiffusionSpec diffusion;
	InterventionSpec intervention;
	/// One entry: zero-sum. Two entries: non-zero-sum (player 1 controls,
	/// player 2 stops).
	std::vector<PayoffSpec> payoffs;
	Box solvency;

	bool zero_sum() const { return payoffs.size() == 1; }
	const PayoffSpec &controller_payoff() const { return payoffs.front(); }
	const PayoffSpec &stopper_payoff() const { return payoffs.back(); }

	/// Cash flow credited to payoff `player` for an impulse z at state x.
	double impulse_cashflow(std::size_t player, const Vec &x, double z) const;
};

/// Hard error: non-finite coefficients or malformed specification.
struct SpecError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct AssumptionCheck {
	std::string id;
	std::string description;
	bool pass = true;
	std::string detail;
};

struct ValidationReport {
	std::vector<AssumptionCheck> checks;
	bool ok() const;
	std::string to_text() const;
};

struct ValidationOptions {
	int samples = 10000;
	std::uint64_t seed = 7;
	/// Lipschitz and growth constants: |mu(x)-mu(y)| <= c_mu |x-y|,
	/// |mu(x)| <= d_mu (1+|x|), likewise for sigma.
	double c_mu = 10.;
	double c_sigma = 10.;
	double d_mu = 10.;
	double d_sigma = 10.;
	/// States are sampled from the solvency box intersected with
	/// [-sample_extent, sample_extent] per coordinate.
	double sample_extent = 100.;
};

/// Sampled checks of the standing assumptions. Throws SpecError when a
/// coefficient evaluates to a non-finite number.
ValidationReport validate_spec(const GameSpec &spec,
		const ValidationOptions &options = {});

/// Sectioned key-value document:
///   [section]
///   key = value      ; comment
class Config {
public:
	static Config load(const std::string &path);
	static Config parse(const std::string &text);

	bool has(const std::string &section, const std::string &key) const;
	std::string get_string(const std::string &section,
			const std::string &key) const;
	std::string get_string(const std::string &section,
			const std::string &key, const std::string &fallback) const;
	double get_double(const std::string &section,
			const std::string &key) const;
	double get_double(const std::string &section, const std::string &key,
			double fallback) const;
	long long get_int(const std::string &section, const std::string &key,
			long long fallback) const;
	std::vector<double> get_list(const std::string &section,
			const std::string &key) const;

	const std::map<std::string, std::map<std::string, std::string>> &
	sections() const {
		return sections_;
	}

private:
	std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Config schema violation; `field` is the "section.key" path.
struct ConfigError : std::runtime_error {
	ConfigError(const std::string &field, const std::string &message);
	std::string field;
};

} // namespace impstop
