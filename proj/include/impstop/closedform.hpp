#pragma once

#include <array>      // std::array
#include <functional> // std::function
#include <map>        // std::map
#include <stdexcept>  // std::runtime_error
#include <string>     // std::string
#include <utility>    // std::pair
#include <vector>     // std::vector

#include "impstop/model.hpp"

namespace impstop {

/// A bracketed root-find found no sign change, or the resulting free
/// boundaries are inconsistent.
struct FreeBoundaryError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

////////////////////////////////////////////////////////////////////////////////
// GBM controller-stopper game
////////////////////////////////////////////////////////////////////////////////

/// dX = alpha X ds + beta X dB. The controller (maximizing) takes xi out of
/// the state at cost kappa1 + (1 + lambda) xi and receives xi; the stopper
/// (minimizing) pays X - kappa2 on stopping.
struct Example1Params {
	double alpha = 0.02;
	double beta = 0.3;
	double delta = 0.1;
	double kappa1 = 1.7634998;
	double kappa2 = 0.5;
	double lambda = 2.;
	double T = 1.;

	void validate() const;
};

struct Example1Solution {
	Example1Params params;
	double c_plus = 0.;
	double c_minus = 0.;
	double a = 0.;
	double x_target = 0.;  // x_star: impulse target (smaller FOC root)
	double x_upper = 0.;   // x^star: larger FOC root
	double x_sharp = 0.;   // concavity switch of psi_0
	double x_hat = 0.;     // stop boundary
	double x_tilde = 0.;   // intervention boundary
	/// psi_0'(x_tilde) - 1/(1+lambda): zero iff the value is C^1 at x_tilde.
	double kink = 0.;

	double psi0(double x) const;
	double psi0_prime(double x) const;
};

std::pair<double, double> example1_exponents(double alpha, double beta,
		double delta);

struct RootOptions {
	/// Bits of precision requested from the bracketing solver.
	int digits = 52;
	int scan_points = 4000;
};

Example1Solution example1_solve(const Example1Params &params,
		const RootOptions &options = {});

/// e^{-delta s} psi(x). Throws std::domain_error for x <= 0.
double example1_value(const Example1Solution &sol, double s, double x);
double example1_value_prime(const Example1Solution &sol, double x);

/// (x - x_star - kappa1) / (1 + lambda); throws for x < x_tilde.
double example1_impulse(const Example1Solution &sol, double x);

/// Residuals of the free-boundary equations: value matching and smooth fit
/// at x_hat, continuity at x_tilde, and the target first-order condition.
struct Example1Residuals {
	double value_match_hat = 0.;
	double smooth_fit_hat = 0.;
	double continuity_tilde = 0.;
	double target_foc = 0.;
};
Example1Residuals example1_residuals(const Example1Solution &sol);

////////////////////////////////////////////////////////////////////////////////
// Investor liquidity-control problem
////////////////////////////////////////////////////////////////////////////////

struct JumpAtom {
	double gamma = 0.;     // proportional jump of the firm's liquidity
	double intensity = 0.; // nu_j
};

struct Example2Params {
	double e = 2.;         // expenditure rate
	double r = 0.1;        // return on capital
	double sigma_f = 0.3;  // firm volatility
	std::vector<JumpAtom> atoms;
	double sigma_I = 0.4;  // investor volatility
	double pi = 0.5;       // risky fraction
	double gamma_drift = 0.03; // (1 - pi) r0 + pi mu_R
	double delta = 0.05;
	double kappa_I = 0.1;
	double alpha_I = 1.;
	double g1 = 0.5;
	double g2 = 0.;
	double lambda_T = 1.;
	double T = 1.;

	void validate() const;
};

struct Example2Solution {
	Example2Params params;
	double k = 0.;
	double a = 0.;
	double omega_star = 0.;
	double mu_omega = 0.; // growth rate of omega = y1 y3 under theta-hat
	double d1 = 0.;
	double d2 = 0.;
	double c = 0.;
	double y_hat = 0.;
	double y_tilde = 0.;
	double theta0 = 0.;
	std::vector<double> theta1;
	double eta = 1.;
	double p_residual = 0.;
	double h_residual = 0.;
	std::array<double, 3> injection_residuals{0., 0., 0.};
	int fixed_point_iterations = 0;
	/// Stop side of the exit rule; true: exit once omega >= omega_star.
	bool exit_above = true;

	double wealth_cont(double y2) const; // c (y^d1 - y^d2)
	double wealth_value(double y2) const;
	double wealth_prime(double y2) const;
	double omega_cont(double omega) const; // a omega^k
	double omega_value(double omega) const;
	double exit_payoff(double omega) const; // g1 omega + lambda_T
	bool in_exit_region(double omega) const;
	/// psi per unit density: wealth_value(y2) + omega_value(omega).
	double reduced_value(double y2, double omega) const;
};

struct ExponentResult {
	double k = 0.;
	std::vector<double> theta1;
	double eta = 1.;
	double mu_omega = 0.;
	int iterations = 0;
	std::function<double(double)> p;
};

/// p(k) = -delta + (e r - sigma_f^2) k + k sum_j nu_j (theta1_j - gamma_j).
double example2_p(const Example2Params &params,
		const std::vector<double> &theta1, double k);

ExponentResult example2_exponent(const Example2Params &params);

struct Theta1Result {
	std::vector<double> theta1;
	double eta = 1.;
	double residual = 0.; // sum_j nu_j (Xi_j^k - 1)
};

Theta1Result example2_theta1(const std::vector<JumpAtom> &atoms, double k);

Example2Solution example2_solve(const Example2Params &params);

/// e^{-delta y0} y3 (wealth part + omega part) with omega = y1 y3.
double example2_value(const Example2Solution &sol, double y0, double y1,
		double y2, double y3);

/// Density update over one step with theta0 = sigma_f and jump kernel
/// theta1: q exp(-sigma_f dW - sigma_f^2 dt / 2 + sum_j nu_j theta1_j dt)
/// prod_{fired atoms} (1 - theta1_j).
double q_process_step(double q, double dt, double dW, double sigma_f,
		const std::vector<JumpAtom> &atoms, const std::vector<double> &theta1,
		const std::vector<int> &fired);

////////////////////////////////////////////////////////////////////////////////
// Serialization
////////////////////////////////////////////////////////////////////////////////

using Constants = std::vector<std::pair<std::string, double>>;

Constants to_constants(const Example1Solution &sol);
Constants to_constants(const Example2Solution &sol);

/// "name = value" per line, 17 significant digits.
std::string format_constants(const Constants &constants);
std::map<std::string, double> parse_constants(const std::string &text);

} // namespace impstop
