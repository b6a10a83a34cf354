#include "impstop/closedform.hpp"

#include <cmath>     // std::pow, std::sqrt, std::log, std::exp
#include <limits>    // std::numeric_limits
#include <sstream>   // std::istringstream

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace impstop {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

/// Bracketed root of f on [a, b]; f(a) and f(b) must differ in sign.
template <class F>
double bracketed_root(F f, double a, double b, int digits,
		const std::string &what) {
	double fa = f(a), fb = f(b);
	if (fa == 0.)
		return a;
	if (fb == 0.)
		return b;
	if ((fa > 0.) == (fb > 0.))
		throw FreeBoundaryError(what + ": no sign change on [" + num(a) + ", "
				+ num(b) + "]");
	std::uintmax_t max_iter = 500;
	const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
			boost::math::tools::eps_tolerance<double>(digits), max_iter);
	// Return the endpoint with the smaller residual.
	return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

/// First sign change of f on a log-spaced scan of [lo, hi].
template <class F>
double scan_root(F f, double lo, double hi, int points, int digits,
		const std::string &what) {
	const double la = std::log(lo), lb = std::log(hi);
	double prev_x = lo, prev_f = f(lo);
	for (int k = 1; k < points; ++k) {
		const double x = std::exp(la + (lb - la) * k / (points - 1));
		const double fx = f(x);
		if (std::isfinite(prev_f) && std::isfinite(fx)
				&& (prev_f == 0. || (prev_f > 0.) != (fx > 0.)))
			return bracketed_root(f, prev_x, x, digits, what);
		prev_x = x;
		prev_f = fx;
	}
	throw FreeBoundaryError(what + ": no sign change on the scanned interval ["
			+ num(lo) + ", " + num(hi) + "]");
}

} // namespace

////////////////////////////////////////////////////////////////////////////////
// GBM controller-stopper game
////////////////////////////////////////////////////////////////////////////////

void Example1Params::validate() const {
	if (!(alpha > 0. && beta > 0. && delta > 0. && kappa1 > 0. && kappa2 > 0.
				&& lambda > 0. && T > 0.))
		throw SpecError("example parameters must be positive "
				"(alpha, beta, delta, kappa1, kappa2, lambda, T)");
}

double Example1Solution::psi0(double x) const {
	return a * (std::pow(x, c_plus) - std::pow(x, c_minus));
}

double Example1Solution::psi0_prime(double x) const {
	return a * (c_plus * std::pow(x, c_plus - 1.)
			- c_minus * std::pow(x, c_minus - 1.));
}

std::pair<double, double> example1_exponents(double alpha, double beta,
		double delta) {
	if (!(beta > 0.) || !(delta > 0.))
		throw SpecError("exponents need beta > 0 and delta > 0");
	// Roots of (beta^2/2) c^2 + (alpha - beta^2/2) c - delta = 0. The root
	// without cancellation is computed directly, the other from the product.
	const double b2 = beta * beta;
	const double A = alpha - 0.5 * b2;
	const double D = std::sqrt(A * A + 2. * b2 * delta);
	double c_plus, c_minus;
	if (A > 0.) {
		c_minus = (-A - D) / b2;
		c_plus = -2. * delta / (b2 * c_minus);
	} else {
		c_plus = (-A + D) / b2;
		c_minus = -2. * delta / (b2 * c_plus);
	}
	return {c_plus, c_minus};
}

Example1Solution example1_solve(const Example1Params &p,
		const RootOptions &options) {
	p.validate();
	Example1Solution sol;
	sol.params = p;
	std::tie(sol.c_plus, sol.c_minus) = example1_exponents(p.alpha, p.beta,
			p.delta);
	const double cp = sol.c_plus, cm = sol.c_minus;

	// Stop boundary: value matching a (x^c+ - x^c-) = x - kappa2 and smooth
	// fit a (c+ x^{c+-1} - c- x^{c--1}) = 1 with a eliminated.
	auto smooth_fit = [&](double x) {
		return (1. - cm) * std::pow(x, cm) - (1. - cp) * std::pow(x, cp)
				- p.kappa2 * (cp * std::pow(x, cp - 1.) - cm * std::pow(x, cm - 1.));
	};
	sol.x_hat = scan_root(smooth_fit, 1e-6 * p.kappa2, 1e3 * p.kappa2,
			options.scan_points, options.digits, "x_hat (smooth fit)");
	sol.a = p.kappa2 / ((1. - cm) * std::pow(sol.x_hat, cm)
			- (1. - cp) * std::pow(sol.x_hat, cp));
	if (!(sol.a > 0.) || !std::isfinite(sol.a))
		throw FreeBoundaryError("x_hat: scale constant a = " + num(sol.a)
				+ " is not positive");

	// Concavity switch of psi_0 and the two roots of psi_0' = 1/(1+lambda).
	if (!(cp > 1.))
		throw FreeBoundaryError("x_sharp: psi_0 has no concavity switch (c_+ = "
				+ num(cp) + " <= 1)");
	sol.x_sharp = std::pow(cm * (cm - 1.) / (cp * (cp - 1.)), 1. / (cp - cm));
	if (sol.x_hat >= sol.x_sharp)
		throw FreeBoundaryError("inconsistent free boundaries: x_hat = "
				+ num(sol.x_hat) + " >= x_sharp = " + num(sol.x_sharp)
				+ ", so x_star has no bracket on [x_hat, x_sharp]");
	const double t = 1. / (1. + p.lambda);
	auto foc = [&](double x) { return sol.psi0_prime(x) - t; };
	sol.x_target = bracketed_root(foc, sol.x_hat, sol.x_sharp, options.digits,
			"x_star (first-order condition on [x_hat, x_sharp])");
	double upper = 2. * sol.x_sharp;
	while (foc(upper) < 0. && upper < 1e12)
		upper *= 2.;
	sol.x_upper = bracketed_root(foc, sol.x_sharp, upper, options.digits,
			"x^star (first-order condition on [x_sharp, inf))");

	// Intervention boundary: continuity at x_tilde,
	//   m(x) = x - x_star - kappa1 - (1+lambda)(psi_0(x) - psi_0(x_star)).
	// m increases up to x^star and decreases after, so [x_star + kappa1,
	// x^star] brackets the root whenever one exists.
	const double psi_target = sol.psi0(sol.x_target);
	auto m = [&](double x) {
		return x - sol.x_target - p.kappa1 - (1. + p.lambda)
				* (sol.psi0(x) - psi_target);
	};
	const double lo = sol.x_target + p.kappa1;
	if (lo >= sol.x_upper || m(sol.x_upper) < 0.)
		throw FreeBoundaryError("x_tilde: no sign change of m on ["
				+ num(lo) + ", " + num(sol.x_upper)
				+ "] (fixed cost kappa1 too large for an interior threshold)");
	sol.x_tilde = bracketed_root(m, lo, sol.x_upper, options.digits,
			"x_tilde (continuity)");

	if (!(sol.x_hat < sol.x_tilde) || !(sol.x_target < sol.x_tilde))
		throw FreeBoundaryError("inconsistent free boundaries: x_hat = "
				+ num(sol.x_hat) + ", x_star = " + num(sol.x_target)
				+ ", x_tilde = " + num(sol.x_tilde));
	sol.kink = sol.psi0_prime(sol.x_tilde) - t;
	return sol;
}

double example1_value(const Example1Solution &sol, double s, double x) {
	if (!(x > 0.))
		throw std::domain_error("example1_value: state must be positive");
	const auto &p = sol.params;
	double psi;
	if (x <= sol.x_hat)
		psi = x - p.kappa2;
	else if (x < sol.x_tilde)
		psi = sol.psi0(x);
	else
		psi = sol.psi0(sol.x_target) + (x - sol.x_target - p.kappa1)
				/ (1. + p.lambda);
	return std::exp(-p.delta * s) * psi;
}

double example1_value_prime(const Example1Solution &sol, double x) {
	if (!(x > 0.))
		throw std::domain_error("example1_value_prime: state must be positive");
	if (x <= sol.x_hat)
		return 1.;
	if (x < sol.x_tilde)
		return sol.psi0_prime(x);
	return 1. / (1. + sol.params.lambda);
}

double example1_impulse(const Example1Solution &sol, double x) {
	if (x < sol.x_tilde)
		throw std::domain_error("example1_impulse: not in intervention region");
	return (x - sol.x_target - sol.params.kappa1) / (1. + sol.params.lambda);
}

Example1Residuals example1_residuals(const Example1Solution &sol) {
	const auto &p = sol.params;
	Example1Residuals r;
	r.value_match_hat = sol.psi0(sol.x_hat) - (sol.x_hat - p.kappa2);
	r.smooth_fit_hat = sol.psi0_prime(sol.x_hat) - 1.;
	r.continuity_tilde = sol.psi0(sol.x_tilde) - (sol.psi0(sol.x_target)
			+ (sol.x_tilde - sol.x_target - p.kappa1) / (1. + p.lambda));
	r.target_foc = sol.psi0_prime(sol.x_target) - 1. / (1. + p.lambda);
	return r;
}

////////////////////////////////////////////////////////////////////////////////
// Investor liquidity-control problem
////////////////////////////////////////////////////////////////////////////////

void Example2Params::validate() const {
	if (!(e > 0. && r > 0. && sigma_f > 0. && sigma_I > 0. && pi > 0.))
		throw SpecError("e, r, sigma_f, sigma_I and pi must be positive");
	if (!(delta > 0. && delta <= 1.))
		throw SpecError("discount delta must lie in (0, 1]");
	if (!(kappa_I > 0. && alpha_I > 0. && lambda_T > 0.))
		throw SpecError("kappa_I, alpha_I and lambda_T must be positive");
	if (!(g1 > 0. && g1 <= 1.))
		throw SpecError("exit fraction g1 must lie in (0, 1]");
	bool jumps = false;
	for (const auto &atom : atoms) {
		if (!(1. + atom.gamma > 0.))
			throw SpecError("jump atoms need 1 + gamma > 0");
		if (atom.intensity < 0.)
			throw SpecError("jump intensities must be nonnegative");
		jumps = jumps || atom.intensity > 0.;
	}
	if (jumps && !(e * r > sigma_f * sigma_f))
		throw SpecError("jump case needs e > (r / sigma_f^2)^{-1}");
}

double Example2Solution::wealth_cont(double y) const {
	return c * (std::pow(y, d1) - std::pow(y, d2));
}

double Example2Solution::wealth_value(double y) const {
	if (y >= y_tilde)
		return wealth_cont(y_hat) - (params.kappa_I + params.alpha_I
				* (y_hat - y));
	return wealth_cont(y);
}

double Example2Solution::wealth_prime(double y) const {
	if (y >= y_tilde)
		return params.alpha_I;
	return c * (d1 * std::pow(y, d1 - 1.) - d2 * std::pow(y, d2 - 1.));
}

double Example2Solution::omega_cont(double omega) const {
	return a * std::pow(omega, k);
}

double Example2Solution::exit_payoff(double omega) const {
	return params.g1 * omega + params.lambda_T;
}

bool Example2Solution::in_exit_region(double omega) const {
	return exit_above ? omega >= omega_star : omega <= omega_star;
}

double Example2Solution::omega_value(double omega) const {
	return in_exit_region(omega) ? exit_payoff(omega) : omega_cont(omega);
}

double Example2Solution::reduced_value(double y2, double omega) const {
	return wealth_value(y2) + omega_value(omega);
}

double example2_p(const Example2Params &params,
		const std::vector<double> &theta1, double k) {
	double jump = 0.;
	for (std::size_t j = 0; j < params.atoms.size(); ++j)
		jump += params.atoms[j].intensity * (theta1[j] - params.atoms[j].gamma);
	return -params.delta + (params.e * params.r - params.sigma_f
			* params.sigma_f) * k + k * jump;
}

Theta1Result example2_theta1(const std::vector<JumpAtom> &atoms, double k) {
	Theta1Result out;
	if (!(k > 0. && k < 1.))
		throw SpecError("theta1 needs k in (0, 1)");
	for (const auto &atom : atoms)
		if (!(1. + atom.gamma > 0.))
			throw SpecError("theta1 needs 1 + gamma > 0 for every atom");
	if (atoms.empty())
		return out;
	auto residual = [&](double eta) {
		double s = 0.;
		for (const auto &atom : atoms)
			s += atom.intensity * (std::pow(eta, k) - 1.);
		return s;
	};
	if (atoms.size() == 1) {
		// Closed form forcing Xi = (1 - theta1)(1 + gamma) = 1.
		out.theta1 = {1. - 1. / (1. + atoms[0].gamma)};
		out.eta = 1.;
	} else {
		// One-parameter family theta1_j = 1 - eta / (1 + gamma_j), so that
		// Xi_j = eta; eta is root-found on (0, eta_max].
		const double eta_max = 2.;
		double total = 0.;
		for (const auto &atom : atoms)
			total += atom.intensity;
		if (total > 0.) {
			out.eta = bracketed_root(residual, 1e-6, eta_max, 60,
					"eta (theta1 first-order condition)");
		}
		for (const auto &atom : atoms)
			out.theta1.push_back(1. - out.eta / (1. + atom.gamma));
	}
	double s = 0.;
	for (std::size_t j = 0; j < atoms.size(); ++j) {
		const double xi = (1. - out.theta1[j]) * (1. + atoms[j].gamma);
		s += atoms[j].intensity * (std::pow(xi, k) - 1.);
	}
	out.residual = s;
	return out;
}

ExponentResult example2_exponent(const Example2Params &params) {
	ExponentResult out;
	const double base = params.e * params.r - params.sigma_f * params.sigma_f;
	bool jumps = false;
	for (const auto &atom : params.atoms)
		jumps = jumps || atom.intensity > 0.;
	if (!jumps) {
		if (base == 0.)
			throw SpecError("no-jump case needs e r != sigma_f^2");
		out.k = params.delta / base;
		out.theta1.assign(params.atoms.size(), 0.);
		out.mu_omega = base;
		if (!(out.k > 0. && out.k < 1.))
			throw FreeBoundaryError("k: p has no sign change on (0, 1): p(0) = "
					+ num(-params.delta) + " < 0 and p(1) = "
					+ num(-params.delta + base) + " (need e r - sigma_f^2 > delta)");
	} else {
		double k = base > params.delta ? params.delta / base : 0.5;
		for (int it = 0; it < 100; ++it) {
			out.iterations = it + 1;
			const auto th = example2_theta1(params.atoms, k);
			out.theta1 = th.theta1;
			out.eta = th.eta;
			auto p = [&](double kk) { return example2_p(params, out.theta1, kk); };
			if (!(p(1.) > 0.))
				throw FreeBoundaryError("k: p has no sign change on (0, 1): p(0) = "
						+ num(-params.delta) + " < 0 and p(1) = " + num(p(1.))
						+ " (positivity bound e > (r / sigma_f^2)^{-1} with a"
						" small discount is required)");
			const double k_new = bracketed_root(p, 0., 1., 60, "k (p(k) = 0)");
			const double change = std::abs(k_new - k);
			k = k_new;
			if (change < 1e-10)
				break;
		}
		out.k = k;
		const auto th = example2_theta1(params.atoms, k);
		out.theta1 = th.theta1;
		out.eta = th.eta;
		double jump = 0.;
		for (std::size_t j = 0; j < params.atoms.size(); ++j)
			jump += params.atoms[j].intensity * (out.theta1[j]
					- params.atoms[j].gamma);
		out.mu_omega = base + jump;
	}
	const auto theta1 = out.theta1;
	out.p = [params, theta1](double k) { return example2_p(params, theta1, k); };
	return out;
}

Example2Solution example2_solve(const Example2Params &params) {
	params.validate();
	Example2Solution sol;
	sol.params = params;
	const auto exponent = example2_exponent(params);
	sol.k = exponent.k;
	sol.theta1 = exponent.theta1;
	sol.eta = exponent.eta;
	sol.mu_omega = exponent.mu_omega;
	sol.fixed_point_iterations = exponent.iterations;
	sol.theta0 = params.sigma_f;
	sol.p_residual = example2_p(params, sol.theta1, sol.k);
	sol.h_residual = 0.;
	for (std::size_t j = 0; j < params.atoms.size(); ++j) {
		const double xi = (1. - sol.theta1[j]) * (1. + params.atoms[j].gamma);
		sol.h_residual += params.atoms[j].intensity * (std::pow(xi, sol.k) - 1.);
	}

	const double k = sol.k;
	sol.omega_star = params.lambda_T * k / (params.g1 * (1. - k));
	sol.a = std::pow(params.g1 / k, k)
			* std::pow(params.lambda_T / (1. - k), 1. - k);

	// Wealth exponents: roots of (s2/2) d (d - 1) + Gamma d - delta = 0.
	const double s2 = params.pi * params.pi * params.sigma_I * params.sigma_I;
	const double G = params.gamma_drift;
	const double D = std::sqrt((G - 0.5 * s2) * (G - 0.5 * s2)
			+ 2. * s2 * params.delta);
	sol.d1 = 0.5 - (D + G) / s2;
	sol.d2 = 0.5 + (D - G) / s2;
	const double d1 = sol.d1, d2 = sol.d2;
	if (!(d2 > 1.))
		throw FreeBoundaryError("y_tilde: phi_2' = alpha_I has two roots only "
				"when d2 > 1, i.e. Gamma_drift < delta");

	// B(y) = d1 y^{d1-1} - d2 y^{d2-1} < 0 has a single maximum at y_s;
	// phi_2' = c B = alpha_I has two roots for c in (alpha_I / B(y_s), 0).
	auto B = [&](double y) {
		return d1 * std::pow(y, d1 - 1.) - d2 * std::pow(y, d2 - 1.);
	};
	auto dB = [&](double y) {
		return d1 * (d1 - 1.) * std::pow(y, d1 - 2.)
				- d2 * (d2 - 1.) * std::pow(y, d2 - 2.);
	};
	const double ys = std::pow(d1 * (d1 - 1.) / (d2 * (d2 - 1.)), 1. / (d2 - d1));
	const double c_min = params.alpha_I / B(ys);
	auto inner = [&](double c, double &yh, double &yt) {
		const double t = params.alpha_I / c;
		double lo = 0.5 * ys;
		while (B(lo) > t)
			lo *= 0.5;
		double hi = 2. * ys;
		while (B(hi) > t)
			hi *= 2.;
		auto g = [&](double y) { return B(y) - t; };
		yh = bracketed_root(g, lo, ys, 60, "y_hat (phi_2' = alpha_I)");
		yt = bracketed_root(g, ys, hi, 60, "y_tilde (phi_2' = alpha_I)");
	};
	auto F = [&](double u) {
		const double c = c_min * u;
		double yh, yt;
		inner(c, yh, yt);
		return c * (std::pow(yt, d1) - std::pow(yt, d2) - std::pow(yh, d1)
				+ std::pow(yh, d2)) - (params.alpha_I * (yt - yh) - params.kappa_I);
	};
	// Scan u = c / c_min from just below 1 (roots merge, F = kappa_I > 0)
	// towards 0.
	double prev_u = 1. - 1e-9, prev_F = F(prev_u), u_root = -1.;
	for (int i = 1; i <= 2000; ++i) {
		const double u = std::pow(10., -9. * i / 2000.) * (1. - 1e-9);
		const double fu = F(u);
		if ((prev_F > 0.) != (fu > 0.)) {
			u_root = bracketed_root(F, u, prev_u, 60, "c (injection system)");
			break;
		}
		prev_u = u;
		prev_F = fu;
	}
	if (u_root < 0.)
		throw FreeBoundaryError("c (injection system): no sign change for c in ("
				+ num(c_min) + ", 0)");
	sol.c = c_min * u_root;
	inner(sol.c, sol.y_hat, sol.y_tilde);

	// Damped Newton polish of the full 3x3 system.
	auto residuals = [&](const Eigen::Vector3d &v) {
		const double c = v[0], yh = v[1], yt = v[2];
		Eigen::Vector3d r;
		r[0] = c * (std::pow(yt, d1) - std::pow(yt, d2) - std::pow(yh, d1)
				+ std::pow(yh, d2)) - (params.alpha_I * (yt - yh) - params.kappa_I);
		r[1] = c * B(yh) - params.alpha_I;
		r[2] = c * B(yt) - params.alpha_I;
		return r;
	};
	Eigen::Vector3d v(sol.c, sol.y_hat, sol.y_tilde);
	Eigen::Vector3d r = residuals(v);
	for (int it = 0; it < 200 && r.cwiseAbs().maxCoeff() > 1e-15; ++it) {
		const double c = v[0], yh = v[1], yt = v[2];
		Eigen::Matrix3d J;
		J << std::pow(yt, d1) - std::pow(yt, d2) - std::pow(yh, d1)
						+ std::pow(yh, d2),
				-c * B(yh) + params.alpha_I, c * B(yt) - params.alpha_I,
				B(yh), c * dB(yh), 0.,
				B(yt), 0., c * dB(yt);
		Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
		if (!lu.isInvertible())
			throw FreeBoundaryError("injection system: singular Jacobian, "
					"residual " + num(r.cwiseAbs().maxCoeff()));
		const Eigen::Vector3d step = lu.solve(-r);
		double damp = 1.;
		bool improved = false;
		for (int ls = 0; ls < 30; ++ls, damp *= 0.5) {
			const Eigen::Vector3d trial = v + damp * step;
			if (trial[1] <= 0. || trial[2] <= 0.)
				continue;
			const Eigen::Vector3d rt = residuals(trial);
			if (rt.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) {
				v = trial;
				r = rt;
				improved = true;
				break;
			}
		}
		if (!improved)
			break;
	}
	if (!(r.cwiseAbs().maxCoeff() < 1e-9))
		throw FreeBoundaryError("injection system: no convergence, residual "
				+ num(r.cwiseAbs().maxCoeff()));
	sol.c = v[0];
	sol.y_hat = v[1];
	sol.y_tilde = v[2];
	sol.injection_residuals = {r[0], r[1], r[2]};
	if (!(sol.y_hat < sol.y_tilde))
		throw FreeBoundaryError("inconsistent free boundaries: y_hat >= y_tilde");
	return sol;
}

double example2_value(const Example2Solution &sol, double y0, double y1,
		double y2, double y3) {
	if (!(y1 > 0.) || !(y2 > 0.))
		throw std::domain_error("example2_value: y1 and y2 must be positive");
	return std::exp(-sol.params.delta * y0) * y3
			* sol.reduced_value(y2, y1 * y3);
}

double q_process_step(double q, double dt, double dW, double sigma_f,
		const std::vector<JumpAtom> &atoms, const std::vector<double> &theta1,
		const std::vector<int> &fired) {
	double compensator = 0.;
	for (std::size_t j = 0; j < atoms.size() && j < theta1.size(); ++j)
		compensator += atoms[j].intensity * theta1[j];
	double out = q * std::exp(-sigma_f * dW - 0.5 * sigma_f * sigma_f * dt
			+ compensator * dt);
	for (int j : fired)
		out *= 1. - theta1.at(j);
	return out;
}

////////////////////////////////////////////////////////////////////////////////
// Serialization
////////////////////////////////////////////////////////////////////////////////

Constants to_constants(const Example1Solution &sol) {
	const auto &p = sol.params;
	return {{"alpha", p.alpha}, {"beta", p.beta}, {"delta", p.delta},
			{"kappa1", p.kappa1}, {"kappa2", p.kappa2}, {"lambda", p.lambda},
			{"c_plus", sol.c_plus}, {"c_minus", sol.c_minus}, {"a", sol.a},
			{"x_hat", sol.x_hat}, {"x_star", sol.x_target},
			{"x_upper_star", sol.x_upper}, {"x_sharp", sol.x_sharp},
			{"x_tilde", sol.x_tilde}, {"kink", sol.kink}};
}

Constants to_constants(const Example2Solution &sol) {
	Constants out = {{"k", sol.k}, {"a", sol.a}, {"omega_star", sol.omega_star},
			{"mu_omega", sol.mu_omega}, {"d1", sol.d1}, {"d2", sol.d2},
			{"c", sol.c}, {"y_hat", sol.y_hat}, {"y_tilde", sol.y_tilde},
			{"theta0", sol.theta0}, {"eta", sol.eta},
			{"p_residual", sol.p_residual}, {"h_residual", sol.h_residual}};
	for (std::size_t j = 0; j < sol.theta1.size(); ++j)
		out.emplace_back("theta1_" + std::to_string(j), sol.theta1[j]);
	return out;
}

std::string format_constants(const Constants &constants) {
	std::string out;
	for (const auto &[name, value] : constants)
		out += fmt::format("{} = {:.17g}\n", name, value);
	return out;
}

std::map<std::string, double> parse_constants(const std::string &text) {
	std::map<std::string, double> out;
	std::istringstream in(text);
	std::string line;
	while (std::getline(in, line)) {
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			continue;
		std::string key = line.substr(0, eq);
		key.erase(key.find_last_not_of(" \t") + 1);
		key.erase(0, key.find_first_not_of(" \t"));
		out[key] = std::stod(line.substr(eq + 1));
	}
	return out;
}

} // namespace impstop
