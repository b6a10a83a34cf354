#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "impstop/closedform.hpp"

using namespace impstop;

TEST_CASE("example 1 reference boundaries") {
	const auto sol = example1_solve(Example1Params{});
	CHECK(sol.x_hat == doctest::Approx(0.283189).epsilon(1e-5));
	CHECK(sol.x_target == doctest::Approx(0.488411).epsilon(1e-5));
	CHECK(sol.x_tilde == doctest::Approx(5.702786).epsilon(1e-6));
	CHECK(sol.x_hat < sol.x_target);
	CHECK(sol.x_target < sol.x_tilde);
	const auto r = example1_residuals(sol);
	CHECK(std::abs(r.value_match_hat) < 1e-9);
	CHECK(std::abs(r.smooth_fit_hat) < 1e-9);
	CHECK(std::abs(r.continuity_tilde) < 1e-9);
	CHECK(std::abs(r.target_foc) < 1e-9);
}

TEST_CASE("exponent identities on random parameters") {
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> ua(0.01, 0.2), ub(0.1, 0.6),
			ud(0.01, 0.3);
	for (int i = 0; i < 50; ++i) {
		const double a = ua(rng), b = ub(rng), d = ud(rng);
		const auto [cp, cm] = example1_exponents(a, b, d);
		CHECK(cp > 0.);
		CHECK(cm < 0.);
		CHECK(std::abs(cp * cm + 2. * d / (b * b)) < 1e-10);
		CHECK(std::abs(cp + cm - 1. + 2. * a / (b * b)) < 1e-10);
	}
}

TEST_CASE("example 1 value on each region") {
	const auto sol = example1_solve(Example1Params{});
	const auto &p = sol.params;
	// Stop region: the stopper's payment x - kappa2.
	CHECK(example1_value(sol, 0., 0.2) == doctest::Approx(0.2 - p.kappa2));
	// Impulse region: jump to x_star and collect the impulse.
	const double x = 8.;
	const double z = example1_impulse(sol, x);
	CHECK(z == doctest::Approx((x - sol.x_target - p.kappa1) / (1. + p.lambda)));
	CHECK(example1_value(sol, 0., x)
			== doctest::Approx(example1_value(sol, 0., sol.x_target) + z));
	// Continuity across both boundaries and C^1 at x_hat.
	for (double b : {sol.x_hat, sol.x_tilde})
		CHECK(example1_value(sol, 0., b * (1. - 1e-9))
				== doctest::Approx(example1_value(sol, 0., b * (1. + 1e-9))));
	CHECK(example1_value_prime(sol, sol.x_hat * (1. + 1e-9))
			== doctest::Approx(1.).epsilon(1e-6));
	CHECK(example1_value(sol, 1., 1.)
			== doctest::Approx(std::exp(-p.delta) * example1_value(sol, 0., 1.)));
	CHECK_THROWS_AS(example1_value(sol, 0., 0.), std::domain_error);
	CHECK_THROWS(example1_impulse(sol, 1.));
}

TEST_CASE("investor closed form without jumps") {
	const auto sol = example2_solve(Example2Params{});
	const Example2Params p;
	CHECK(sol.k == p.delta / (p.e * p.r - p.sigma_f * p.sigma_f));
	CHECK(sol.k == doctest::Approx(0.454545).epsilon(1e-6));
	CHECK(sol.omega_star == doctest::Approx(1.666667).epsilon(1e-6));
	CHECK(sol.y_hat == doctest::Approx(1.4928).epsilon(1e-4));
	CHECK(sol.y_tilde == doctest::Approx(3.4819).epsilon(1e-4));
	for (double r : sol.injection_residuals)
		CHECK(std::abs(r) < 1e-9);
	CHECK(std::abs(sol.omega_cont(sol.omega_star)
			- sol.exit_payoff(sol.omega_star)) < 1e-9);
	CHECK(std::abs(sol.wealth_cont(sol.y_tilde) - sol.wealth_value(sol.y_tilde))
			< 1e-9);
	CHECK(sol.in_exit_region(2.));
	CHECK_FALSE(sol.in_exit_region(1.));
}

TEST_CASE("investor fixed point with one jump atom") {
	Example2Params p;
	p.atoms = {{0.2, 0.5}};
	const auto sol = example2_solve(p);
	CHECK(sol.k == doctest::Approx(0.535714).epsilon(1e-6));
	CHECK(sol.omega_star == doctest::Approx(2.307692).epsilon(1e-6));
	CHECK(std::abs(example2_p(p, sol.theta1, sol.k)) < 1e-10);
	const auto t = example2_theta1(p.atoms, sol.k);
	CHECK(std::abs(t.residual) < 1e-10);
	CHECK(t.theta1[0] == doctest::Approx(1. - 1. / 1.2).epsilon(1e-15));
}

TEST_CASE("density step without jumps") {
	const double q = q_process_step(2., 0.01, 0., 0.3, {}, {}, {});
	CHECK(q == doctest::Approx(2. * std::exp(-0.5 * 0.09 * 0.01)));
}

TEST_CASE("constants round-trip through text") {
	const auto sol = example1_solve(Example1Params{});
	const auto c = to_constants(sol);
	const auto parsed = parse_constants(format_constants(c));
	REQUIRE(parsed.size() == c.size());
	for (const auto &[name, value] : c)
		CHECK(parsed.at(name) == value);
	CHECK(parsed.at("x_star") == sol.x_target);
}
