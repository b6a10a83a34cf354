#include "doctest.h"

#include <cmath>
#include <numeric>

#include "impstop/simulate.hpp"
#include "impstop/templates.hpp"

using namespace impstop;

namespace {

ThresholdImpulsePolicy never_act() {
	return {[](const Vec &) { return false; }, [](const Vec &) { return 0.; }};
}

StopPolicy never_stop() {
	return {[](const Vec &) { return false; }};
}

} // namespace

TEST_CASE("pairwise summation is exact on representable sums") {
	std::vector<double> v(1001);
	std::iota(v.begin(), v.end(), 0.);
	CHECK(pairwise_sum(v.data(), v.size()) == 500500.);
	CHECK(pairwise_sum(v.data(), 0) == 0.);
}

TEST_CASE("uncontrolled GBM: discounted horizon payoff matches its mean") {
	const Example1Params p;
	const auto game = example1_game(p);
	SimulationConfig cfg;
	cfg.n_paths = 20000;
	cfg.dt = 1e-2;
	cfg.horizon = 1.;
	const double x0 = 1.;
	const auto e = estimate_payoff(game, never_act(), never_stop(), cfg, {x0});
	const double exact = std::exp(-p.delta) * (x0 * std::exp(p.alpha) - p.kappa2);
	CHECK(std::abs(e.mean[0] - exact) < 4. * e.stderr_[0]);
	CHECK(e.aborted == 0);
}

TEST_CASE("stopping at once pays the obstacle") {
	const auto game = example1_game(Example1Params{});
	SimulationConfig cfg;
	const auto rec = simulate_path(game, never_act(),
			{[](const Vec &) { return true; }}, cfg, {2.}, 0);
	CHECK(rec.reason == ExitReason::stopped);
	CHECK(rec.stop_time == 0.);
	CHECK(rec.payoff[0] == doctest::Approx(2. - 0.5));
}

TEST_CASE("threshold impulses land exactly on the target") {
	const auto sol = example1_solve(Example1Params{});
	const auto game = example1_game(sol.params);
	SimulationConfig cfg;
	const auto rec = simulate_path(game, example1_controller(sol, sol.x_tilde),
			example1_stopper(sol.x_hat), cfg, {8.}, 3);
	REQUIRE(rec.intervention_count >= 1);
	const auto &ev = rec.interventions.front();
	CHECK(ev.time == 0.);
	CHECK(std::abs(ev.after[0] - sol.x_target) <= 1e-12);
	CHECK(ev.z == doctest::Approx(example1_impulse(sol, 8.)));
}

TEST_CASE("seeded runs are reproducible and thread-count independent") {
	const auto sol = example1_solve(Example1Params{});
	const auto game = example1_game(sol.params);
	SimulationConfig cfg;
	cfg.n_paths = 400;
	cfg.seed = 42;
	const auto c = example1_controller(sol, sol.x_tilde);
	const auto s = example1_stopper(sol.x_hat);
	const auto a = simulate_payoffs(game, c, s, cfg, {1.6}, 0);
	const auto b = simulate_payoffs(game, c, s, cfg, {1.6}, 0);
	cfg.threads = 3;
	const auto t = simulate_payoffs(game, c, s, cfg, {1.6}, 0);
	CHECK(a == b);
	CHECK(a == t);
	cfg.seed = 43;
	CHECK(simulate_payoffs(game, c, s, cfg, {1.6}, 0) != a);
}

TEST_CASE("noise substeps couple a coarse run with a fine run") {
	const auto game = example1_game(Example1Params{});
	SimulationConfig coarse;
	coarse.dt = 1e-2;
	coarse.noise_substeps = 2;
	SimulationConfig fine;
	fine.dt = 5e-3;
	for (std::uint64_t i = 0; i < 5; ++i) {
		const auto a = simulate_path(game, never_act(), never_stop(), coarse, {1.}, i);
		const auto b = simulate_path(game, never_act(), never_stop(), fine, {1.}, i);
		// Exact stepping with equal Brownian totals ends at the same state.
		CHECK(a.final_state[0] == doctest::Approx(b.final_state[0]).epsilon(1e-12));
	}
}

TEST_CASE("a deviation to the equilibrium policy changes nothing") {
	const auto sol = example1_solve(Example1Params{});
	const auto game = example1_game(sol.params);
	SimulationConfig cfg;
	cfg.n_paths = 300;
	const auto c = example1_controller(sol, sol.x_tilde);
	const auto s = example1_stopper(sol.x_hat);
	const auto report = deviation_test(game, c, s,
			{Deviation{"same", 0, c, s, {1.6}}}, cfg);
	REQUIRE(report.rows.size() == 1);
	CHECK(report.rows[0].difference == 0.);
	CHECK(report.all_pass());
}

TEST_CASE("density process is a martingale") {
	Example2Params p;
	p.atoms = {{0.2, 0.5}};
	const auto sol = example2_solve(p);
	SimulationConfig cfg;
	cfg.n_paths = 4000;
	cfg.dt = 1e-2;
	const auto m = q_martingale_check(sol, cfg, 1.);
	CHECK(std::abs(m.mean - 1.) < 3. * m.stderr_);
}

TEST_CASE("investor paths exit at omega_star or run to the horizon") {
	const auto sol = example2_solve(Example2Params{});
	SimulationConfig cfg;
	cfg.n_paths = 50;
	cfg.dt = 1e-2;
	for (const auto &rec : simulate_investor(sol, cfg, {1., 2., 1.})) {
		CHECK(rec.reason != ExitReason::aborted);
		if (rec.reason == ExitReason::stopped) {
			const double omega = rec.final_state[0] * rec.final_state[2];
			CHECK(omega >= sol.omega_star * (1. - 1e-12));
		}
	}
}
