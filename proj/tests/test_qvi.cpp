#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "impstop/io.hpp"
#include "impstop/qvi.hpp"
#include "impstop/templates.hpp"
#include "impstop/verify.hpp"

using namespace impstop;

namespace {

double relative_distance(const GridFunction &a, const GridFunction &b) {
	double d = 0.;
	for (std::size_t i = 0; i < a.values.size(); ++i)
		d = std::max(d, std::abs(a.values[i] - b.values[i]));
	return d / b.sup_norm();
}

} // namespace

TEST_CASE("stop everywhere: the solution is the obstacle") {
	const auto problem = stopping_problem(StoppingParams{}, 200, 0.01, 10.);
	const auto sol = solve_qvi(problem);
	for (int i = 0; i < problem.grid.size(); ++i)
		CHECK(sol.value.values[i] == doctest::Approx(problem.grid.point(i)[0]));
	CHECK(std::count(sol.policy.labels.begin(), sol.policy.labels.end(),
			Label::stop) >= problem.grid.size() - 2);
}

TEST_CASE("closed form satisfies the discrete QVI to second order") {
	const auto sol = example1_solve(Example1Params{});
	double prev = 0.;
	for (int n : {1000, 2000}) {
		const auto problem = example1_problem(sol, n, sol.x_hat / 2.,
				2. * sol.x_tilde);
		const auto psi = example1_closed_form(sol, problem.grid);
		const double r = residual_sup_excluding(qvi_residual(psi, problem),
				{sol.x_hat, sol.x_tilde}, 2);
		if (prev > 0.)
			CHECK(std::log2(prev / r) > 1.6);
		prev = r;
	}
}

TEST_CASE("policy iteration recovers the example 1 equilibrium") {
	const auto sol = example1_solve(Example1Params{});
	const auto problem = example1_problem(sol, 1000, 0.01, 5. * sol.x_tilde);
	const auto qs = solve_qvi(problem);
	const auto psi = example1_closed_form(sol, problem.grid);
	CHECK(relative_distance(qs.value, psi) < 5e-3);
	const double h = problem.grid.h(0);
	CHECK(std::abs(max_coordinate(problem.grid, qs.policy.labels, Label::stop)
			- sol.x_hat) <= 2. * h);
	CHECK(std::abs(min_coordinate(problem.grid, qs.policy.labels, Label::impulse)
			- sol.x_tilde) <= 2. * h);
	REQUIRE_FALSE(qs.policy.history.empty());
	CHECK(qs.policy.history.back().residual < 1e-8);
	CHECK(qs.policy.history.back().label_changes == 0);
}

TEST_CASE("a warm start reaches the same solution") {
	const auto sol = example1_solve(Example1Params{});
	const auto problem = example1_problem(sol, 400, 0.01, 5. * sol.x_tilde);
	const auto cold = solve_qvi(problem);
	const auto psi = example1_closed_form(sol, problem.grid);
	const auto warm = solve_qvi(problem, {}, &psi);
	CHECK(relative_distance(warm.value, cold.value) < 1e-9);
	CHECK(warm.policy.iterations <= cold.policy.iterations);
}

TEST_CASE("a long time-marching horizon approaches the stationary value") {
	const auto sol = example1_solve(Example1Params{});
	const auto problem = example1_problem(sol, 300, 0.01, 5. * sol.x_tilde);
	const auto stationary = solve_qvi(problem);
	const auto marched = solve_qvi_time_marching(problem, 150., 150);
	CHECK(relative_distance(marched.value, stationary.value) < 1e-2);
}

TEST_CASE("zero-sum game cast as non-zero-sum has the same equilibrium") {
	const auto sol = example1_solve(Example1Params{});
	auto problem = example1_problem(sol, 600, 0.01, 5. * sol.x_tilde);
	const auto zs = solve_qvi(problem);
	const auto p0 = problem.game.payoffs.front();
	problem.game.payoffs = {p0, p0};
	const auto nz = solve_nonzero_sum(problem);
	CHECK(relative_distance(nz.phi1, zs.value) < 1e-6);
	CHECK(relative_distance(nz.phi2, zs.value) < 1e-6);
	CHECK(nz.rounds >= 1);
}

TEST_CASE("investor lattice solution against the closed form") {
	const auto sol = example2_solve(Example2Params{});
	const auto problem = investor_problem(sol, investor_default_grid(sol, 81, 61),
			false);
	const auto qs = solve_qvi(problem);
	const auto psi = investor_closed_form(sol, problem.grid);
	CHECK(relative_distance(qs.value, psi) < 5e-3);
}

TEST_CASE("value table layout") {
	const auto g = Grid::uniform2d(0., 1., 3, 0., 1., 3);
	const GridFunction phi(g, 0.5);
	write_value_csv("test_qvi_value.csv", phi, std::vector<Label>(9, Label::stop));
	const auto text = read_text("test_qvi_value.csv");
	CHECK(text.rfind("x0,x1,value,label\n0,0,0.5,stop\n", 0) == 0);
	std::remove("test_qvi_value.csv");
}
