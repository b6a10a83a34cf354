#include "doctest.h"

#include <cmath>

#include "impstop/templates.hpp"
#include "impstop/verify.hpp"

using namespace impstop;

namespace {

struct Example1Case {
	Example1Solution sol = example1_solve(Example1Params{});
	QviProblem problem = example1_problem(sol, 2000, 0.01, 5. * sol.x_tilde);
	GridFunction psi = example1_closed_form(sol, problem.grid);
	std::vector<Label> labels = example1_labels(sol, problem.grid);
	double tol() const {
		const double h = problem.grid.h(0);
		return 10. * h * h * psi.sup_norm();
	}
	GridFunction perturbed() const {
		auto out = psi;
		for (int i = 0; i < problem.grid.size(); ++i) {
			const double x = problem.grid.point(i)[0];
			if (x > sol.x_hat && x < sol.x_tilde)
				out.values[i] += 0.1 * sol.params.kappa1;
		}
		return out;
	}
};

} // namespace

TEST_CASE("zero-sum certificate: closed form passes, perturbation fails (iv)") {
	const Example1Case c;
	const auto good = check_zero_sum_conditions(c.psi, c.problem, c.labels, c.tol());
	CHECK_MESSAGE(good.ok(), good.to_text());
	const auto bad = check_zero_sum_conditions(c.perturbed(), c.problem, c.labels,
			c.tol());
	CHECK_FALSE(bad.ok());
	CHECK_FALSE(bad.find("(iv)").pass);
	CHECK(bad.find("(i)").pass);
}

TEST_CASE("non-zero-sum certificate on the zero-sum cast agrees") {
	Example1Case c;
	const auto p0 = c.problem.game.payoffs.front();
	auto cast = c.problem;
	cast.game.payoffs = {p0, p0};
	CHECK(check_nonzero_sum_conditions(c.psi, c.psi, cast, c.labels, c.tol()).ok());
	const auto bad = c.perturbed();
	const auto nz = check_nonzero_sum_conditions(bad, bad, cast, c.labels, c.tol());
	CHECK_FALSE(nz.ok());
	CHECK_FALSE(nz.find("(iv')").pass);
}

TEST_CASE("classified regions of the closed form match the thresholds") {
	const Example1Case c;
	const double h = c.problem.grid.h(0);
	ClassifyOptions o;
	o.eps_value = o.eps_pde = 10. * h * h;
	const auto regions = classify_regions(c.psi, c.problem, o);
	int total = 0;
	for (Region r : {Region::boundary, Region::impulse, Region::stop, Region::cont})
		total += regions.count(r);
	CHECK(total == c.problem.grid.size());
	const auto labels = labels_from_regions(regions);
	for (int i = 0; i < c.problem.grid.size(); ++i) {
		const double x = c.problem.grid.point(i)[0];
		if (std::abs(x - c.sol.x_hat) > 2. * h && std::abs(x - c.sol.x_tilde) > 2. * h)
			CHECK(labels[i] == c.labels[i]);
	}
	CHECK(std::abs(min_coordinate(c.problem.grid, labels, Label::impulse)
			- c.sol.x_tilde) <= 2. * h);
}

TEST_CASE("a function that is no value candidate is a structural error") {
	const Example1Case c;
	auto noise = c.psi;
	for (int i = 0; i < c.problem.grid.size(); ++i)
		noise.values[i] += (i % 2 ? 0.3 : -0.3);
	CHECK_THROWS_AS(classify_regions(noise, c.problem), StructuralError);
}

TEST_CASE("investor closed form passes both certificates") {
	const auto sol = example2_solve(Example2Params{});
	const auto g = investor_default_grid(sol);
	const auto zs = investor_problem(sol, g, false);
	const auto psi = investor_closed_form(sol, zs.grid);
	const auto labels = investor_labels(sol, zs.grid);
	const double tol = 0.1 * zs.grid.h(1) * psi.sup_norm();
	const auto cz = check_zero_sum_conditions(psi, zs, labels, tol);
	CHECK_MESSAGE(cz.ok(), cz.to_text());
	const auto nzp = investor_problem(sol, g, true);
	const auto cn = check_nonzero_sum_conditions(psi,
			investor_auxiliary(sol, nzp.grid), nzp, labels, tol);
	CHECK_MESSAGE(cn.ok(), cn.to_text());
}

TEST_CASE("stop everywhere: the obstacle certifies itself") {
	const auto problem = stopping_problem(StoppingParams{}, 200, 0.01, 10.);
	const auto G = GridFunction::sample(problem.grid, [](const Vec &x) {
		return x[0];
	});
	const auto regions = classify_regions(G, problem);
	CHECK(regions.count(Region::stop) + regions.count(Region::boundary)
			== problem.grid.size());
	CHECK(check_zero_sum_conditions(G, problem, labels_from_regions(regions),
			1e-6).ok());
}

TEST_CASE("region band marks nodes next to a label change") {
	const auto g = Grid::uniform1d(0., 1., 6);
	const std::vector<Label> labels{Label::stop, Label::stop, Label::cont,
			Label::cont, Label::cont, Label::impulse};
	const auto band = region_band(g, labels, std::vector<std::uint8_t>(6, 0));
	CHECK(band == std::vector<std::uint8_t>{0, 1, 1, 0, 1, 1});
}
