#include "doctest.h"

#include <cmath>

#include "impstop/operators.hpp"
#include "impstop/templates.hpp"

using namespace impstop;

namespace {

GeneratorOptions central() {
	GeneratorOptions o;
	o.allow_upwind = false;
	return o;
}

} // namespace

TEST_CASE("GBM generator is exact on affine and quadratic functions") {
	const Example1Params p;
	const auto game = example1_game(p);
	const auto g = Grid::uniform1d(0.5, 4., 71);
	const auto lin = GridFunction::sample(g, [](const Vec &x) { return x[0]; });
	const auto quad = GridFunction::sample(g, [](const Vec &x) {
		return x[0] * x[0];
	});
	const auto L1 = apply_generator(game, lin, 0., central());
	const auto L2 = apply_generator(game, quad, 0., central());
	for (int i = 1; i + 1 < g.size(); ++i) {
		const double x = g.point(i)[0];
		CHECK(L1.values[i] == doctest::Approx(p.alpha * x).epsilon(1e-10));
		CHECK(L2.values[i] == doctest::Approx((2. * p.alpha + p.beta * p.beta)
				* x * x).epsilon(1e-10));
	}
}

TEST_CASE("upwinding keeps the stencil monotone when drift dominates") {
	auto game = example1_game(Example1Params{});
	game.diffusion.drift = [](double, const Vec &x) { return Vec{50. * x[0]}; };
	game.diffusion.volatility = [](double, const Vec &x) {
		return std::vector<Vec>{{0.01 * x[0]}};
	};
	const auto g = Grid::uniform1d(1., 2., 21);
	const auto st = build_generator(game, g);
	int upwinded = 0;
	for (int i = 1; i + 1 < g.size(); ++i) {
		upwinded += st.upwinded[i];
		for (const auto &[j, w] : st.rows[i])
			if (j != i)
				CHECK(w >= 0.);
	}
	CHECK(upwinded > 0);
}

TEST_CASE("compensated jumps vanish on affine functions") {
	auto game = stopping_game(StoppingParams{});
	game.diffusion.levy_measure = {{0.1, 0.7}};
	const auto g = Grid::uniform1d(0.5, 4., 141);
	const auto lin = GridFunction::sample(g, [](const Vec &x) { return x[0]; });
	const auto quad = GridFunction::sample(g, [](const Vec &x) {
		return x[0] * x[0];
	});
	const auto L1 = apply_generator(game, lin, 0., central());
	const auto L2 = apply_generator(game, quad, 0., central());
	const StoppingParams p;
	for (int i = 1; g.point(i)[0] * 1.1 < 4.; ++i) {
		const double x = g.point(i)[0];
		CHECK(L1.values[i] == doctest::Approx(p.alpha * x).epsilon(1e-10));
		// Linear interpolation of x^2 at x (1 + m) errs by at most h^2 / 4.
		const double exact = (2. * p.alpha + p.beta * p.beta + 0.7 * 0.01) * x * x;
		CHECK(std::abs(L2.values[i] - exact) <= 0.7 * g.h(0) * g.h(0));
	}
}

TEST_CASE("intervention operator on an affine value") {
	const Example1Params p;
	const auto game = example1_game(p, 10.);
	const auto g = Grid::uniform1d(0.01, 10., 200);
	const auto phi = GridFunction::sample(g, [](const Vec &x) { return x[0]; });
	const auto M = intervention_operator(game, phi, 0., Sense::maximize);
	for (int i = 0; i < g.size(); ++i) {
		const double x = g.point(i)[0];
		if (x - p.kappa1 < 0.01) {
			CHECK_FALSE(M.feasible[i]);
			continue;
		}
		// phi(x - kappa1 - (1 + lambda) z) + z is decreasing in z.
		CHECK(M.feasible[i]);
		CHECK(M.value[i] == doctest::Approx(x - p.kappa1).epsilon(1e-10));
		CHECK(M.z[i] == doctest::Approx(0.).epsilon(1e-8));
	}
}

TEST_CASE("golden-section search finds an interior maximizer") {
	const double z = golden_section_max([](double t) {
		return -(t - 0.3) * (t - 0.3);
	}, 0., 1., 1e-12, 200);
	CHECK(z == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("intervention inequality check flags the violating side") {
	const auto g = Grid::uniform1d(0., 1., 3);
	GridFunction phi(g, 1.);
	const std::vector<double> m{0.5, 1.2, 1.};
	const auto v = intervention_inequality_check(phi, m, Sense::maximize, 1e-9);
	REQUIRE(v.size() == 1);
	CHECK(v[0].node == 1);
	CHECK(v[0].gap == doctest::Approx(0.2));
	CHECK(intervention_inequality_check(phi, m, Sense::minimize, 1e-9).size() == 1);
}
