#include "doctest.h"

#include "impstop/grid.hpp"

using namespace impstop;

TEST_CASE("uniform lattices") {
	const auto g = Grid::uniform1d(1., 3., 5);
	CHECK(g.size() == 5);
	CHECK(g.h(0) == doctest::Approx(0.5));
	CHECK(g.point(4)[0] == doctest::Approx(3.));
	CHECK(g.on_boundary(0));
	CHECK_FALSE(g.on_boundary(2));

	const auto g2 = Grid::uniform2d(0., 1., 3, 0., 2., 5);
	CHECK(g2.size() == 15);
	CHECK(g2.index(2, 4) == 14);
	CHECK(g2.multi(14) == std::array<int, 2>{2, 4});
	CHECK(g2.point(14)[1] == doctest::Approx(2.));
}

TEST_CASE("linear interpolation reproduces affine functions") {
	const auto g = Grid::uniform2d(0., 1., 11, -1., 1., 9);
	const auto f = GridFunction::sample(g, [](const Vec &x) {
		return 2. * x[0] - 3. * x[1] + 0.5;
	});
	for (const Vec &x : {Vec{0.33, 0.21}, Vec{0.999, -0.77}, Vec{0.05, 0.95}})
		CHECK(f(x) == doctest::Approx(2. * x[0] - 3. * x[1] + 0.5).epsilon(1e-12));
}

TEST_CASE("off-grid evaluation by boundary policy") {
	const auto g = Grid::uniform1d(0., 1., 11);
	auto f = GridFunction::sample(g, [](const Vec &x) { return 3. * x[0]; });
	CHECK(f(Vec{1.5}) == doctest::Approx(3.));
	f.boundary_policy = BoundaryPolicy::extrapolate_linear;
	CHECK(f(Vec{1.5}) == doctest::Approx(4.5));
}

TEST_CASE("sup norm and finiteness") {
	const auto g = Grid::uniform1d(-1., 1., 21);
	auto f = GridFunction::sample(g, [](const Vec &x) { return x[0] * x[0] - 2.; });
	CHECK(f.sup_norm() == doctest::Approx(2.));
	CHECK(f.all_finite());
	f.values[3] = 1. / 0.;
	CHECK_FALSE(f.all_finite());
}
