#include "impstop/grid.hpp"

#include <algorithm> // std::clamp
#include <cmath>     // std::floor, std::isfinite

namespace impstop {

Grid Grid::uniform1d(double lo, double hi, int nodes) {
	if (!(hi > lo) || nodes < 3)
		throw SpecError("grid needs hi > lo and at least 3 nodes");
	Grid g;
	g.dim = 1;
	g.lo = {lo, 0.};
	g.hi = {hi, 0.};
	g.n = {nodes, 1};
	return g;
}

Grid Grid::uniform2d(double lo0, double hi0, int n0, double lo1, double hi1,
		int n1) {
	if (!(hi0 > lo0) || !(hi1 > lo1) || n0 < 3 || n1 < 3)
		throw SpecError("grid needs hi > lo and at least 3 nodes per axis");
	Grid g;
	g.dim = 2;
	g.lo = {lo0, lo1};
	g.hi = {hi0, hi1};
	g.n = {n0, n1};
	return g;
}

Vec Grid::point(int idx) const {
	const auto m = multi(idx);
	if (dim == 1)
		return {coord(0, m[0])};
	return {coord(0, m[0]), coord(1, m[1])};
}

bool Grid::on_face(int idx, int d, int side) const {
	const auto m = multi(idx);
	return side == 0 ? m[d] == 0 : m[d] == n[d] - 1;
}

bool Grid::on_boundary(int idx) const {
	for (int d = 0; d < dim; ++d)
		if (on_face(idx, d, 0) || on_face(idx, d, 1))
			return true;
	return false;
}

std::vector<std::pair<int, double>> Grid::weights(const Vec &x) const {
	std::array<int, 2> base{0, 0};
	std::array<double, 2> frac{0., 0.};
	for (int d = 0; d < dim; ++d) {
		const double t = (std::clamp(x[d], lo[d], hi[d]) - lo[d]) / h(d);
		int i = (int) std::floor(t);
		i = std::clamp(i, 0, n[d] - 2);
		base[d] = i;
		frac[d] = std::clamp(t - i, 0., 1.);
	}
	std::vector<std::pair<int, double>> w;
	if (dim == 1) {
		w.emplace_back(base[0], 1. - frac[0]);
		w.emplace_back(base[0] + 1, frac[0]);
	} else {
		for (int b = 0; b < 2; ++b)
			for (int a = 0; a < 2; ++a)
				w.emplace_back(index(base[0] + a, base[1] + b),
						(a ? frac[0] : 1. - frac[0])
								* (b ? frac[1] : 1. - frac[1]));
	}
	return w;
}

bool Grid::inside(const Vec &x, double slack) const {
	for (int d = 0; d < dim; ++d) {
		const double tol = slack * (hi[d] - lo[d]);
		if (x[d] < lo[d] - tol || x[d] > hi[d] + tol)
			return false;
	}
	return true;
}

bool Grid::same_shape(const Grid &other) const {
	if (dim != other.dim)
		return false;
	for (int d = 0; d < dim; ++d) {
		const double tol = 1e-9 * (hi[d] - lo[d]);
		if (n[d] != other.n[d] || std::abs(lo[d] - other.lo[d]) > tol
				|| std::abs(hi[d] - other.hi[d]) > tol)
			return false;
	}
	return true;
}

double GridFunction::operator()(const Vec &x) const {
	if (boundary_policy == BoundaryPolicy::extrapolate_linear && grid.dim == 1) {
		const double h = grid.h(0);
		const int n = grid.n[0];
		if (x[0] < grid.lo[0])
			return values[0] + (x[0] - grid.lo[0]) * (values[1] - values[0]) / h;
		if (x[0] > grid.hi[0])
			return values[n - 1]
					+ (x[0] - grid.hi[0]) * (values[n - 1] - values[n - 2]) / h;
	}
	double v = 0.;
	for (const auto &[k, w] : grid.weights(x))
		v += w * values[k];
	return v;
}

double GridFunction::sup_norm() const {
	double m = 0.;
	for (double v : values)
		m = std::max(m, std::abs(v));
	return m;
}

bool GridFunction::all_finite() const {
	for (double v : values)
		if (!std::isfinite(v))
			return false;
	return true;
}

} // namespace impstop
