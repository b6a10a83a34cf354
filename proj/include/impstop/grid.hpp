#pragma once

#include <array>   // std::array
#include <utility> // std::pair
#include <vector>  // std::vector

#include "impstop/model.hpp"

namespace impstop {

/// Uniform lattice over a 1D interval or a 2D rectangle. Node (i, j) has
/// flat index i + n[0] * j.
struct Grid {
	int dim = 1;
	std::array<double, 2> lo{0., 0.};
	std::array<double, 2> hi{1., 0.};
	std::array<int, 2> n{2, 1};

	static Grid uniform1d(double lo, double hi, int nodes);
	static Grid uniform2d(double lo0, double hi0, int n0, double lo1,
			double hi1, int n1);

	int size() const { return n[0] * (dim == 2 ? n[1] : 1); }
	double h(int d) const { return (hi[d] - lo[d]) / (n[d] - 1); }
	int index(int i, int j = 0) const { return i + n[0] * j; }
	std::array<int, 2> multi(int idx) const {
		return {idx % n[0], dim == 2 ? idx / n[0] : 0};
	}
	double coord(int d, int i) const { return lo[d] + i * h(d); }
	Vec point(int idx) const;

	/// True for nodes on the outer face of dimension d (side 0 = low).
	bool on_face(int idx, int d, int side) const;
	bool on_boundary(int idx) const;

	/// Linear (1D) / bilinear (2D) interpolation weights of x, with x
	/// clamped into the lattice box.
	std::vector<std::pair<int, double>> weights(const Vec &x) const;
	bool inside(const Vec &x, double slack = 1e-12) const;

	bool same_shape(const Grid &other) const;
};

enum class BoundaryPolicy { dirichlet, extrapolate_linear };

/// Values of a candidate value function on a Grid.
struct GridFunction {
	Grid grid;
	std::vector<double> values;
	BoundaryPolicy boundary_policy = BoundaryPolicy::dirichlet;

	GridFunction() = default;
	GridFunction(const Grid &g, double fill = 0.)
			: grid(g), values(g.size(), fill) {}

	template <class F>
	static GridFunction sample(const Grid &g, F &&f) {
		GridFunction out(g);
		for (int k = 0; k < g.size(); ++k)
			out.values[k] = f(g.point(k));
		return out;
	}

	/// Off-grid evaluation. Dirichlet: clamp to the box. Extrapolate-linear:
	/// continue the boundary cell's linear interpolant (1D only; 2D clamps).
	double operator()(const Vec &x) const;
	double sup_norm() const;
	bool all_finite() const;
};

} // namespace impstop
