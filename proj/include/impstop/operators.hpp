#pragma once

#include <cstdint>   // std::uint8_t
#include <stdexcept> // std::runtime_error
#include <utility>   // std::pair
#include <vector>    // std::vector

#include "impstop/grid.hpp"
#include "impstop/model.hpp"

namespace impstop {

struct GeneratorOptions {
	/// Switch to one-sided differences where the cell Peclet number
	/// |mu| h / D exceeds the threshold. When false, such a node is an error.
	bool allow_upwind = true;
	double peclet_threshold = 2.;
};

/// Discrete generator: (L phi)_i = sum_k w_ik phi_k on nodes with a full
/// stencil. Nodes whose stencil would leave the lattice are marked boundary
/// and carry an empty row.
struct GeneratorStencil {
	Grid grid;
	std::vector<std::vector<std::pair<int, double>>> rows;
	std::vector<std::uint8_t> upwinded;
	std::vector<std::uint8_t> boundary;

	double apply_row(int i, const std::vector<double> &phi) const;
};

struct GridError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

GeneratorStencil build_generator(const GameSpec &spec, const Grid &grid,
		double s = 0., const GeneratorOptions &options = {});

/// Node-wise L phi (drift, diffusion and atom-list jump integral). Boundary
/// nodes are NaN.
GridFunction apply_generator(const GameSpec &spec, const GridFunction &phi,
		double s = 0., const GeneratorOptions &options = {});

struct ImpulseOptions {
	int n_z = 64;
	double golden_tol = 1e-12;
	int golden_max_iter = 200;
};

/// Intervention operator M phi with its per-node optimizer. Nodes where no
/// impulse keeps Gamma(x, z) on the lattice are infeasible; their value is
/// -inf (maximizing) or +inf (minimizing), i.e. the impulse branch is
/// unavailable there.
struct ImpulseResult {
	std::vector<double> value;
	std::vector<double> z;
	std::vector<std::uint8_t> feasible;
};

/// Value of a single impulse z at state x: phi(Gamma(x, z)) + cash flow,
/// where the cash flow is e^{-delta s} times the player's impulse cash flow
/// (the cost with the sign implied by `sense` when none is specified).
double impulse_value(const GameSpec &spec, const GridFunction &phi,
		const Vec &x, double z, double s, Sense sense, std::size_t player = 0);

/// M phi(x) = opt_{z in Z} [phi(Gamma(x, z)) + cash flow(z)] with opt = inf
/// for sense = minimize and sup for maximize. Coarse z-grid of n_z points
/// followed by golden-section refinement of the best bracket.
ImpulseResult intervention_operator(const GameSpec &spec,
		const GridFunction &phi, double s, Sense sense,
		std::size_t player = 0, const ImpulseOptions &options = {});

/// Golden-section search for the maximizer of g on [a, b].
double golden_section_max(const std::function<double(double)> &g, double a,
		double b, double tol, int max_iter);

struct Violation {
	int node = -1;
	Vec x;
	double gap = 0.;
};

/// Nodes where M V >= V (minimizing controller) or M V <= V (maximizing)
/// fails by more than tol.
std::vector<Violation> intervention_inequality_check(const GridFunction &phi,
		const std::vector<double> &m_phi, Sense sense, double tol);

} // namespace impstop
