#pragma once

#include <cstdint>   // std::uint8_t
#include <stdexcept> // std::runtime_error
#include <string>    // std::string
#include <vector>    // std::vector

#include "impstop/grid.hpp"
#include "impstop/qvi.hpp"

namespace impstop {

/// I1 impulse, I2 stop, I3 continue; boundary marks nodes that match none
/// of the three defining condition sets within tolerance.
enum class Region : std::uint8_t { boundary = 0, impulse = 1, stop = 2, cont = 3 };
const char *to_string(Region region);

struct RegionMap {
	Grid grid;
	std::vector<Region> labels;
	double eps_value = 0.;
	double eps_pde = 0.;

	int count(Region region) const;
};

/// Tolerances are relative to the scale max |phi| (which makes the labels
/// invariant under a common positive rescaling of phi, G, f and costs).
struct ClassifyOptions {
	/// Obstacle equalities phi = G and phi = M phi.
	double eps_value = 1e-6;
	/// PDE equality delta phi - L phi - f = 0.
	double eps_pde = 1e-4;
	/// Strict side of the stopping obstacle.
	double eps_strict = 1e-12;
	/// Allowed fraction of unclassifiable interior nodes.
	double max_unclassified = 0.05;
};

struct StructuralError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Node labels from the three region conditions of payoff problem.player:
///   I3  PDE holds, the stopper strictly prefers to continue and the
///       controller does not prefer to act;
///   I2  phi = G;
///   I1  phi = M phi.
/// The checks are applied in that order. Throws StructuralError when more
/// than max_unclassified of the interior nodes match none.
RegionMap classify_regions(const GridFunction &phi, const QviProblem &problem,
		const ClassifyOptions &options = {});

/// Two-player version: stopping from (phi2, G2), impulses from (phi1, M phi1)
/// and the PDE for both functions.
RegionMap classify_regions_nonzero_sum(const GridFunction &phi1,
		const GridFunction &phi2, const QviProblem &problem,
		const ClassifyOptions &options = {});

/// Policy labels from region predicates, e.g. analytic thresholds.
std::vector<Label> labels_from_regions(const RegionMap &regions);

struct ConditionResult {
	std::string id;
	std::string description;
	bool pass = true;
	int checked = 0;
	int worst_node = -1;
	Vec worst_x;
	/// Largest violation beyond tolerance (0 when passing).
	double magnitude = 0.;
};

struct Certificate {
	std::vector<ConditionResult> conditions;
	double tol = 0.;
	std::string notes;

	bool ok() const;
	const ConditionResult &find(const std::string &id) const;
	std::string to_text() const;
};

/// Conditions of the zero-sum verification theorem evaluated on the grid
/// with regions taken from `policy` (one label per node):
///   (i)     phi finite
///   (ii)    both obstacle inequalities on every node
///   (iii)   one-sided PDE inequalities off the impulse region: the
///           controller's side where the stopper continues, the stopper's
///           side where the controller continues
///   (iii.I1) the controller-side inequality inside the impulse region
///   (iv)    PDE equality on continuation nodes
///   (v)     phi = G on stop nodes, phi = M phi on impulse nodes
///   (vi)    phi = G on the stop-boundary band
/// Nodes whose stencil straddles a region boundary are excluded from the
/// PDE conditions.
Certificate check_zero_sum_conditions(const GridFunction &phi,
		const QviProblem &problem, const std::vector<Label> &policy, double tol);

struct NonzeroSumCheckOptions {
	/// Relative perturbations of the impulse optimizer used to sample
	/// alternative impulse policies in (iii').
	std::vector<double> perturbations{-0.15, -0.12, -0.10, -0.08, -0.06, -0.05,
			-0.04, -0.02, 0.02, 0.04, 0.05, 0.06, 0.08, 0.10, 0.12, 0.15};
};

/// Conditions (i')-(vi') of the non-zero-sum verification theorem for
/// player 1 (payoff 0, impulses) and player 2 (payoff 1, stopping).
Certificate check_nonzero_sum_conditions(const GridFunction &phi1,
		const GridFunction &phi2, const QviProblem &problem,
		const std::vector<Label> &policy, double tol,
		const NonzeroSumCheckOptions &options = {});

/// Nodes whose (8-neighbour) stencil touches a differently labelled node,
/// plus truncation-boundary nodes.
std::vector<std::uint8_t> region_band(const Grid &grid,
		const std::vector<Label> &policy,
		const std::vector<std::uint8_t> &truncation);

/// max |R| over finite nodes off the truncation faces and farther than
/// `collar` cells (along dimension d) from every listed free boundary.
double residual_sup_excluding(const GridFunction &R,
		const std::vector<double> &free_boundaries, int collar, int d = 0);

/// Smallest / largest coordinate along dimension d of nodes labelled
/// `label` (NaN when there are none): recovered free boundaries.
double min_coordinate(const Grid &grid, const std::vector<Label> &labels,
		Label label, int d = 0);
double max_coordinate(const Grid &grid, const std::vector<Label> &labels,
		Label label, int d = 0);

} // namespace impstop
