#include "impstop/verify.hpp"

#include <algorithm> // std::max
#include <cmath>     // std::abs, std::isfinite
#include <limits>    // std::numeric_limits
#include <sstream>   // std::ostringstream

#include <fmt/format.h>

namespace impstop {

const char *to_string(Region region) {
	switch (region) {
	case Region::boundary:
		return "boundary";
	case Region::impulse:
		return "I1";
	case Region::stop:
		return "I2";
	case Region::cont:
		return "I3";
	}
	return "?";
}

int RegionMap::count(Region region) const {
	int n = 0;
	for (auto r : labels)
		n += r == region;
	return n;
}

namespace {

constexpr double kHuge = 1e300;

double scale_of(const GridFunction &phi) {
	const double s = phi.sup_norm();
	return s > 0. ? s : 1.;
}

/// Signed gaps oriented so that a positive value means "prefers to
/// continue": controller side from I, stopper side from S.
double controller_margin(Sense sense, double I) {
	return sense == Sense::maximize ? I : -I;
}
double stopper_margin(Sense sense, double S) {
	return sense == Sense::minimize ? -S : S;
}

void finish_map(RegionMap &map, const std::vector<std::uint8_t> &boundary,
		double max_unclassified) {
	int interior = 0, unclassified = 0;
	for (std::size_t i = 0; i < map.labels.size(); ++i) {
		if (boundary[i])
			continue;
		++interior;
		unclassified += map.labels[i] == Region::boundary;
	}
	if (interior > 0 && unclassified > max_unclassified * interior)
		throw StructuralError(fmt::format("{} of {} interior nodes match no region"
				" (limit {:.0f}%): not a value-function candidate", unclassified,
				interior, 100. * max_unclassified));
}

} // namespace

RegionMap classify_regions(const GridFunction &phi, const QviProblem &problem,
		const ClassifyOptions &options) {
	const auto br = qvi_branches(phi, problem, problem.player);
	const auto &payoff = problem.game.payoffs.at(problem.player);
	const double scale = scale_of(phi);
	RegionMap map;
	map.grid = phi.grid;
	map.eps_value = options.eps_value * scale;
	map.eps_pde = options.eps_pde * scale;
	const double strict = options.eps_strict * scale;
	const int n = phi.grid.size();
	map.labels.assign(n, Region::boundary);
	for (int i = 0; i < n; ++i) {
		const bool can_stop = std::isfinite(br.S[i]);
		const bool can_act = br.M.feasible[i] != 0;
		const double sm = can_stop ? stopper_margin(payoff.stopper_sense, br.S[i])
				: kHuge;
		const double cm = can_act ? controller_margin(payoff.controller_sense,
				br.I[i]) : kHuge;
		if (!br.boundary[i] && std::abs(br.C[i]) <= map.eps_pde && sm > strict
				&& cm >= -map.eps_value)
			map.labels[i] = Region::cont;
		else if (can_stop && std::abs(br.S[i]) <= map.eps_value)
			map.labels[i] = Region::stop;
		else if (can_act && std::abs(br.I[i]) <= map.eps_value)
			map.labels[i] = Region::impulse;
	}
	finish_map(map, br.boundary, options.max_unclassified);
	return map;
}

RegionMap classify_regions_nonzero_sum(const GridFunction &phi1,
		const GridFunction &phi2, const QviProblem &problem,
		const ClassifyOptions &options) {
	const auto b1 = qvi_branches(phi1, problem, 0);
	const auto b2 = qvi_branches(phi2, problem, 1);
	const auto &p1 = problem.game.payoffs.at(0);
	const auto &p2 = problem.game.payoffs.at(1);
	const double scale = std::max(scale_of(phi1), scale_of(phi2));
	RegionMap map;
	map.grid = phi1.grid;
	map.eps_value = options.eps_value * scale;
	map.eps_pde = options.eps_pde * scale;
	const double strict = options.eps_strict * scale;
	const int n = phi1.grid.size();
	map.labels.assign(n, Region::boundary);
	for (int i = 0; i < n; ++i) {
		const bool can_stop = std::isfinite(b2.S[i]);
		const bool can_act = b1.M.feasible[i] != 0;
		const double sm = can_stop ? stopper_margin(p2.stopper_sense, b2.S[i])
				: kHuge;
		const double cm = can_act ? controller_margin(p1.controller_sense, b1.I[i])
				: kHuge;
		if (!b1.boundary[i] && std::abs(b1.C[i]) <= map.eps_pde
				&& std::abs(b2.C[i]) <= map.eps_pde && sm > strict
				&& cm >= -map.eps_value)
			map.labels[i] = Region::cont;
		else if (can_stop && std::abs(b2.S[i]) <= map.eps_value)
			map.labels[i] = Region::stop;
		else if (can_act && std::abs(b1.I[i]) <= map.eps_value)
			map.labels[i] = Region::impulse;
	}
	finish_map(map, b1.boundary, options.max_unclassified);
	return map;
}

std::vector<Label> labels_from_regions(const RegionMap &regions) {
	std::vector<Label> out(regions.labels.size(), Label::cont);
	for (std::size_t i = 0; i < out.size(); ++i)
		if (regions.labels[i] == Region::stop)
			out[i] = Label::stop;
		else if (regions.labels[i] == Region::impulse)
			out[i] = Label::impulse;
	return out;
}

bool Certificate::ok() const {
	for (const auto &c : conditions)
		if (!c.pass)
			return false;
	return true;
}

const ConditionResult &Certificate::find(const std::string &id) const {
	for (const auto &c : conditions)
		if (c.id == id)
			return c;
	throw std::out_of_range("no condition " + id);
}

std::string Certificate::to_text() const {
	std::ostringstream out;
	out << fmt::format("tolerance {:.6e}\n", tol);
	out << fmt::format("{:<9} {:<7} {:>8} {:>10} {:>24} {:>14}  {}\n",
			"condition", "verdict", "checked", "worst_node", "worst_x",
			"violation", "description");
	for (const auto &c : conditions) {
		std::string x;
		for (std::size_t k = 0; k < c.worst_x.size(); ++k)
			x += (k ? ";" : "") + fmt::format("{:.6g}", c.worst_x[k]);
		out << fmt::format("{:<9} {:<7} {:>8} {:>10} {:>24} {:>14.6e}  {}\n",
				c.id, c.pass ? "pass" : "FAIL", c.checked, c.worst_node,
				x.empty() ? "-" : x, c.magnitude, c.description);
	}
	if (!notes.empty())
		out << notes << (notes.back() == '\n' ? "" : "\n");
	return out.str();
}

std::vector<std::uint8_t> region_band(const Grid &grid,
		const std::vector<Label> &policy,
		const std::vector<std::uint8_t> &truncation) {
	const int n = grid.size();
	std::vector<std::uint8_t> band(n, 0);
	for (int i = 0; i < n; ++i) {
		if (truncation[i]) {
			band[i] = 1;
			continue;
		}
		const auto ij = grid.multi(i);
		const int dj = grid.dim == 2 ? 1 : 0;
		for (int a = -1; a <= 1 && !band[i]; ++a)
			for (int b = -dj; b <= dj; ++b) {
				const int ii = ij[0] + a, jj = ij[1] + b;
				if (ii < 0 || ii >= grid.n[0] || (grid.dim == 2
						&& (jj < 0 || jj >= grid.n[1])))
					continue;
				if (policy[grid.index(ii, jj)] != policy[i]) {
					band[i] = 1;
					break;
				}
			}
	}
	return band;
}

namespace {

/// Accumulates the worst violation of one condition.
struct Tally {
	ConditionResult result;
	const Grid *grid;

	Tally(const Grid &g, std::string id, std::string description) : grid(&g) {
		result.id = std::move(id);
		result.description = std::move(description);
	}
	/// violation > 0 fails.
	void add(int node, double violation) {
		++result.checked;
		if (!(violation <= 0.)) {
			const double v = std::isfinite(violation) ? violation : kHuge;
			if (result.pass || v > result.magnitude) {
				result.magnitude = v;
				result.worst_node = node;
				result.worst_x = grid->point(node);
			}
			result.pass = false;
		}
	}
};

std::vector<std::uint8_t> adjacent_to_stop(const Grid &grid,
		const std::vector<Label> &policy) {
	const int n = grid.size();
	std::vector<std::uint8_t> out(n, 0);
	for (int i = 0; i < n; ++i) {
		const auto ij = grid.multi(i);
		bool has_stop = false, has_other = false;
		const int dj = grid.dim == 2 ? 1 : 0;
		for (int a = -1; a <= 1; ++a)
			for (int b = -dj; b <= dj; ++b) {
				const int ii = ij[0] + a, jj = ij[1] + b;
				if (ii < 0 || ii >= grid.n[0] || (grid.dim == 2
						&& (jj < 0 || jj >= grid.n[1])))
					continue;
				const bool s = policy[grid.index(ii, jj)] == Label::stop;
				has_stop = has_stop || s;
				has_other = has_other || !s;
			}
		out[i] = has_stop && has_other;
	}
	return out;
}

/// Violation of "controller does not gain by acting", "stopper does not
/// gain by stopping" and of the PDE sides, oriented so that > 0 is bad.
double controller_obstacle_violation(Sense sense, double I, double tol) {
	return -controller_margin(sense, I) - tol;
}
double stopper_obstacle_violation(Sense sense, double S, double tol) {
	return -stopper_margin(sense, S) - tol;
}
/// Where the stopper continues, the controller's side of the PDE:
/// maximizing controller needs C >= 0, minimizing C <= 0.
double controller_pde_violation(Sense sense, double C, double tol) {
	return (sense == Sense::maximize ? -C : C) - tol;
}
/// Where the controller continues, the stopper's side: minimizing stopper
/// needs C <= 0, maximizing C >= 0.
double stopper_pde_violation(Sense sense, double C, double tol) {
	return (sense == Sense::minimize ? C : -C) - tol;
}

} // namespace

Certificate check_zero_sum_conditions(const GridFunction &phi,
		const QviProblem &problem, const std::vector<Label> &policy, double tol) {
	const Grid &grid = phi.grid;
	const int n = grid.size();
	if ((int) policy.size() != n)
		throw GridError("policy labels do not match the grid");
	const auto br = qvi_branches(phi, problem, problem.player);
	const auto &payoff = problem.game.payoffs.at(problem.player);
	const auto band = region_band(grid, policy, br.boundary);
	const auto edge = adjacent_to_stop(grid, policy);

	Tally c1(grid, "(i)", "value finite at every node");
	Tally c2(grid, "(ii)", "obstacle inequalities against M phi and G");
	Tally c3(grid, "(iii)", "one-sided PDE inequalities off the impulse region");
	Tally c3b(grid, "(iii.I1)", "controller-side PDE inequality inside I1");
	Tally c4(grid, "(iv)", "PDE equality on continuation nodes");
	Tally c5(grid, "(v)", "phi = G on stop nodes, phi = M phi on impulse nodes");
	Tally c6(grid, "(vi)", "phi = G on the stop-boundary band");
	for (int i = 0; i < n; ++i) {
		c1.add(i, std::isfinite(phi.values[i]) ? 0. : 1.);
		if (br.M.feasible[i])
			c2.add(i, controller_obstacle_violation(payoff.controller_sense,
					br.I[i], tol));
		if (std::isfinite(br.S[i]))
			c2.add(i, stopper_obstacle_violation(payoff.stopper_sense, br.S[i], tol));
		const Label l = policy[i];
		if (!band[i]) {
			if (l == Label::cont) {
				c3.add(i, controller_pde_violation(payoff.controller_sense, br.C[i],
						tol));
				c3.add(i, stopper_pde_violation(payoff.stopper_sense, br.C[i], tol));
				c4.add(i, std::abs(br.C[i]) - tol);
			} else if (l == Label::stop) {
				// Where the controller is indifferent to intervening, the
				// stopper's inequality holds through the impulse branch.
				const double P = payoff.controller_sense == Sense::maximize
						? std::min(br.C[i], br.I[i]) : std::max(br.C[i], br.I[i]);
				c3.add(i, stopper_pde_violation(payoff.stopper_sense, P, tol));
			} else {
				c3b.add(i, controller_pde_violation(payoff.controller_sense, br.C[i],
						tol));
			}
		}
		if (l == Label::stop)
			c5.add(i, std::abs(br.S[i]) - tol);
		else if (l == Label::impulse)
			c5.add(i, br.M.feasible[i] ? std::abs(br.I[i]) - tol : 1.);
		if (edge[i] && std::isfinite(br.S[i]))
			c6.add(i, std::abs(br.S[i]) - tol);
	}
	Certificate cert;
	cert.tol = tol;
	cert.conditions = {c1.result, c2.result, c3.result, c3b.result, c4.result,
			c5.result, c6.result};
	cert.notes = "PDE conditions exclude nodes whose stencil straddles a region"
			" boundary.";
	return cert;
}

Certificate check_nonzero_sum_conditions(const GridFunction &phi1,
		const GridFunction &phi2, const QviProblem &problem,
		const std::vector<Label> &policy, double tol,
		const NonzeroSumCheckOptions &options) {
	if (problem.game.payoffs.size() != 2)
		throw QviError("non-zero-sum check needs two payoff specs");
	if (!phi1.grid.same_shape(phi2.grid))
		throw GridError("phi1 and phi2 live on different grids");
	const Grid &grid = phi1.grid;
	const int n = grid.size();
	if ((int) policy.size() != n)
		throw GridError("policy labels do not match the grid");
	const auto &game = problem.game;
	const auto b1 = qvi_branches(phi1, problem, 0);
	const auto b2 = qvi_branches(phi2, problem, 1);
	const auto &p1 = game.payoffs[0];
	const auto &p2 = game.payoffs[1];
	const auto band = region_band(grid, policy, b1.boundary);
	const auto edge = adjacent_to_stop(grid, policy);
	const auto &iv = game.intervention;

	Tally c1(grid, "(i')", "both values finite at every node");
	Tally c2(grid, "(ii')", "phi1 against M phi1, phi2 against G2");
	Tally c3(grid, "(iii')", "PDE inequalities and sampled alternative impulses");
	Tally c4(grid, "(iv')", "both PDEs hold on continuation nodes");
	Tally c5(grid, "(v')", "stop and impulse nodes carry the action values");
	Tally c6(grid, "(vi')", "phi1 = G1 and phi2 = G2 on the stop-boundary band");
	int samples = 0;
	for (int i = 0; i < n; ++i) {
		const Vec x = grid.point(i);
		c1.add(i, std::isfinite(phi1.values[i]) && std::isfinite(phi2.values[i])
				? 0. : 1.);
		if (b1.M.feasible[i])
			c2.add(i, controller_obstacle_violation(p1.controller_sense, b1.I[i],
					tol));
		if (std::isfinite(b2.S[i]))
			c2.add(i, stopper_obstacle_violation(p2.stopper_sense, b2.S[i], tol));
		const Label l = policy[i];
		if (!band[i]) {
			if (l == Label::cont) {
				c3.add(i, controller_pde_violation(p1.controller_sense, b1.C[i], tol));
				c3.add(i, stopper_pde_violation(p2.stopper_sense, b2.C[i], tol));
				c4.add(i, std::abs(b1.C[i]) - tol);
				c4.add(i, std::abs(b2.C[i]) - tol);
			} else if (l == Label::stop) {
				c3.add(i, stopper_pde_violation(p2.stopper_sense, b2.C[i], tol));
			} else {
				c3.add(i, controller_pde_violation(p1.controller_sense, b1.C[i], tol));
			}
		}
		// Alternative impulse policies: perturbed optimizers must not beat
		// the value of phi1.
		if (l != Label::stop && b1.M.feasible[i] && iv.enabled)
			for (double eps : options.perturbations) {
				const double z = std::clamp(b1.M.z[i] * (1. + eps), iv.z_lo, iv.z_hi);
				if (!grid.inside(iv.response(x, z)))
					continue;
				const double v = impulse_value(game, phi1, x, z, 0.,
						p1.controller_sense, 0);
				c3.add(i, controller_obstacle_violation(p1.controller_sense,
						phi1.values[i] - v, tol));
				++samples;
			}
		if (l == Label::stop) {
			c5.add(i, std::abs(b2.S[i]) - tol);
			if (std::isfinite(b1.S[i]) || p1.bequest)
				c5.add(i, std::abs(phi1.values[i] - p1.G(0., x)) - tol);
		} else if (l == Label::impulse) {
			if (!b1.M.feasible[i]) {
				c5.add(i, 1.);
			} else {
				c5.add(i, std::abs(b1.I[i]) - tol);
				const double follow = impulse_value(game, phi2, x, b1.M.z[i], 0.,
						p1.controller_sense, 1);
				c5.add(i, std::abs(phi2.values[i] - follow) - tol);
			}
		}
		if (edge[i]) {
			c6.add(i, std::abs(phi1.values[i] - p1.G(0., x)) - tol);
			c6.add(i, std::abs(phi2.values[i] - p2.G(0., x)) - tol);
		}
	}
	Certificate cert;
	cert.tol = tol;
	cert.conditions = {c1.result, c2.result, c3.result, c4.result, c5.result,
			c6.result};
	cert.notes = fmt::format("(iii') sampled {} alternative impulses from {}"
			" relative perturbations of the optimizer; PDE conditions exclude"
			" nodes whose stencil straddles a region boundary.", samples,
			options.perturbations.size());
	return cert;
}

double residual_sup_excluding(const GridFunction &R,
		const std::vector<double> &free_boundaries, int collar, int d) {
	const Grid &grid = R.grid;
	const double h = grid.h(d);
	double out = 0.;
	for (int i = 0; i < grid.size(); ++i) {
		if (grid.on_boundary(i) || !std::isfinite(R.values[i]))
			continue;
		const double x = grid.point(i)[d];
		bool near = false;
		for (double b : free_boundaries)
			near = near || std::abs(x - b) <= collar * h * (1. + 1e-9);
		if (!near)
			out = std::max(out, std::abs(R.values[i]));
	}
	return out;
}

double min_coordinate(const Grid &grid, const std::vector<Label> &labels,
		Label label, int d) {
	double out = std::numeric_limits<double>::quiet_NaN();
	for (int i = 0; i < grid.size(); ++i)
		if (labels[i] == label) {
			const double x = grid.point(i)[d];
			if (!(out <= x))
				out = x;
		}
	return out;
}

double max_coordinate(const Grid &grid, const std::vector<Label> &labels,
		Label label, int d) {
	double out = std::numeric_limits<double>::quiet_NaN();
	for (int i = 0; i < grid.size(); ++i)
		if (labels[i] == label) {
			const double x = grid.point(i)[d];
			if (!(out >= x))
				out = x;
		}
	return out;
}

} // namespace impstop
