#include "impstop/qvi.hpp"

#include <algorithm> // std::max, std::clamp
#include <array>     // std::array
#include <cmath>     // std::abs, std::isfinite
#include <limits>    // std::numeric_limits
#include <optional>  // std::optional
#include <sstream>   // std::ostringstream

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include "impstop/io.hpp"

namespace impstop {

const char *to_string(Label label) {
	switch (label) {
	case Label::cont:
		return "continue";
	case Label::impulse:
		return "impulse";
	case Label::stop:
		return "stop";
	}
	return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Which branches a player may choose at each node, and what is frozen.
struct CoreSetup {
	std::size_t player = 0;
	bool impulse_free = true;
	bool stop_free = true;
	const std::vector<std::uint8_t> *forced_stop = nullptr;
	const std::vector<std::uint8_t> *forced_impulse = nullptr;
	const std::vector<double> *forced_z = nullptr;
	/// Backward Euler: C gains dt_inv (phi - previous).
	const std::vector<double> *previous = nullptr;
	double dt_inv = 0.;
};

struct Evaluation {
	QviBranches branches;
	std::vector<double> R;
	std::vector<Label> labels;
	/// Controller's preferred action ignoring the stopper, with the
	/// absolute gap |C - I| between its two branches.
	std::vector<Label> ctrl;
	std::vector<double> ctrl_gap;
	std::vector<double> z;
	/// Impulse value (phi(Gamma) + cash flow) at the labelled impulse.
	std::vector<double> impulse_target;
};

double cashflow(const GameSpec &game, std::size_t player, const Vec &x,
		double z, Sense sense) {
	const auto &payoff = game.payoffs.at(player);
	if (payoff.impulse_cashflow)
		return payoff.impulse_cashflow(x, z);
	const double c = game.intervention.cost ? game.intervention.cost(0., z) : 0.;
	return sense == Sense::minimize ? c : -c;
}

double boundary_data(const QviProblem &problem, std::size_t player,
		const Vec &x) {
	if (player < problem.boundary_value.size() && problem.boundary_value[player])
		return problem.boundary_value[player](x);
	return problem.game.payoffs.at(player).G(0., x);
}

bool forced_action_face(const QviProblem &problem, int i) {
	const Grid &g = problem.grid;
	for (int d = 0; d < g.dim; ++d)
		for (int side = 0; side < 2; ++side)
			if (g.on_face(i, d, side)
					&& problem.faces[2 * d + side] == FacePolicy::forced_action)
				return true;
	return false;
}

Evaluation evaluate(const GridFunction &phi, const QviProblem &problem,
		const CoreSetup &setup, const GeneratorStencil &stencil) {
	const Grid &grid = problem.grid;
	const int n = grid.size();
	const auto &game = problem.game;
	const auto &payoff = game.payoffs.at(setup.player);
	const Sense cs = payoff.controller_sense;
	const Sense ss = payoff.stopper_sense;
	const double c_unavail = cs == Sense::maximize ? kInf : -kInf;
	const double s_unavail = ss == Sense::minimize ? -kInf : kInf;

	Evaluation ev;
	auto &b = ev.branches;
	b.C.assign(n, 0.);
	b.I.assign(n, c_unavail);
	b.S.assign(n, s_unavail);
	b.boundary = stencil.boundary;
	if (setup.impulse_free && game.intervention.enabled)
		b.M = intervention_operator(game, phi, 0., cs, setup.player,
				problem.impulse);
	else
		b.M = ImpulseResult{std::vector<double>(n, -c_unavail),
				std::vector<double>(n, 0.), std::vector<std::uint8_t>(n, 0)};
	ev.R.assign(n, 0.);
	ev.labels.assign(n, Label::cont);
	ev.ctrl.assign(n, Label::cont);
	ev.ctrl_gap.assign(n, kInf);
	ev.z = b.M.z;
	ev.impulse_target = b.M.value;

	const double scale = 1. + phi.sup_norm();
	const double tie = problem.tie_tol * scale;
	for (int i = 0; i < n; ++i) {
		const Vec x = grid.point(i);
		const bool frozen_impulse = setup.forced_impulse
				&& (*setup.forced_impulse)[i];
		if (frozen_impulse) {
			const double z = (*setup.forced_z)[i];
			ev.z[i] = z;
			ev.impulse_target[i] = phi(game.intervention.response(x, z))
					+ cashflow(game, setup.player, x, z, cs);
			b.M.value[i] = ev.impulse_target[i];
			b.M.feasible[i] = 1;
		}
		if (b.M.feasible[i])
			b.I[i] = phi.values[i] - b.M.value[i];

		// Continuation branch.
		if (stencil.boundary[i]) {
			if (forced_action_face(problem, i) && b.M.feasible[i])
				b.C[i] = c_unavail;
			else
				b.C[i] = phi.values[i] - boundary_data(problem, setup.player, x);
		} else {
			b.C[i] = payoff.discount * phi.values[i]
					- stencil.apply_row(i, phi.values)
					- (payoff.running ? payoff.running(x) : 0.);
			if (setup.previous)
				b.C[i] += setup.dt_inv * (phi.values[i] - (*setup.previous)[i]);
		}
		if (setup.stop_free && payoff.stopping_enabled)
			b.S[i] = phi.values[i] - payoff.G(0., x);

		// Controller part: frozen impulses replace the continuation.
		double P;
		Label ctrl;
		if (frozen_impulse) {
			P = b.I[i];
			ctrl = Label::impulse;
		} else if (cs == Sense::maximize) {
			P = std::min(b.C[i], b.I[i]);
			ctrl = b.C[i] <= b.I[i] + tie ? Label::cont : Label::impulse;
		} else {
			P = std::max(b.C[i], b.I[i]);
			ctrl = b.C[i] >= b.I[i] - tie ? Label::cont : Label::impulse;
		}
		if (!std::isfinite(P)) {
			// Neither continuing nor an impulse is possible: Dirichlet data.
			P = phi.values[i] - boundary_data(problem, setup.player, x);
			ctrl = Label::cont;
			b.C[i] = P;
		}
		ev.ctrl[i] = ctrl;
		if (std::isfinite(b.C[i]) && std::isfinite(b.I[i]))
			ev.ctrl_gap[i] = std::abs(b.C[i] - b.I[i]);
		if (setup.forced_stop && (*setup.forced_stop)[i]) {
			ev.labels[i] = Label::stop;
			ev.R[i] = phi.values[i] - payoff.G(0., x);
			continue;
		}

		// Stopper part.
		const double S = b.S[i];
		double R;
		bool stop_strict, stop_tied;
		if (ss == Sense::minimize) {
			R = std::max(S, P);
			stop_strict = S > P + tie;
			stop_tied = S >= P - tie;
		} else {
			R = std::min(S, P);
			stop_strict = S < P - tie;
			stop_tied = S <= P + tie;
		}
		if (!std::isfinite(S)) {
			stop_strict = stop_tied = false;
			R = P;
		}
		ev.R[i] = R;
		if (stop_strict)
			ev.labels[i] = Label::stop;
		else if (ctrl == Label::cont)
			ev.labels[i] = Label::cont;
		else
			ev.labels[i] = stop_tied ? Label::stop : Label::impulse;
	}
	return ev;
}

double sup_abs(const std::vector<double> &v,
		const std::vector<std::uint8_t> *skip = nullptr) {
	double m = 0.;
	for (std::size_t i = 0; i < v.size(); ++i) {
		if (skip && (*skip)[i])
			continue;
		if (std::isfinite(v[i]))
			m = std::max(m, std::abs(v[i]));
	}
	return m;
}

void check_impulse_chains(const Grid &grid, const QviProblem &problem,
		const std::vector<Label> &labels, const std::vector<double> &z) {
	const int n = grid.size();
	std::vector<int> next(n, -1);
	for (int i = 0; i < n; ++i) {
		if (labels[i] != Label::impulse)
			continue;
		const auto w = grid.weights(problem.game.intervention.response(
				grid.point(i), z[i]));
		int best = w.front().first;
		double best_w = -1.;
		for (const auto &[k, wk] : w)
			if (wk > best_w) {
				best_w = wk;
				best = k;
			}
		next[i] = best;
	}
	// 0 = unvisited, 1 = on the current walk, 2 = terminates.
	std::vector<std::uint8_t> state(n, 0);
	for (int i = 0; i < n; ++i) {
		if (labels[i] != Label::impulse || state[i] == 2)
			continue;
		std::vector<int> walk;
		int j = i;
		while (j >= 0 && labels[j] == Label::impulse && state[j] == 0) {
			state[j] = 1;
			walk.push_back(j);
			j = next[j];
		}
		if (j >= 0 && labels[j] == Label::impulse && state[j] == 1) {
			std::ostringstream msg;
			msg << "non-contractive impulse policy: impulse destinations cycle"
					" through node " << j << " (x = " << grid.point(j)[0] << ")";
			throw QviError(msg.str());
		}
		for (int k : walk)
			state[k] = 2;
	}
}

std::vector<double> solve_policy(const QviProblem &problem,
		const CoreSetup &setup, const GeneratorStencil &stencil,
		const Evaluation &ev) {
	const Grid &grid = problem.grid;
	const int n = grid.size();
	const auto &game = problem.game;
	const auto &payoff = game.payoffs.at(setup.player);
	std::vector<Eigen::Triplet<double>> triplets;
	triplets.reserve(8 * n);
	Eigen::VectorXd rhs(n);
	for (int i = 0; i < n; ++i) {
		const Vec x = grid.point(i);
		switch (ev.labels[i]) {
		case Label::stop:
			triplets.emplace_back(i, i, 1.);
			rhs[i] = payoff.G(0., x);
			break;
		case Label::impulse: {
			triplets.emplace_back(i, i, 1.);
			const double z = ev.z[i];
			for (const auto &[k, w] : grid.weights(game.intervention.response(x, z)))
				if (w != 0.)
					triplets.emplace_back(i, k, -w);
			rhs[i] = cashflow(game, setup.player, x, z, payoff.controller_sense);
			break;
		}
		case Label::cont:
			if (stencil.boundary[i]) {
				triplets.emplace_back(i, i, 1.);
				rhs[i] = boundary_data(problem, setup.player, x);
			} else {
				triplets.emplace_back(i, i, payoff.discount + setup.dt_inv);
				for (const auto &[k, w] : stencil.rows[i])
					triplets.emplace_back(i, k, -w);
				rhs[i] = (payoff.running ? payoff.running(x) : 0.)
						+ (setup.previous ? setup.dt_inv * (*setup.previous)[i] : 0.);
			}
			break;
		}
	}
	Eigen::SparseMatrix<double> A(n, n);
	A.setFromTriplets(triplets.begin(), triplets.end());
	A.makeCompressed();
	Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
	lu.analyzePattern(A);
	lu.factorize(A);
	if (lu.info() != Eigen::Success)
		throw QviError("policy evaluation: singular linear system ("
				+ lu.lastErrorMessage() + ")");
	const Eigen::VectorXd sol = lu.solve(rhs);
	if (lu.info() != Eigen::Success)
		throw QviError("policy evaluation: linear solve failed");
	return std::vector<double>(sol.data(), sol.data() + n);
}

std::string diff_policies(const Grid &grid, const std::vector<Label> &a,
		const std::vector<Label> &b) {
	std::ostringstream out;
	int shown = 0;
	for (std::size_t i = 0; i < a.size() && shown < 10; ++i)
		if (a[i] != b[i]) {
			const Vec x = grid.point((int) i);
			out << " node " << i << " (x0 = " << x[0] << "): "
					<< to_string(a[i]) << " <-> " << to_string(b[i]) << ";";
			++shown;
		}
	return out.str();
}

QviSolution howard(const QviProblem &problem, const CoreSetup &setup,
		const QviOptions &options, const GridFunction &initial,
		const GeneratorStencil &stencil) {
	const Grid &grid = problem.grid;
	const int n = grid.size();
	GridFunction phi = initial;
	Evaluation ev = evaluate(phi, problem, setup, stencil);

	QviSolution out;
	std::vector<Label> previous_labels;
	std::vector<double> previous_values;
	int direction = 0;
	for (int iter = 1; iter <= options.max_iter; ++iter) {
		check_impulse_chains(grid, problem, ev.labels, ev.z);
		const std::vector<double> values = solve_policy(problem, setup, stencil, ev);
		double change = 0.;
		for (int i = 0; i < n; ++i)
			change = std::max(change, std::abs(values[i] - phi.values[i]));
		if (iter >= 3) {
			// Monotone iterates after the first relabel.
			int dir = 0;
			bool mixed = false;
			for (int i = 0; i < n; ++i) {
				const double d = values[i] - phi.values[i];
				const double tol = 1e-10 * (1. + std::abs(values[i]));
				const int s = d > tol ? 1 : (d < -tol ? -1 : 0);
				if (s && dir && s != dir)
					mixed = true;
				if (s)
					dir = s;
			}
			if (mixed || (dir && direction && dir != direction))
				out.monotone = false;
			if (dir)
				direction = dir;
		}
		phi.values = values;
		Evaluation next = evaluate(phi, problem, setup, stencil);
		int changes = 0;
		for (int i = 0; i < n; ++i)
			changes += next.labels[i] != ev.labels[i];
		const double residual = sup_abs(next.R);
		out.policy.history.push_back({iter, residual, changes});
		spdlog::debug("howard iter {} residual {:.3e} changes {}", iter,
				residual, changes);
		const bool stagnated = change <= 1e-14 * (1. + phi.sup_norm());
		previous_labels = ev.labels;
		ev = std::move(next);
		if (changes == 0 && (residual < options.tol || stagnated)) {
			out.value = phi;
			out.policy.labels = ev.labels;
			out.policy.z = ev.z;
			out.policy.iterations = iter;
			return out;
		}
	}
	throw QviError("policy iteration did not settle in "
			+ std::to_string(options.max_iter) + " iterations; last two policies"
			" differ at:" + diff_policies(grid, previous_labels, ev.labels));
}

/// Two-player games: policy iteration on the controller, where each
/// controller policy is evaluated by solving the stopper's obstacle problem
/// exactly. Plain policy iteration on both players at once can cycle.
QviSolution nested_howard(const QviProblem &problem, const CoreSetup &setup,
		const QviOptions &options, const GridFunction &initial,
		const GeneratorStencil &stencil,
		const std::vector<std::uint8_t> *start_impulse) {
	const Grid &grid = problem.grid;
	const int n = grid.size();
	GridFunction phi = initial;
	Evaluation ev = evaluate(phi, problem, setup, stencil);
	std::vector<std::uint8_t> impulse(n, 0);
	std::vector<double> z = ev.z;
	// Improvement can only shrink an oversized intervention region by one
	// node per round (phi = M phi is consistent with the PDE inequality), so
	// a cold start intervenes only where continuing is unavailable.
	for (int i = 0; i < n; ++i)
		impulse[i] = ev.ctrl[i] == Label::impulse
				&& ((start_impulse && (*start_impulse)[i])
						|| !std::isfinite(ev.branches.C[i]));

	const Sense cs = problem.game.payoffs.at(setup.player).controller_sense;
	QviSolution out;
	std::vector<Label> previous_labels;
	std::vector<Label> labels;
	int total = 0;
	for (int outer = 1; outer <= options.max_iter; ++outer) {
		CoreSetup inner = setup;
		inner.impulse_free = false;
		inner.forced_impulse = &impulse;
		inner.forced_z = &z;
		const QviSolution r = howard(problem, inner, options, phi, stencil);
		total += r.policy.iterations;
		if (outer >= 3) {
			// The controller's improvements move the value one way.
			for (int i = 0; i < n; ++i) {
				const double d = r.value.values[i] - phi.values[i];
				const double tol = 1e-10 * (1. + std::abs(phi.values[i]));
				if ((cs == Sense::maximize && d < -tol)
						|| (cs == Sense::minimize && d > tol)) {
					out.monotone = false;
					break;
				}
			}
		}
		phi = r.value;
		previous_labels = labels;
		labels = r.policy.labels;

		const Evaluation next = evaluate(phi, problem, setup, stencil);
		const double tie = problem.tie_tol * (1. + phi.sup_norm());
		int changes = 0;
		double dz = 0.;
		for (int i = 0; i < n; ++i) {
			const bool want = next.ctrl[i] == Label::impulse;
			if (want != (bool) impulse[i] && next.ctrl_gap[i] > tie) {
				impulse[i] = want;
				++changes;
			}
			if (impulse[i] && next.ctrl[i] == Label::impulse) {
				dz = std::max(dz, std::abs(next.z[i] - z[i]));
				z[i] = next.z[i];
			}
		}
		const double residual = sup_abs(next.R);
		out.policy.history.push_back({outer, residual, changes});
		spdlog::debug("controller round {} residual {:.3e} changes {} "
				"inner {}", outer, residual, changes, r.policy.iterations);
		double z_scale = 1.;
		for (const double v : z)
			z_scale = std::max(z_scale, 1. + std::abs(v));
		if (changes == 0 && (residual < options.tol || dz <= 1e-10 * z_scale)) {
			out.value = phi;
			out.policy.labels = labels;
			out.policy.z = z;
			out.policy.iterations = total;
			return out;
		}
	}
	throw QviError("policy iteration did not settle in "
			+ std::to_string(options.max_iter) + " controller rounds; last two"
			" policies differ at:" + diff_policies(grid, previous_labels, labels));
}

QviSolution solve_core(const QviProblem &problem, const CoreSetup &setup,
		const QviOptions &options, const GridFunction &initial,
		const GeneratorStencil &stencil,
		const std::vector<std::uint8_t> *start_impulse = nullptr) {
	const bool controller_free = setup.impulse_free
			&& problem.game.intervention.enabled && !setup.forced_impulse;
	return controller_free ? nested_howard(problem, setup, options, initial, stencil,
			start_impulse)
			: howard(problem, setup, options, initial, stencil);
}

bool two_player(const QviProblem &problem) {
	const auto &game = problem.game;
	return game.intervention.enabled
			&& game.payoffs.at(problem.player).stopping_enabled;
}

/// Same box with every dimension at half resolution, or nothing when the
/// grid is already coarse.
std::optional<Grid> coarsened(const Grid &grid) {
	constexpr int kCoarsest = 60;
	for (int d = 0; d < grid.dim; ++d)
		if (grid.n[d] < 2 * kCoarsest)
			return std::nullopt;
	Grid out = grid;
	for (int d = 0; d < grid.dim; ++d)
		out.n[d] = (grid.n[d] - 1) / 2 + 1;
	return out;
}

int nearest_node(const Grid &grid, const Vec &x) {
	std::array<int, 2> k{0, 0};
	for (int d = 0; d < grid.dim; ++d)
		k[d] = std::clamp((int) std::lround((x[d] - grid.lo[d]) / grid.h(d)), 0,
				grid.n[d] - 1);
	return grid.index(k[0], k[1]);
}

GridFunction initial_guess(const QviProblem &problem, std::size_t player) {
	const auto &payoff = problem.game.payoffs.at(player);
	return GridFunction::sample(problem.grid,
			[&](const Vec &x) { return payoff.G(0., x); });
}

} // namespace

QviBranches qvi_branches(const GridFunction &phi, const QviProblem &problem,
		std::size_t player) {
	CoreSetup setup;
	setup.player = player;
	const auto stencil = build_generator(problem.game, problem.grid, 0.,
			problem.generator);
	return evaluate(phi, problem, setup, stencil).branches;
}

GridFunction qvi_residual(const GridFunction &phi, const QviProblem &problem) {
	CoreSetup setup;
	setup.player = problem.player;
	const auto stencil = build_generator(problem.game, problem.grid, 0.,
			problem.generator);
	GridFunction out(phi.grid);
	out.values = evaluate(phi, problem, setup, stencil).R;
	return out;
}

QviSolution solve_qvi(const QviProblem &problem, const QviOptions &options,
		const GridFunction *initial) {
	const auto stencil = build_generator(problem.game, problem.grid, 0.,
			problem.generator);
	CoreSetup setup;
	setup.player = problem.player;
	if (initial) {
		// Start from the impulses the guess itself prefers (strictly: ties go
		// to continuation).
		const auto br = qvi_branches(*initial, problem, problem.player);
		const bool max_ctrl = problem.game.payoffs[problem.player].controller_sense
				== Sense::maximize;
		std::vector<std::uint8_t> mask(problem.grid.size(), 0);
		for (int i = 0; i < problem.grid.size(); ++i)
			mask[i] = std::isfinite(br.I[i])
					&& (max_ctrl ? br.I[i] < br.C[i] : br.I[i] > br.C[i]);
		return solve_core(problem, setup, options, *initial, stencil, &mask);
	}
	if (two_player(problem))
		if (const auto coarse_grid = coarsened(problem.grid)) {
			// Coarse-to-fine: the coarse intervention region, read at the
			// nearest coarse node, is within a cell of the fine one.
			QviProblem coarse = problem;
			coarse.grid = *coarse_grid;
			try {
				const QviSolution c = solve_qvi(coarse, options, nullptr);
				const GridFunction warm = GridFunction::sample(problem.grid,
						[&](const Vec &x) { return c.value(x); });
				std::vector<std::uint8_t> mask(problem.grid.size(), 0);
				for (int i = 0; i < problem.grid.size(); ++i)
					mask[i] = c.policy.labels[nearest_node(coarse.grid,
							problem.grid.point(i))] == Label::impulse;
				return solve_core(problem, setup, options, warm, stencil, &mask);
			} catch (const QviError &e) {
				spdlog::debug("coarse solve failed ({}); cold start", e.what());
			}
		}
	return solve_core(problem, setup, options,
			initial_guess(problem, problem.player), stencil);
}

QviSolution solve_qvi_time_marching(const QviProblem &problem, double T,
		int steps, const QviOptions &options) {
	if (!(T > 0.) || steps < 1)
		throw QviError("time marching needs T > 0 and at least one step");
	const auto stencil = build_generator(problem.game, problem.grid, 0.,
			problem.generator);
	GridFunction phi = initial_guess(problem, problem.player);
	QviSolution out;
	for (int step = 0; step < steps; ++step) {
		CoreSetup setup;
		setup.player = problem.player;
		const std::vector<double> previous = phi.values;
		setup.previous = &previous;
		setup.dt_inv = steps / T;
		std::vector<std::uint8_t> mask(problem.grid.size(), 0);
		for (std::size_t i = 0; i < out.policy.labels.size(); ++i)
			mask[i] = out.policy.labels[i] == Label::impulse;
		out = solve_core(problem, setup, options, phi, stencil,
				step > 0 ? &mask : nullptr);
		phi = out.value;
	}
	return out;
}

namespace {

struct NonzeroSumStart {
	GridFunction phi1, phi2;
	std::vector<std::uint8_t> stop_mask, impulse_mask;
};

NonzeroSumResult best_response(const QviProblem &problem,
		const QviOptions &options, int max_rounds, const NonzeroSumStart *warm) {
	const Grid &grid = problem.grid;
	const int n = grid.size();
	const auto stencil = build_generator(problem.game, grid, 0.,
			problem.generator);

	std::vector<std::uint8_t> stop_mask(n, 0), impulse_mask(n, 0);
	std::vector<double> z(n, 0.);
	GridFunction phi1 = warm ? warm->phi1 : initial_guess(problem, 0);
	GridFunction phi2 = warm ? warm->phi2 : initial_guess(problem, 1);
	if (warm) {
		stop_mask = warm->stop_mask;
		impulse_mask = warm->impulse_mask;
	}
	std::vector<std::vector<std::uint8_t>> seen_stop, seen_impulse;

	NonzeroSumResult out;
	for (int round = 1; round <= max_rounds; ++round) {
		CoreSetup s1;
		s1.player = 0;
		s1.stop_free = false;
		s1.forced_stop = &stop_mask;
		const auto r1 = solve_core(problem, s1, options, phi1, stencil,
				warm || round > 1 ? &impulse_mask : nullptr);
		phi1 = r1.value;
		// Player 1's strategy covers every node, including player 2's stop
		// region, so that player 2 best-responds to a complete strategy.
		const auto e1 = evaluate(phi1, problem, s1, stencil);
		std::vector<std::uint8_t> new_impulse(n, 0);
		for (int i = 0; i < n; ++i)
			new_impulse[i] = e1.ctrl[i] == Label::impulse;
		z = e1.z;

		CoreSetup s2;
		s2.player = 1;
		s2.impulse_free = false;
		s2.forced_impulse = &new_impulse;
		s2.forced_z = &z;
		const auto r2 = howard(problem, s2, options, phi2, stencil);
		phi2 = r2.value;
		std::vector<std::uint8_t> new_stop(n, 0);
		for (int i = 0; i < n; ++i)
			new_stop[i] = r2.policy.labels[i] == Label::stop;

		const bool fixed = new_stop == stop_mask && new_impulse == impulse_mask;
		stop_mask = new_stop;
		impulse_mask = new_impulse;
		out.rounds = round;
		if (fixed) {
			// Residuals of the final passes on their free nodes.
			const auto e1 = evaluate(phi1, problem, s1, stencil);
			const auto e2 = evaluate(phi2, problem, s2, stencil);
			out.residual1 = sup_abs(e1.R, &stop_mask);
			out.residual2 = sup_abs(e2.R);
			out.phi1 = phi1;
			out.phi2 = phi2;
			out.policy.labels.assign(n, Label::cont);
			out.policy.z = z;
			for (int i = 0; i < n; ++i)
				out.policy.labels[i] = stop_mask[i] ? Label::stop
						: (impulse_mask[i] ? Label::impulse : Label::cont);
			out.policy.iterations = round;
			return out;
		}
		for (std::size_t k = 0; k < seen_stop.size(); ++k)
			if (seen_stop[k] == stop_mask && seen_impulse[k] == impulse_mask) {
				int diff = 0;
				for (int i = 0; i < n; ++i)
					diff += seen_stop.back()[i] != stop_mask[i]
							|| seen_impulse.back()[i] != impulse_mask[i];
				throw QviError("best-response iteration entered a cycle of length "
						+ std::to_string(seen_stop.size() - k) + " (policies differ at "
						+ std::to_string(diff) + " nodes)");
			}
		seen_stop.push_back(stop_mask);
		seen_impulse.push_back(impulse_mask);
	}
	throw QviError("best-response iteration did not settle in "
			+ std::to_string(max_rounds) + " rounds");
}

} // namespace

NonzeroSumResult solve_nonzero_sum(const QviProblem &problem,
		const QviOptions &options, int max_rounds) {
	if (problem.game.payoffs.size() != 2)
		throw QviError("non-zero-sum mode needs two payoff specs");
	if (const auto coarse_grid = coarsened(problem.grid)) {
		// Coarse-to-fine, as in the zero-sum solver.
		QviProblem coarse = problem;
		coarse.grid = *coarse_grid;
		try {
			const NonzeroSumResult c = solve_nonzero_sum(coarse, options,
					max_rounds);
			const Grid &grid = problem.grid;
			NonzeroSumStart warm;
			warm.phi1 = GridFunction::sample(grid,
					[&](const Vec &x) { return c.phi1(x); });
			warm.phi2 = GridFunction::sample(grid,
					[&](const Vec &x) { return c.phi2(x); });
			warm.stop_mask.assign(grid.size(), 0);
			warm.impulse_mask.assign(grid.size(), 0);
			for (int i = 0; i < grid.size(); ++i) {
				const Label l = c.policy.labels[nearest_node(coarse.grid,
						grid.point(i))];
				warm.stop_mask[i] = l == Label::stop;
				warm.impulse_mask[i] = l == Label::impulse;
			}
			return best_response(problem, options, max_rounds, &warm);
		} catch (const QviError &e) {
			spdlog::debug("coarse solve failed ({}); cold start", e.what());
		}
	}
	return best_response(problem, options, max_rounds, nullptr);
}

void write_value_csv(const std::string &path, const GridFunction &phi,
		const std::vector<Label> &labels) {
	const Grid &g = phi.grid;
	std::vector<std::string> header = g.dim == 1
			? std::vector<std::string>{"x", "value", "label"}
			: std::vector<std::string>{"x0", "x1", "value", "label"};
	CsvWriter csv(path, header);
	for (int i = 0; i < g.size(); ++i) {
		const Vec x = g.point(i);
		std::vector<std::string> row;
		for (double xi : x)
			row.push_back(format_double(xi));
		row.push_back(format_double(phi.values[i]));
		row.push_back(labels.empty() ? "" : to_string(labels[i]));
		csv.row(row);
	}
}

void write_residual_log(const std::string &path, const PolicyState &policy) {
	CsvWriter csv(path, {"iter", "residual", "label_changes"});
	for (const auto &entry : policy.history)
		csv.row(std::vector<std::string>{std::to_string(entry.iter),
				format_double(entry.residual), std::to_string(entry.label_changes)});
}

} // namespace impstop
