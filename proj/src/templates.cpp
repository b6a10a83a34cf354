#include "impstop/templates.hpp"

#include <algorithm> // std::max
#include <cmath>     // std::exp, std::lround
#include <limits>    // std::numeric_limits

namespace impstop {

////////////////////////////////////////////////////////////////////////////////
// GBM controller-stopper game
////////////////////////////////////////////////////////////////////////////////

GameSpec example1_game(const Example1Params &p, double z_hi) {
	GameSpec game;
	auto &d = game.diffusion;
	d.dimension = 1;
	d.noise_dimension = 1;
	d.drift = [a = p.alpha](double, const Vec &x) { return Vec{a * x[0]}; };
	d.volatility = [b = p.beta](double, const Vec &x) {
		return std::vector<Vec>{{b * x[0]}};
	};
	d.jump_amplitude = [](const Vec &x, double mark) { return Vec{x[0] * mark}; };
	d.horizon = p.T;
	d.geometric = true;
	d.geometric_drift = {p.alpha};
	d.geometric_volatility = {p.beta};

	auto &iv = game.intervention;
	iv.enabled = true;
	iv.z_lo = 0.;
	iv.z_hi = z_hi;
	iv.response = [k = p.kappa1, l = p.lambda](const Vec &x, double z) {
		return Vec{x[0] - k - (1. + l) * z};
	};
	// Friction removed from the state by an impulse of size z.
	iv.cost = [k = p.kappa1, l = p.lambda, delta = p.delta](double s, double z) {
		return std::exp(-delta * s) * (k + (1. + l) * z);
	};
	iv.cost_floor = std::exp(-p.delta * p.T) * p.kappa1;

	PayoffSpec pay;
	pay.bequest = [k2 = p.kappa2](const Vec &x) { return x[0] - k2; };
	pay.impulse_cashflow = [](const Vec &, double z) { return z; };
	pay.discount = p.delta;
	pay.controller_sense = Sense::maximize;
	pay.stopper_sense = Sense::minimize;
	game.payoffs = {pay};
	game.solvency = {{0.}, {std::numeric_limits<double>::infinity()}};
	return game;
}

QviProblem example1_problem(const Example1Solution &sol, int nodes, double lo,
		double hi) {
	QviProblem problem;
	const auto &p = sol.params;
	problem.game = example1_game(p, std::max(0., (hi - p.kappa1) / (1. + p.lambda)));
	problem.grid = Grid::uniform1d(lo, hi, nodes);
	problem.faces = {FacePolicy::dirichlet, FacePolicy::forced_action,
			FacePolicy::dirichlet, FacePolicy::dirichlet};
	return problem;
}

ThresholdImpulsePolicy example1_controller(const Example1Solution &sol,
		double threshold) {
	ThresholdImpulsePolicy policy;
	policy.act = [threshold](const Vec &x) { return x[0] >= threshold; };
	policy.target = [x_star = sol.x_target, k = sol.params.kappa1,
			l = sol.params.lambda](const Vec &x) {
		return std::max(0., (x[0] - x_star - k) / (1. + l));
	};
	return policy;
}

StopPolicy example1_stopper(double threshold) {
	return {[threshold](const Vec &x) { return x[0] <= threshold; }};
}

GridFunction example1_closed_form(const Example1Solution &sol,
		const Grid &grid) {
	return GridFunction::sample(grid,
			[&](const Vec &x) { return example1_value(sol, 0., x[0]); });
}

std::vector<Label> example1_labels(const Example1Solution &sol,
		const Grid &grid) {
	std::vector<Label> out(grid.size());
	for (int i = 0; i < grid.size(); ++i) {
		const double x = grid.point(i)[0];
		out[i] = x <= sol.x_hat ? Label::stop
				: (x >= sol.x_tilde ? Label::impulse : Label::cont);
	}
	return out;
}

std::vector<Deviation> example1_deviations(const Example1Solution &sol,
		const Vec &controller_start, const Vec &stopper_start) {
	std::vector<Deviation> out;
	const auto eq_stop = example1_stopper(sol.x_hat);
	const auto eq_ctrl = example1_controller(sol, sol.x_tilde);
	for (double f : {0.75, 0.9, 1.1, 1.25}) {
		Deviation d;
		d.name = "x_tilde*" + std::to_string(f).substr(0, 4);
		d.player = 0;
		d.controller = example1_controller(sol, f * sol.x_tilde);
		d.stopper = eq_stop;
		d.x0 = controller_start;
		out.push_back(d);
	}
	for (double f : {0.75, 0.9, 1.1, 1.25}) {
		Deviation d;
		d.name = "x_hat*" + std::to_string(f).substr(0, 4);
		d.player = 1;
		d.controller = eq_ctrl;
		d.stopper = example1_stopper(f * sol.x_hat);
		d.x0 = stopper_start;
		out.push_back(d);
	}
	return out;
}

////////////////////////////////////////////////////////////////////////////////
// Investor problem
////////////////////////////////////////////////////////////////////////////////

GameSpec investor_game(const Example2Solution &sol, bool nonzero_sum,
		double z_hi) {
	const auto &p = sol.params;
	GameSpec game;
	auto &d = game.diffusion;
	d.dimension = 2;
	d.noise_dimension = 1;
	const double mu_w = p.gamma_drift;
	const double s_w = p.pi * p.sigma_I;
	const double mu_o = sol.mu_omega;
	d.drift = [mu_w, mu_o](double, const Vec &x) {
		return Vec{mu_w * x[0], mu_o * x[1]};
	};
	d.volatility = [s_w](double, const Vec &x) {
		return std::vector<Vec>{{s_w * x[0]}, {0.}};
	};
	d.jump_amplitude = [](const Vec &x, double) { return Vec(x.size(), 0.); };
	d.horizon = p.T;

	auto &iv = game.intervention;
	iv.enabled = true;
	iv.z_lo = 0.;
	iv.z_hi = z_hi;
	iv.response = [](const Vec &x, double z) { return Vec{x[0] - z, x[1]}; };
	iv.cost = [k = p.kappa_I, a = p.alpha_I](double, double z) {
		return k + a * z;
	};
	iv.cost_floor = p.kappa_I;

	PayoffSpec investor;
	investor.bequest = [sol](const Vec &x) {
		return sol.wealth_value(x[0]) + sol.exit_payoff(x[1]);
	};
	investor.impulse_cashflow = [k = p.kappa_I, a = p.alpha_I](const Vec &,
			double z) { return a * z - k; };
	investor.discount = p.delta;
	investor.controller_sense = Sense::maximize;
	investor.stopper_sense = Sense::minimize;
	game.payoffs = {investor};
	if (nonzero_sum) {
		PayoffSpec exit = investor;
		exit.bequest = [sol](const Vec &x) { return sol.exit_payoff(x[1]); };
		exit.impulse_cashflow = [](const Vec &, double) { return 0.; };
		game.payoffs.push_back(exit);
	}
	game.solvency = {{0., 0.}, {std::numeric_limits<double>::infinity(),
			std::numeric_limits<double>::infinity()}};
	return game;
}

InvestorGrid investor_default_grid(const Example2Solution &sol, int n_y,
		int n_omega) {
	InvestorGrid g;
	g.y_lo = 0.25 * sol.y_hat;
	g.y_hi = 2. * sol.y_tilde;
	g.omega_lo = 0.25 * sol.omega_star;
	g.omega_hi = 2. * sol.omega_star;
	g.n_y = n_y;
	g.n_omega = n_omega;
	return g;
}

QviProblem investor_problem(const Example2Solution &sol, const InvestorGrid &g,
		bool nonzero_sum) {
	QviProblem problem;
	problem.game = investor_game(sol, nonzero_sum, g.y_hi - g.y_lo);
	problem.grid = Grid::uniform2d(g.y_lo, g.y_hi, g.n_y, g.omega_lo, g.omega_hi,
			g.n_omega);
	problem.faces = {FacePolicy::dirichlet, FacePolicy::forced_action,
			FacePolicy::dirichlet, FacePolicy::dirichlet};
	problem.boundary_value = {
			[sol](const Vec &x) { return sol.reduced_value(x[0], x[1]); }};
	if (nonzero_sum)
		problem.boundary_value.push_back(
				[sol](const Vec &x) { return sol.omega_value(x[1]); });
	return problem;
}

GridFunction investor_closed_form(const Example2Solution &sol,
		const Grid &grid) {
	return GridFunction::sample(grid,
			[&](const Vec &x) { return sol.reduced_value(x[0], x[1]); });
}

GridFunction investor_auxiliary(const Example2Solution &sol, const Grid &grid) {
	return GridFunction::sample(grid,
			[&](const Vec &x) { return sol.omega_value(x[1]); });
}

std::vector<Label> investor_labels(const Example2Solution &sol,
		const Grid &grid) {
	std::vector<Label> out(grid.size());
	for (int i = 0; i < grid.size(); ++i) {
		const Vec x = grid.point(i);
		out[i] = sol.in_exit_region(x[1]) ? Label::stop
				: (x[0] >= sol.y_tilde ? Label::impulse : Label::cont);
	}
	return out;
}

////////////////////////////////////////////////////////////////////////////////
// Stopping-only game
////////////////////////////////////////////////////////////////////////////////

GameSpec stopping_game(const StoppingParams &p) {
	GameSpec game;
	auto &d = game.diffusion;
	d.dimension = 1;
	d.noise_dimension = 1;
	d.drift = [a = p.alpha](double, const Vec &x) { return Vec{a * x[0]}; };
	d.volatility = [b = p.beta](double, const Vec &x) {
		return std::vector<Vec>{{b * x[0]}};
	};
	d.jump_amplitude = [](const Vec &x, double mark) { return Vec{x[0] * mark}; };
	d.geometric = true;
	d.geometric_drift = {p.alpha};
	d.geometric_volatility = {p.beta};
	game.intervention.enabled = false;
	PayoffSpec pay;
	pay.running = [r = p.running](const Vec &) { return r; };
	pay.bequest = [s = p.slope, c = p.shift](const Vec &x) { return s * x[0] - c; };
	pay.discount = p.delta;
	pay.controller_sense = Sense::maximize;
	pay.stopper_sense = Sense::minimize;
	game.payoffs = {pay};
	game.solvency = {{0.}, {std::numeric_limits<double>::infinity()}};
	return game;
}

QviProblem stopping_problem(const StoppingParams &params, int nodes, double lo,
		double hi) {
	QviProblem problem;
	problem.game = stopping_game(params);
	problem.grid = Grid::uniform1d(lo, hi, nodes);
	problem.faces = {FacePolicy::dirichlet, FacePolicy::dirichlet,
			FacePolicy::dirichlet, FacePolicy::dirichlet};
	return problem;
}

////////////////////////////////////////////////////////////////////////////////
// Config documents
////////////////////////////////////////////////////////////////////////////////

namespace {

void require(bool ok, const std::string &field, const std::string &message) {
	if (!ok)
		throw ConfigError(field, message);
}

double positive(const Config &c, const std::string &s, const std::string &k,
		double fallback) {
	const double v = c.get_double(s, k, fallback);
	require(v > 0., s + "." + k, "must be positive");
	return v;
}

} // namespace

ModelConfig load_model_config(const Config &c) {
	ModelConfig m;
	const std::string kind = c.get_string("model", "template");
	m.name = c.get_string("model", "name", kind);
	if (kind == "example1")
		m.kind = ModelTemplate::example1;
	else if (kind == "investor")
		m.kind = ModelTemplate::investor;
	else if (kind == "stopping")
		m.kind = ModelTemplate::stopping;
	else
		throw ConfigError("model.template",
				"unknown template '" + kind + "' (example1, investor, stopping)");

	if (m.kind == ModelTemplate::example1) {
		auto &p = m.ex1;
		p.alpha = positive(c, "diffusion", "alpha", p.alpha);
		p.beta = positive(c, "diffusion", "beta", p.beta);
		p.kappa1 = positive(c, "intervention", "kappa1", p.kappa1);
		p.lambda = positive(c, "intervention", "lambda", p.lambda);
		p.delta = positive(c, "payoff", "delta", p.delta);
		p.kappa2 = positive(c, "payoff", "kappa2", p.kappa2);
		p.T = positive(c, "simulation", "horizon", p.T);
	} else if (m.kind == ModelTemplate::investor) {
		auto &p = m.ex2;
		p.e = positive(c, "diffusion", "e", p.e);
		p.r = positive(c, "diffusion", "r", p.r);
		p.sigma_f = positive(c, "diffusion", "sigma_f", p.sigma_f);
		p.sigma_I = positive(c, "diffusion", "sigma_I", p.sigma_I);
		p.pi = positive(c, "diffusion", "pi", p.pi);
		p.gamma_drift = c.get_double("diffusion", "gamma_drift", p.gamma_drift);
		const bool has_g = c.has("diffusion", "jump_gamma");
		const bool has_n = c.has("diffusion", "jump_intensity");
		require(has_g == has_n, "diffusion.jump_intensity",
				"jump_gamma and jump_intensity must be given together");
		if (has_g) {
			const auto g = c.get_list("diffusion", "jump_gamma");
			const auto n = c.get_list("diffusion", "jump_intensity");
			require(g.size() == n.size(), "diffusion.jump_intensity",
					"needs one intensity per jump_gamma entry");
			for (std::size_t j = 0; j < g.size(); ++j) {
				require(1. + g[j] > 0., "diffusion.jump_gamma", "needs 1 + gamma > 0");
				require(n[j] >= 0., "diffusion.jump_intensity", "must be nonnegative");
				p.atoms.push_back({g[j], n[j]});
			}
		}
		p.kappa_I = positive(c, "intervention", "kappa_I", p.kappa_I);
		p.alpha_I = positive(c, "intervention", "alpha_I", p.alpha_I);
		p.delta = positive(c, "payoff", "delta", p.delta);
		p.g1 = positive(c, "payoff", "g1", p.g1);
		p.g2 = c.get_double("payoff", "g2", p.g2);
		p.lambda_T = positive(c, "payoff", "lambda_T", p.lambda_T);
		p.T = positive(c, "simulation", "horizon", p.T);
	} else {
		auto &p = m.stopping;
		p.alpha = c.get_double("diffusion", "alpha", p.alpha);
		p.beta = positive(c, "diffusion", "beta", p.beta);
		p.delta = positive(c, "payoff", "delta", p.delta);
		p.running = c.get_double("payoff", "running", p.running);
		p.slope = c.get_double("payoff", "slope", p.slope);
		p.shift = c.get_double("payoff", "shift", p.shift);
	}

	m.nodes = static_cast<int>(c.get_int("grid", "nodes", m.nodes));
	require(m.nodes >= 5, "grid.nodes", "needs at least 5 nodes");
	m.lo = c.get_double("grid", "lo", 0.);
	m.hi = c.get_double("grid", "hi", 0.);
	require(m.lo >= 0., "grid.lo", "must be nonnegative");
	require(m.hi == 0. || m.hi > m.lo, "grid.hi", "must exceed grid.lo");
	if (m.kind == ModelTemplate::stopping)
		require(m.lo > 0. && m.hi > m.lo, "grid.hi",
				"stopping template needs 0 < grid.lo < grid.hi");
	m.nodes_y = static_cast<int>(c.get_int("grid", "nodes_y", m.nodes_y));
	m.nodes_omega = static_cast<int>(c.get_int("grid", "nodes_omega",
			m.nodes_omega));
	require(m.nodes_y >= 5, "grid.nodes_y", "needs at least 5 nodes");
	require(m.nodes_omega >= 5, "grid.nodes_omega", "needs at least 5 nodes");
	m.tol_factor = positive(c, "verify", "tol_factor", m.tol_factor);

	auto &s = m.sim;
	s.dt = positive(c, "simulation", "dt", s.dt);
	s.paths = c.get_int("simulation", "paths", s.paths);
	require(s.paths >= 1, "simulation.paths", "must be at least 1");
	s.deviation_paths = c.get_int("simulation", "deviation_paths", s.paths);
	require(s.deviation_paths >= 1, "simulation.deviation_paths",
			"must be at least 1");
	const long long seed = c.get_int("simulation", "seed", 42);
	require(seed >= 0, "simulation.seed", "must be nonnegative");
	s.seed = static_cast<std::uint64_t>(seed);
	s.horizon = positive(c, "simulation", "horizon", s.horizon);
	if (c.has("simulation", "starts")) {
		s.starts = c.get_list("simulation", "starts");
		for (double x : s.starts)
			require(x > 0., "simulation.starts", "start points must be positive");
	}
	s.controller_start = c.get_double("simulation", "controller_start", 0.);
	s.stopper_start = c.get_double("simulation", "stopper_start", 0.);
	if (c.has("simulation", "start")) {
		s.investor_start = c.get_list("simulation", "start");
		require(s.investor_start.size() == 3, "simulation.start",
				"needs three positive entries y1, y2, y3");
		for (double v : s.investor_start)
			require(v > 0., "simulation.start", "entries must be positive");
	}
	const std::string exit = c.get_string("simulation", "exit_side", "above");
	require(exit == "above" || exit == "below", "simulation.exit_side",
			"must be 'above' or 'below'");
	s.exit_above = exit == "above";
	return m;
}

ModelSetup build_model(const ModelConfig &config, bool closed_form,
		std::optional<int> grid) {
	ModelSetup out;
	out.config = config;
	const int nodes = grid.value_or(config.nodes);
	if (nodes < 5)
		throw ConfigError("grid.nodes", "needs at least 5 nodes");
	switch (config.kind) {
	case ModelTemplate::example1: {
		Example1Solution sol;
		sol.params = config.ex1;
		if (closed_form)
			sol = example1_solve(config.ex1);
		const double lo = config.lo > 0. ? config.lo : 0.01;
		double hi = config.hi;
		if (hi == 0.) {
			if (!closed_form)
				throw ConfigError("grid.hi", "required without the closed form");
			hi = 5. * sol.x_tilde;
		}
		if (hi <= lo)
			throw ConfigError("grid.hi", "must exceed grid.lo");
		out.problem = example1_problem(sol, nodes, lo, hi);
		if (closed_form) {
			out.closed_form = example1_closed_form(sol, out.problem.grid);
			out.analytic = example1_labels(sol, out.problem.grid);
			out.ex1 = sol;
		}
		break;
	}
	case ModelTemplate::investor: {
		// The lattice box and its Dirichlet data come from the closed-form
		// constants, so they are computed even without closed-form output.
		const auto sol = example2_solve(config.ex2);
		int n_y = config.nodes_y, n_omega = config.nodes_omega;
		if (grid) {
			n_y = *grid;
			n_omega = std::max(5, static_cast<int>(std::lround(
					(n_y - 1.) * (config.nodes_omega - 1.) / (config.nodes_y - 1.))) + 1);
		}
		out.problem = investor_problem(sol, investor_default_grid(sol, n_y,
				n_omega), false);
		if (closed_form) {
			out.closed_form = investor_closed_form(sol, out.problem.grid);
			out.analytic = investor_labels(sol, out.problem.grid);
		}
		out.ex2 = sol;
		break;
	}
	case ModelTemplate::stopping:
		out.problem = stopping_problem(config.stopping, nodes, config.lo,
				config.hi);
		break;
	}
	return out;
}

double verification_tol(const ModelConfig &config, const Grid &grid,
		double scale) {
	const double s = std::max(scale, 1.);
	if (config.kind == ModelTemplate::investor)
		return config.tol_factor * grid.h(1) * s;
	return config.tol_factor * grid.h(0) * grid.h(0) * s;
}

ClassifyOptions classify_options(const ModelConfig &config, const Grid &grid) {
	ClassifyOptions o;
	if (config.kind == ModelTemplate::investor) {
		// Smooth fit at the exit boundary: phi - G is quadratic in the
		// distance to it, so obstacle equalities need an h^2 tolerance.
		const double h = grid.h(1);
		o.eps_pde = config.tol_factor * h;
		o.eps_value = 0.1 * config.tol_factor * h * h;
	} else {
		o.eps_value = o.eps_pde = config.tol_factor * grid.h(0) * grid.h(0);
	}
	return o;
}

} // namespace impstop
