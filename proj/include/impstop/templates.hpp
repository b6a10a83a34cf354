#pragma once

#include <cstdint>  // std::uint64_t
#include <optional> // std::optional
#include <string>  // std::string
#include <vector>  // std::vector

#include "impstop/closedform.hpp"
#include "impstop/model.hpp"
#include "impstop/qvi.hpp"
#include "impstop/simulate.hpp"
#include "impstop/verify.hpp"

namespace impstop {

////////////////////////////////////////////////////////////////////////////////
// GBM controller-stopper game
////////////////////////////////////////////////////////////////////////////////

/// Controller (maximizing) receives xi per impulse, the state loses
/// kappa1 + (1 + lambda) xi; the stopper (minimizing) pays X - kappa2.
GameSpec example1_game(const Example1Params &params, double z_hi = 100.);

/// Lattice [lo, hi]: Dirichlet G on the left face, forced action on the
/// right face.
QviProblem example1_problem(const Example1Solution &sol, int nodes, double lo,
		double hi);

ThresholdImpulsePolicy example1_controller(const Example1Solution &sol,
		double threshold);
StopPolicy example1_stopper(double threshold);

GridFunction example1_closed_form(const Example1Solution &sol, const Grid &grid);
std::vector<Label> example1_labels(const Example1Solution &sol,
		const Grid &grid);

/// Four controller (x_tilde scaled) and four stopper (x_hat scaled)
/// threshold deviations, by factors 0.75, 0.9, 1.1 and 1.25.
std::vector<Deviation> example1_deviations(const Example1Solution &sol,
		const Vec &controller_start, const Vec &stopper_start);

////////////////////////////////////////////////////////////////////////////////
// Investor problem in (y2, omega) = (wealth, y1 y3)
////////////////////////////////////////////////////////////////////////////////

/// Zero-sum double-obstacle form: the injecting investor maximizes, exit is
/// a minimizing stopper with G = wealth value + g1 omega + lambda_T.
/// With nonzero_sum, payoff 1 is the exit package g1 omega + lambda_T alone.
GameSpec investor_game(const Example2Solution &sol, bool nonzero_sum,
		double z_hi);

struct InvestorGrid {
	double y_lo = 0., y_hi = 0.;
	double omega_lo = 0., omega_hi = 0.;
	int n_y = 161;
	int n_omega = 121;
};
InvestorGrid investor_default_grid(const Example2Solution &sol, int n_y = 161,
		int n_omega = 121);

QviProblem investor_problem(const Example2Solution &sol, const InvestorGrid &g,
		bool nonzero_sum);

/// Reduced value wealth_value(y2) + omega_value(omega) on the grid.
GridFunction investor_closed_form(const Example2Solution &sol, const Grid &grid);
/// Exit-package value omega_value(omega) on the grid.
GridFunction investor_auxiliary(const Example2Solution &sol, const Grid &grid);
std::vector<Label> investor_labels(const Example2Solution &sol,
		const Grid &grid);

////////////////////////////////////////////////////////////////////////////////
// GBM with a stopping-only payoff
////////////////////////////////////////////////////////////////////////////////

struct StoppingParams {
	double alpha = 0.02;
	double beta = 0.3;
	double delta = 0.1;
	double running = 1.;    // running payment while the game continues
	double slope = 1.;      // G(x) = slope x - shift
	double shift = 0.;
};
GameSpec stopping_game(const StoppingParams &params);

/// Lattice [lo, hi] with Dirichlet G on both faces.
QviProblem stopping_problem(const StoppingParams &params, int nodes, double lo,
		double hi);

////////////////////////////////////////////////////////////////////////////////
// Config documents
////////////////////////////////////////////////////////////////////////////////

enum class ModelTemplate { example1, investor, stopping };

struct SimulationSettings {
	double dt = 1e-3;
	long long paths = 100000;
	long long deviation_paths = 100000;
	std::uint64_t seed = 42;
	double horizon = 1.;
	std::vector<double> starts;
	double controller_start = 0.;
	double stopper_start = 0.;
	Vec investor_start; // (y1, y2, y3)
	bool exit_above = true;
};

struct ModelConfig {
	ModelTemplate kind = ModelTemplate::example1;
	std::string name;
	Example1Params ex1;
	Example2Params ex2;
	StoppingParams stopping;
	/// Example 1 and stopping: [lo, hi] with `nodes`; lo/hi of 0 mean
	/// template defaults. Investor: nodes_y x nodes_omega.
	int nodes = 4000;
	double lo = 0.;
	double hi = 0.;
	int nodes_y = 161;
	int nodes_omega = 121;
	/// Verification tolerance multiplier (h^2 or h scale per template).
	double tol_factor = 10.;
	SimulationSettings sim;
};

/// Reads and validates every field; throws ConfigError naming the
/// offending "section.key".
ModelConfig load_model_config(const Config &config);

/// Lattice, closed form (when requested and available) and verification
/// tolerance of a configured model.
struct ModelSetup {
	ModelConfig config;
	QviProblem problem;
	std::optional<Example1Solution> ex1;
	std::optional<Example2Solution> ex2;
	/// Closed-form value and analytic labels on problem.grid (empty when
	/// there is no closed form).
	GridFunction closed_form;
	std::vector<Label> analytic;
};

/// `grid` overrides the node count (investor: the y2 count, with the omega
/// count scaled to keep the aspect ratio). Without a closed form, Example 1
/// needs an explicit grid.hi.
ModelSetup build_model(const ModelConfig &config, bool closed_form,
		std::optional<int> grid = std::nullopt);

/// Verification tolerance for a value of sup norm `scale`: tol_factor h^2
/// scale on 1-D lattices, tol_factor h_omega scale on the investor lattice
/// (first-order upwinding in omega).
double verification_tol(const ModelConfig &config, const Grid &grid,
		double scale);

/// Region classification tolerances (relative): tol_factor h^2 in 1-D;
/// investor PDE tol_factor h_omega and obstacle 0.1 tol_factor h_omega^2.
ClassifyOptions classify_options(const ModelConfig &config, const Grid &grid);

} // namespace impstop
