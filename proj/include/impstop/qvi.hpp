#pragma once

#include <array>     // std::array
#include <cstdint>   // std::uint8_t
#include <functional> // std::function
#include <stdexcept> // std::runtime_error
#include <string>    // std::string
#include <vector>    // std::vector

#include "impstop/grid.hpp"
#include "impstop/model.hpp"
#include "impstop/operators.hpp"

namespace impstop {

enum class Label : std::uint8_t { cont = 0, impulse = 1, stop = 2 };
const char *to_string(Label label);

/// Treatment of nodes on a truncation face whose generator stencil would
/// leave the lattice.
///   dirichlet      continuing means phi = boundary value (default G)
///   forced_action  continuing is unavailable where an impulse is feasible;
///                  elsewhere the node falls back to dirichlet
enum class FacePolicy { dirichlet, forced_action };

struct QviProblem {
	GameSpec game;
	Grid grid;
	/// Face policies indexed 2 d + side (side 0 = low face).
	std::array<FacePolicy, 4> faces{FacePolicy::dirichlet,
			FacePolicy::dirichlet, FacePolicy::dirichlet, FacePolicy::dirichlet};
	/// Dirichlet data on truncation faces, one entry per payoff; a missing
	/// or empty entry means the player's G.
	std::vector<std::function<double(const Vec &)>> boundary_value;
	/// Payoff index used by the zero-sum solver and the residual.
	std::size_t player = 0;
	GeneratorOptions generator;
	ImpulseOptions impulse;
	/// Ties between branches closer than this (relative) keep the preferred
	/// label: continue, then stop, then impulse.
	double tie_tol = 1e-12;
};

struct IterationLog {
	int iter = 0;
	double residual = 0.;
	int label_changes = 0;
};

struct PolicyState {
	std::vector<Label> labels;
	std::vector<double> z;
	int iterations = 0;
	std::vector<IterationLog> history;
};

/// Node-wise branch values of the QVI for payoff `player`:
///   C = delta phi - L phi - f (or phi - B on Dirichlet faces),
///   I = phi - M phi,  S = phi - G.
/// Unavailable branches hold the neutral element of their min/max.
struct QviBranches {
	std::vector<double> C, I, S;
	ImpulseResult M;
	std::vector<std::uint8_t> boundary;
};

QviBranches qvi_branches(const GridFunction &phi, const QviProblem &problem,
		std::size_t player);

/// R = outer_stopper(S, inner_controller(C, I)); inner is min for a
/// maximizing controller and max for a minimizing one, outer is max for a
/// minimizing stopper and min for a maximizing one.
GridFunction qvi_residual(const GridFunction &phi, const QviProblem &problem);

struct QviError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct QviOptions {
	double tol = 1e-9;
	int max_iter = 200;
};

struct QviSolution {
	GridFunction value;
	PolicyState policy;
	/// Node-wise monotone iterates after the first relabel.
	bool monotone = true;
};

/// Stationary double-obstacle QVI by Howard policy iteration.
QviSolution solve_qvi(const QviProblem &problem, const QviOptions &options = {},
		const GridFunction *initial = nullptr);

/// Backward Euler in time from terminal data G at horizon T; returns the
/// time-0 solution and the time-0 policy.
QviSolution solve_qvi_time_marching(const QviProblem &problem, double T,
		int steps, const QviOptions &options = {});

struct NonzeroSumResult {
	GridFunction phi1;
	GridFunction phi2;
	/// impulse: player 1 acts; stop: player 2 stops; cont otherwise.
	PolicyState policy;
	int rounds = 0;
	double residual1 = 0.;
	double residual2 = 0.;
};

/// Best-response iteration: player 1 (payoff 0) solves its impulse QVI with
/// player 2's stop region frozen; player 2 (payoff 1) solves its stopping
/// problem with player 1's impulse policy frozen; repeat until both
/// policies are fixed.
NonzeroSumResult solve_nonzero_sum(const QviProblem &problem,
		const QviOptions &options = {}, int max_rounds = 50);

/// Nodes coordinates, value and label.
void write_value_csv(const std::string &path, const GridFunction &phi,
		const std::vector<Label> &labels);
void write_residual_log(const std::string &path, const PolicyState &policy);

} // namespace impstop
