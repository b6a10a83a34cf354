#pragma once

#include <cstdint>    // std::uint64_t
#include <functional> // std::function
#include <stdexcept>  // std::runtime_error
#include <string>     // std::string
#include <vector>     // std::vector

#include "impstop/closedform.hpp"
#include "impstop/model.hpp"

namespace impstop {

struct PathRecord;

struct SimulationConfig {
	double dt = 1e-3;
	long long n_paths = 1000;
	std::uint64_t seed = 42;
	/// Exact exponential stepping for geometric dynamics (Euler otherwise).
	bool exact_geometric = true;
	/// Each step's Brownian increment is the sum of this many independent
	/// normals of variance dt / noise_substeps. A run at (dt, 2) consumes
	/// exactly the normals of a run at (dt / 2, 1), which couples the pair.
	int noise_substeps = 1;
	/// Paths still running at the horizon receive e^{-delta T} times this
	/// stationary value (default: the player's bequest).
	double horizon = 1.;
	std::vector<std::function<double(const Vec &)>> horizon_value;
	int threads = 1;
	/// Keep the state after every step in PathRecord::states.
	bool record_states = false;
	/// Called once per finished path (from worker threads when threads > 1).
	std::function<void(const PathRecord &)> observer;
};

/// Act whenever `act` holds, with impulse size target(x).
struct ThresholdImpulsePolicy {
	std::function<bool(const Vec &)> act;
	std::function<double(const Vec &)> target;
};

struct StopPolicy {
	std::function<bool(const Vec &)> stop;
};

enum class ExitReason { stopped, solvency_exit, horizon, aborted };
const char *to_string(ExitReason reason);

struct InterventionEvent {
	double time = 0.;
	double z = 0.;
	/// Friction c(0, z) of the impulse, undiscounted.
	double cost = 0.;
	Vec before;
	Vec after;
	/// Discounted cash flow credited to each player.
	std::vector<double> cashflow;
};

struct PathRecord {
	std::uint64_t index = 0;
	std::vector<double> times;
	std::vector<Vec> states;
	std::vector<InterventionEvent> interventions;
	double stop_time = 0.;
	ExitReason reason = ExitReason::horizon;
	Vec final_state;
	/// Realized discounted payoff per player.
	std::vector<double> payoff;
	/// Sum of discounted impulse cash flows per player.
	std::vector<double> intervention_component;
	int intervention_count = 0;
	std::string abort_message;
};

struct SimulationError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Random streams of a path: mt19937_64 seeded with (seed, index, stream).
enum class Stream : std::uint64_t { diffusion = 0, jumps = 1, investor = 2 };

PathRecord simulate_path(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::uint64_t index);

struct PayoffEstimate {
	std::vector<double> mean;
	std::vector<double> stderr_;
	long long n_paths = 0;
	long long aborted = 0;
	double mean_interventions = 0.;
};

/// Deterministic order-independent sum.
double pairwise_sum(const double *values, std::size_t n);

/// Runs n_paths paths (in parallel when cfg.threads > 1) and reduces them
/// with pairwise summation. More than 1% aborted paths is an error.
PayoffEstimate estimate_payoff(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0);

/// Per-path payoffs of player `player` for paths [0, n_paths).
std::vector<double> simulate_payoffs(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::size_t player,
		long long *aborted = nullptr);

/// Coupled estimates at dt and dt / 2 sharing Brownian and jump draws.
/// Discrete monitoring of the free boundaries gives an error of order
/// sqrt(dt), so the bias of the dt / 2 estimate is bounded by
/// |m_dt - m_{dt/2}| / (1 - 2^{-1/2}).
struct BiasedEstimate {
	double mean = 0.;    // dt / 2 estimate
	double stderr_ = 0.;
	double coarse_mean = 0.;
	double bias = 0.;
	long long aborted = 0;
	double mean_interventions = 0.;
};
BiasedEstimate estimate_with_bias(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::size_t player = 0);

struct Deviation {
	std::string name;
	/// 0: the controller deviates; 1: the stopper deviates.
	std::size_t player = 0;
	ThresholdImpulsePolicy controller;
	StopPolicy stopper;
	Vec x0;
};

struct DeviationRow {
	std::string name;
	std::size_t player = 0;
	Vec x0;
	double equilibrium = 0.;
	double deviation = 0.;
	/// Mean of (equilibrium - deviation) over paired paths.
	double difference = 0.;
	double paired_stderr = 0.;
	/// Equilibrium weakly better in the deviating player's sense within
	/// 3 paired standard errors.
	bool pass = true;
};

struct DeviationReport {
	std::vector<DeviationRow> rows;
	bool all_pass() const;
	std::string to_text() const;
};

/// Unilateral deviations with common random numbers. The deviating player's
/// payoff index is min(player, payoffs - 1) and its sense is taken from
/// the corresponding PayoffSpec.
DeviationReport deviation_test(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const std::vector<Deviation> &deviations, const SimulationConfig &cfg);

/// Investor problem under the closed-form policies. State (Y1, Y2, Y3):
/// firm liquidity, investor wealth and the density process Q.
struct InvestorOptions {
	/// Exit once omega = Y1 Y3 >= omega_star (false: omega <= omega_star).
	bool exit_above = true;
	/// Also add each injection z to the firm's liquidity Y1.
	bool credit_injections_to_firm = false;
};

/// Payoff 0: the injecting investor (wealth + exit package).
/// Payoff 1: the exit package only.
std::vector<PathRecord> simulate_investor(const Example2Solution &sol,
		const SimulationConfig &cfg, const Vec &y0,
		const InvestorOptions &options = {});

struct MeanEstimate {
	double mean = 0.;
	double stderr_ = 0.;
	long long n = 0;
};
MeanEstimate summarize(const std::vector<double> &values);

/// Q(T) over cfg.n_paths paths starting from q0, with the closed-form
/// kernels of `sol`.
MeanEstimate q_martingale_check(const Example2Solution &sol,
		const SimulationConfig &cfg, double q0);

/// One row per event: path, time, state components, event, cash flow.
void write_path_csv(const std::string &path,
		const std::vector<PathRecord> &records, const std::string &state_names);

} // namespace impstop
