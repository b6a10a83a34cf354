#pragma once

#include <cstdint> // std::uint64_t
#include <string>  // std::string
#include <vector>  // std::vector

#include "impstop/closedform.hpp"

namespace impstop {

/// Outcome of one acceptance check. Tolerances are fixed inside each check.
struct CriterionResult {
	int id = 0;
	std::string title;
	bool pass = false;
	/// Measured quantities, one "name=value" list.
	std::string detail;
	double seconds = 0.;
};

/// "PASS [id] title: detail" with "[-]" for id 0 (supplementary rows).
/// Timing is left out so that reports are reproducible byte for byte.
std::string format_criterion(const CriterionResult &result);

struct AcceptanceOptions {
	long long paths = 100000;
	long long deviation_paths = 100000;
	double dt = 1e-3;
	std::uint64_t seed = 42;
	int threads = 1;
	/// Monte Carlo horizon; surviving paths receive the discounted value.
	double horizon = 1.;
	std::vector<double> starts{0.4, 0.8, 1.6, 3.2, 5.0};
	/// Deviation start points as multiples of x_tilde and x_hat.
	double controller_start = 0.8;
	double stopper_start = 1.5;
};

/// Reference parameters: the Example 1 set and the investor set with and
/// without the single jump atom (gamma 0.2, intensity 0.5).
Example1Params reference_example1();
Example2Params reference_investor(bool with_jumps);

/// 1: c+ c- + 2 delta / beta^2 = 0 and c+ + c- - 1 + 2 alpha / beta^2 = 0
///    on 50 random parameter sets.
CriterionResult check_exponent_identities(std::uint64_t seed = 7);
/// 2: high-contact and continuity residuals, boundary ordering.
CriterionResult check_smooth_fit(const Example1Solution &sol);
/// 3: sup |R(psi)| off a 2-cell collar at 2000 and 4000 nodes.
CriterionResult check_closed_form_residual(const Example1Solution &sol);
/// 4: QVI solution against psi at 4000 nodes.
CriterionResult check_qvi_against_closed_form(const Example1Solution &sol);
/// 5: Monte Carlo payoff against psi at each start, with the coupled dt
///    bias bound, and impulse landing points.
CriterionResult check_monte_carlo(const Example1Solution &sol,
		const AcceptanceOptions &options);
/// 6: eight unilateral threshold deviations with common random numbers.
CriterionResult check_deviations(const Example1Solution &sol,
		const AcceptanceOptions &options);
/// 7: investor closed form without jumps.
CriterionResult check_investor_closed_form(const Example2Solution &sol);
/// 8: investor fixed point with jumps (single-atom kernel in closed form).
CriterionResult check_investor_fixed_point(const Example2Solution &sol);
/// 9: E Q(T) = Q(0) with and without jump atoms.
CriterionResult check_q_martingale(const Example2Solution &no_jumps,
		const Example2Solution &jumps, const AcceptanceOptions &options);
/// 10: classified regions of both closed forms against the analytic
///     regions, up to a 2-cell band.
CriterionResult check_region_partition(const Example1Solution &ex1,
		const Example2Solution &investor);
/// 11: zero-sum and non-zero-sum certificates on psi and on a perturbation.
CriterionResult check_certificates(const Example1Solution &sol);

/// Investor Monte Carlo against the closed-form value at y0 with the
/// coupled dt bias bound (used by the reproduce pipeline).
struct InvestorConsistency {
	double value = 0.;
	double mean = 0.;
	double stderr_ = 0.;
	double bias = 0.;
	double mean_interventions = 0.;
	bool pass = false;
};
InvestorConsistency check_investor_simulation(const Example2Solution &sol,
		const AcceptanceOptions &options, const std::vector<double> &y0);

} // namespace impstop
