#include "impstop/acceptance.hpp"

#include <algorithm> // std::max
#include <chrono>    // std::chrono::steady_clock
#include <cmath>     // std::abs, std::log2
#include <limits>    // std::numeric_limits
#include <mutex>     // std::mutex
#include <random>    // std::mt19937_64, std::uniform_real_distribution

#include <fmt/format.h>

#include "impstop/simulate.hpp"
#include "impstop/templates.hpp"
#include "impstop/verify.hpp"

namespace impstop {
namespace {

/// Times a check and stamps its id and title.
template <class F>
CriterionResult timed(int id, const char *title, F &&body) {
	const auto t0 = std::chrono::steady_clock::now();
	CriterionResult r = body();
	r.id = id;
	r.title = title;
	r.seconds = std::chrono::duration<double>(
			std::chrono::steady_clock::now() - t0).count();
	return r;
}

/// Example 1 lattice used by the solver, region and certificate checks.
QviProblem example1_reference_problem(const Example1Solution &sol) {
	return example1_problem(sol, 4000, 0.01, 5. * sol.x_tilde);
}

SimulationConfig example1_simulation(const Example1Solution &sol,
		const AcceptanceOptions &options, long long paths) {
	SimulationConfig cfg;
	cfg.dt = options.dt;
	cfg.n_paths = paths;
	cfg.seed = options.seed;
	cfg.threads = options.threads;
	cfg.horizon = options.horizon;
	cfg.horizon_value = {[sol](const Vec &x) {
		return example1_value(sol, 0., x[0]);
	}};
	return cfg;
}

double relative_gap(double a, double b) {
	return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Nodes whose label differs from the analytic one while lying farther
/// than `cells` cells from every analytic boundary (per dimension).
int mismatches_outside_band(const RegionMap &regions,
		const std::vector<Label> &analytic,
		const std::vector<std::vector<double>> &boundaries, int cells) {
	const Grid &g = regions.grid;
	int bad = 0;
	for (int i = 0; i < g.size(); ++i) {
		const Label l = analytic[i];
		const Region expected = l == Label::stop ? Region::stop
				: (l == Label::impulse ? Region::impulse : Region::cont);
		if (regions.labels[i] == expected || regions.labels[i] == Region::boundary)
			continue;
		const Vec x = g.point(i);
		bool near = false;
		for (int d = 0; d < g.dim; ++d)
			for (double b : boundaries[d])
				near = near || std::abs(x[d] - b) <= cells * g.h(d) * (1. + 1e-12);
		bad += !near;
	}
	return bad;
}

bool partition_ok(const RegionMap &regions) {
	int total = 0;
	for (Region r : {Region::boundary, Region::impulse, Region::stop,
			Region::cont})
		total += regions.count(r);
	return total == regions.grid.size();
}

} // namespace

std::string format_criterion(const CriterionResult &r) {
	return fmt::format("{} [{}] {}: {}", r.pass ? "PASS" : "FAIL",
			r.id > 0 ? std::to_string(r.id) : std::string("-"), r.title, r.detail);
}

Example1Params reference_example1() {
	return Example1Params{};
}

Example2Params reference_investor(bool with_jumps) {
	Example2Params p;
	if (with_jumps)
		p.atoms = {JumpAtom{0.2, 0.5}};
	return p;
}

CriterionResult check_exponent_identities(std::uint64_t seed) {
	return timed(1, "exponent identities", [&] {
		std::mt19937_64 rng(seed);
		std::uniform_real_distribution<double> ua(0.01, 0.2), ub(0.1, 0.6),
				ud(0.01, 0.3);
		double product = 0., sum = 0.;
		for (int k = 0; k < 50; ++k) {
			const double alpha = ua(rng), beta = ub(rng), delta = ud(rng);
			const auto [cp, cm] = example1_exponents(alpha, beta, delta);
			product = std::max(product,
					std::abs(cp * cm + 2. * delta / (beta * beta)));
			sum = std::max(sum,
					std::abs(cp + cm - 1. + 2. * alpha / (beta * beta)));
		}
		CriterionResult r;
		r.pass = product < 1e-10 && sum < 1e-10;
		r.detail = fmt::format("sets=50 max_product_identity={:.3e} "
				"max_sum_identity={:.3e} tol=1e-10", product, sum);
		return r;
	});
}

CriterionResult check_smooth_fit(const Example1Solution &sol) {
	return timed(2, "smooth fit", [&] {
		const auto res = example1_residuals(sol);
		const double worst = std::max({std::abs(res.value_match_hat),
				std::abs(res.smooth_fit_hat), std::abs(res.continuity_tilde)});
		const bool order = sol.x_hat < sol.x_tilde && sol.x_target < sol.x_tilde;
		CriterionResult r;
		r.pass = worst < 1e-9 && std::abs(res.target_foc) < 1e-9 && order;
		r.detail = fmt::format("value_match={:.3e} smooth_fit={:.3e} "
				"continuity={:.3e} target_foc={:.3e} x_hat={:.6f} x_star={:.6f} "
				"x_tilde={:.6f} tol=1e-9", res.value_match_hat, res.smooth_fit_hat,
				res.continuity_tilde, res.target_foc, sol.x_hat, sol.x_target,
				sol.x_tilde);
		return r;
	});
}

CriterionResult check_closed_form_residual(const Example1Solution &sol) {
	return timed(3, "closed-form QVI residual", [&] {
		double res[2] = {0., 0.}, scale = 0.;
		const int nodes[2] = {2000, 4000};
		for (int k = 0; k < 2; ++k) {
			const auto problem = example1_problem(sol, nodes[k], 0.5 * sol.x_hat,
					2. * sol.x_tilde);
			const auto psi = example1_closed_form(sol, problem.grid);
			res[k] = residual_sup_excluding(qvi_residual(psi, problem),
					{sol.x_hat, sol.x_tilde}, 2);
			scale = psi.sup_norm();
		}
		const double order = std::log2(res[0] / res[1]);
		CriterionResult r;
		r.pass = order >= 1.6 && res[1] < 1e-3 * scale;
		r.detail = fmt::format("residual_2000={:.3e} residual_4000={:.3e} "
				"order={:.3f} (min 1.6) relative_4000={:.3e} (max 1e-3)", res[0],
				res[1], order, res[1] / scale);
		return r;
	});
}

CriterionResult check_qvi_against_closed_form(const Example1Solution &sol) {
	return timed(4, "QVI solver against closed form", [&] {
		const auto problem = example1_reference_problem(sol);
		const auto psi = example1_closed_form(sol, problem.grid);
		const auto solution = solve_qvi(problem);
		double dist = 0.;
		for (int i = 0; i < problem.grid.size(); ++i)
			dist = std::max(dist,
					std::abs(solution.value.values[i] - psi.values[i]));
		const double h = problem.grid.h(0);
		const double x_hat = max_coordinate(problem.grid, solution.policy.labels,
				Label::stop);
		const double x_tilde = min_coordinate(problem.grid,
				solution.policy.labels, Label::impulse);
		const double cells_hat = std::abs(x_hat - sol.x_hat) / h;
		const double cells_tilde = std::abs(x_tilde - sol.x_tilde) / h;
		CriterionResult r;
		r.pass = dist < 5e-3 * psi.sup_norm() && cells_hat <= 2.
				&& cells_tilde <= 2.;
		r.detail = fmt::format("relative_distance={:.3e} (max 5e-3) "
				"x_hat_cells={:.2f} x_tilde_cells={:.2f} (max 2) iterations={}",
				dist / psi.sup_norm(), cells_hat, cells_tilde,
				solution.policy.iterations);
		return r;
	});
}

CriterionResult check_monte_carlo(const Example1Solution &sol,
		const AcceptanceOptions &options) {
	return timed(5, "Monte Carlo consistency", [&] {
		const auto game = example1_game(sol.params);
		const auto controller = example1_controller(sol, sol.x_tilde);
		const auto stopper = example1_stopper(sol.x_hat);
		auto cfg = example1_simulation(sol, options, options.paths);
		std::mutex mutex;
		double landing = 0.;
		long long impulses = 0;
		cfg.observer = [&](const PathRecord &rec) {
			std::lock_guard<std::mutex> lock(mutex);
			for (const auto &ev : rec.interventions) {
				landing = std::max(landing, std::abs(ev.after[0] - sol.x_target));
				++impulses;
			}
		};
		bool ok = true;
		std::string detail;
		for (double x : options.starts) {
			const auto e = estimate_with_bias(game, controller, stopper, cfg, {x});
			const double value = example1_value(sol, 0., x);
			const double err = std::abs(e.mean - value);
			const double bound = 3. * e.stderr_ + e.bias;
			ok = ok && err <= bound;
			detail += fmt::format("x={} err={:.2e} bound={:.2e}; ", x, err, bound);
		}
		CriterionResult r;
		r.pass = ok && impulses > 0 && landing <= 1e-12;
		r.detail = detail + fmt::format("paths={} dt={} impulses={} "
				"max_landing_error={:.2e} (max 1e-12)", options.paths, options.dt,
				impulses, landing);
		return r;
	});
}

CriterionResult check_deviations(const Example1Solution &sol,
		const AcceptanceOptions &options) {
	return timed(6, "Nash deviation ordering", [&] {
		const auto game = example1_game(sol.params);
		const auto cfg = example1_simulation(sol, options,
				options.deviation_paths);
		const auto deviations = example1_deviations(sol,
				{options.controller_start * sol.x_tilde},
				{options.stopper_start * sol.x_hat});
		const auto report = deviation_test(game,
				example1_controller(sol, sol.x_tilde), example1_stopper(sol.x_hat),
				deviations, cfg);
		std::string detail;
		double worst = std::numeric_limits<double>::infinity();
		for (const auto &row : report.rows) {
			// Margin in paired standard errors on the deviating player's side.
			const auto &pay = game.payoffs[0];
			const Sense sense = row.player == 0 ? pay.controller_sense
					: pay.stopper_sense;
			const double gain = sense == Sense::maximize ? row.difference
					: -row.difference;
			worst = std::min(worst, gain / std::max(row.paired_stderr, 1e-300));
		}
		CriterionResult r;
		r.pass = report.rows.size() == 8 && report.all_pass();
		int failed = 0;
		for (const auto &row : report.rows)
			failed += !row.pass;
		r.detail = fmt::format("deviations={} failed={} paired_paths={} "
				"worst_margin={:.2f} se (min -3)", report.rows.size(), failed,
				options.deviation_paths, worst);
		return r;
	});
}

CriterionResult check_investor_closed_form(const Example2Solution &sol) {
	return timed(7, "investor closed form without jumps", [&] {
		const auto &p = sol.params;
		const double k = p.delta / (p.e * p.r - p.sigma_f * p.sigma_f);
		const double omega_star = p.lambda_T * k / (p.g1 * (1. - k));
		const double a = std::pow(p.g1 / k, k)
				* std::pow(p.lambda_T / (1. - k), 1. - k);
		const double k_gap = std::abs(sol.k - k);
		const double w_gap = relative_gap(sol.omega_star, omega_star);
		const double a_gap = relative_gap(sol.a, a);
		double system = 0.;
		for (double v : sol.injection_residuals)
			system = std::max(system, std::abs(v));
		const double match_omega = std::abs(sol.omega_cont(sol.omega_star)
				- sol.exit_payoff(sol.omega_star));
		const double match_y = std::abs(sol.wealth_cont(sol.y_tilde)
				- sol.wealth_value(sol.y_tilde));
		CriterionResult r;
		r.pass = k_gap <= 4. * std::numeric_limits<double>::epsilon() * k
				&& w_gap < 1e-12 && a_gap < 1e-12 && system < 1e-9
				&& match_omega < 1e-9 && match_y < 1e-9;
		r.detail = fmt::format("k={:.17g} k_gap={:.1e} omega_star_gap={:.1e} "
				"a_gap={:.1e} system={:.2e} match_omega_star={:.2e} "
				"match_y_tilde={:.2e}", sol.k, k_gap, w_gap, a_gap, system,
				match_omega, match_y);
		return r;
	});
}

CriterionResult check_investor_fixed_point(const Example2Solution &sol) {
	return timed(8, "investor jump fixed point", [&] {
		const auto &p = sol.params;
		const double pk = example2_p(p, sol.theta1, sol.k);
		const double h = example2_theta1(p.atoms, sol.k).residual;
		double kernel_gap = 0.;
		if (p.atoms.size() == 1)
			kernel_gap = std::abs(sol.theta1[0] - (1. - 1. / (1. + p.atoms[0].gamma)));
		CriterionResult r;
		r.pass = !p.atoms.empty() && std::abs(pk) < 1e-10 && std::abs(h) < 1e-10
				&& kernel_gap <= 2. * std::numeric_limits<double>::epsilon();
		r.detail = fmt::format("k={:.12f} p(k)={:.2e} H={:.2e} "
				"single_atom_kernel_gap={:.1e} tol=1e-10", sol.k, pk, h, kernel_gap);
		return r;
	});
}

CriterionResult check_q_martingale(const Example2Solution &no_jumps,
		const Example2Solution &jumps, const AcceptanceOptions &options) {
	return timed(9, "Q-process martingale", [&] {
		SimulationConfig cfg;
		cfg.dt = options.dt;
		cfg.n_paths = options.paths;
		cfg.seed = options.seed;
		cfg.threads = options.threads;
		cfg.horizon = options.horizon;
		bool ok = true;
		std::string detail;
		for (const auto *sol : {&no_jumps, &jumps}) {
			const auto m = q_martingale_check(*sol, cfg, 1.);
			const double z = std::abs(m.mean - 1.) / m.stderr_;
			ok = ok && z <= 3.;
			detail += fmt::format("atoms={} mean={:.6f} se={:.2e} z={:.2f}; ",
					sol->params.atoms.size(), m.mean, m.stderr_, z);
		}
		CriterionResult r;
		r.pass = ok;
		r.detail = detail + fmt::format("paths={} (max 3 se)", options.paths);
		return r;
	});
}

CriterionResult check_region_partition(const Example1Solution &ex1,
		const Example2Solution &investor) {
	return timed(10, "region partition", [&] {
		const auto p1 = example1_reference_problem(ex1);
		const auto psi1 = example1_closed_form(ex1, p1.grid);
		const double h = p1.grid.h(0);
		ClassifyOptions o1;
		o1.eps_value = o1.eps_pde = 10. * h * h;
		const auto r1 = classify_regions(psi1, p1, o1);
		const int bad1 = mismatches_outside_band(r1, example1_labels(ex1, p1.grid),
				{{ex1.x_hat, ex1.x_tilde}}, 2);

		const auto g2 = investor_default_grid(investor);
		const auto p2 = investor_problem(investor, g2, false);
		const auto psi2 = investor_closed_form(investor, p2.grid);
		// The exit obstacle is met with smooth fit, so phi - G grows only
		// quadratically off omega_star: obstacle equalities get an h^2
		// tolerance, the first-order upwinded PDE an h tolerance.
		ClassifyOptions o2;
		const double hw = p2.grid.h(1);
		o2.eps_pde = 0.1 * hw;
		o2.eps_value = 0.01 * hw * hw;
		const auto r2 = classify_regions(psi2, p2, o2);
		const int bad2 = mismatches_outside_band(r2,
				investor_labels(investor, p2.grid),
				{{investor.y_tilde}, {investor.omega_star}}, 2);

		CriterionResult r;
		r.pass = bad1 == 0 && bad2 == 0 && partition_ok(r1) && partition_ok(r2);
		r.detail = fmt::format("example1 I1={} I2={} I3={} boundary={} "
				"off_band={}; investor I1={} I2={} I3={} boundary={} off_band={}",
				r1.count(Region::impulse), r1.count(Region::stop),
				r1.count(Region::cont), r1.count(Region::boundary), bad1,
				r2.count(Region::impulse), r2.count(Region::stop),
				r2.count(Region::cont), r2.count(Region::boundary), bad2);
		return r;
	});
}

CriterionResult check_certificates(const Example1Solution &sol) {
	return timed(11, "verification certificates", [&] {
		const auto problem = example1_reference_problem(sol);
		const auto psi = example1_closed_form(sol, problem.grid);
		const auto labels = example1_labels(sol, problem.grid);
		const double h = problem.grid.h(0);
		const double tol = 10. * h * h * psi.sup_norm();
		auto perturbed = psi;
		for (int i = 0; i < problem.grid.size(); ++i)
			if (labels[i] == Label::cont)
				perturbed.values[i] += 0.1 * sol.params.kappa1;

		const auto zs = check_zero_sum_conditions(psi, problem, labels, tol);
		const auto zs_bad = check_zero_sum_conditions(perturbed, problem, labels,
				tol);
		// The zero-sum game cast as a non-zero-sum one: both players share the
		// payoff, so phi1 = phi2.
		QviProblem cast = problem;
		cast.game.payoffs = {problem.game.payoffs[0], problem.game.payoffs[0]};
		const auto nz = check_nonzero_sum_conditions(psi, psi, cast, labels, tol);
		const auto nz_bad = check_nonzero_sum_conditions(perturbed, perturbed,
				cast, labels, tol);

		const bool iv = !zs_bad.find("(iv)").pass;
		const bool iv_nz = !nz_bad.find("(iv')").pass;
		CriterionResult r;
		r.pass = zs.ok() && !zs_bad.ok() && iv && nz.ok() == zs.ok()
				&& nz_bad.ok() == zs_bad.ok() && iv_nz;
		r.detail = fmt::format("zero_sum psi={} perturbed={} (iv)_flagged={}; "
				"non_zero_sum psi={} perturbed={} (iv')_flagged={}; tol={:.3e}",
				zs.ok() ? "pass" : "fail", zs_bad.ok() ? "pass" : "fail", iv,
				nz.ok() ? "pass" : "fail", nz_bad.ok() ? "pass" : "fail", iv_nz, tol);
		return r;
	});
}

InvestorConsistency check_investor_simulation(const Example2Solution &sol,
		const AcceptanceOptions &options, const std::vector<double> &y0) {
	SimulationConfig coarse;
	coarse.dt = options.dt;
	coarse.n_paths = options.paths;
	coarse.seed = options.seed;
	coarse.threads = options.threads;
	coarse.horizon = options.horizon;
	coarse.noise_substeps = 2;
	SimulationConfig fine = coarse;
	fine.dt = options.dt / 2.;
	fine.noise_substeps = 1;
	auto mean_of = [](const std::vector<PathRecord> &records, double *ints) {
		std::vector<double> payoff, counts;
		for (const auto &rec : records) {
			if (rec.reason == ExitReason::aborted)
				throw SimulationError("investor path aborted: " + rec.abort_message);
			payoff.push_back(rec.payoff[0]);
			counts.push_back(rec.intervention_count);
		}
		if (ints)
			*ints = summarize(counts).mean;
		return summarize(payoff);
	};
	InvestorConsistency out;
	const auto m_coarse = mean_of(simulate_investor(sol, coarse, y0), nullptr);
	const auto m_fine = mean_of(simulate_investor(sol, fine, y0),
			&out.mean_interventions);
	out.value = example2_value(sol, 0., y0[0], y0[1], y0[2]);
	out.mean = m_fine.mean;
	out.stderr_ = m_fine.stderr_;
	out.bias = std::abs(m_coarse.mean - m_fine.mean) / (1. - std::sqrt(0.5));
	out.pass = std::abs(out.mean - out.value) <= 3. * out.stderr_ + out.bias;
	return out;
}

} // namespace impstop
