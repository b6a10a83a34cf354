#include "impstop/simulate.hpp"

#include <algorithm> // std::min, std::any_of
#include <cmath>     // std::exp, std::sqrt, std::isfinite
#include <limits>    // std::numeric_limits
#include <map>       // std::map
#include <random>    // std::mt19937_64, std::seed_seq
#include <sstream>   // std::ostringstream
#include <thread>    // std::thread

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

#include "impstop/io.hpp"

namespace impstop {

const char *to_string(ExitReason reason) {
	switch (reason) {
	case ExitReason::stopped:
		return "stopped";
	case ExitReason::solvency_exit:
		return "solvency_exit";
	case ExitReason::horizon:
		return "horizon";
	case ExitReason::aborted:
		return "aborted";
	}
	return "?";
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index,
		Stream stream) {
	std::seed_seq seq{static_cast<std::uint32_t>(seed),
			static_cast<std::uint32_t>(seed >> 32),
			static_cast<std::uint32_t>(index),
			static_cast<std::uint32_t>(index >> 32),
			static_cast<std::uint32_t>(stream)};
	return std::mt19937_64(seq);
}

bool finite(const Vec &x) {
	for (double v : x)
		if (!std::isfinite(v))
			return false;
	return true;
}

long long step_count(const SimulationConfig &cfg) {
	if (!(cfg.dt > 0.) || !(cfg.horizon > 0.))
		throw SimulationError("simulation needs dt > 0 and horizon > 0");
	if (cfg.noise_substeps < 1)
		throw SimulationError("noise_substeps must be at least 1");
	return std::max<long long>(1, std::llround(cfg.horizon / cfg.dt));
}

/// Next firing time per atom from independent exponential clocks.
struct JumpClocks {
	std::mt19937_64 engine;
	boost::random::exponential_distribution<double> exp1{1.};
	std::vector<double> next;
	std::vector<double> rate;

	/// The engine is seeded only when some atom has a positive rate.
	JumpClocks(std::uint64_t seed, std::uint64_t index,
			const std::vector<double> &rates)
			: next(rates.size(), std::numeric_limits<double>::infinity()),
				rate(rates) {
		if (std::any_of(rate.begin(), rate.end(), [](double r) { return r > 0.; }))
			engine = make_engine(seed, index, Stream::jumps);
		for (std::size_t j = 0; j < rate.size(); ++j)
			if (rate[j] > 0.)
				next[j] = exp1(engine) / rate[j];
	}

	/// Atoms firing in (t0, t1], in time order per atom.
	void fired(double t1, std::vector<int> &out) {
		out.clear();
		for (std::size_t j = 0; j < rate.size(); ++j)
			while (next[j] <= t1) {
				out.push_back(static_cast<int>(j));
				next[j] += exp1(engine) / rate[j];
			}
	}
};

} // namespace

PathRecord simulate_path(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::uint64_t index) {
	const auto &diff = game.diffusion;
	const int p = diff.dimension;
	const int m = diff.noise_dimension;
	const std::size_t players = game.payoffs.size();
	const long long steps = step_count(cfg);
	const double dt = cfg.dt;
	const double sub_sd = std::sqrt(dt / cfg.noise_substeps);

	PathRecord rec;
	rec.index = index;
	rec.payoff.assign(players, 0.);
	rec.intervention_component.assign(players, 0.);

	std::mt19937_64 engine = make_engine(cfg.seed, index, Stream::diffusion);
	boost::random::normal_distribution<double> normal(0., 1.);
	std::vector<double> rates;
	for (const auto &atom : diff.levy_measure)
		rates.push_back(atom.intensity);
	JumpClocks clocks(cfg.seed, index, rates);
	std::vector<int> fired;

	const bool exact = cfg.exact_geometric && diff.geometric;
	// Compensator of proportional jumps, per unit of state (geometric case).
	Vec comp_rate(p, 0.);
	if (exact)
		for (const auto &atom : diff.levy_measure) {
			Vec probe(p, 1.);
			const Vec g = diff.jump_amplitude(probe, atom.mark);
			for (int i = 0; i < p; ++i)
				comp_rate[i] += atom.intensity * g[i];
		}

	std::vector<double> discount(players);
	for (std::size_t k = 0; k < players; ++k)
		discount[k] = game.payoffs[k].discount;

	Vec x = x0;
	Vec dW(m);
	auto finish = [&](ExitReason reason, double t, bool horizon) {
		rec.reason = reason;
		rec.stop_time = t;
		rec.final_state = x;
		for (std::size_t k = 0; k < players; ++k) {
			const auto &pay = game.payoffs[k];
			double v;
			if (horizon && k < cfg.horizon_value.size() && cfg.horizon_value[k])
				v = cfg.horizon_value[k](x);
			else
				v = pay.bequest ? pay.bequest(x) : 0.;
			rec.payoff[k] += std::exp(-discount[k] * t) * v;
		}
	};
	auto abort = [&](double t, const std::string &why) {
		rec.reason = ExitReason::aborted;
		rec.stop_time = t;
		rec.final_state = x;
		rec.abort_message = why;
	};

	for (long long step = 0;; ++step) {
		const double t = step * dt;
		if (cfg.record_states) {
			rec.times.push_back(t);
			rec.states.push_back(x);
		}
		if (!finite(x)) {
			abort(t, "non-finite state");
			return rec;
		}
		// The stopper acts first; impulses are instantaneous.
		int guard = 0;
		for (;;) {
			if (!game.solvency.lo.empty() && !game.solvency.contains(x)) {
				finish(ExitReason::solvency_exit, t, false);
				return rec;
			}
			if (stopper.stop && stopper.stop(x)) {
				finish(ExitReason::stopped, t, false);
				return rec;
			}
			if (!(controller.act && controller.act(x)))
				break;
			if (++guard > 100) {
				abort(t, "impulse target re-triggers the impulse region");
				return rec;
			}
			InterventionEvent ev;
			ev.time = t;
			ev.z = controller.target(x);
			ev.cost = game.intervention.cost ? game.intervention.cost(0., ev.z) : 0.;
			ev.before = x;
			ev.after = game.intervention.response(x, ev.z);
			ev.cashflow.resize(players);
			for (std::size_t k = 0; k < players; ++k) {
				ev.cashflow[k] = std::exp(-discount[k] * t)
						* game.impulse_cashflow(k, x, ev.z);
				rec.payoff[k] += ev.cashflow[k];
				rec.intervention_component[k] += ev.cashflow[k];
			}
			x = ev.after;
			rec.interventions.push_back(std::move(ev));
			++rec.intervention_count;
			if (!finite(x)) {
				abort(t, "non-finite state after impulse");
				return rec;
			}
		}
		if (step >= steps) {
			finish(ExitReason::horizon, t, true);
			return rec;
		}

		for (std::size_t k = 0; k < players; ++k)
			if (game.payoffs[k].running)
				rec.payoff[k] += std::exp(-discount[k] * t)
						* game.payoffs[k].running(x) * dt;

		for (int k = 0; k < m; ++k) {
			double w = 0.;
			for (int s = 0; s < cfg.noise_substeps; ++s)
				w += normal(engine);
			dW[k] = w * sub_sd;
		}
		if (exact) {
			for (int i = 0; i < p; ++i) {
				const double a = diff.geometric_drift[i] - comp_rate[i];
				const double b = diff.geometric_volatility[i];
				x[i] *= std::exp((a - 0.5 * b * b) * dt + b * dW[i]);
			}
		} else {
			const Vec mu = diff.drift(t, x);
			Vec comp(p, 0.);
			for (const auto &atom : diff.levy_measure) {
				const Vec g = diff.jump_amplitude(x, atom.mark);
				for (int i = 0; i < p; ++i)
					comp[i] += atom.intensity * g[i];
			}
			const auto sigma = diff.volatility(t, x);
			for (int i = 0; i < p; ++i) {
				double inc = (mu[i] - comp[i]) * dt;
				for (int k = 0; k < m; ++k)
					inc += sigma[i][k] * dW[k];
				x[i] += inc;
			}
		}
		if (!diff.levy_measure.empty()) {
			clocks.fired(t + dt, fired);
			for (int j : fired) {
				const Vec g = diff.jump_amplitude(x, diff.levy_measure[j].mark);
				for (int i = 0; i < p; ++i)
					x[i] += g[i];
			}
		}
	}
}

double pairwise_sum(const double *values, std::size_t n) {
	if (n <= 16) {
		double s = 0.;
		for (std::size_t i = 0; i < n; ++i)
			s += values[i];
		return s;
	}
	const std::size_t half = n / 2;
	return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

MeanEstimate summarize(const std::vector<double> &values) {
	std::vector<double> clean;
	clean.reserve(values.size());
	for (double v : values)
		if (std::isfinite(v))
			clean.push_back(v);
	MeanEstimate out;
	out.n = static_cast<long long>(clean.size());
	if (clean.empty())
		return out;
	out.mean = pairwise_sum(clean.data(), clean.size()) / out.n;
	if (out.n > 1) {
		std::vector<double> sq(clean.size());
		for (std::size_t i = 0; i < clean.size(); ++i)
			sq[i] = (clean[i] - out.mean) * (clean[i] - out.mean);
		const double var = pairwise_sum(sq.data(), sq.size()) / (out.n - 1);
		out.stderr_ = std::sqrt(var / out.n);
	}
	return out;
}

namespace {

/// Runs f(index) for index in [0, n) over cfg.threads workers with a static
/// partition; results are written by index, so the output does not depend
/// on the thread count.
template <class F>
void parallel_paths(long long n, int threads, F &&f) {
	threads = std::max(1, threads);
	if (threads == 1 || n < 2 * threads) {
		for (long long i = 0; i < n; ++i)
			f(i);
		return;
	}
	std::vector<std::thread> pool;
	for (int w = 0; w < threads; ++w)
		pool.emplace_back([&, w] {
			for (long long i = w; i < n; i += threads)
				f(i);
		});
	for (auto &t : pool)
		t.join();
}

struct PathBatch {
	std::vector<std::vector<double>> payoff; // [player][path], NaN if aborted
	std::vector<int> interventions;
	long long aborted = 0;
	std::string first_abort;
};

PathBatch run_batch(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0) {
	if (cfg.n_paths < 1)
		throw SimulationError("n_paths must be at least 1");
	const std::size_t players = game.payoffs.size();
	PathBatch batch;
	batch.payoff.assign(players, std::vector<double>(cfg.n_paths));
	batch.interventions.assign(cfg.n_paths, 0);
	std::vector<std::uint8_t> aborted(cfg.n_paths, 0);
	std::vector<std::string> messages(cfg.n_paths);
	parallel_paths(cfg.n_paths, cfg.threads, [&](long long i) {
		const auto rec = simulate_path(game, controller, stopper, cfg, x0,
				static_cast<std::uint64_t>(i));
		if (cfg.observer)
			cfg.observer(rec);
		const bool bad = rec.reason == ExitReason::aborted;
		aborted[i] = bad;
		if (bad)
			messages[i] = rec.abort_message;
		for (std::size_t k = 0; k < players; ++k)
			batch.payoff[k][i] = bad ? std::numeric_limits<double>::quiet_NaN()
					: rec.payoff[k];
		batch.interventions[i] = rec.intervention_count;
	});
	for (long long i = 0; i < cfg.n_paths; ++i)
		if (aborted[i]) {
			if (batch.aborted == 0)
				batch.first_abort = messages[i];
			++batch.aborted;
		}
	return batch;
}

void check_aborts(const PathBatch &batch, long long n) {
	if (batch.aborted * 100 > n)
		throw SimulationError(fmt::format("{} of {} paths aborted (first: {})",
				batch.aborted, n, batch.first_abort));
}

} // namespace

PayoffEstimate estimate_payoff(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0) {
	const auto batch = run_batch(game, controller, stopper, cfg, x0);
	check_aborts(batch, cfg.n_paths);
	PayoffEstimate out;
	out.n_paths = cfg.n_paths;
	out.aborted = batch.aborted;
	for (const auto &values : batch.payoff) {
		const auto s = summarize(values);
		out.mean.push_back(s.mean);
		out.stderr_.push_back(s.stderr_);
	}
	std::vector<double> counts(batch.interventions.begin(),
			batch.interventions.end());
	out.mean_interventions = summarize(counts).mean;
	return out;
}

std::vector<double> simulate_payoffs(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::size_t player,
		long long *aborted) {
	auto batch = run_batch(game, controller, stopper, cfg, x0);
	if (aborted)
		*aborted = batch.aborted;
	return std::move(batch.payoff.at(player));
}

BiasedEstimate estimate_with_bias(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const SimulationConfig &cfg, const Vec &x0, std::size_t player) {
	SimulationConfig coarse = cfg;
	coarse.noise_substeps = 2 * cfg.noise_substeps;
	SimulationConfig fine = cfg;
	fine.dt = cfg.dt / 2.;
	const auto b_coarse = run_batch(game, controller, stopper, coarse, x0);
	const auto b_fine = run_batch(game, controller, stopper, fine, x0);
	check_aborts(b_coarse, cfg.n_paths);
	check_aborts(b_fine, cfg.n_paths);
	const auto s_coarse = summarize(b_coarse.payoff.at(player));
	const auto s_fine = summarize(b_fine.payoff.at(player));
	BiasedEstimate out;
	out.mean = s_fine.mean;
	out.stderr_ = s_fine.stderr_;
	out.coarse_mean = s_coarse.mean;
	out.bias = std::abs(s_coarse.mean - s_fine.mean) / (1. - std::sqrt(0.5));
	out.aborted = b_fine.aborted;
	std::vector<double> counts(b_fine.interventions.begin(),
			b_fine.interventions.end());
	out.mean_interventions = summarize(counts).mean;
	return out;
}

bool DeviationReport::all_pass() const {
	for (const auto &row : rows)
		if (!row.pass)
			return false;
	return true;
}

std::string DeviationReport::to_text() const {
	std::ostringstream out;
	out << fmt::format("{:<24} {:>6} {:>14} {:>14} {:>14} {:>12}  {}\n",
			"deviation", "player", "equilibrium", "deviation", "difference",
			"paired_se", "verdict");
	for (const auto &r : rows)
		out << fmt::format("{:<24} {:>6} {:>14.8f} {:>14.8f} {:>14.8f} {:>12.3e}  {}\n",
				r.name, r.player == 0 ? "ctrl" : "stop", r.equilibrium, r.deviation,
				r.difference, r.paired_stderr, r.pass ? "pass" : "FAIL");
	return out.str();
}

DeviationReport deviation_test(const GameSpec &game,
		const ThresholdImpulsePolicy &controller, const StopPolicy &stopper,
		const std::vector<Deviation> &deviations, const SimulationConfig &cfg) {
	DeviationReport report;
	std::map<std::pair<Vec, std::size_t>, std::vector<double>> cache;
	for (const auto &d : deviations) {
		const std::size_t k = std::min(d.player, game.payoffs.size() - 1);
		const auto &pay = game.payoffs[k];
		const Sense sense = d.player == 0 ? pay.controller_sense
				: pay.stopper_sense;
		auto key = std::make_pair(d.x0, k);
		if (!cache.count(key)) {
			long long aborted = 0;
			cache[key] = simulate_payoffs(game, controller, stopper, cfg, d.x0, k,
					&aborted);
			if (aborted * 100 > cfg.n_paths)
				throw SimulationError("equilibrium run: too many aborted paths");
		}
		const auto &eq = cache[key];
		long long aborted = 0;
		const auto dev = simulate_payoffs(game, d.controller, d.stopper, cfg,
				d.x0, k, &aborted);
		if (aborted * 100 > cfg.n_paths)
			throw SimulationError("deviation " + d.name + ": too many aborted paths");
		std::vector<double> diff(eq.size());
		for (std::size_t i = 0; i < eq.size(); ++i)
			diff[i] = eq[i] - dev[i];
		const auto s_diff = summarize(diff);
		DeviationRow row;
		row.name = d.name;
		row.player = d.player;
		row.x0 = d.x0;
		row.equilibrium = summarize(eq).mean;
		row.deviation = summarize(dev).mean;
		row.difference = s_diff.mean;
		row.paired_stderr = s_diff.stderr_;
		row.pass = sense == Sense::maximize
				? s_diff.mean >= -3. * s_diff.stderr_
				: s_diff.mean <= 3. * s_diff.stderr_;
		report.rows.push_back(row);
	}
	return report;
}

std::vector<PathRecord> simulate_investor(const Example2Solution &sol,
		const SimulationConfig &cfg, const Vec &y0,
		const InvestorOptions &options) {
	const auto &p = sol.params;
	if (y0.size() != 3 || !(y0[0] > 0.) || !(y0[1] > 0.) || !(y0[2] > 0.))
		throw SimulationError("investor start needs positive (y1, y2, y3)");
	const long long steps = step_count(cfg);
	const double dt = cfg.dt;
	const double sub_sd = std::sqrt(dt / cfg.noise_substeps);
	double jump_comp = 0.;
	std::vector<double> rates;
	for (const auto &atom : p.atoms) {
		jump_comp += atom.intensity * atom.gamma;
		rates.push_back(atom.intensity);
	}
	const double mu1 = p.e * p.r - jump_comp;
	const double s1 = p.sigma_f;
	const double s2 = p.pi * p.sigma_I;

	std::vector<PathRecord> records(cfg.n_paths);
	parallel_paths(cfg.n_paths, cfg.threads, [&](long long index) {
		PathRecord rec;
		rec.index = static_cast<std::uint64_t>(index);
		rec.payoff.assign(2, 0.);
		rec.intervention_component.assign(2, 0.);
		std::mt19937_64 firm = make_engine(cfg.seed, index, Stream::diffusion);
		std::mt19937_64 wealth = make_engine(cfg.seed, index, Stream::investor);
		boost::random::normal_distribution<double> normal(0., 1.);
		JumpClocks clocks(cfg.seed, index, rates);
		std::vector<int> fired;
		double y1 = y0[0], y2 = y0[1], y3 = y0[2];
		for (long long step = 0;; ++step) {
			const double t = step * dt;
			const double disc = std::exp(-p.delta * t);
			if (cfg.record_states) {
				rec.times.push_back(t);
				rec.states.push_back({y1, y2, y3});
			}
			if (!(std::isfinite(y1) && std::isfinite(y2) && std::isfinite(y3))) {
				rec.reason = ExitReason::aborted;
				rec.abort_message = "non-finite state";
				rec.stop_time = t;
				break;
			}
			const double omega = y1 * y3;
			const bool exit = options.exit_above ? omega >= sol.omega_star
					: omega <= sol.omega_star;
			if (exit || !(y1 > 0.)) {
				const double pkg = sol.exit_payoff(omega);
				rec.payoff[0] += disc * y3 * (sol.wealth_value(y2) + pkg);
				rec.payoff[1] += disc * y3 * pkg;
				rec.reason = exit ? ExitReason::stopped : ExitReason::solvency_exit;
				rec.stop_time = t;
				break;
			}
			if (y2 >= sol.y_tilde) {
				InterventionEvent ev;
				ev.time = t;
				ev.z = y2 - sol.y_hat;
				ev.cost = p.kappa_I + p.alpha_I * ev.z;
				ev.before = {y1, y2, y3};
				y2 = sol.y_hat;
				if (options.credit_injections_to_firm)
					y1 += ev.z;
				ev.after = {y1, y2, y3};
				const double cash = disc * y3 * (p.alpha_I * ev.z - p.kappa_I);
				ev.cashflow = {cash, 0.};
				rec.payoff[0] += cash;
				rec.intervention_component[0] += cash;
				rec.interventions.push_back(std::move(ev));
				++rec.intervention_count;
			}
			if (step >= steps) {
				rec.payoff[0] += disc * y3 * sol.reduced_value(y2, y1 * y3);
				rec.payoff[1] += disc * y3 * sol.omega_value(y1 * y3);
				rec.reason = ExitReason::horizon;
				rec.stop_time = t;
				break;
			}
			double dB = 0., dBI = 0.;
			for (int s = 0; s < cfg.noise_substeps; ++s) {
				dB += normal(firm);
				dBI += normal(wealth);
			}
			dB *= sub_sd;
			dBI *= sub_sd;
			clocks.fired(t + dt, fired);
			y1 *= std::exp((mu1 - 0.5 * s1 * s1) * dt + s1 * dB);
			for (int j : fired)
				y1 *= 1. + p.atoms[j].gamma;
			y3 = q_process_step(y3, dt, dB, s1, p.atoms, sol.theta1, fired);
			y2 *= std::exp((p.gamma_drift - 0.5 * s2 * s2) * dt + s2 * dBI);
		}
		rec.final_state = {y1, y2, y3};
		if (cfg.observer)
			cfg.observer(rec);
		records[index] = std::move(rec);
	});
	return records;
}

MeanEstimate q_martingale_check(const Example2Solution &sol,
		const SimulationConfig &cfg, double q0) {
	const auto &p = sol.params;
	const long long steps = step_count(cfg);
	const double dt = cfg.dt;
	const double sd = std::sqrt(dt);
	std::vector<double> rates;
	for (const auto &atom : p.atoms)
		rates.push_back(atom.intensity);
	std::vector<double> out(cfg.n_paths);
	parallel_paths(cfg.n_paths, cfg.threads, [&](long long index) {
		std::mt19937_64 engine = make_engine(cfg.seed, index, Stream::diffusion);
		boost::random::normal_distribution<double> normal(0., 1.);
		JumpClocks clocks(cfg.seed, index, rates);
		std::vector<int> fired;
		double q = q0;
		for (long long step = 0; step < steps; ++step) {
			clocks.fired((step + 1) * dt, fired);
			q = q_process_step(q, dt, sd * normal(engine), p.sigma_f, p.atoms,
					sol.theta1, fired);
		}
		out[index] = q;
	});
	return summarize(out);
}

void write_path_csv(const std::string &path,
		const std::vector<PathRecord> &records, const std::string &state_names) {
	std::vector<std::string> names;
	{
		std::istringstream in(state_names);
		std::string item;
		while (std::getline(in, item, ','))
			names.push_back(item);
	}
	std::vector<std::string> header{"path", "time"};
	header.insert(header.end(), names.begin(), names.end());
	header.push_back("event");
	header.push_back("cashflow");
	CsvWriter csv(path, header);
	auto emit = [&](const PathRecord &r, double t, const Vec &x,
			const std::string &event, double cash) {
		std::vector<std::string> row{std::to_string(r.index), format_double(t)};
		for (std::size_t i = 0; i < names.size(); ++i)
			row.push_back(i < x.size() ? format_double(x[i]) : "");
		row.push_back(event);
		row.push_back(format_double(cash));
		csv.row(row);
	};
	for (const auto &r : records) {
		if (!r.states.empty())
			emit(r, r.times.front(), r.states.front(), "start", 0.);
		for (const auto &ev : r.interventions)
			emit(r, ev.time, ev.after, "impulse",
					ev.cashflow.empty() ? 0. : ev.cashflow.front());
		emit(r, r.stop_time, r.final_state, to_string(r.reason),
				r.payoff.empty() ? 0. : r.payoff.front());
	}
}

} // namespace impstop
