#include "impstop/cli.hpp"

#include <algorithm>  // std::min, std::replace
#include <chrono>     // std::chrono::system_clock
#include <cmath>      // std::abs
#include <cstdlib>    // std::getenv
#include <ctime>      // std::gmtime, std::strftime
#include <filesystem> // std::filesystem
#include <optional>   // std::optional
#include <sstream>    // std::istringstream
#include <utility>    // std::move

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

#include "impstop/acceptance.hpp"
#include "impstop/io.hpp"
#include "impstop/templates.hpp"

#ifndef IMPSTOP_VERSION
#define IMPSTOP_VERSION "0.0.0"
#endif
#ifndef IMPSTOP_CONFIG_DIR
#define IMPSTOP_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace impstop {
namespace {

/// Early exit with a code and a one-line diagnostic.
struct CliExit {
	int code;
	std::string message;
};

std::string utc_now() {
	const auto now = std::chrono::system_clock::to_time_t(
			std::chrono::system_clock::now());
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
	return buf;
}

/// Request overrides applied on top of the [simulation] section.
ModelConfig load_config(const CliRequest &req, const std::string &path) {
	if (path.empty())
		throw CliExit{exit_missing_input, "no config given (--config)"};
	if (!fs::is_regular_file(path))
		throw CliExit{exit_missing_input, "config file not found: " + path};
	ModelConfig m = load_model_config(Config::load(path));
	if (req.seed)
		m.sim.seed = *req.seed;
	if (req.paths) {
		if (*req.paths < 1)
			throw ConfigError("--paths", "must be at least 1");
		m.sim.paths = m.sim.deviation_paths = *req.paths;
	}
	if (req.dt) {
		if (!(*req.dt > 0.))
			throw ConfigError("--dt", "must be positive");
		m.sim.dt = *req.dt;
	}
	if (req.grid && *req.grid < 5)
		throw ConfigError("--grid", "needs at least 5 nodes");
	if (req.tol && !(*req.tol > 0.))
		throw ConfigError("--tol", "must be positive");
	if (req.threads < 1)
		throw ConfigError("--threads", "must be at least 1");
	return m;
}

class RunDir {
public:
	RunDir(const CliRequest &req, const std::string &config, std::uint64_t seed)
			: dir_(req.out), started_(std::chrono::steady_clock::now()) {
		fs::create_directories(dir_);
		manifest_ = {{"command", req.command}, {"config", config},
				{"seed", seed}, {"out", req.out}, {"version", IMPSTOP_VERSION},
				{"started", utc_now()}, {"argv", req.argv}};
		if (!req.example.empty())
			manifest_["example"] = req.example;
	}

	std::string path(const std::string &name) const {
		return (fs::path(dir_) / name).string();
	}

	void record(const std::string &name) { outputs_.push_back(name); }

	void finish(int exit_code) {
		manifest_["outputs"] = outputs_;
		manifest_["exit_code"] = exit_code;
		manifest_["wall_clock_seconds"] = std::chrono::duration<double>(
				std::chrono::steady_clock::now() - started_).count();
		write_text(path("manifest.json"), manifest_.dump(2) + "\n");
	}

private:
	std::string dir_;
	std::chrono::steady_clock::time_point started_;
	nlohmann::json manifest_;
	std::vector<std::string> outputs_;
};

void write_regions_csv(const std::string &path, const RegionMap &regions) {
	const Grid &g = regions.grid;
	std::vector<std::string> header = g.dim == 1
			? std::vector<std::string>{"x", "region"}
			: std::vector<std::string>{"x0", "x1", "region"};
	CsvWriter csv(path, header);
	for (int i = 0; i < g.size(); ++i) {
		std::vector<std::string> row;
		for (double xi : g.point(i))
			row.push_back(format_double(xi));
		row.push_back(to_string(regions.labels[i]));
		csv.row(row);
	}
}

struct ValueTable {
	GridFunction phi;
	/// Policy labels from the optional label column (empty if absent).
	std::vector<Label> labels;
};

/// Value table written by `solve`, checked node by node against `grid`.
ValueTable read_value_csv(const std::string &path, const Grid &grid) {
	if (!fs::is_regular_file(path))
		throw CliExit{exit_missing_input, "value file not found: " + path};
	std::istringstream in(read_text(path));
	std::string line;
	const int columns = grid.dim + 1;
	auto cells_of = [](const std::string &text) {
		std::vector<std::string> cells;
		std::istringstream row(text);
		std::string cell;
		while (std::getline(row, cell, ','))
			cells.push_back(cell);
		return cells;
	};
	if (!std::getline(in, line))
		throw CliExit{exit_shape_mismatch, "value file is empty"};
	const auto header = cells_of(line);
	const std::string first = grid.dim == 1 ? "x" : "x0";
	if (static_cast<int>(header.size()) < columns || header[0] != first
			|| header[grid.dim] != "value")
		throw CliExit{exit_shape_mismatch, fmt::format(
				"value file header does not match a {}-D grid", grid.dim)};
	GridFunction phi(grid);
	std::vector<Label> labels;
	bool has_labels = static_cast<int>(header.size()) > columns
			&& header[columns] == "label";
	int n = 0;
	while (std::getline(in, line)) {
		if (line.empty())
			continue;
		if (n >= grid.size())
			throw CliExit{exit_shape_mismatch, fmt::format(
					"value file has more than {} rows", grid.size())};
		const auto cells = cells_of(line);
		if (static_cast<int>(cells.size()) < columns)
			throw CliExit{exit_shape_mismatch, fmt::format(
					"row {} has {} columns", n + 1, cells.size())};
		const Vec x = grid.point(n);
		try {
			for (int d = 0; d < grid.dim; ++d) {
				const double xd = std::stod(cells[d]);
				if (std::abs(xd - x[d]) > 1e-9 * std::max(1., std::abs(x[d])))
					throw CliExit{exit_shape_mismatch, fmt::format(
							"row {} coordinate {} is {} but the grid node is {}", n + 1,
							d, cells[d], format_double(x[d]))};
			}
			phi.values[n] = std::stod(cells[grid.dim]);
		} catch (const std::logic_error &) {
			throw CliExit{exit_shape_mismatch, fmt::format(
					"row {} is not numeric", n + 1)};
		}
		if (has_labels) {
			const std::string name = static_cast<int>(cells.size()) > columns
					? cells[columns] : "";
			bool known = false;
			for (Label l : {Label::cont, Label::impulse, Label::stop})
				if (name == to_string(l)) {
					labels.push_back(l);
					known = true;
				}
			has_labels = known;
		}
		++n;
	}
	if (n != grid.size())
		throw CliExit{exit_shape_mismatch, fmt::format(
				"value file has {} rows, the grid has {} nodes", n, grid.size())};
	if (!has_labels)
		labels.clear();
	return {phi, labels};
}

/// Closed-form solutions with thresholds optionally replaced from a
/// constants file.
Example1Solution example1_policy(const ModelConfig &m, const std::string &file) {
	auto sol = example1_solve(m.ex1);
	if (file.empty())
		return sol;
	if (!fs::is_regular_file(file))
		throw CliExit{exit_missing_input, "policy file not found: " + file};
	const auto c = parse_constants(read_text(file));
	for (const char *key : {"x_hat", "x_star", "x_tilde"})
		if (!c.count(key))
			throw ConfigError(std::string("policy.") + key, "missing threshold");
	sol.x_hat = c.at("x_hat");
	sol.x_target = c.at("x_star");
	sol.x_tilde = c.at("x_tilde");
	return sol;
}

Example2Solution investor_policy(const ModelConfig &m, const std::string &file) {
	auto sol = example2_solve(m.ex2);
	if (file.empty())
		return sol;
	if (!fs::is_regular_file(file))
		throw CliExit{exit_missing_input, "policy file not found: " + file};
	const auto c = parse_constants(read_text(file));
	for (const char *key : {"omega_star", "y_hat", "y_tilde"})
		if (!c.count(key))
			throw ConfigError(std::string("policy.") + key, "missing threshold");
	sol.omega_star = c.at("omega_star");
	sol.y_hat = c.at("y_hat");
	sol.y_tilde = c.at("y_tilde");
	return sol;
}

AcceptanceOptions acceptance_options(const ModelConfig &m, int threads) {
	AcceptanceOptions o;
	o.paths = m.sim.paths;
	o.deviation_paths = m.sim.deviation_paths;
	o.dt = m.sim.dt;
	o.seed = m.sim.seed;
	o.threads = threads;
	o.horizon = m.sim.horizon;
	if (!m.sim.starts.empty())
		o.starts = m.sim.starts;
	if (m.sim.controller_start > 0.)
		o.controller_start = m.sim.controller_start;
	if (m.sim.stopper_start > 0.)
		o.stopper_start = m.sim.stopper_start;
	return o;
}

Vec investor_start(const ModelConfig &m) {
	return m.sim.investor_start.empty() ? Vec{1., 2., 1.} : m.sim.investor_start;
}

////////////////////////////////////////////////////////////////////////////////
// Pipelines
////////////////////////////////////////////////////////////////////////////////

struct SolveOutcome {
	ModelSetup setup;
	QviSolution qvi;
	std::optional<RegionMap> regions;
	double distance = -1.; // relative sup distance to the closed form
};

ModelSetup solve_setup(const ModelConfig &m, const CliRequest &req) {
	return build_model(m, !req.grid_only && m.kind != ModelTemplate::stopping,
			req.grid);
}

SolveOutcome run_solve(const ModelConfig &m, ModelSetup setup, RunDir &run,
		std::ostream &out) {
	const bool closed_form = !setup.closed_form.values.empty();
	SolveOutcome s{std::move(setup), {}, {}, -1.};
	const auto &problem = s.setup.problem;
	s.qvi = solve_qvi(problem);

	Constants constants;
	if (closed_form && s.setup.ex1)
		constants = to_constants(*s.setup.ex1);
	else if (closed_form && s.setup.ex2)
		constants = to_constants(*s.setup.ex2);
	const auto &labels = s.qvi.policy.labels;
	const double lo_stop = min_coordinate(problem.grid, labels, Label::stop);
	const double hi_stop = max_coordinate(problem.grid, labels, Label::stop);
	const double lo_act = min_coordinate(problem.grid, labels, Label::impulse);
	constants.push_back({"grid_nodes", problem.grid.size()});
	constants.push_back({"grid_stop_min", lo_stop});
	constants.push_back({"grid_stop_max", hi_stop});
	constants.push_back({"grid_impulse_min", lo_act});
	constants.push_back({"qvi_iterations", s.qvi.policy.iterations});
	if (!s.setup.closed_form.values.empty()) {
		double d = 0.;
		for (int i = 0; i < problem.grid.size(); ++i)
			d = std::max(d, std::abs(s.qvi.value.values[i]
					- s.setup.closed_form.values[i]));
		s.distance = d / std::max(s.setup.closed_form.sup_norm(), 1e-300);
		constants.push_back({"qvi_relative_distance", s.distance});
	}
	write_text(run.path("constants.txt"), format_constants(constants));
	run.record("constants.txt");
	if (!s.setup.closed_form.values.empty()) {
		write_value_csv(run.path("closedform.csv"), s.setup.closed_form,
				s.setup.analytic);
		run.record("closedform.csv");
	}
	write_value_csv(run.path("value.csv"), s.qvi.value, labels);
	run.record("value.csv");
	write_residual_log(run.path("residuals.csv"), s.qvi.policy);
	run.record("residuals.csv");
	try {
		s.regions = classify_regions(s.qvi.value, problem,
				classify_options(m, problem.grid));
		write_regions_csv(run.path("regions.csv"), *s.regions);
		run.record("regions.csv");
	} catch (const StructuralError &e) {
		spdlog::error("region classification failed: {}", e.what());
	}

	out << fmt::format("model {}: {} nodes, {} policy iterations, residual {:.3e}\n",
			m.name, problem.grid.size(), s.qvi.policy.iterations,
			s.qvi.policy.history.empty() ? 0. : s.qvi.policy.history.back().residual);
	if (s.distance >= 0.)
		out << fmt::format("relative distance to closed form {:.3e}\n", s.distance);
	if (s.regions)
		out << fmt::format("regions: impulse {} stop {} continue {} boundary {}\n",
				s.regions->count(Region::impulse), s.regions->count(Region::stop),
				s.regions->count(Region::cont), s.regions->count(Region::boundary));
	return s;
}

/// Zero-sum certificate with labels from classified regions. When the
/// classification fails it is reported as a failed condition and the
/// conditions are checked against `recorded` labels if there are any.
Certificate certify(const ModelConfig &m, const GridFunction &phi,
		const QviProblem &problem, std::optional<double> tol,
		const std::vector<Label> &recorded = {}) {
	const double t = tol ? *tol
			: verification_tol(m, problem.grid, phi.sup_norm());
	try {
		const auto regions = classify_regions(phi, problem,
				classify_options(m, problem.grid));
		return check_zero_sum_conditions(phi, problem,
				labels_from_regions(regions), t);
	} catch (const StructuralError &e) {
		Certificate c;
		if (!recorded.empty())
			c = check_zero_sum_conditions(phi, problem, recorded, t);
		c.tol = t;
		ConditionResult r;
		r.id = "regions";
		r.description = "nodes classify into impulse, stop and continuation";
		r.pass = false;
		c.conditions.insert(c.conditions.begin(), r);
		c.notes = std::string(e.what())
				+ (recorded.empty() ? "" : "; conditions use the recorded labels")
				+ (c.notes.empty() ? "" : "\n" + c.notes);
		return c;
	}
}

int cmd_solve(const CliRequest &req, std::ostream &out) {
	const auto m = load_config(req, req.config);
	auto setup = solve_setup(m, req);
	RunDir run(req, req.config, m.sim.seed);
	const auto s = run_solve(m, std::move(setup), run, out);
	const int code = s.regions ? exit_ok : exit_verification_failure;
	run.finish(code);
	return code;
}

int cmd_verify(const CliRequest &req, std::ostream &out) {
	const auto m = load_config(req, req.config);
	const std::string value_file = req.value_file.empty()
			? (fs::path(req.out) / "value.csv").string() : req.value_file;
	const auto setup = build_model(m, false, req.grid);
	const auto table = read_value_csv(value_file, setup.problem.grid);
	const auto cert = certify(m, table.phi, setup.problem, req.tol,
			table.labels);
	RunDir run(req, req.config, m.sim.seed);
	write_text(run.path("certificate.txt"), cert.to_text());
	run.record("certificate.txt");
	out << cert.to_text();
	const int code = cert.ok() ? exit_ok : exit_verification_failure;
	run.finish(code);
	return code;
}

int cmd_simulate(const CliRequest &req, std::ostream &out) {
	const auto m = load_config(req, req.config);
	if (m.kind == ModelTemplate::stopping)
		throw ConfigError("model.template",
				"simulate supports the example1 and investor templates");
	if (req.deviations && m.kind != ModelTemplate::example1)
		throw ConfigError("--deviations",
				"threshold deviations are defined for the example1 template");
	SimulationConfig cfg;
	cfg.dt = m.sim.dt;
	cfg.n_paths = m.sim.paths;
	cfg.seed = m.sim.seed;
	cfg.threads = req.threads;
	cfg.horizon = m.sim.horizon;

	if (m.kind == ModelTemplate::example1) {
		const auto sol = example1_policy(m, req.policy_file);
		RunDir run(req, req.config, m.sim.seed);
		const auto game = example1_game(sol.params);
		const auto controller = example1_controller(sol, sol.x_tilde);
		const auto stopper = example1_stopper(sol.x_hat);
		cfg.horizon_value = {[sol](const Vec &x) {
			return example1_value(sol, 0., x[0]);
		}};
		const auto opts = acceptance_options(m, req.threads);
		CsvWriter summary(run.path("summary.csv"), {"x0", "mean", "stderr",
				"coarse_mean", "dt_bias", "mean_interventions", "closed_form"});
		for (double x : opts.starts) {
			const auto e = estimate_with_bias(game, controller, stopper, cfg, {x});
			summary.row(std::vector<double>{x, e.mean, e.stderr_, e.coarse_mean,
					e.bias, e.mean_interventions, example1_value(sol, 0., x)});
			out << fmt::format("x0={} mean={:.6f} stderr={:.2e} bias={:.2e} "
					"closed_form={:.6f}\n", x, e.mean, e.stderr_, e.bias,
					example1_value(sol, 0., x));
		}
		run.record("summary.csv");
		auto sample = cfg;
		sample.record_states = true;
		std::vector<PathRecord> records;
		for (std::uint64_t i = 0; i < std::min<std::uint64_t>(10, cfg.n_paths); ++i)
			records.push_back(simulate_path(game, controller, stopper, sample,
					{opts.starts.front()}, i));
		write_path_csv(run.path("paths.csv"), records, "x");
		run.record("paths.csv");
		int code = exit_ok;
		if (req.deviations) {
			auto dcfg = cfg;
			dcfg.n_paths = m.sim.deviation_paths;
			const auto report = deviation_test(game, controller, stopper,
					example1_deviations(sol, {opts.controller_start * sol.x_tilde},
							{opts.stopper_start * sol.x_hat}), dcfg);
			CsvWriter csv(run.path("deviations.csv"), {"deviation", "player", "x0",
					"equilibrium", "deviation_payoff", "difference", "paired_stderr",
					"verdict"});
			for (const auto &r : report.rows)
				csv.row(std::vector<std::string>{r.name,
						r.player == 0 ? "controller" : "stopper", format_double(r.x0[0]),
						format_double(r.equilibrium), format_double(r.deviation),
						format_double(r.difference), format_double(r.paired_stderr),
						r.pass ? "pass" : "fail"});
			run.record("deviations.csv");
			out << report.to_text();
			code = report.all_pass() ? exit_ok : exit_verification_failure;
		}
		run.finish(code);
		return code;
	}

	const auto sol = investor_policy(m, req.policy_file);
	RunDir run(req, req.config, m.sim.seed);
	const Vec y0 = investor_start(m);
	InvestorOptions iopt;
	iopt.exit_above = m.sim.exit_above;
	const auto e = check_investor_simulation(sol, acceptance_options(m,
			req.threads), y0);
	CsvWriter summary(run.path("summary.csv"), {"y1", "y2", "y3", "mean",
			"stderr", "dt_bias", "mean_interventions", "closed_form"});
	summary.row(std::vector<double>{y0[0], y0[1], y0[2], e.mean, e.stderr_,
			e.bias, e.mean_interventions, e.value});
	run.record("summary.csv");
	auto sample = cfg;
	sample.n_paths = std::min<long long>(10, cfg.n_paths);
	sample.record_states = true;
	write_path_csv(run.path("paths.csv"), simulate_investor(sol, sample, y0, iopt),
			"y1,y2,y3");
	run.record("paths.csv");
	out << fmt::format("y0=({}, {}, {}) mean={:.6f} stderr={:.2e} bias={:.2e} "
			"closed_form={:.6f}\n", y0[0], y0[1], y0[2], e.mean, e.stderr_, e.bias,
			e.value);
	run.finish(exit_ok);
	return exit_ok;
}

std::string csv_safe(std::string text) {
	std::replace(text.begin(), text.end(), ',', ';');
	return text;
}

int cmd_reproduce(const CliRequest &req, std::ostream &out) {
	const std::string path = req.config.empty() ? reference_config(req.example)
			: req.config;
	if (path.empty())
		throw ConfigError("example", "unknown example '" + req.example
				+ "' (example1, investor-nojump, investor-jump)");
	const auto m = load_config(req, path);
	if (m.kind == ModelTemplate::stopping)
		throw ConfigError("model.template",
				"reproduce supports the example1 and investor templates");
	auto setup = solve_setup(m, req);
	if (!setup.ex1 && !setup.ex2)
		throw ConfigError("--grid-only", "reproduce needs the closed form");
	RunDir run(req, path, m.sim.seed);
	std::vector<CriterionResult> rows;

	// Solve and certify the configured model.
	std::ostringstream solve_log;
	const auto s = run_solve(m, std::move(setup), run, solve_log);
	const auto cert = certify(m, s.qvi.value, s.setup.problem, req.tol);
	write_text(run.path("certificate.txt"), cert.to_text());
	run.record("certificate.txt");
	{
		CriterionResult r;
		r.title = "solver output certificate";
		r.pass = cert.ok() && s.regions.has_value();
		std::string failed;
		for (const auto &c : cert.conditions)
			if (!c.pass)
				failed += (failed.empty() ? "" : " ") + c.id;
		r.detail = fmt::format("nodes={} iterations={} relative_distance={:.3e} "
				"tol={:.3e} failed=[{}]", s.setup.problem.grid.size(),
				s.qvi.policy.iterations, s.distance, cert.tol, failed);
		rows.push_back(r);
	}

	const auto opts = acceptance_options(m, req.threads);
	if (m.kind == ModelTemplate::example1) {
		const auto &sol = *s.setup.ex1;
		rows.push_back(check_exponent_identities());
		rows.push_back(check_smooth_fit(sol));
		rows.push_back(check_closed_form_residual(sol));
		rows.push_back(check_qvi_against_closed_form(sol));
		rows.push_back(check_monte_carlo(sol, opts));
		rows.push_back(check_deviations(sol, opts));
		rows.push_back(check_region_partition(sol,
				example2_solve(reference_investor(false))));
		rows.push_back(check_certificates(sol));
	} else if (m.kind == ModelTemplate::investor) {
		const auto &sol = *s.setup.ex2;
		const bool jumps = !sol.params.atoms.empty();
		if (jumps)
			rows.push_back(check_investor_fixed_point(sol));
		else
			rows.push_back(check_investor_closed_form(sol));
		const auto other = example2_solve(reference_investor(!jumps));
		rows.push_back(jumps ? check_q_martingale(other, sol, opts)
				: check_q_martingale(sol, other, opts));
		{
			// Non-zero-sum form: exit package as the second payoff.
			auto g = investor_default_grid(sol, s.setup.problem.grid.n[0],
					s.setup.problem.grid.n[1]);
			const auto problem = investor_problem(sol, g, true);
			const auto nz = solve_nonzero_sum(problem);
			const auto psi1 = investor_closed_form(sol, problem.grid);
			const auto psi2 = investor_auxiliary(sol, problem.grid);
			const double tol = req.tol ? *req.tol
					: verification_tol(m, problem.grid, psi1.sup_norm());
			const auto c = check_nonzero_sum_conditions(nz.phi1, nz.phi2, problem,
					nz.policy.labels, tol);
			double d1 = 0., d2 = 0.;
			for (int i = 0; i < problem.grid.size(); ++i) {
				d1 = std::max(d1, std::abs(nz.phi1.values[i] - psi1.values[i]));
				d2 = std::max(d2, std::abs(nz.phi2.values[i] - psi2.values[i]));
			}
			d1 /= psi1.sup_norm();
			d2 /= psi2.sup_norm();
			CriterionResult r;
			r.title = "non-zero-sum best response";
			r.pass = c.ok() && d1 < 5e-3 && d2 < 5e-3;
			r.detail = fmt::format("rounds={} distance_1={:.3e} distance_2={:.3e} "
					"(max 5e-3) certificate={}", nz.rounds, d1, d2,
					c.ok() ? "pass" : "fail");
			rows.push_back(r);
		}
		{
			const Vec y0 = investor_start(m);
			const auto e = check_investor_simulation(sol, opts, y0);
			CriterionResult r;
			r.title = "investor Monte Carlo consistency";
			r.pass = e.pass;
			r.detail = fmt::format("y0=({} {} {}) value={:.6f} mean={:.6f} "
					"stderr={:.2e} bias={:.2e} interventions={:.3f} paths={}", y0[0],
					y0[1], y0[2], e.value, e.mean, e.stderr_, e.bias,
					e.mean_interventions, opts.paths);
			rows.push_back(r);
		}
	}

	CsvWriter csv(run.path("reproduce.csv"), {"id", "title", "verdict",
			"detail"});
	bool ok = true;
	for (const auto &r : rows) {
		csv.row(std::vector<std::string>{r.id > 0 ? std::to_string(r.id) : "-",
				r.title, r.pass ? "PASS" : "FAIL", csv_safe(r.detail)});
		out << format_criterion(r) << "\n";
		ok = ok && r.pass;
	}
	run.record("reproduce.csv");
	const int code = ok ? exit_ok : exit_verification_failure;
	out << (ok ? "all rows pass\n" : "some rows fail\n");
	run.finish(code);
	return code;
}

} // namespace

std::string reference_config(const std::string &example) {
	const char *env = std::getenv("IMPULSE_STOPPER_CONFIG_DIR");
	const fs::path dir = env && *env ? fs::path(env) : fs::path(IMPSTOP_CONFIG_DIR);
	std::string file;
	if (example == "example1")
		file = "example1.cfg";
	else if (example == "investor-nojump")
		file = "investor_nojump.cfg";
	else if (example == "investor-jump")
		file = "investor_jump.cfg";
	else
		return "";
	return (dir / file).string();
}

void configure_logging() {
	auto logger = spdlog::get("impulse-stopper");
	if (!logger)
		logger = spdlog::stderr_color_mt("impulse-stopper");
	spdlog::set_default_logger(logger);
	const char *env = std::getenv("IMPULSE_STOPPER_LOG");
	const std::string level = env ? env : "error";
	if (level == "debug")
		spdlog::set_level(spdlog::level::debug);
	else if (level == "info")
		spdlog::set_level(spdlog::level::info);
	else
		spdlog::set_level(spdlog::level::err);
}

int run_command(const CliRequest &request, std::ostream &out,
		std::ostream &err) {
	try {
		if (request.command == "solve")
			return cmd_solve(request, out);
		if (request.command == "verify")
			return cmd_verify(request, out);
		if (request.command == "simulate")
			return cmd_simulate(request, out);
		if (request.command == "reproduce")
			return cmd_reproduce(request, out);
		err << "error: unknown command '" << request.command << "'\n";
		return exit_config_error;
	} catch (const CliExit &e) {
		err << "error: " << e.message << "\n";
		return e.code;
	} catch (const ConfigError &e) {
		err << "config error: " << e.what() << "\n";
		return exit_config_error;
	} catch (const std::exception &e) {
		err << "error: " << e.what() << "\n";
		return exit_verification_failure;
	}
}

} // namespace impstop
