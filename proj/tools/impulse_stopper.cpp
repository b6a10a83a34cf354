// impulse-stopper: solve, simulate, verify and reproduce impulse-control /
// stopping games from a config document.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "impstop/cli.hpp"

int main(int argc, char **argv) {
	impstop::CliRequest req;
	for (int i = 0; i < argc; ++i)
		req.argv.emplace_back(argv[i]);

	CLI::App app{"Impulse control and stopping games on jump-diffusions"};
	app.require_subcommand(1);

	std::uint64_t seed = 0;
	long long paths = 0;
	double dt = 0., tol = 0.;
	int grid = 0;
	auto common = [&](CLI::App *cmd, bool needs_config) {
		auto *c = cmd->add_option("--config", req.config, "Config document");
		if (needs_config)
			c->required();
		cmd->add_option("--out", req.out, "Output directory")
				->capture_default_str();
		cmd->add_option("--seed", seed, "Random seed (overrides the config)");
		cmd->add_option("--paths", paths, "Monte Carlo paths");
		cmd->add_option("--dt", dt, "Simulation time step");
		cmd->add_option("--grid", grid, "Lattice node count");
		cmd->add_option("--tol", tol, "Verification tolerance (absolute)");
		cmd->add_option("--threads", req.threads, "Worker threads")
				->capture_default_str();
	};

	auto *solve = app.add_subcommand("solve", "Closed form and QVI solution");
	common(solve, true);
	solve->add_flag("--grid-only", req.grid_only, "Skip the closed form");

	auto *simulate = app.add_subcommand("simulate",
			"Monte Carlo payoffs under the equilibrium policy");
	common(simulate, true);
	simulate->add_flag("--deviations", req.deviations,
			"Also run the unilateral deviation test");
	simulate->add_option("--policy", req.policy_file,
			"Constants file with the policy thresholds");

	auto *verify = app.add_subcommand("verify",
			"Check the verification conditions on a value table");
	common(verify, true);
	verify->add_option("--value", req.value_file,
			"Value CSV (default: OUT/value.csv)");

	auto *reproduce = app.add_subcommand("reproduce",
			"Full pipeline on a shipped reference config");
	common(reproduce, false);
	reproduce->add_option("example", req.example,
					"example1, investor-nojump or investor-jump")
			->required()
			->check(CLI::IsMember({"example1", "investor-nojump", "investor-jump"}));
	reproduce->add_flag("--grid-only", req.grid_only, "Skip the closed form");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : impstop::exit_config_error;
	}

	for (auto *cmd : {solve, simulate, verify, reproduce}) {
		if (!cmd->parsed())
			continue;
		req.command = cmd->get_name();
		if (cmd->count("--seed"))
			req.seed = seed;
		if (cmd->count("--paths"))
			req.paths = paths;
		if (cmd->count("--dt"))
			req.dt = dt;
		if (cmd->count("--grid"))
			req.grid = grid;
		if (cmd->count("--tol"))
			req.tol = tol;
	}

	impstop::configure_logging();
	return impstop::run_command(req, std::cout, std::cerr);
}
