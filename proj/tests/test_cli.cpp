#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "impstop/cli.hpp"
#include "impstop/io.hpp"
#include "impstop/templates.hpp"

using namespace impstop;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = IMPSTOP_CONFIG_DIR;
const fs::path kRoot = "cli_test_out";

CliRequest request(const std::string &command, const std::string &config,
		const std::string &out) {
	CliRequest r;
	r.command = command;
	r.config = config.empty() ? "" : kConfigs + "/" + config;
	r.out = (kRoot / out).string();
	return r;
}

int run(const CliRequest &r, std::string *stdout_text = nullptr) {
	std::ostringstream out, err;
	const int code = run_command(r, out, err);
	if (stdout_text)
		*stdout_text = out.str();
	return code;
}

struct Fresh {
	Fresh() {
		fs::remove_all(kRoot);
		fs::create_directories(kRoot);
	}
};

} // namespace

TEST_CASE_FIXTURE(Fresh, "solve output equals the library pipeline") {
	auto r = request("solve", "example1.cfg", "solve");
	r.grid = 800;
	REQUIRE(run(r) == exit_ok);
	for (const char *f : {"constants.txt", "closedform.csv", "value.csv",
			"regions.csv", "residuals.csv", "manifest.json"})
		CHECK(fs::exists(kRoot / "solve" / f));

	const auto m = load_model_config(Config::load(kConfigs + "/example1.cfg"));
	const auto setup = build_model(m, true, 800);
	const auto qs = solve_qvi(setup.problem);
	const auto direct = (kRoot / "direct.csv").string();
	write_value_csv(direct, qs.value, qs.policy.labels);
	CHECK(read_text(direct) == read_text((kRoot / "solve" / "value.csv").string()));

	auto v = request("verify", "example1.cfg", "solve");
	v.grid = 800;
	CHECK(run(v) == exit_ok);
	CHECK(fs::exists(kRoot / "solve" / "certificate.txt"));

	// The recorded thresholds drive the simulator.
	auto s = request("simulate", "example1.cfg", "sim_policy");
	s.paths = 100;
	s.policy_file = (kRoot / "solve" / "constants.txt").string();
	CHECK(run(s) == exit_ok);
}

TEST_CASE_FIXTURE(Fresh, "grid-only solve skips the closed form") {
	auto r = request("solve", "example1.cfg", "grid_only");
	r.grid = 400;
	r.grid_only = true;
	REQUIRE(run(r) == exit_ok);
	CHECK_FALSE(fs::exists(kRoot / "grid_only" / "closedform.csv"));
	CHECK(fs::exists(kRoot / "grid_only" / "value.csv"));
}

TEST_CASE_FIXTURE(Fresh, "exit codes") {
	CHECK(run(request("solve", "missing.cfg", "a")) == exit_missing_input);

	write_text((kRoot / "bad.cfg").string(),
			"[model]\ntemplate = example1\n[payoff]\ndelta = -1\n");
	auto bad = request("solve", "", "bad");
	bad.config = (kRoot / "bad.cfg").string();
	CHECK(run(bad) == exit_config_error);
	CHECK_FALSE(fs::exists(kRoot / "bad"));

	auto s = request("solve", "example1.cfg", "small");
	s.grid = 100;
	REQUIRE(run(s) == exit_ok);
	auto mismatch = request("verify", "example1.cfg", "small");
	mismatch.grid = 101;
	CHECK(run(mismatch) == exit_shape_mismatch);
	auto missing = request("verify", "example1.cfg", "small");
	missing.value_file = (kRoot / "none.csv").string();
	CHECK(run(missing) == exit_missing_input);

	CHECK(run(request("simulate", "stopping.cfg", "b")) == exit_config_error);
	auto policy = request("simulate", "example1.cfg", "c");
	policy.policy_file = "no_such_policy.txt";
	CHECK(run(policy) == exit_missing_input);
}

TEST_CASE_FIXTURE(Fresh, "perturbed value fails verification") {
	auto s = request("solve", "example1.cfg", "p");
	s.grid = 2000;
	REQUIRE(run(s) == exit_ok);
	const auto m = load_model_config(Config::load(kConfigs + "/example1.cfg"));
	const auto setup = build_model(m, true, 2000);
	auto bad = setup.closed_form;
	for (int i = 0; i < setup.problem.grid.size(); ++i) {
		const double x = setup.problem.grid.point(i)[0];
		if (x > setup.ex1->x_hat && x < setup.ex1->x_tilde)
			bad.values[i] += 0.1 * m.ex1.kappa1;
	}
	const auto file = (kRoot / "bad_value.csv").string();
	write_value_csv(file, bad, setup.analytic);
	auto v = request("verify", "example1.cfg", "p_verify");
	v.grid = 2000;
	v.value_file = file;
	std::string report;
	CHECK(run(v, &report) == exit_verification_failure);
	CHECK(report.find("(iv)      FAIL") != std::string::npos);
}

TEST_CASE_FIXTURE(Fresh, "stop-everywhere model verifies its obstacle") {
	const auto m = load_model_config(Config::load(kConfigs + "/stopping.cfg"));
	const auto setup = build_model(m, false);
	const auto G = GridFunction::sample(setup.problem.grid, [](const Vec &x) {
		return x[0];
	});
	const auto file = (kRoot / "g.csv").string();
	write_value_csv(file, G, {});
	auto v = request("verify", "stopping.cfg", "g");
	v.value_file = file;
	CHECK(run(v) == exit_ok);
}

TEST_CASE_FIXTURE(Fresh, "seeded simulations are byte-identical") {
	for (const char *dir : {"s1", "s2"}) {
		auto r = request("simulate", "example1.cfg", dir);
		r.seed = 42;
		r.paths = 200;
		r.deviations = true;
		REQUIRE(run(r) == exit_ok);
	}
	for (const char *f : {"summary.csv", "paths.csv", "deviations.csv"}) {
		CAPTURE(f);
		CHECK(read_text((kRoot / "s1" / f).string())
				== read_text((kRoot / "s2" / f).string()));
	}
	auto other = request("simulate", "example1.cfg", "s3");
	other.seed = 7;
	other.paths = 200;
	REQUIRE(run(other) == exit_ok);
	CHECK(read_text((kRoot / "s1" / "summary.csv").string())
			!= read_text((kRoot / "s3" / "summary.csv").string()));
}

TEST_CASE("reference configs resolve by example id") {
	CHECK(reference_config("example1").find("example1.cfg") != std::string::npos);
	CHECK(reference_config("investor-jump").find("investor_jump.cfg")
			!= std::string::npos);
	CHECK(reference_config("other").empty());
}
