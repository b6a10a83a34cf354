#pragma once

#include <cstdint>  // std::uint64_t
#include <optional> // std::optional
#include <ostream>  // std::ostream
#include <string>   // std::string
#include <vector>   // std::vector

namespace impstop {

enum ExitCode : int {
	exit_ok = 0,
	exit_verification_failure = 1,
	exit_config_error = 2,
	exit_missing_input = 3,
	exit_shape_mismatch = 4,
};

struct CliRequest {
	/// solve, simulate, verify or reproduce.
	std::string command;
	std::string config;
	std::string out = "out";
	/// reproduce: example1, investor-nojump or investor-jump.
	std::string example;
	/// verify: value CSV to check.
	std::string value_file;
	/// simulate: constants file with the policy thresholds.
	std::string policy_file;
	std::optional<std::uint64_t> seed;
	std::optional<long long> paths;
	std::optional<double> dt;
	std::optional<int> grid;
	std::optional<double> tol;
	int threads = 1;
	bool deviations = false;
	bool grid_only = false;
	/// Recorded in the manifest.
	std::vector<std::string> argv;
};

/// Reference config shipped for an example id, or "" when unknown.
std::string reference_config(const std::string &example);

/// Reads IMPULSE_STOPPER_LOG (error, info, debug) and sets the log level.
void configure_logging();

/// Runs one command and returns its exit code. Reports go to `out`,
/// diagnostics to `err`.
int run_command(const CliRequest &request, std::ostream &out,
		std::ostream &err);

} // namespace impstop
