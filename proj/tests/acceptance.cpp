// Acceptance criteria: one PASS/FAIL line per criterion. Tolerances are
// fixed inside each check (src/acceptance.cpp).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "impstop/acceptance.hpp"
#include "impstop/io.hpp"

using namespace impstop;
namespace fs = std::filesystem;

namespace {

/// 12: two seeded runs of the reproduce pipeline give byte-identical CSVs.
CriterionResult check_determinism() {
	CriterionResult r;
	r.id = 12;
	r.title = "determinism";
	const fs::path root = "acceptance_determinism";
	fs::remove_all(root);
	int codes[2];
	for (int run = 0; run < 2; ++run) {
		const auto dir = root / ("run" + std::to_string(run));
		const std::string cmd = std::string("\"") + IMPULSE_STOPPER_EXE
				+ "\" reproduce example1 --seed 42 --paths 2000 --out \""
				+ dir.string() + "\" > \"" + (root / "log.txt").string() + "\" 2>&1";
		fs::create_directories(root);
		codes[run] = std::system(cmd.c_str());
	}
	int files = 0, differing = 0;
	for (const auto &entry : fs::directory_iterator(root / "run0")) {
		if (entry.path().extension() != ".csv")
			continue;
		++files;
		const auto twin = root / "run1" / entry.path().filename();
		differing += !fs::exists(twin)
				|| read_text(entry.path().string()) != read_text(twin.string());
	}
	r.pass = codes[0] == 0 && codes[1] == 0 && files >= 5 && differing == 0;
	r.detail = "command=reproduce example1 --seed 42 --paths 2000 csv_files="
			+ std::to_string(files) + " differing=" + std::to_string(differing)
			+ " exit_codes=" + std::to_string(codes[0]) + "/"
			+ std::to_string(codes[1]);
	return r;
}

} // namespace

int main() {
	const AcceptanceOptions options;
	const auto ex1 = example1_solve(reference_example1());
	const auto investor = example2_solve(reference_investor(false));
	const auto investor_jumps = example2_solve(reference_investor(true));

	int failed = 0;
	auto report = [&](const CriterionResult &r) {
		std::cout << format_criterion(r) << std::endl;
		failed += !r.pass;
	};
	report(check_exponent_identities());
	report(check_smooth_fit(ex1));
	report(check_closed_form_residual(ex1));
	report(check_qvi_against_closed_form(ex1));
	report(check_monte_carlo(ex1, options));
	report(check_deviations(ex1, options));
	report(check_investor_closed_form(investor));
	report(check_investor_fixed_point(investor_jumps));
	report(check_q_martingale(investor, investor_jumps, options));
	report(check_region_partition(ex1, investor));
	report(check_certificates(ex1));
	report(check_determinism());
	std::cout << (12 - failed) << " of 12 criteria pass" << std::endl;
	return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
