#include "doctest.h"

#include <cstdio>
#include <string>

#include "impstop/io.hpp"

using namespace impstop;

TEST_CASE("doubles round-trip at 17 significant digits") {
	for (double x : {0.1, 1. / 3., -2.5e-300, 6.02214076e23}) {
		const auto s = format_double(x);
		CHECK(std::stod(s) == x);
	}
	CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV tables use a header row and LF line endings") {
	const std::string path = "test_io_table.csv";
	{
		CsvWriter csv(path, {"a", "b"});
		REQUIRE(csv.ok());
		csv.row(std::vector<double>{1., 0.25});
		csv.row(std::vector<std::string>{"x", "y"});
	}
	CHECK(read_text(path) == "a,b\n1,0.25\nx,y\n");
	std::remove(path.c_str());
}
