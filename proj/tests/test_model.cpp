#include "doctest.h"

#include <cmath>
#include <limits>

#include "impstop/model.hpp"
#include "impstop/templates.hpp"

using namespace impstop;

TEST_CASE("senses parse from short and long names") {
	CHECK(parse_sense("min") == Sense::minimize);
	CHECK(parse_sense("maximize") == Sense::maximize);
	CHECK_THROWS_AS(parse_sense("sideways"), SpecError);
	CHECK(std::string(to_string(Sense::minimize)) == "minimize");
}

TEST_CASE("the example game satisfies the standing assumptions") {
	const auto report = validate_spec(example1_game(Example1Params{}));
	CHECK_MESSAGE(report.ok(), report.to_text());
}

TEST_CASE("a cost below its floor is reported") {
	auto game = example1_game(Example1Params{});
	game.intervention.cost = [](double, double z) { return 0.01 * z; };
	game.intervention.cost_floor = 1.;
	CHECK_FALSE(validate_spec(game).ok());
}

TEST_CASE("non-finite coefficients are a hard error") {
	auto game = example1_game(Example1Params{});
	game.diffusion.drift = [](double, const Vec &) {
		return Vec{std::numeric_limits<double>::quiet_NaN()};
	};
	CHECK_THROWS_AS(validate_spec(game), SpecError);
}

TEST_CASE("bequest and running payoffs are discounted") {
	const auto game = stopping_game(StoppingParams{});
	const auto &pay = game.payoffs.front();
	CHECK(pay.G(0., {2.}) == doctest::Approx(2.));
	CHECK(pay.G(1., {2.}) == doctest::Approx(2. * std::exp(-0.1)));
	CHECK(pay.f(0., {2.}) == doctest::Approx(1.));
}

TEST_CASE("config documents: sections, comments and lists") {
	const auto c = Config::parse(
			"; comment\n[grid]\nnodes = 12\n[simulation]\nstarts = 0.5, 1.5\n");
	CHECK(c.has("grid", "nodes"));
	CHECK(c.get_int("grid", "nodes", 0) == 12);
	CHECK(c.get_double("grid", "lo", 0.25) == 0.25);
	const auto starts = c.get_list("simulation", "starts");
	REQUIRE(starts.size() == 2);
	CHECK(starts[1] == 1.5);
}

TEST_CASE("config errors name the offending field") {
	auto field_of = [](const std::string &text) {
		try {
			load_model_config(Config::parse(text));
		} catch (const ConfigError &e) {
			return e.field;
		}
		return std::string();
	};
	CHECK(field_of("[model]\ntemplate = other\n") == "model.template");
	CHECK(field_of("[model]\ntemplate = example1\n[diffusion]\nbeta = -1\n")
			== "diffusion.beta");
	CHECK(field_of("[model]\ntemplate = investor\n[diffusion]\njump_gamma = 0.2\n")
			== "diffusion.jump_intensity");
	CHECK(field_of("[model]\ntemplate = stopping\n") == "grid.hi");
	CHECK(field_of("[model]\ntemplate = example1\n[grid]\nnodes = 3\n")
			== "grid.nodes");
}

TEST_CASE("shipped configs load") {
	for (const char *name : {"example1.cfg", "investor_nojump.cfg",
			"investor_jump.cfg", "stopping.cfg"}) {
		CAPTURE(name);
		const auto m = load_model_config(Config::load(
				std::string(IMPSTOP_SOURCE_DIR "/configs/") + name));
		CHECK(m.sim.seed == 42);
	}
}
