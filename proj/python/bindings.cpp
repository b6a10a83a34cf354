// Python bindings: closed forms, the lattice solver on a config document,
// certificates and the command pipeline.

#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "impstop/cli.hpp"
#include "impstop/closedform.hpp"
#include "impstop/templates.hpp"
#include "impstop/verify.hpp"

namespace py = pybind11;
using namespace impstop;

namespace {

py::dict constants_dict(const Constants &c) {
	py::dict d;
	for (const auto &[name, value] : c)
		d[py::str(name)] = value;
	return d;
}

py::array_t<double> coordinates(const Grid &g) {
	py::array_t<double> out({g.size(), g.dim});
	auto a = out.mutable_unchecked<2>();
	for (int i = 0; i < g.size(); ++i) {
		const Vec x = g.point(i);
		for (int d = 0; d < g.dim; ++d)
			a(i, d) = x[d];
	}
	return out;
}

py::array_t<double> values(const GridFunction &f) {
	return py::array_t<double>(f.values.size(), f.values.data());
}

std::vector<std::string> label_names(const std::vector<Label> &labels) {
	std::vector<std::string> out;
	for (Label l : labels)
		out.emplace_back(to_string(l));
	return out;
}

ModelSetup setup_from(const std::string &config, std::optional<int> grid,
		bool closed_form) {
	return build_model(load_model_config(Config::load(config)), closed_form, grid);
}

} // namespace

PYBIND11_MODULE(_impstop, m) {
	m.doc() = "Impulse control and stopping games on jump-diffusions";

	py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
	py::register_exception<QviError>(m, "QviError", PyExc_RuntimeError);
	py::register_exception<StructuralError>(m, "StructuralError",
			PyExc_RuntimeError);

	py::class_<Example1Params>(m, "Example1Params")
			.def(py::init<>())
			.def_readwrite("alpha", &Example1Params::alpha)
			.def_readwrite("beta", &Example1Params::beta)
			.def_readwrite("delta", &Example1Params::delta)
			.def_readwrite("kappa1", &Example1Params::kappa1)
			.def_readwrite("kappa2", &Example1Params::kappa2)
			.def_readwrite("lam", &Example1Params::lambda)
			.def_readwrite("T", &Example1Params::T);

	py::class_<JumpAtom>(m, "JumpAtom")
			.def(py::init([](double gamma, double intensity) {
				return JumpAtom{gamma, intensity};
			}), py::arg("gamma"), py::arg("intensity"))
			.def_readwrite("gamma", &JumpAtom::gamma)
			.def_readwrite("intensity", &JumpAtom::intensity);

	py::class_<Example2Params>(m, "Example2Params")
			.def(py::init<>())
			.def_readwrite("e", &Example2Params::e)
			.def_readwrite("r", &Example2Params::r)
			.def_readwrite("sigma_f", &Example2Params::sigma_f)
			.def_readwrite("atoms", &Example2Params::atoms)
			.def_readwrite("sigma_I", &Example2Params::sigma_I)
			.def_readwrite("pi", &Example2Params::pi)
			.def_readwrite("gamma_drift", &Example2Params::gamma_drift)
			.def_readwrite("delta", &Example2Params::delta)
			.def_readwrite("kappa_I", &Example2Params::kappa_I)
			.def_readwrite("alpha_I", &Example2Params::alpha_I)
			.def_readwrite("g1", &Example2Params::g1)
			.def_readwrite("g2", &Example2Params::g2)
			.def_readwrite("lambda_T", &Example2Params::lambda_T)
			.def_readwrite("T", &Example2Params::T);

	m.def("example1_exponents", &example1_exponents, py::arg("alpha"),
			py::arg("beta"), py::arg("delta"));
	m.def("example1_constants", [](const Example1Params &p) {
		return constants_dict(to_constants(example1_solve(p)));
	}, py::arg("params") = Example1Params{},
			"Free boundaries and coefficients of the GBM game.");
	m.def("example1_value", [](const Example1Params &p,
			const std::vector<double> &x) {
		const auto sol = example1_solve(p);
		std::vector<double> out;
		for (double xi : x)
			out.push_back(example1_value(sol, 0., xi));
		return out;
	}, py::arg("params"), py::arg("x"), "Closed-form value at each x.");
	m.def("investor_constants", [](const Example2Params &p) {
		return constants_dict(to_constants(example2_solve(p)));
	}, py::arg("params") = Example2Params{},
			"Exponent, exit level and injection band of the investor problem.");

	m.def("solve", [](const std::string &config, std::optional<int> grid,
			bool grid_only) {
		const auto m = load_model_config(Config::load(config));
		const auto s = build_model(m, !grid_only
				&& m.kind != ModelTemplate::stopping, grid);
		QviSolution q;
		{
			py::gil_scoped_release release;
			q = solve_qvi(s.problem);
		}
		py::dict out;
		out["x"] = coordinates(s.problem.grid);
		out["value"] = values(q.value);
		out["labels"] = label_names(q.policy.labels);
		out["iterations"] = q.policy.iterations;
		if (!s.closed_form.values.empty())
			out["closed_form"] = values(s.closed_form);
		return out;
	}, py::arg("config"), py::arg("grid") = py::none(),
			py::arg("grid_only") = false,
			"Policy-iteration solution of the configured model.");

	m.def("classify", [](const std::string &config,
			const std::vector<double> &value, std::optional<int> grid) {
		const auto s = setup_from(config, grid, false);
		if (static_cast<int>(value.size()) != s.problem.grid.size())
			throw py::value_error("value does not match the grid");
		GridFunction phi(s.problem.grid);
		phi.values = value;
		const auto regions = classify_regions(phi, s.problem,
				classify_options(s.config, s.problem.grid));
		std::vector<std::string> out;
		for (Region r : regions.labels)
			out.emplace_back(to_string(r));
		return out;
	}, py::arg("config"), py::arg("value"), py::arg("grid") = py::none(),
			"Region label per node: I1 (impulse), I2 (stop), I3 (continue) or boundary.");

	m.def("certify", [](const std::string &config,
			const std::vector<double> &value, std::optional<int> grid,
			std::optional<double> tol) {
		const auto s = setup_from(config, grid, false);
		if (static_cast<int>(value.size()) != s.problem.grid.size())
			throw py::value_error("value does not match the grid");
		GridFunction phi(s.problem.grid);
		phi.values = value;
		const auto regions = classify_regions(phi, s.problem,
				classify_options(s.config, s.problem.grid));
		const double t = tol ? *tol
				: verification_tol(s.config, s.problem.grid, phi.sup_norm());
		const auto cert = check_zero_sum_conditions(phi, s.problem,
				labels_from_regions(regions), t);
		py::dict conditions;
		for (const auto &c : cert.conditions)
			conditions[py::str(c.id)] = c.pass;
		return py::make_tuple(cert.ok(), conditions, cert.to_text());
	}, py::arg("config"), py::arg("value"), py::arg("grid") = py::none(),
			py::arg("tol") = py::none(),
			"Zero-sum verification conditions: (ok, {id: pass}, report).");

	m.def("run", [](const std::string &command, const std::string &config,
			const std::string &out, const std::string &example,
			const std::string &value_file, const std::string &policy_file,
			std::optional<std::uint64_t> seed, std::optional<long long> paths,
			std::optional<double> dt, std::optional<int> grid,
			std::optional<double> tol, int threads, bool deviations,
			bool grid_only) {
		CliRequest r;
		r.command = command;
		r.config = config;
		r.out = out;
		r.example = example;
		r.value_file = value_file;
		r.policy_file = policy_file;
		r.seed = seed;
		r.paths = paths;
		r.dt = dt;
		r.grid = grid;
		r.tol = tol;
		r.threads = threads;
		r.deviations = deviations;
		r.grid_only = grid_only;
		r.argv = {"impstop.run", command};
		std::ostringstream o, e;
		int code;
		{
			py::gil_scoped_release release;
			code = run_command(r, o, e);
		}
		return py::make_tuple(code, o.str(), e.str());
	}, py::arg("command"), py::arg("config") = "", py::arg("out") = "out",
			py::arg("example") = "", py::arg("value_file") = "",
			py::arg("policy_file") = "", py::arg("seed") = py::none(),
			py::arg("paths") = py::none(), py::arg("dt") = py::none(),
			py::arg("grid") = py::none(), py::arg("tol") = py::none(),
			py::arg("threads") = 1, py::arg("deviations") = false,
			py::arg("grid_only") = false,
			"Run a pipeline command; returns (exit_code, stdout, stderr).");
	m.def("reference_config", &reference_config, py::arg("example"));
}
