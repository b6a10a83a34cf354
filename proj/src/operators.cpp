#include "impstop/operators.hpp"

#include <algorithm> // std::sort
#include <cmath>     // std::abs, std::exp, std::sqrt
#include <limits>    // std::numeric_limits
#include <string>    // std::to_string

namespace impstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void merge_row(std::vector<std::pair<int, double>> &row) {
	std::sort(row.begin(), row.end(),
			[](const auto &a, const auto &b) { return a.first < b.first; });
	std::vector<std::pair<int, double>> merged;
	for (const auto &entry : row) {
		if (!merged.empty() && merged.back().first == entry.first)
			merged.back().second += entry.second;
		else
			merged.push_back(entry);
	}
	row.swap(merged);
}

} // namespace

double GeneratorStencil::apply_row(int i, const std::vector<double> &phi) const {
	double v = 0.;
	for (const auto &[k, w] : rows[i])
		v += w * phi[k];
	return v;
}

GeneratorStencil build_generator(const GameSpec &spec, const Grid &grid,
		double s, const GeneratorOptions &options) {
	const auto &diffusion = spec.diffusion;
	if (diffusion.dimension != grid.dim)
		throw GridError("grid dimension does not match the state dimension");

	GeneratorStencil stencil;
	stencil.grid = grid;
	const int n = grid.size();
	stencil.rows.resize(n);
	stencil.upwinded.assign(n, 0);
	stencil.boundary.assign(n, 0);

	double worst_suggested_h = kInf;
	for (int i = 0; i < n; ++i) {
		const Vec x = grid.point(i);
		const auto m = grid.multi(i);
		Vec mu = diffusion.drift(s, x);
		const auto sigma = diffusion.volatility(s, x);
		std::vector<Vec> jumps;
		for (const auto &atom : diffusion.levy_measure) {
			Vec g = diffusion.jump_amplitude(x, atom.mark);
			for (int d = 0; d < grid.dim; ++d)
				mu[d] -= atom.intensity * g[d];
			jumps.push_back(std::move(g));
		}
		// Covariance a = sigma sigma^T.
		double a[2][2] = {{0., 0.}, {0., 0.}};
		for (int d = 0; d < grid.dim; ++d)
			for (int e = 0; e < grid.dim; ++e)
				for (std::size_t k = 0; k < sigma[d].size(); ++k)
					a[d][e] += sigma[d][k] * sigma[e][k];

		bool need_lo[2] = {false, false}, need_hi[2] = {false, false};
		bool upwind[2] = {false, false};
		for (int d = 0; d < grid.dim; ++d) {
			const double D = 0.5 * a[d][d];
			const double h = grid.h(d);
			if (D > 0.) {
				need_lo[d] = need_hi[d] = true;
				if (std::abs(mu[d]) * h / D > options.peclet_threshold) {
					if (!options.allow_upwind)
						worst_suggested_h = std::min(worst_suggested_h,
								options.peclet_threshold * D / std::abs(mu[d]));
					upwind[d] = true;
				}
			} else if (mu[d] != 0.) {
				upwind[d] = true;
				(mu[d] > 0. ? need_hi[d] : need_lo[d]) = true;
				if (!options.allow_upwind)
					worst_suggested_h = 0.;
			}
		}
		if (grid.dim == 2 && a[0][1] != 0.)
			need_lo[0] = need_hi[0] = need_lo[1] = need_hi[1] = true;

		bool is_boundary = false;
		for (int d = 0; d < grid.dim; ++d)
			if ((need_lo[d] && m[d] == 0) || (need_hi[d] && m[d] == grid.n[d] - 1))
				is_boundary = true;
		if (is_boundary) {
			stencil.boundary[i] = 1;
			continue;
		}

		auto &row = stencil.rows[i];
		auto neighbor = [&](int d, int offset) {
			auto mm = m;
			mm[d] += offset;
			return grid.index(mm[0], mm[1]);
		};
		for (int d = 0; d < grid.dim; ++d) {
			const double h = grid.h(d);
			const double D = 0.5 * a[d][d];
			if (D > 0.) {
				row.emplace_back(neighbor(d, 1), D / (h * h));
				row.emplace_back(neighbor(d, -1), D / (h * h));
				row.emplace_back(i, -2. * D / (h * h));
			}
			if (mu[d] == 0.)
				continue;
			if (upwind[d]) {
				stencil.upwinded[i] = 1;
				if (mu[d] > 0.) {
					row.emplace_back(neighbor(d, 1), mu[d] / h);
					row.emplace_back(i, -mu[d] / h);
				} else {
					row.emplace_back(neighbor(d, -1), -mu[d] / h);
					row.emplace_back(i, mu[d] / h);
				}
			} else {
				row.emplace_back(neighbor(d, 1), mu[d] / (2. * h));
				row.emplace_back(neighbor(d, -1), -mu[d] / (2. * h));
			}
		}
		if (grid.dim == 2 && a[0][1] != 0.) {
			const double w = a[0][1] / (4. * grid.h(0) * grid.h(1));
			row.emplace_back(grid.index(m[0] + 1, m[1] + 1), w);
			row.emplace_back(grid.index(m[0] - 1, m[1] - 1), w);
			row.emplace_back(grid.index(m[0] + 1, m[1] - 1), -w);
			row.emplace_back(grid.index(m[0] - 1, m[1] + 1), -w);
		}
		for (std::size_t j = 0; j < jumps.size(); ++j) {
			const double nu = diffusion.levy_measure[j].intensity;
			if (nu == 0.)
				continue;
			Vec dest = x;
			for (int d = 0; d < grid.dim; ++d)
				dest[d] += jumps[j][d];
			for (const auto &[k, w] : grid.weights(dest))
				row.emplace_back(k, nu * w);
			row.emplace_back(i, -nu);
		}
		merge_row(row);
	}
	if (worst_suggested_h < kInf)
		throw GridError("cell Peclet number exceeds "
				+ std::to_string(options.peclet_threshold)
				+ " and upwinding is disabled; refine to h <= "
				+ std::to_string(worst_suggested_h));
	return stencil;
}

GridFunction apply_generator(const GameSpec &spec, const GridFunction &phi,
		double s, const GeneratorOptions &options) {
	const auto stencil = build_generator(spec, phi.grid, s, options);
	GridFunction out(phi.grid);
	for (int i = 0; i < phi.grid.size(); ++i)
		out.values[i] = stencil.boundary[i]
				? std::numeric_limits<double>::quiet_NaN()
				: stencil.apply_row(i, phi.values);
	return out;
}

////////////////////////////////////////////////////////////////////////////////

double golden_section_max(const std::function<double(double)> &g, double a,
		double b, double tol, int max_iter) {
	const double r = 0.5 * (std::sqrt(5.) - 1.);
	double c = b - r * (b - a), d = a + r * (b - a);
	double gc = g(c), gd = g(d);
	for (int it = 0; it < max_iter && b - a > tol * (1. + std::abs(a) + std::abs(b));
			++it) {
		if (gc >= gd) {
			b = d;
			d = c;
			gd = gc;
			c = b - r * (b - a);
			gc = g(c);
		} else {
			a = c;
			c = d;
			gc = gd;
			d = a + r * (b - a);
			gd = g(d);
		}
	}
	return gc >= gd ? c : d;
}

double impulse_value(const GameSpec &spec, const GridFunction &phi,
		const Vec &x, double z, double s, Sense sense, std::size_t player) {
	const auto &payoff = spec.payoffs.at(player);
	double cash;
	if (payoff.impulse_cashflow)
		cash = payoff.impulse_cashflow(x, z);
	else {
		const double c = spec.intervention.cost ? spec.intervention.cost(0., z)
				: 0.;
		cash = sense == Sense::minimize ? c : -c;
	}
	return phi(spec.intervention.response(x, z))
			+ std::exp(-payoff.discount * s) * cash;
}

ImpulseResult intervention_operator(const GameSpec &spec,
		const GridFunction &phi, double s, Sense sense, std::size_t player,
		const ImpulseOptions &options) {
	const Grid &grid = phi.grid;
	const int n = grid.size();
	const double worst = sense == Sense::maximize ? -kInf : kInf;
	ImpulseResult out{std::vector<double>(n, worst), std::vector<double>(n, 0.),
			std::vector<std::uint8_t>(n, 0)};
	const auto &iv = spec.intervention;
	if (!iv.enabled)
		return out;

	const int nz = iv.z_hi > iv.z_lo ? std::max(options.n_z, 2) : 1;
	const double dz = nz > 1 ? (iv.z_hi - iv.z_lo) / (nz - 1) : 0.;
	const double sign = sense == Sense::maximize ? 1. : -1.;
	std::vector<double> score(nz);
	std::vector<std::uint8_t> ok(nz);

	for (int i = 0; i < n; ++i) {
		const Vec x = grid.point(i);
		int best = -1;
		for (int k = 0; k < nz; ++k) {
			const double z = iv.z_lo + k * dz;
			ok[k] = grid.inside(iv.response(x, z), 1e-12);
			if (!ok[k])
				continue;
			score[k] = sign * impulse_value(spec, phi, x, z, s, sense, player);
			if (best < 0 || score[k] > score[best])
				best = k;
		}
		if (best < 0)
			continue;
		double z_best = iv.z_lo + best * dz;
		double s_best = score[best];
		if (nz > 1) {
			const double a = best > 0 && ok[best - 1] ? z_best - dz : z_best;
			const double b = best < nz - 1 && ok[best + 1] ? z_best + dz : z_best;
			if (b > a) {
				auto objective = [&](double z) {
					return sign * impulse_value(spec, phi, x, z, s, sense, player);
				};
				const double z_ref = golden_section_max(objective, a, b,
						options.golden_tol, options.golden_max_iter);
				const double s_ref = objective(z_ref);
				if (s_ref > s_best) {
					s_best = s_ref;
					z_best = z_ref;
				}
			}
		}
		out.value[i] = sign * s_best;
		out.z[i] = z_best;
		out.feasible[i] = 1;
	}
	return out;
}

std::vector<Violation> intervention_inequality_check(const GridFunction &phi,
		const std::vector<double> &m_phi, Sense sense, double tol) {
	std::vector<Violation> out;
	for (int i = 0; i < phi.grid.size(); ++i) {
		const double gap = sense == Sense::minimize ? phi.values[i] - m_phi[i]
				: m_phi[i] - phi.values[i];
		if (gap > tol)
			out.push_back({i, phi.grid.point(i), gap});
	}
	return out;
}

} // namespace impstop
