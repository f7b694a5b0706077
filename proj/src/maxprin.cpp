#include "plap/maxprin.hpp"

#include "plap/error.hpp"
#include "plap/pcore.hpp"
#include "plap/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace plap {

Verdict positivity_verdict(const Mesh& mesh, const NodalField& u, double tol) {
    const auto v = u.interior_values(mesh);
    if (std::all_of(v.begin(), v.end(), [tol](double x) { return std::abs(x) <= tol; })) {
        return Verdict::Zero;
    }
    if (std::all_of(v.begin(), v.end(), [tol](double x) { return x > tol; })) return Verdict::Positive;
    if (std::all_of(v.begin(), v.end(), [tol](double x) { return x < -tol; })) return Verdict::Negative;
    return Verdict::SignChanging;
}

double default_positivity_tolerance(const NodalField& u) { return 1e-10 * u.max_abs(); }

std::vector<double> default_lambda_grid(double lambda_minus, double lambda_plus, int points) {
    if (points < 2) throw PreconditionError("lambda grid needs at least two points");
    if (!(lambda_minus < lambda_plus)) throw PreconditionError("lambda grid needs lambda_minus < lambda_plus");
    const double width = lambda_plus - lambda_minus;
    const double lo = lambda_minus - 0.5 * width;
    const double hi = lambda_plus + 0.5 * width;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = (i == points - 1) ? hi : lo + (hi - lo) * i / (points - 1);
    }
    return grid;
}

std::vector<SweepRow> max_principle_sweep(const Mesh& mesh, const NodalField& m, double p,
                                          const NodalField& h, const std::vector<double>& lambda_grid,
                                          const SolverConfig& cfg) {
    require_exponent(p);
    require_same_mesh(mesh, m, "max_principle_sweep (weight)");
    require_same_mesh(mesh, h, "max_principle_sweep (load)");
    const auto hin = h.interior_values(mesh);
    const bool nonneg = std::all_of(hin.begin(), hin.end(), [](double x) { return x >= 0.0; });
    const bool nonpos = std::all_of(hin.begin(), hin.end(), [](double x) { return x <= 0.0; });
    const bool nonzero = std::any_of(hin.begin(), hin.end(), [](double x) { return x != 0.0; });
    if (!(nonneg || nonpos) || !nonzero) {
        throw PreconditionError("invalid load: h must be one-signed and not identically zero");
    }

    std::vector<SweepRow> rows(lambda_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            const double lam = lambda_grid[i];
            const SolveReport rep = solve_weighted_problem(mesh, m, p, lam, h, cfg);
            SweepRow row;
            row.lambda = lam;
            row.solver_converged = rep.converged;
            row.min_interior = rep.u.min_interior(mesh);
            row.max_interior = rep.u.max_interior(mesh);
            row.verdict = rep.converged ? positivity_verdict(mesh, rep.u, default_positivity_tolerance(rep.u))
                                        : Verdict::Diverged;
            rows[i] = row;
        }
    };
    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(rows.size(), 1));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

SignBlock find_sign_block(const std::vector<SweepRow>& rows, Verdict target) {
    SignBlock block;
    int blocks = 0;
    bool inside = false;
    for (const SweepRow& r : rows) {
        const bool hit = r.verdict == target;
        if (hit) {
            if (!inside) ++blocks;
            if (!block.left_edge) block.left_edge = r.lambda;
            block.right_edge = r.lambda;
            ++block.count;
        }
        inside = hit;
    }
    block.contiguous = blocks == 1;
    return block;
}

double grid_spacing(const std::vector<double>& grid) {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) s = std::max(s, std::abs(grid[i] - grid[i - 1]));
    return s;
}

namespace {

struct ElementGap {
    double low = 0.0;
    double high = 0.0;
};

/// Integrand of the Picone gap at one point. Pointwise it equals
/// |∇u|^p − p t^{p−1} G·∇u + (p−1) t^p |∇v|^p with t = u/(v+ε), G = |∇v|^{p−2}∇v.
double picone_integrand(double uq, double vq, const Mesh::Gradient& gu, const Mesh::Gradient& gv,
                        double p) {
    const double gu2 = gu[0] * gu[0] + gu[1] * gu[1];
    const double gv2 = gv[0] * gv[0] + gv[1] * gv[1];
    const double grad_u_p = gu2 > 0.0 ? std::pow(gu2, 0.5 * p) : 0.0;
    if (uq <= 0.0) return grad_u_p;
    const double t = uq / vq;
    const double gv_pm2 = gv2 > 0.0 ? std::pow(gv2, 0.5 * (p - 2.0)) : 0.0;
    const double flux_dot_gu = gv_pm2 * (gv[0] * gu[0] + gv[1] * gu[1]);
    const double gv_p = gv2 > 0.0 ? std::pow(gv2, 0.5 * p) : 0.0;
    const double test_grad_dot_flux = p * std::pow(t, p - 1.0) * flux_dot_gu - (p - 1.0) * std::pow(t, p) * gv_p;
    return grad_u_p - test_grad_dot_flux;
}

std::vector<ElementGap> picone_elements(const Mesh& mesh, const NodalField& u, const NodalField& v,
                                        double p, double eps, bool with_high) {
    require_exponent(p);
    require_same_mesh(mesh, u, "picone_gap (u)");
    require_same_mesh(mesh, v, "picone_gap (v)");
    if (!(eps > 0.0)) throw PreconditionError("picone_gap: eps must be positive");
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (u[i] < 0.0 || v[i] < 0.0) throw PreconditionError("picone_gap: u and v must be nonnegative");
    }
    using quadrature::SimplexRule;
    const bool one_d = mesh.dimension() == 1;
    const SimplexRule low = one_d ? quadrature::segment_gauss(4) : quadrature::triangle_six_point();
    const SimplexRule high = one_d ? quadrature::segment_gauss(10) : quadrature::triangle_collapsed_gauss(10);

    std::vector<ElementGap> out(mesh.element_count());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto el = mesh.element(e);
        Mesh::Gradient gu{0.0, 0.0}, gv{0.0, 0.0};
        for (std::size_t k = 0; k < el.size(); ++k) {
            const auto& g = mesh.basis_gradient(e, static_cast<int>(k));
            const auto node = static_cast<std::size_t>(el[k]);
            gu[0] += u[node] * g[0];
            gu[1] += u[node] * g[1];
            gv[0] += v[node] * g[0];
            gv[1] += v[node] * g[1];
        }
        auto integrate = [&](const SimplexRule& rule) {
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                double uq = 0.0, vq = eps;
                for (std::size_t k = 0; k < el.size(); ++k) {
                    const auto node = static_cast<std::size_t>(el[k]);
                    uq += rule.points[q][k] * u[node];
                    vq += rule.points[q][k] * v[node];
                }
                s += rule.weights[q] * picone_integrand(uq, vq, gu, gv, p);
            }
            return s * mesh.element_measures()[e];
        };
        out[e].low = integrate(low);
        if (with_high) out[e].high = integrate(high);
    }
    return out;
}

}  // namespace

double picone_gap(const Mesh& mesh, const NodalField& u, const NodalField& v, double p, double eps) {
    double gap = 0.0;
    for (const ElementGap& g : picone_elements(mesh, u, v, p, eps, false)) gap += g.low;
    return gap;
}

PiconeEstimate picone_gap_with_tolerance(const Mesh& mesh, const NodalField& u, const NodalField& v,
                                         double p, double eps) {
    PiconeEstimate est;
    double scale = 0.0;
    for (const ElementGap& g : picone_elements(mesh, u, v, p, eps, true)) {
        est.gap += g.low;
        est.tolerance += std::abs(g.low - g.high);
        scale += std::abs(g.low);
    }
    est.tolerance += 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
    return est;
}

}  // namespace plap
