#include "plap/cli/commands.hpp"

#include "plap/io.hpp"
#include "plap/maxprin.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>

namespace plap::cli {

using nlohmann::json;

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("PLAP_OUT_DIR"); env && *env) return env;
    return "plap_out";
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const HypothesisError& e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return kHypothesis;
    } catch (const ConvergenceError& e) {
        err << "did not converge: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const NoSolutionFoundError& e) {
        err << "no solution: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << '\n';
        return kPrecondition;
    } catch (const InvalidMeshError& e) {
        err << "precondition: " << e.what() << '\n';
        return kPrecondition;
    } catch (const MeshMismatchError& e) {
        err << "precondition: " << e.what() << '\n';
        return kPrecondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}

NodalField random_nonnegative_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double a[4];
    for (double& c : a) c = coef(rng);
    double x0 = mesh.nodes().front().x;
    double x1 = x0;
    double y1 = 0.0;
    for (const Point& pt : mesh.nodes()) {
        x0 = std::min(x0, pt.x);
        x1 = std::max(x1, pt.x);
        y1 = std::max(y1, pt.y);
    }
    const double pi = std::numbers::pi;
    return sample_field(mesh, [&](const Point& pt) {
        const double t = (pt.x - x0) / (x1 - x0);
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += a[k] * std::sin((k + 1) * pi * t);
        return s * s * (mesh.dimension() == 2 ? std::sin(pi * pt.y / y1) : 1.0);
    }, true);
}

namespace {

std::string_view regime_name(WeightRegime r) {
    switch (r) {
        case WeightRegime::SignChanging: return "sign_changing";
        case WeightRegime::NonNegative: return "nonnegative";
        case WeightRegime::NonPositive: return "nonpositive";
        case WeightRegime::Zero: return "zero";
    }
    return "?";
}

json edge_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

}  // namespace

int cmd_eigen(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const Mesh mesh = cfg.domain.build();
    const NodalField m = cfg.weight.sample(mesh);
    const WeightRegime regime = classify_weight(mesh, m);

    json doc = {{"schema_version", io::kSchemaVersion}, {"p", cfg.p}, {"weight_regime", regime_name(regime)}};
    const EigenPair plus = principal_eigenpair_positive(mesh, m, cfg.p, cfg.eigen);
    doc["lambda_plus"] = io::to_json(plus);
    io::write_atomic(out / "eigenfunction_plus.csv", io::field_csv(mesh, plus.u));
    log << "lambda_plus = " << io::format_double(plus.lambda) << '\n';
    if (regime == WeightRegime::SignChanging) {
        const EigenPair minus = principal_eigenpair_negative(mesh, m, cfg.p, cfg.eigen);
        doc["lambda_minus"] = io::to_json(minus);
        io::write_atomic(out / "eigenfunction_minus.csv", io::field_csv(mesh, minus.u));
        log << "lambda_minus = " << io::format_double(minus.lambda) << '\n';
    } else {
        doc["lambda_1"] = plus.lambda;
    }
    io::write_json(out / "eigen.json", doc);
    return kSuccess;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const Mesh mesh = cfg.domain.build();
    const NodalField m = cfg.weight.sample(mesh);
    const NodalField h = cfg.load.sample(mesh);
    const WeightRegime regime = classify_weight(mesh, m);

    const auto hin = h.interior_values(mesh);
    const bool h_nonneg = std::all_of(hin.begin(), hin.end(), [](double v) { return v >= 0.0; });
    const bool h_nonpos = std::all_of(hin.begin(), hin.end(), [](double v) { return v <= 0.0; });
    if (!h_nonneg && !h_nonpos) throw PreconditionError("load changes sign on interior nodes");
    const Verdict expected = h_nonneg ? Verdict::Positive : Verdict::Negative;

    // An eigenvalue that does not exist for the regime (the weight has no
    // positive or no negative part) is replaced by 0 for the grid and not checked.
    std::optional<double> lambda_minus;
    std::optional<double> lambda_plus;
    if (regime == WeightRegime::Zero) throw PreconditionError("weight vanishes on all interior nodes");
    if (regime != WeightRegime::NonPositive) lambda_plus = principal_eigenpair_positive(mesh, m, cfg.p, cfg.eigen).lambda;
    if (regime != WeightRegime::NonNegative) {
        lambda_minus = principal_eigenpair_negative(mesh, m, cfg.p, cfg.eigen).lambda;
    }

    std::vector<double> grid;
    if (cfg.sweep.lambda_min) {
        const int n = cfg.sweep.points;
        for (int i = 0; i < n; ++i) {
            grid.push_back(*cfg.sweep.lambda_min + (*cfg.sweep.lambda_max - *cfg.sweep.lambda_min) * i / (n - 1));
        }
    } else {
        grid = default_lambda_grid(lambda_minus.value_or(0.0), lambda_plus.value_or(0.0), cfg.sweep.points);
    }
    const auto rows = max_principle_sweep(mesh, m, cfg.p, h, grid, cfg.solver);
    io::write_atomic(out / "sweep.csv", io::sweep_csv(rows));
    io::write_atomic(out / "sign_indicator.dat", io::sign_indicator_dat(rows));

    const SignBlock block = find_sign_block(rows, expected);
    const double spacing = grid_spacing(grid);
    auto tolerance = [&](double lam) { return spacing + 10.0 * cfg.eigen.tolerance * (1.0 + std::abs(lam)); };
    bool consistent = block.contiguous;
    json edges = json::object();
    auto check = [&](const char* name, const std::optional<double>& edge, const std::optional<double>& eig) {
        json e = {{"edge", edge_json(edge)}, {"eigenvalue", edge_json(eig)}};
        if (eig) {
            const double tol = tolerance(*eig);
            const double d = edge ? std::abs(*edge - *eig) : std::numeric_limits<double>::infinity();
            e["discrepancy"] = edge ? json(d) : json();
            e["tolerance"] = tol;
            e["within_tolerance"] = d <= tol;
            consistent = consistent && d <= tol;
        } else {
            e["checked"] = false;
        }
        edges[name] = e;
    };
    check("left", block.left_edge, lambda_minus);
    check("right", block.right_edge, lambda_plus);

    json report = {{"schema_version", io::kSchemaVersion},
                   {"p", cfg.p},
                   {"weight_regime", regime_name(regime)},
                   {"expected_sign", to_string(expected)},
                   {"lambda_minus", edge_json(lambda_minus)},
                   {"lambda_plus", edge_json(lambda_plus)},
                   {"grid_points", grid.size()},
                   {"grid_spacing", spacing},
                   {"block", {{"contiguous", block.contiguous}, {"count", block.count}}},
                   {"edges", edges},
                   {"status", consistent ? "consistent" : "inconsistent"}};
    if (!lambda_minus || !lambda_plus) {
        // One eigenvalue is absent; rows on that side are recorded, not judged.
        json unchecked = json::array();
        for (const SweepRow& r : rows) {
            if ((!lambda_minus && r.lambda < 0.0) || (!lambda_plus && r.lambda > 0.0)) {
                unchecked.push_back({{"lambda", r.lambda}, {"verdict", to_string(r.verdict)}});
            }
        }
        report["unchecked_rows"] = unchecked;
    }
    io::write_json(out / "interval_report.json", report);
    log << "sweep: " << grid.size() << " points, status " << (consistent ? "consistent" : "inconsistent") << '\n';
    return kSuccess;
}

int cmd_branch(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const Mesh mesh = cfg.domain.build();
    const NodalField m = cfg.weight.sample(mesh);
    const Nonlinearity f = cfg.nonlinearity.build(cfg.p);
    const WeightRegime regime = classify_weight(mesh, m);
    if (regime != WeightRegime::NonNegative &&
        !(cfg.continuation.allow_sign_changing_weight && regime == WeightRegime::SignChanging)) {
        throw PreconditionError("branch continuation needs a nonnegative weight, got " +
                                std::string(regime_name(regime)));
    }
    const EigenPair principal = principal_eigenpair_positive(mesh, m, cfg.p, cfg.eigen);
    const double lambda1 = principal.lambda;
    if (!eigenvalue_separates_limits(f, lambda1)) {
        throw HypothesisError("need f0 < lambda1 < finf or f0 > lambda1 > finf; got f0 = " +
                              io::format_double(f.f0()) + ", lambda1 = " + io::format_double(lambda1) +
                              ", finf = " + io::format_double(f.finf()));
    }

    Branch branches[2];
    std::exception_ptr failures[2];
    {
        std::jthread workers[2];
        for (int k = 0; k < 2; ++k) {
            workers[k] = std::jthread([&, k] {
                try {
                    branches[k] = continue_branch(mesh, m, cfg.p, f, k == 0 ? Sigma::Plus : Sigma::Minus,
                                                  cfg.continuation, principal);
                } catch (...) {
                    failures[k] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : failures) {
        if (e) std::rethrow_exception(e);
    }

    json bounds = {{"schema_version", io::kSchemaVersion}, {"lambda1", lambda1}};
    json crossings = {{"schema_version", io::kSchemaVersion}, {"target_lambda", f.f0()}};
    bool all_found = true;
    for (const Branch& b : branches) {
        const std::string tag(to_string(b.sigma));
        io::write_atomic(out / ("branch_" + tag + ".csv"), io::branch_csv(mesh, b));

        const LambdaBound lb = branch_lambda_bound(b, f, lambda1);
        double max_abs = 0.0;
        for (const BranchPoint& pt : b.points) max_abs = std::max(max_abs, std::abs(pt.lambda));
        bounds[tag] = {{"bound_C", lb.bound_C},
                       {"lambda_star", lb.lambda_star},
                       {"max_abs_lambda", max_abs},
                       {"satisfied", lb.satisfied},
                       {"points", b.points.size()},
                       {"terminated", to_string(b.terminated_reason)}};

        const auto found = branch_crossings(mesh, m, f, b, f.f0(), cfg.solver);
        json list = json::array();
        for (std::size_t i = 0; i < found.size(); ++i) {
            const Crossing& c = found[i];
            const std::string name = "crossing_" + tag + "_" + std::to_string(i) + ".csv";
            io::write_atomic(out / name, io::field_csv(mesh, c.u));
            list.push_back({{"file", name},
                            {"lambda", c.lambda},
                            {"residual_norm", c.residual_norm},
                            {"converged", c.converged},
                            {"arclength", c.arclength},
                            {"min_interior", c.u.min_interior(mesh)},
                            {"max_interior", c.u.max_interior(mesh)},
                            {"verdict", to_string(positivity_verdict(mesh, c.u, default_positivity_tolerance(c.u)))}});
        }
        crossings[tag] = list;
        all_found = all_found && !found.empty();
        log << "branch " << tag << ": " << b.points.size() << " points, " << found.size() << " crossing(s) at lambda = "
            << io::format_double(f.f0()) << '\n';
    }
    io::write_json(out / "lambda_bound.json", bounds);
    io::write_json(out / "crossings.json", crossings);

    if (cfg.branch.interval_points > 0) {
        const double lo = std::min(lambda1 / f.f0(), lambda1 / f.finf());
        const double hi = std::max(lambda1 / f.f0(), lambda1 / f.finf());
        json rows = json::array();
        const int k = cfg.branch.interval_points;
        for (int i = 1; i <= k; ++i) {
            const double lambda = lo + (hi - lo) * i / (k + 1);
            json row = {{"lambda", lambda}};
            for (SolutionSign s : {SolutionSign::Positive, SolutionSign::Negative}) {
                const char* key = s == SolutionSign::Positive ? "positive" : "negative";
                try {
                    const SolveReport r = solve_autonomous_problem(mesh, m, cfg.p, f, lambda, s, cfg.solver);
                    row[key] = {{"found", true},
                                {"residual_norm", r.residual_norm},
                                {"verdict", r.verdict ? to_string(*r.verdict) : "unknown"}};
                } catch (const NoSolutionFoundError& e) {
                    row[key] = {{"found", false}, {"reason", e.what()}};
                }
            }
            rows.push_back(row);
        }
        io::write_json(out / "autonomous_interval.json", {{"schema_version", io::kSchemaVersion},
                                                          {"interval", {lo, hi}},
                                                          {"rows", rows}});
    }
    return all_found ? kSuccess : kNonConvergence;
}

int cmd_picone(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const Mesh mesh = cfg.domain.build();
    const NodalField m = cfg.weight.sample(mesh);
    const EigenPair v = principal_eigenpair_positive(mesh, m, cfg.p, cfg.eigen);
    std::mt19937_64 rng(cfg.seed);

    std::string csv = "trial,gap,tolerance\n";
    bool all_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.picone.trials; ++t) {
        const NodalField u = random_nonnegative_field(mesh, rng);
        const PiconeEstimate est = picone_gap_with_tolerance(mesh, u, v.u, cfg.p, cfg.picone.eps);
        csv += std::to_string(t) + "," + io::format_double(est.gap) + "," + io::format_double(est.tolerance) + "\n";
        all_ok = all_ok && est.gap >= -est.tolerance;
        worst = std::min(worst, est.gap + est.tolerance);
    }
    io::write_atomic(out / "picone.csv", csv);
    const double zero_gap = picone_gap(mesh, NodalField::zeros(mesh), v.u, cfg.p, cfg.picone.eps);
    const double equal_gap = picone_gap(mesh, v.u, v.u, cfg.p, cfg.picone.eps);
    io::write_json(out / "picone.json", {{"schema_version", io::kSchemaVersion},
                                         {"p", cfg.p},
                                         {"trials", cfg.picone.trials},
                                         {"all_within_tolerance", all_ok},
                                         {"zero_field_gap", zero_gap},
                                         {"equality_gap", equal_gap}});
    log << "picone: " << cfg.picone.trials << " trials, " << (all_ok ? "all" : "not all")
        << " gaps >= -tolerance\n";
    return all_ok ? kSuccess : kCheckFailed;
}

}  // namespace plap::cli
