#pragma once

#include "plap/eigensolver.hpp"
#include "plap/mesh.hpp"
#include "plap/pde.hpp"
#include "plap/verdict.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace plap {

/// Nonlinearity f(s) = φ_p(s) r(s), stored through its ratio r = f/φ_p.
///
/// f₀ = lim_{s→0} r(s) and f∞ = lim_{|s|→∞} r(s) are supplied by the caller;
/// `bound()` is sup |r| sampled on a logarithmic grid over [1e-8, 1e8] of both
/// signs.
class Nonlinearity {
public:
    Nonlinearity(std::function<double(double)> ratio, std::function<double(double)> ratio_derivative,
                 double p, double f0, double finf);

    /// φ_p(s) (a + b s²/(1+s²)): f₀ = a, f∞ = a + b.
    static Nonlinearity saturating(double p, double a, double b);

    double p() const noexcept { return p_; }
    double f0() const noexcept { return f0_; }
    double finf() const noexcept { return finf_; }
    double bound() const noexcept { return bound_; }
    /// inf over the sampling grid of g(s)/φ_p(s) = r(s) − f₀.
    double inf_g_ratio() const noexcept { return inf_g_ratio_; }

    double ratio(double s) const { return ratio_(s); }
    double operator()(double s) const;
    /// f'(s), with φ_p' smoothed by `epsilon` near s = 0.
    double derivative(double s, double epsilon = 0.0) const;

    /// g(s) = f(s) − f₀ φ_p(s).
    double g(double s) const;
    double g_derivative(double s, double epsilon = 0.0) const;

    /// c·f, with limits c·f₀ and c·f∞.
    Nonlinearity scaled(double c) const;

private:
    std::function<double(double)> ratio_;
    std::function<double(double)> ratio_derivative_;
    double p_;
    double f0_;
    double finf_;
    double bound_ = 0.0;
    double inf_g_ratio_ = 0.0;
};

double g_part(const Nonlinearity& f, double s);

/// f₀ < λ₁ < f∞ or f₀ > λ₁ > f∞.
bool eigenvalue_separates_limits(const Nonlinearity& f, double lambda1);

enum class Sigma { Plus, Minus };

constexpr double sign_of(Sigma s) { return s == Sigma::Plus ? 1.0 : -1.0; }
constexpr std::string_view to_string(Sigma s) { return s == Sigma::Plus ? "plus" : "minus"; }

struct BranchPoint {
    double lambda = 0.0;
    NodalField u;
    /// W₀^{1,p} seminorm, E_p(u)^{1/p}.
    double norm = 0.0;
    double arclength = 0.0;
    Verdict verdict = Verdict::Zero;
    double residual_norm = 0.0;
};

enum class Termination { MaxNorm, MaxArclength, StepFailure, MaxPoints };

constexpr std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::MaxNorm: return "max_norm";
        case Termination::MaxArclength: return "max_arclength";
        case Termination::StepFailure: return "step_failure";
        case Termination::MaxPoints: return "max_points";
    }
    return "?";
}

struct Branch {
    Sigma sigma = Sigma::Plus;
    std::vector<BranchPoint> points;
    double bifurcation_lambda = 0.0;
    Termination terminated_reason = Termination::StepFailure;
};

struct ContinuationConfig {
    /// Amplitude of the first point along the unit-norm principal eigenfunction.
    double detachment_amplitude = 1e-3;
    double initial_step = 1e-3;
    double min_step = 1e-10;
    double max_step = 1e6;
    double max_norm = 1e3;
    double max_arclength = 1e7;
    int max_points = 5000;
    int target_corrector_iterations = 4;
    int max_corrector_iterations = 12;
    /// ‖F‖₂ ≤ tol · (1 + ‖A(u)‖₂) on the extended system.
    double corrector_tolerance = 1e-10;
    /// Continuation outside the m ≥ 0 regime is experimental.
    bool allow_sign_changing_weight = false;
    EigenConfig eigen;
    SolverConfig solver;

    bool operator==(const ContinuationConfig&) const = default;
};

/// Traces the one-sign continuum of
///   −Δ_p u = λ m φ_p(u) + m g(u)
/// that leaves (λ₁, 0) in direction σ u₁, by pseudo-arclength continuation
/// with a secant predictor. `principal` may supply a precomputed (λ₁, u₁).
Branch continue_branch(const Mesh& mesh, const NodalField& m, double p, const Nonlinearity& f, Sigma sigma,
                       const ContinuationConfig& cfg, const std::optional<EigenPair>& principal = std::nullopt);

struct LambdaBound {
    double bound_C = 0.0;
    double lambda_star = 0.0;
    bool satisfied = false;
};

/// λ* = max(0, −inf g/φ_p), C = max(|λ₁ + λ*|, |λ*|) + |λ₁|; checks |λ| ≤ C on
/// every branch point.
LambdaBound branch_lambda_bound(const Branch& branch, const Nonlinearity& f, double lambda1);

struct Crossing {
    NodalField u;
    double lambda = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
    double arclength = 0.0;
};

/// Solutions of the branch equation at λ = lambda_target: every consecutive
/// pair of points that straddles the target is interpolated in arclength and
/// Newton-polished at fixed λ. A branch lying entirely on the target (vertical)
/// yields its point of largest norm.
std::vector<Crossing> branch_crossings(const Mesh& mesh, const NodalField& m, const Nonlinearity& f,
                                       const Branch& branch, double lambda_target, const SolverConfig& cfg);

/// Least-squares line λ ≈ a + b·norm through the first `count` points, evaluated at norm 0.
double extrapolated_origin(const Branch& branch, int count = 5);

}  // namespace plap
