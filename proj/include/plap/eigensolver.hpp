#pragma once

#include "plap/error.hpp"
#include "plap/mesh.hpp"
#include "plap/pde.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace plap {

enum class Normalization { Weighted, UnitNorm };
enum class SignClass { PositiveWeightSide, NegativeWeightSide };

constexpr std::string_view to_string(Normalization n) {
    return n == Normalization::Weighted ? "weighted" : "unit_norm";
}

/// Eigenpair of −Δ_p u = λ m φ_p(u). With Weighted normalization the
/// eigenfunction satisfies ∫ m|u|^p = 1 on the positive side and
/// ∫ (−m)|u|^p = 1 on the negative side; UnitNorm means ‖∇u‖_p = 1.
struct EigenPair {
    double lambda = 0.0;
    NodalField u;
    Normalization normalization = Normalization::Weighted;
    SignClass sign_class = SignClass::PositiveWeightSide;
    int iterations = 0;
    double residual_norm = 0.0;
};

struct EigenConfig {
    int max_iterations = 500;
    /// Relative change of λ between two outer iterations.
    double tolerance = 1e-12;
    std::optional<Regularization> inner_solver;
    std::uint64_t seed = 0;
    /// Newton settings of the inner solves.
    SolverConfig newton;
    /// Bordered Newton refinement of (u, λ) after the inverse iteration.
    bool polish = true;

    bool operator==(const EigenConfig&) const = default;
};

/// Non-convergence of the inverse iteration; carries the last iterate.
class EigenConvergenceError : public ConvergenceError {
public:
    EigenConvergenceError(const std::string& what, EigenPair last)
        : ConvergenceError(what), last_(std::move(last)) {}
    const EigenPair& last_iterate() const noexcept { return last_; }

private:
    EigenPair last_;
};

enum class WeightRegime { SignChanging, NonNegative, NonPositive, Zero };

constexpr std::string_view to_string(WeightRegime r) {
    switch (r) {
        case WeightRegime::SignChanging: return "sign_changing";
        case WeightRegime::NonNegative: return "nonnegative";
        case WeightRegime::NonPositive: return "nonpositive";
        case WeightRegime::Zero: return "zero";
    }
    return "?";
}

/// Decided from interior nodal values with |m_i| > 1e-14 counted as signed.
WeightRegime classify_weight(const Mesh& mesh, const NodalField& m);

/// E(u) / ∫ m|u|^p. Throws UndefinedQuotientError when the moment vanishes.
double rayleigh_quotient(const Mesh& mesh, const NodalField& m, const NodalField& u, double p);

/// λ₁⁺ with its positive eigenfunction, ∫ m|u|^p = 1. For m ≥ 0 this is λ₁.
EigenPair principal_eigenpair_positive(const Mesh& mesh, const NodalField& m, double p,
                                       const EigenConfig& cfg);

/// λ₁⁻ = −λ₁⁺(−m), with the same (positive) eigenfunction.
EigenPair principal_eigenpair_negative(const Mesh& mesh, const NodalField& m, double p,
                                       const EigenConfig& cfg);

/// Rescales the eigenfunction to unit W₀^{1,p} seminorm.
EigenPair to_unit_norm(const Mesh& mesh, EigenPair pair, double p);

/// ‖A(u) − λ W m φ_p(u)‖₂ over interior nodes.
double eigen_residual(const Mesh& mesh, const NodalField& m, double p, double lambda, const NodalField& u);

}  // namespace plap
