#pragma once

#include "plap/mesh.hpp"
#include "plap/pde.hpp"
#include "plap/verdict.hpp"

#include <optional>
#include <vector>

namespace plap {

/// Positive if every interior value > tol, Negative if every value < −tol,
/// Zero if all |values| ≤ tol, SignChanging otherwise.
Verdict positivity_verdict(const Mesh& mesh, const NodalField& u, double tol);

/// 1e-10 · ‖u‖∞.
double default_positivity_tolerance(const NodalField& u);

struct SweepRow {
    double lambda = 0.0;
    Verdict verdict = Verdict::Diverged;
    double min_interior = 0.0;
    double max_interior = 0.0;
    bool solver_converged = false;
};

/// 41 points (by default) spanning [λ⁻ − Δ/2, λ⁺ + Δ/2] with Δ = λ⁺ − λ⁻.
std::vector<double> default_lambda_grid(double lambda_minus, double lambda_plus, int points = 41);

/// Solves −Δ_p u = λ m φ_p(u) + h at every λ of the grid and classifies the solution.
/// Rows are computed concurrently and returned in grid order. The load must be
/// one-signed on interior nodes and not identically zero.
std::vector<SweepRow> max_principle_sweep(const Mesh& mesh, const NodalField& m, double p,
                                          const NodalField& h, const std::vector<double>& lambda_grid,
                                          const SolverConfig& cfg);

/// Summary of where the one-sign verdict `target` occurs in a sweep table.
struct SignBlock {
    bool contiguous = false;   // exactly one block of `target` rows
    std::optional<double> left_edge;
    std::optional<double> right_edge;
    int count = 0;
};

SignBlock find_sign_block(const std::vector<SweepRow>& rows, Verdict target);

/// Largest spacing between consecutive grid values.
double grid_spacing(const std::vector<double>& grid);

/// Picone gap
///   ∫ |∇u|^p − ∫ ∇(u^p / (v+ε)^{p−1}) · |∇v|^{p−2} ∇v,
/// integrated elementwise with a 4-point Gauss rule (1D) or the 6-point
/// triangle rule (2D). Requires u ≥ 0 and v ≥ 0 nodally.
double picone_gap(const Mesh& mesh, const NodalField& u, const NodalField& v, double p, double eps);

struct PiconeEstimate {
    double gap = 0.0;
    /// Σ_T |Q_low − Q_high| with a 10-point (1D) or 100-point collapsed (2D)
    /// reference rule, plus a rounding floor.
    double tolerance = 0.0;
};

PiconeEstimate picone_gap_with_tolerance(const Mesh& mesh, const NodalField& u, const NodalField& v,
                                         double p, double eps);

}  // namespace plap
