#pragma once

#include "plap/bifurcate.hpp"
#include "plap/cli/expression.hpp"
#include "plap/eigensolver.hpp"
#include "plap/error.hpp"
#include "plap/mesh.hpp"
#include "plap/pde.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace plap::cli {

/// Parse or validation failure, addressed by line (0 when not tied to one) and
/// "section.key".
class ConfigError : public PreconditionError {
public:
    ConfigError(const std::string& source, int line, const std::string& field, const std::string& msg);
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

struct DomainSpec {
    enum class Kind { Interval, Rectangle };
    Kind kind = Kind::Interval;
    double a = 0.0;
    double b = 1.0;
    int n = 256;
    double lx = 1.0;
    double ly = 1.0;
    int nx = 32;
    int ny = 32;

    Mesh build() const;
    bool operator==(const DomainSpec&) const = default;
};

/// `constant c`, `step x0, c1, c2` (c1 left of x0, c2 right, the mean at x0),
/// or `expr <expression>`.
struct FieldSpec {
    enum class Kind { Constant, Step, Expression };
    Kind kind = Kind::Constant;
    double c = 1.0;
    double x0 = 0.5;
    double c1 = 1.0;
    double c2 = -1.0;
    std::string expression;

    static FieldSpec parse(std::string_view text);
    std::string to_string() const;
    NodalField sample(const Mesh& mesh) const;
    bool operator==(const FieldSpec&) const = default;
};

struct NonlinearitySpec {
    /// Only the saturating family φ_p(s)(a + b s²/(1+s²)) is built in.
    std::string family = "saturating";
    double a = 8.0;
    double b = 4.0;

    Nonlinearity build(double p) const;
    bool operator==(const NonlinearitySpec&) const = default;
};

struct SweepSpec {
    int points = 41;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    bool operator==(const SweepSpec&) const = default;
};

struct PiconeSpec {
    int trials = 100;
    double eps = 1e-6;
    bool operator==(const PiconeSpec&) const = default;
};

struct BranchSpec {
    /// Number of λ values sampled inside the open interval between λ₁/f∞ and
    /// λ₁/f₀ for the autonomous problem −Δ_p u = λ m f(u); 0 disables.
    int interval_points = 0;
    bool operator==(const BranchSpec&) const = default;
};

struct ExperimentConfig {
    DomainSpec domain;
    double p = 2.0;
    FieldSpec weight;
    FieldSpec load{FieldSpec::Kind::Constant, 1.0, 0.5, 1.0, -1.0, {}};
    NonlinearitySpec nonlinearity;
    SolverConfig solver;
    EigenConfig eigen;
    ContinuationConfig continuation;
    SweepSpec sweep;
    PiconeSpec picone;
    BranchSpec branch;
    /// Empty means unset.
    std::string output_dir;
    std::uint64_t seed = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);
/// Replaces the seed everywhere it is used.
ExperimentConfig with_seed(ExperimentConfig cfg, std::uint64_t seed);

}  // namespace plap::cli
