#include "plap/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace plap::cli {

ConfigError::ConfigError(const std::string& source, int line, const std::string& field, const std::string& msg)
    : PreconditionError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                        (field.empty() ? std::string() : ": " + field) + ": " + msg),
      line_(line),
      field_(field) {}

Mesh DomainSpec::build() const {
    if (kind == Kind::Interval) return build_interval_mesh(a, b, n);
    return build_rectangle_mesh(lx, ly, nx, ny);
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(std::string_view s) {
    const std::string t = trim(s);
    double v = 0.0;
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

FieldSpec FieldSpec::parse(std::string_view text) {
    const std::string t = trim(text);
    const auto space = t.find_first_of(" \t");
    const std::string head = t.substr(0, space);
    const std::string rest = space == std::string::npos ? std::string() : trim(std::string_view(t).substr(space));
    FieldSpec f;
    if (head == "constant") {
        const auto v = to_double(rest);
        if (!v) throw PreconditionError("constant field needs one number, got '" + rest + "'");
        f.kind = Kind::Constant;
        f.c = *v;
    } else if (head == "step") {
        std::vector<double> vals;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto v = to_double(item);
            if (!v) throw PreconditionError("step field: '" + trim(item) + "' is not a number");
            vals.push_back(*v);
        }
        if (vals.size() != 3) throw PreconditionError("step field needs x0, c1, c2");
        f.kind = Kind::Step;
        f.x0 = vals[0];
        f.c1 = vals[1];
        f.c2 = vals[2];
    } else if (head == "expr") {
        Expression::parse(rest);
        f.kind = Kind::Expression;
        f.expression = rest;
    } else {
        throw PreconditionError("field spec must start with constant, step or expr, got '" + head + "'");
    }
    return f;
}

std::string FieldSpec::to_string() const {
    switch (kind) {
        case Kind::Constant: return "constant " + fmt(c);
        case Kind::Step: return "step " + fmt(x0) + ", " + fmt(c1) + ", " + fmt(c2);
        case Kind::Expression: return "expr " + expression;
    }
    return {};
}

NodalField FieldSpec::sample(const Mesh& mesh) const {
    switch (kind) {
        case Kind::Constant: return sample_field(mesh, [c = c](const Point&) { return c; });
        case Kind::Step:
            return sample_field(mesh, [this](const Point& pt) {
                if (pt.x < x0) return c1;
                if (pt.x > x0) return c2;
                return 0.5 * (c1 + c2);
            });
        case Kind::Expression: {
            const Expression e = Expression::parse(expression);
            if (e.uses_y() && mesh.dimension() == 1) {
                throw PreconditionError("expression '" + expression + "' uses y on a one-dimensional domain");
            }
            return sample_field(mesh, [&e](const Point& pt) { return e(pt.x, pt.y); });
        }
    }
    throw PreconditionError("unknown field kind");
}

Nonlinearity NonlinearitySpec::build(double p) const {
    if (family != "saturating") throw PreconditionError("unknown nonlinearity family '" + family + "'");
    return Nonlinearity::saturating(p, a, b);
}

namespace {

/// One key of the file format: how to read it into, and print it from, a config.
struct Key {
    std::string section;
    std::string name;
    std::function<void(ExperimentConfig&, const std::string&)> read;
    std::function<std::optional<std::string>(const ExperimentConfig&)> write;
};

struct Bad {
    std::string msg;
};

double as_double(const std::string& v) {
    const auto d = to_double(v);
    if (!d) throw Bad{"expected a number, got '" + v + "'"};
    return *d;
}

long long as_integer(const std::string& v) {
    const std::string t = trim(v);
    long long n = 0;
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, n);
    if (t.empty() || ec != std::errc() || ptr != end) throw Bad{"expected an integer, got '" + v + "'"};
    return n;
}

int as_int(const std::string& v) {
    const long long n = as_integer(v);
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) throw Bad{"integer out of range"};
    return static_cast<int>(n);
}

bool as_bool(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw Bad{"expected true or false, got '" + v + "'"};
}

template <class M>
Key real(std::string section, std::string name, M member) {
    return {std::move(section), std::move(name),
            [member](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = as_double(v); },
            [member](const ExperimentConfig& c) -> std::optional<std::string> {
                return fmt(std::invoke(member, const_cast<ExperimentConfig&>(c)));
            }};
}

template <class M>
Key integer(std::string section, std::string name, M member) {
    return {std::move(section), std::move(name),
            [member](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = as_int(v); },
            [member](const ExperimentConfig& c) -> std::optional<std::string> {
                return std::to_string(std::invoke(member, const_cast<ExperimentConfig&>(c)));
            }};
}

template <class M>
Key boolean(std::string section, std::string name, M member) {
    return {std::move(section), std::move(name),
            [member](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = as_bool(v); },
            [member](const ExperimentConfig& c) -> std::optional<std::string> {
                return std::invoke(member, const_cast<ExperimentConfig&>(c)) ? "true" : "false";
            }};
}

template <class M>
Key optional_real(std::string section, std::string name, M member) {
    return {std::move(section), std::move(name),
            [member](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = as_double(v); },
            [member](const ExperimentConfig& c) -> std::optional<std::string> {
                const auto& o = std::invoke(member, const_cast<ExperimentConfig&>(c));
                if (!o) return std::nullopt;
                return fmt(*o);
            }};
}

Key field(std::string section, std::string name, FieldSpec ExperimentConfig::*member) {
    return {std::move(section), std::move(name),
            [member](ExperimentConfig& c, const std::string& v) {
                try {
                    c.*member = FieldSpec::parse(v);
                } catch (const PreconditionError& e) {
                    throw Bad{e.what()};
                }
            },
            [member](const ExperimentConfig& c) -> std::optional<std::string> { return (c.*member).to_string(); }};
}

const std::vector<Key>& keys() {
    using C = ExperimentConfig;
    static const std::vector<Key> k = {
        {"", "seed", [](C& c, const std::string& v) {
             const long long n = as_integer(v);
             if (n < 0) throw Bad{"seed must be nonnegative"};
             c.seed = static_cast<std::uint64_t>(n);
         },
         [](const C& c) -> std::optional<std::string> { return std::to_string(c.seed); }},

        {"domain", "kind",
         [](C& c, const std::string& v) {
             if (v == "interval") {
                 c.domain.kind = DomainSpec::Kind::Interval;
             } else if (v == "rectangle") {
                 c.domain.kind = DomainSpec::Kind::Rectangle;
             } else {
                 throw Bad{"expected interval or rectangle, got '" + v + "'"};
             }
         },
         [](const C& c) -> std::optional<std::string> {
             return c.domain.kind == DomainSpec::Kind::Interval ? "interval" : "rectangle";
         }},
        real("domain", "a", [](C& c) -> double& { return c.domain.a; }),
        real("domain", "b", [](C& c) -> double& { return c.domain.b; }),
        integer("domain", "n", [](C& c) -> int& { return c.domain.n; }),
        real("domain", "lx", [](C& c) -> double& { return c.domain.lx; }),
        real("domain", "ly", [](C& c) -> double& { return c.domain.ly; }),
        integer("domain", "nx", [](C& c) -> int& { return c.domain.nx; }),
        integer("domain", "ny", [](C& c) -> int& { return c.domain.ny; }),

        real("problem", "p", [](C& c) -> double& { return c.p; }),
        field("problem", "weight", &C::weight),
        field("problem", "load", &C::load),

        {"nonlinearity", "family", [](C& c, const std::string& v) { c.nonlinearity.family = v; },
         [](const C& c) -> std::optional<std::string> { return c.nonlinearity.family; }},
        real("nonlinearity", "a", [](C& c) -> double& { return c.nonlinearity.a; }),
        real("nonlinearity", "b", [](C& c) -> double& { return c.nonlinearity.b; }),

        real("solver", "newton_tolerance", [](C& c) -> double& { return c.solver.newton_tolerance; }),
        integer("solver", "max_newton_steps", [](C& c) -> int& { return c.solver.max_newton_steps; }),
        real("solver", "min_step", [](C& c) -> double& { return c.solver.min_step; }),
        {"solver", "epsilon",
         [](C& c, const std::string& v) { c.solver.regularization = Regularization{as_double(v)}; },
         [](const C& c) -> std::optional<std::string> {
             if (!c.solver.regularization) return std::nullopt;
             return fmt(c.solver.regularization->epsilon);
         }},
        integer("solver", "continuation_steps", [](C& c) -> int& { return c.solver.continuation_steps; }),
        integer("solver", "max_substep_depth", [](C& c) -> int& { return c.solver.max_substep_depth; }),
        real("solver", "blowup_threshold", [](C& c) -> double& { return c.solver.blowup_threshold; }),

        integer("eigen", "max_iterations", [](C& c) -> int& { return c.eigen.max_iterations; }),
        real("eigen", "tolerance", [](C& c) -> double& { return c.eigen.tolerance; }),
        boolean("eigen", "polish", [](C& c) -> bool& { return c.eigen.polish; }),

        real("continuation", "detachment_amplitude",
             [](C& c) -> double& { return c.continuation.detachment_amplitude; }),
        real("continuation", "initial_step", [](C& c) -> double& { return c.continuation.initial_step; }),
        real("continuation", "min_step", [](C& c) -> double& { return c.continuation.min_step; }),
        real("continuation", "max_step", [](C& c) -> double& { return c.continuation.max_step; }),
        real("continuation", "max_norm", [](C& c) -> double& { return c.continuation.max_norm; }),
        real("continuation", "max_arclength", [](C& c) -> double& { return c.continuation.max_arclength; }),
        integer("continuation", "max_points", [](C& c) -> int& { return c.continuation.max_points; }),
        integer("continuation", "target_corrector_iterations",
                [](C& c) -> int& { return c.continuation.target_corrector_iterations; }),
        integer("continuation", "max_corrector_iterations",
                [](C& c) -> int& { return c.continuation.max_corrector_iterations; }),
        real("continuation", "corrector_tolerance",
             [](C& c) -> double& { return c.continuation.corrector_tolerance; }),
        boolean("continuation", "allow_sign_changing_weight",
                [](C& c) -> bool& { return c.continuation.allow_sign_changing_weight; }),

        integer("branch", "interval_points", [](C& c) -> int& { return c.branch.interval_points; }),

        integer("sweep", "points", [](C& c) -> int& { return c.sweep.points; }),
        optional_real("sweep", "lambda_min", [](C& c) -> std::optional<double>& { return c.sweep.lambda_min; }),
        optional_real("sweep", "lambda_max", [](C& c) -> std::optional<double>& { return c.sweep.lambda_max; }),

        integer("picone", "trials", [](C& c) -> int& { return c.picone.trials; }),
        real("picone", "eps", [](C& c) -> double& { return c.picone.eps; }),

        {"output", "dir", [](C& c, const std::string& v) { c.output_dir = v; },
         [](const C& c) -> std::optional<std::string> {
             if (c.output_dir.empty()) return std::nullopt;
             return c.output_dir;
         }},
    };
    return k;
}

/// Copies the shared settings into the nested solver configurations.
void propagate(ExperimentConfig& c) {
    c.eigen.seed = c.seed;
    c.eigen.newton = c.solver;
    c.eigen.inner_solver = c.solver.regularization;
    c.continuation.solver = c.solver;
    c.continuation.eigen = c.eigen;
}

void validate(const ExperimentConfig& c, const std::string& source, const std::map<std::string, int>& lines) {
    auto fail = [&](const std::string& field, const std::string& msg) {
        const auto it = lines.find(field);
        throw ConfigError(source, it == lines.end() ? 0 : it->second, field, msg);
    };
    if (c.domain.kind == DomainSpec::Kind::Interval) {
        if (!(c.domain.a < c.domain.b)) fail("domain.b", "interval needs a < b");
        if (c.domain.n < 2) fail("domain.n", "needs at least two elements");
    } else {
        if (!(c.domain.lx > 0.0)) fail("domain.lx", "must be positive");
        if (!(c.domain.ly > 0.0)) fail("domain.ly", "must be positive");
        if (c.domain.nx < 2) fail("domain.nx", "must be at least 2");
        if (c.domain.ny < 2) fail("domain.ny", "must be at least 2");
    }
    if (!(c.p > 1.0)) fail("problem.p", "exponent must be greater than 1");
    const bool one_dim = c.domain.kind == DomainSpec::Kind::Interval;
    for (const auto& [name, spec] : {std::pair{"problem.weight", &c.weight}, std::pair{"problem.load", &c.load}}) {
        if (spec->kind == FieldSpec::Kind::Expression && one_dim && Expression::parse(spec->expression).uses_y()) {
            fail(name, "expression uses y on a one-dimensional domain");
        }
    }
    if (c.nonlinearity.family != "saturating") fail("nonlinearity.family", "only 'saturating' is available");
    if (!(c.solver.newton_tolerance > 0.0)) fail("solver.newton_tolerance", "must be positive");
    if (c.solver.max_newton_steps < 1) fail("solver.max_newton_steps", "must be at least 1");
    if (!(c.solver.min_step > 0.0 && c.solver.min_step <= 1.0)) fail("solver.min_step", "must lie in (0, 1]");
    if (c.solver.regularization && !(c.solver.regularization->epsilon >= 0.0)) {
        fail("solver.epsilon", "must be nonnegative");
    }
    if (c.solver.continuation_steps < 1) fail("solver.continuation_steps", "must be at least 1");
    if (c.solver.max_substep_depth < 0) fail("solver.max_substep_depth", "must be nonnegative");
    if (!(c.eigen.tolerance > 0.0)) fail("eigen.tolerance", "must be positive");
    if (c.eigen.max_iterations < 1) fail("eigen.max_iterations", "must be at least 1");
    if (!(c.continuation.detachment_amplitude > 0.0)) fail("continuation.detachment_amplitude", "must be positive");
    if (!(c.continuation.min_step > 0.0 && c.continuation.min_step <= c.continuation.initial_step &&
          c.continuation.initial_step <= c.continuation.max_step)) {
        fail("continuation.initial_step", "needs min_step <= initial_step <= max_step, all positive");
    }
    if (!(c.continuation.max_norm > 0.0)) fail("continuation.max_norm", "must be positive");
    if (c.continuation.max_points < 2) fail("continuation.max_points", "must be at least 2");
    if (c.branch.interval_points < 0) fail("branch.interval_points", "must be nonnegative");
    if (c.sweep.points < 2) fail("sweep.points", "must be at least 2");
    if (c.sweep.lambda_min.has_value() != c.sweep.lambda_max.has_value()) {
        fail(c.sweep.lambda_min ? "sweep.lambda_min" : "sweep.lambda_max", "lambda_min and lambda_max go together");
    }
    if (c.sweep.lambda_min && !(*c.sweep.lambda_min < *c.sweep.lambda_max)) {
        fail("sweep.lambda_max", "must exceed lambda_min");
    }
    if (c.picone.trials < 0) fail("picone.trials", "must be nonnegative");
    if (!(c.picone.eps > 0.0)) fail("picone.eps", "must be positive");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    std::map<std::string, int> lines;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(source, line_no, "", "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::any_of(keys().begin(), keys().end(),
                                           [&](const Key& k) { return k.section == section; });
            if (!known || section.empty()) throw ConfigError(source, line_no, section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line_no, "", "expected 'key = value'");
        const std::string name = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const std::string field = section.empty() ? name : section + "." + name;
        const auto it = std::find_if(keys().begin(), keys().end(),
                                     [&](const Key& k) { return k.section == section && k.name == name; });
        if (it == keys().end()) throw ConfigError(source, line_no, field, "unknown key");
        if (lines.count(field)) throw ConfigError(source, line_no, field, "duplicate key");
        lines[field] = line_no;
        try {
            it->read(cfg, value);
        } catch (const Bad& b) {
            throw ConfigError(source, line_no, field, b.msg);
        }
    }
    validate(cfg, source, lines);
    propagate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path.string(), 0, "", "cannot read file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.string());
}

ExperimentConfig with_seed(ExperimentConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    propagate(cfg);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const Key& k : keys()) {
        const auto v = k.write(cfg);
        if (!v) continue;
        if (k.section != section) {
            section = k.section;
            out << "\n[" << section << "]\n";
        }
        out << k.name << " = " << *v << '\n';
    }
    return out.str();
}

}  // namespace plap::cli
