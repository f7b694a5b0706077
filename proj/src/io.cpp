#include "plap/io.hpp"

#include "plap/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace plap::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json to_json(const Mesh& mesh) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Point& pt : mesh.nodes()) {
        nodes.push_back(mesh.dimension() == 1 ? nlohmann::json::array({pt.x}) : nlohmann::json::array({pt.x, pt.y}));
    }
    nlohmann::json elements = nlohmann::json::array();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto el = mesh.element(e);
        elements.push_back(std::vector<int>(el.begin(), el.end()));
    }
    return {{"schema_version", kSchemaVersion},
            {"dimension", mesh.dimension()},
            {"nodes", nodes},
            {"elements", elements},
            {"boundary", mesh.boundary_nodes()}};
}

nlohmann::json to_json(const SolveReport& report) {
    nlohmann::json path = nlohmann::json::array();
    for (auto [step, res] : report.newton_path) path.push_back({step, res});
    nlohmann::json doc = {{"schema_version", kSchemaVersion},
                          {"converged", report.converged},
                          {"iterations", report.iterations},
                          {"residual_norm", report.residual_norm},
                          {"lambda_used", report.lambda_used},
                          {"newton_path", path},
                          {"u", report.u.values()}};
    doc["verdict"] = report.verdict ? nlohmann::json(std::string(to_string(*report.verdict))) : nlohmann::json();
    return doc;
}

nlohmann::json to_json(const EigenPair& pair) {
    return {{"schema_version", kSchemaVersion},
            {"lambda", pair.lambda},
            {"normalization", pair.normalization == Normalization::Weighted ? "weighted" : "unit_norm"},
            {"iterations", pair.iterations},
            {"residual_norm", pair.residual_norm},
            {"u", pair.u.values()}};
}

std::string field_csv(const Mesh& mesh, const NodalField& u) {
    require_same_mesh(mesh, u, "field_csv");
    std::ostringstream out;
    out << (mesh.dimension() == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const Point& pt = mesh.nodes()[i];
        out << format_double(pt.x) << ',';
        if (mesh.dimension() == 2) out << format_double(pt.y) << ',';
        out << format_double(u[i]) << '\n';
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "lambda,verdict,min_interior,max_interior,converged\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.lambda) << ',' << to_string(r.verdict) << ',' << format_double(r.min_interior) << ','
            << format_double(r.max_interior) << ',' << (r.solver_converged ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string sign_indicator_dat(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "# lambda indicator (+1 positive, -1 negative, 0 otherwise)\n";
    for (const SweepRow& r : rows) {
        const int ind = r.verdict == Verdict::Positive ? 1 : (r.verdict == Verdict::Negative ? -1 : 0);
        out << format_double(r.lambda) << ' ' << ind << '\n';
    }
    return out.str();
}

std::string branch_csv(const Mesh& mesh, const Branch& branch) {
    std::ostringstream out;
    out << "arclength,lambda,norm,min_u,max_u\n";
    for (const BranchPoint& pt : branch.points) {
        out << format_double(pt.arclength) << ',' << format_double(pt.lambda) << ',' << format_double(pt.norm) << ','
            << format_double(pt.u.min_interior(mesh)) << ',' << format_double(pt.u.max_interior(mesh)) << '\n';
    }
    return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_atomic(path, doc.dump(2) + "\n");
}

}  // namespace plap::io
