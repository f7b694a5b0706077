#pragma once

#include "plap/bifurcate.hpp"
#include "plap/eigensolver.hpp"
#include "plap/maxprin.hpp"
#include "plap/mesh.hpp"
#include "plap/pde.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace plap::io {

inline constexpr int kSchemaVersion = 1;

/// %.17g, enough to round-trip any double.
std::string format_double(double v);

nlohmann::json to_json(const Mesh& mesh);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const EigenPair& pair);

/// x[,y],value per node.
std::string field_csv(const Mesh& mesh, const NodalField& u);
/// lambda,verdict,min_interior,max_interior,converged
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Two columns: λ and +1 / −1 / 0 for Positive / Negative / anything else.
std::string sign_indicator_dat(const std::vector<SweepRow>& rows);
/// arclength,lambda,norm,min_u,max_u (extrema over interior nodes).
std::string branch_csv(const Mesh& mesh, const Branch& branch);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace plap::io
