#include "plap/cli/commands.hpp"
#include "plap/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace plap::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("plap_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int run(int (*cmd)(const ExperimentConfig&, const fs::path&, std::ostream&), const std::string& text,
        const fs::path& out) {
    std::ostringstream log;
    std::ostringstream err;
    return run_guarded([&] { return cmd(parse_config(text), out, log); }, err);
}

TEST(IoFormat, SeventeenDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 9.869604401089358}) {
        EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(IoFormat, MeshJson) {
    const json doc = io::to_json(build_rectangle_mesh(1.0, 1.0, 2, 2));
    EXPECT_EQ(doc["schema_version"], io::kSchemaVersion);
    EXPECT_EQ(doc["nodes"].size(), 9u);
    EXPECT_EQ(doc["elements"].size(), 8u);
    EXPECT_EQ(doc["boundary"].size(), 8u);
}

TEST(IoFormat, AtomicWriteLeavesNoTemporary) {
    const fs::path dir = fresh_dir("atomic");
    io::write_atomic(dir / "sub" / "a.txt", "one");
    io::write_atomic(dir / "sub" / "a.txt", "two");
    EXPECT_EQ(slurp(dir / "sub" / "a.txt"), "two");
    EXPECT_FALSE(fs::exists(dir / "sub" / "a.txt.tmp"));
}

TEST(IoFormat, FieldCsv) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    EXPECT_EQ(io::field_csv(mesh, NodalField(mesh, {0.0, 0.25, 0.0})), "x,value\n0,0\n0.5,0.25\n1,0\n");
}

TEST(OutputDir, Precedence) {
    ExperimentConfig cfg = parse_config("");
    ::setenv("PLAP_OUT_DIR", "from_env", 1);
    EXPECT_EQ(resolve_output_dir(cfg, std::nullopt), fs::path("from_env"));
    cfg.output_dir = "from_config";
    EXPECT_EQ(resolve_output_dir(cfg, std::nullopt), fs::path("from_config"));
    EXPECT_EQ(resolve_output_dir(cfg, std::string("from_flag")), fs::path("from_flag"));
    ::unsetenv("PLAP_OUT_DIR");
    cfg.output_dir.clear();
    EXPECT_EQ(resolve_output_dir(cfg, std::nullopt), fs::path("plap_out"));
}

TEST(EigenCommand, ConstantWeight) {
    const fs::path out = fresh_dir("eigen_const");
    ASSERT_EQ(run(cmd_eigen, "[domain]\nn = 256\n[problem]\nweight = constant 1\n", out), kSuccess);
    const json doc = read_json(out / "eigen.json");
    EXPECT_NEAR(doc["lambda_1"].get<double>(), kPi2, 0.01 * kPi2);
    EXPECT_EQ(doc["lambda_plus"]["u"].size(), 257u);
    EXPECT_TRUE(fs::exists(out / "eigenfunction_plus.csv"));
    EXPECT_FALSE(doc.contains("lambda_minus"));
}

TEST(EigenCommand, StepWeightGivesBothEigenvalues) {
    const fs::path out = fresh_dir("eigen_step");
    ASSERT_EQ(run(cmd_eigen, "[domain]\nn = 128\n[problem]\nweight = step 0.5, 1, -1\n", out), kSuccess);
    const json doc = read_json(out / "eigen.json");
    EXPECT_GT(doc["lambda_plus"]["lambda"].get<double>(), 0.0);
    EXPECT_LT(doc["lambda_minus"]["lambda"].get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(out / "eigenfunction_minus.csv"));
}

TEST(EigenCommand, NegativeWeightIsPreconditionFailure) {
    EXPECT_EQ(run(cmd_eigen, "[problem]\nweight = constant -1\n", fresh_dir("eigen_neg")), kPrecondition);
}

TEST(SweepCommand, DefaultsAreConsistent) {
    const fs::path out = fresh_dir("sweep_default");
    ASSERT_EQ(run(cmd_sweep, "[domain]\nn = 128\n[problem]\nweight = step 0.5, 1, -1\n", out), kSuccess);
    const json rep = read_json(out / "interval_report.json");
    EXPECT_EQ(rep["status"], "consistent");
    EXPECT_EQ(rep["expected_sign"], "Positive");
    EXPECT_EQ(rep["grid_points"], 41);
    const std::string csv = slurp(out / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 42);
    EXPECT_TRUE(fs::exists(out / "sign_indicator.dat"));
}

TEST(SweepCommand, NonpositiveLoadGivesNegativeBlock) {
    const fs::path out = fresh_dir("sweep_negative");
    ASSERT_EQ(run(cmd_sweep, "[domain]\nn = 128\n[problem]\nweight = step 0.5, 1, -1\nload = constant -1\n", out),
              kSuccess);
    const json rep = read_json(out / "interval_report.json");
    EXPECT_EQ(rep["status"], "consistent");
    EXPECT_EQ(rep["expected_sign"], "Negative");
}

TEST(SweepCommand, DefiniteWeightRecordsNegativeLambdas) {
    const fs::path out = fresh_dir("sweep_definite");
    ASSERT_EQ(run(cmd_sweep, "[domain]\nn = 128\n", out), kSuccess);
    const json rep = read_json(out / "interval_report.json");
    EXPECT_EQ(rep["status"], "consistent");
    EXPECT_TRUE(rep["lambda_minus"].is_null());
    EXPECT_FALSE(rep["unchecked_rows"].empty());
}

TEST(SweepCommand, SignChangingLoadRejected) {
    EXPECT_EQ(run(cmd_sweep, "[domain]\nn = 32\n[problem]\nload = expr x - 0.5\n", fresh_dir("sweep_bad")),
              kPrecondition);
}

TEST(BranchCommand, CrossingsForBothSigns) {
    const fs::path out = fresh_dir("branch");
    ASSERT_EQ(run(cmd_branch, "[domain]\nn = 128\n[nonlinearity]\na = 8\nb = 4\n[branch]\ninterval_points = 2\n", out),
              kSuccess);
    EXPECT_TRUE(fs::exists(out / "branch_plus.csv"));
    EXPECT_TRUE(fs::exists(out / "branch_minus.csv"));
    EXPECT_TRUE(fs::exists(out / "crossing_plus_0.csv"));
    EXPECT_TRUE(fs::exists(out / "crossing_minus_0.csv"));
    const json cross = read_json(out / "crossings.json");
    EXPECT_EQ(cross["plus"][0]["verdict"], "Positive");
    EXPECT_EQ(cross["minus"][0]["verdict"], "Negative");
    EXPECT_TRUE(read_json(out / "lambda_bound.json")["plus"]["satisfied"].get<bool>());
    for (const json& row : read_json(out / "autonomous_interval.json")["rows"]) {
        EXPECT_TRUE(row["positive"]["found"].get<bool>());
        EXPECT_TRUE(row["negative"]["found"].get<bool>());
    }
}

TEST(BranchCommand, PurePowerViolatesHypothesis) {
    EXPECT_EQ(run(cmd_branch, "[domain]\nn = 64\n[nonlinearity]\na = 1\nb = 0\n", fresh_dir("branch_bad")),
              kHypothesis);
}

TEST(BranchCommand, SignChangingWeightRejected) {
    EXPECT_EQ(run(cmd_branch, "[domain]\nn = 64\n[problem]\nweight = step 0.5, 1, -1\n", fresh_dir("branch_sc")),
              kPrecondition);
}

TEST(PiconeCommand, AllTrialsWithinTolerance) {
    const fs::path out = fresh_dir("picone");
    ASSERT_EQ(run(cmd_picone, "[domain]\nn = 128\n[problem]\np = 3\n[picone]\ntrials = 20\n", out), kSuccess);
    const std::string csv = slurp(out / "picone.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
    const json doc = read_json(out / "picone.json");
    EXPECT_EQ(doc["zero_field_gap"].get<double>(), 0.0);
}

TEST(Determinism, IdenticalConfigGivesIdenticalBytes) {
    const std::string text = "seed = 5\n[domain]\nn = 64\n[problem]\nweight = step 0.5, 2, -1\np = 3\n";
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    ASSERT_EQ(run(cmd_eigen, text, a), kSuccess);
    ASSERT_EQ(run(cmd_eigen, text, b), kSuccess);
    EXPECT_EQ(slurp(a / "eigen.json"), slurp(b / "eigen.json"));
    EXPECT_EQ(slurp(a / "eigenfunction_minus.csv"), slurp(b / "eigenfunction_minus.csv"));
    ASSERT_EQ(run(cmd_sweep, text, a), kSuccess);
    ASSERT_EQ(run(cmd_sweep, text, b), kSuccess);
    EXPECT_EQ(slurp(a / "interval_report.json"), slurp(b / "interval_report.json"));
    EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

#ifdef PLAP_CLI_PATH
int run_binary(const std::string& args) {
    const int status = std::system((std::string(PLAP_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
    const fs::path dir = fresh_dir("binary");
    io::write_atomic(dir / "ok.ini", "[domain]\nn = 64\n");
    io::write_atomic(dir / "neg.ini", "[domain]\nn = 64\n[problem]\nweight = constant -1\n");
    io::write_atomic(dir / "pure.ini", "[domain]\nn = 64\n[nonlinearity]\na = 1\nb = 0\n");
    io::write_atomic(dir / "broken.ini", "[domain]\nn = x\n");
    EXPECT_EQ(run_binary("eigen " + (dir / "ok.ini").string() + " --out " + (dir / "o1").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "o1" / "eigen.json"));
    EXPECT_EQ(run_binary("eigen " + (dir / "neg.ini").string() + " --out " + (dir / "o2").string()), 3);
    EXPECT_EQ(run_binary("branch " + (dir / "pure.ini").string() + " --out " + (dir / "o3").string()), 4);
    EXPECT_EQ(run_binary("eigen " + (dir / "broken.ini").string() + " --out " + (dir / "o4").string()), 3);
    EXPECT_EQ(run_binary("picone " + (dir / "ok.ini").string() + " --seed 3 --out " + (dir / "o5").string()), 0);
    EXPECT_NE(run_binary("frobnicate"), 0);
}
#endif

}  // namespace
}  // namespace plap::cli
