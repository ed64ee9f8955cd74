#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spintomo/cli.hpp"

using namespace spintomo;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const char* name) { return std::string(SPINTOMO_SAMPLES_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("spintomo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const char* name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    void write(const std::string& p, const std::string& text) const { std::ofstream(p, std::ios::binary) << text; }

    fs::path dir_;
};

bool single_line_tag(const std::string& err, const std::string& kind) {
    return err.rfind("error: " + kind + ":", 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_F(CliTest, StateValidateMixedQubit) {
    Result r = run({"state", "validate", "--in", sample("rho_qubit_mixed.json")});
    EXPECT_EQ(r.code, 0);
    io::json report = io::json::parse(r.out);
    EXPECT_EQ(report["valid"], true);
    EXPECT_EQ(report["dim"], 2);
    EXPECT_DOUBLE_EQ(report["purity"].get<double>(), 0.5);
    EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, StateValidateRejectsBadState) {
    write(path("bad.json"), R"({"re": [[1.5, 0], [0, -0.5]]})");
    Result r = run({"state", "validate", "--in", path("bad.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(single_line_tag(r.err, "NotPositive")) << r.err;
    Result missing = run({"state", "validate", "--in", path("nope.json")});
    EXPECT_EQ(missing.code, 2);
    EXPECT_TRUE(single_line_tag(missing.err, "InvalidInput")) << missing.err;
    Result wrong_j = run({"state", "validate", "--in", sample("rho_qubit_mixed.json"), "--j", "1"});
    EXPECT_EQ(wrong_j.code, 2);
}

TEST_F(CliTest, ParseErrorsAreInvalidInput) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {}, {"bogus"}, {"state"}, {"state", "validate"}, {"scan", "qutrit", "--step", "x"}, {"scan", "maxwitness", "--nmax", "1"}}) {
        Result r = run(args);
        EXPECT_EQ(r.code, 2);
        EXPECT_TRUE(single_line_tag(r.err, "InvalidInput")) << r.err;
    }
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, StateRandomIsSeeded) {
    Result a = run({"state", "random", "--dim", "3", "--seed", "7"});
    Result b = run({"state", "random", "--dim", "3", "--seed", "7"});
    Result c = run({"state", "random", "--j", "1", "--seed", "8"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    std::istringstream in(a.out);
    DensityMatrix rho = io::density_from_json(in);
    EXPECT_EQ(rho.matrix(), random_density(3, 7).matrix());
    Result pure = run({"state", "random", "--dim", "4", "--pure", "--seed", "1"});
    std::istringstream pin(pure.out);
    EXPECT_NEAR(purity(io::density_from_json(pin)), 1.0, 1e-12);
}

TEST_F(CliTest, TomogramSampleThenReconstruct) {
    const std::string csv = path("tomo.csv");
    Result s = run({"tomogram", "sample", "--in", sample("rho_qutrit_mixed.json"), "--out", csv});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(s.out.empty());
    EXPECT_EQ(slurp(csv).substr(0, 31), "m,alpha,beta,gamma,weight,value");
    Result r = run({"tomogram", "reconstruct", "--in", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream back(r.out);
    std::ifstream original(sample("rho_qutrit_mixed.json"));
    EXPECT_LE(max_abs(io::density_from_json(back).matrix() - io::density_from_json(original).matrix()), 1e-8);
}

TEST_F(CliTest, TomogramCoarseGrid) {
    Result r = run({"tomogram", "sample", "--in", sample("rho_qubit_pure.json"), "--nbeta", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(single_line_tag(r.err, "GridTooCoarse")) << r.err;
}

TEST_F(CliTest, WitnessBuildAndEval) {
    const std::string w = path("w.json");
    Result b = run({"witness", "build", "--in", sample("rho_qubit_pure.json"), "--out", w});
    ASSERT_EQ(b.code, 0) << b.err;
    io::json built = io::json::parse(slurp(w));
    EXPECT_NEAR(built["expectation"].get<double>(), 3.0 / 8 - std::sqrt(7.0) / 4, 1e-12);
    EXPECT_DOUBLE_EQ(built["bound"].get<double>(), -0.125);
    Result e = run({"witness", "eval", "--in", sample("rho_qubit_pure.json"), "--witness", w});
    ASSERT_EQ(e.code, 0) << e.err;
    io::json eval = io::json::parse(e.out);
    EXPECT_NEAR(eval["expectation"].get<double>(), built["expectation"].get<double>(), 1e-12);
    EXPECT_NEAR(eval["tomographic"].get<double>(), built["expectation"].get<double>(), 1e-10);
    EXPECT_EQ(eval["premises"]["pass"], true);
}

TEST_F(CliTest, WitnessUndefinedExitsThree) {
    for (const char* name : {"rho_qubit_mixed.json", "rho_qutrit_flat.json"}) {
        Result r = run({"witness", "build", "--in", sample(name)});
        EXPECT_EQ(r.code, 3);
        EXPECT_TRUE(single_line_tag(r.err, "WitnessUndefined")) << r.err;
    }
}

TEST_F(CliTest, ScanOutputs) {
    Result q = run({"scan", "qutrit", "--step", "0.05"});
    ASSERT_EQ(q.code, 0);
    EXPECT_EQ(q.out.substr(0, q.out.find('\n')), "r1,r2,value");
    Result m = run({"scan", "maxwitness", "--nmax", "4", "--samples", "50"});
    ASSERT_EQ(m.code, 0);
    std::istringstream lines(m.out);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "N,pure_value,grid_max,bound");
    EXPECT_EQ(first.substr(0, 2), "2,");
    EXPECT_NEAR(std::stod(first.substr(2)), 3.0 / 8 - std::sqrt(7.0) / 4, 1e-12);
    Result bad = run({"scan", "qutrit", "--step", "0.5"});
    EXPECT_EQ(bad.code, 2);
}

TEST_F(CliTest, JsLiftAndWitness) {
    write(path("jp.json"), R"({"dim": 2, "re": [[0, 1], [0, 0]]})");
    Result l = run({"js", "lift", "--in", path("jp.json")});
    ASSERT_EQ(l.code, 0) << l.err;
    io::json lifted = io::json::parse(l.out);
    EXPECT_EQ(lifted["total_photons"], 1);
    EXPECT_EQ(lifted["basis"], io::json::parse("[[1, 0], [0, 1]]"));

    Result w = run({"js", "witness", "--na", "1", "--nb", "0"});
    ASSERT_EQ(w.code, 0) << w.err;
    io::json out = io::json::parse(w.out);
    EXPECT_NEAR(out["expectation"].get<double>(), -0.2864378, 1e-7);
    EXPECT_EQ(out["n_a"], 1);

    Result vac = run({"js", "witness", "--na", "0", "--nb", "0"});
    EXPECT_EQ(vac.code, 3);
    EXPECT_TRUE(single_line_tag(vac.err, "VacuumUndetectable")) << vac.err;
}

TEST_F(CliTest, ExitCodeMapping) {
    EXPECT_EQ(cli::exit_code_for(ErrorKind::NumericalFailure), 4);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::ConvergenceFailure), 4);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::WitnessUndefined), 3);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::VacuumUndetectable), 3);
    for (ErrorKind k : {ErrorKind::NotHermitian, ErrorKind::GridMismatch, ErrorKind::InvalidSpinLabel, ErrorKind::RankDeficient})
        EXPECT_EQ(cli::exit_code_for(k), 2);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    const std::vector<std::vector<std::string>> commands = {
        {"state", "random", "--dim", "5", "--seed", "11"},
        {"tomogram", "sample", "--in", sample("rho_qutrit_mixed.json")},
        {"witness", "build", "--in", sample("rho_qutrit_mixed.json")},
        {"scan", "maxwitness", "--nmax", "6", "--samples", "100", "--seed", "2"},
        {"js", "witness", "--na", "2", "--nb", "3"},
    };
    for (const auto& cmd : commands) {
        Result a = run(cmd);
        Result b = run(cmd);
        EXPECT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, b.out);
    }
}
