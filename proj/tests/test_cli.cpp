#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtpca/cli.hpp"
#include "rtpca/tensor.hpp"
#include "rtpca/tensor_io.hpp"
#include "rtpca/tsvd.hpp"

namespace fs = std::filesystem;
using namespace rtpca;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rtpca_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, TsvdWritesFactorsAndSummary) {
    write_tensor_file(path("A.t3"), identity_tensor(3, 2));
    const Outcome r = run({"tsvd", "--in", path("A.t3")});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(r.out, "rank=3 nuclear=3 spectral=1\n");
    for (const char* s : {"A.U.t3", "A.S.t3", "A.V.t3"}) EXPECT_TRUE(fs::exists(path(s))) << s;
    EXPECT_LT(norm(read_tensor_file(path("A.S.t3")) - identity_tensor(3, 2)), 1e-12);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"tsvd", "--in", path("missing.t3")}).code, cli::kExitUsage);
    write_tensor_file(path("A.t3"), identity_tensor(2, 2));
    EXPECT_EQ(run({"tsvd", "--in", path("A.t3"), "--bogus"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"solve", "--in", path("A.t3"), "--penalty", "l7"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST_F(Cli, MalformedTensorIsAComputationError) {
    std::ofstream(path("bad.t3")) << "not a tensor\n";
    const Outcome r = run({"tsvd", "--in", path("bad.t3")});
    EXPECT_EQ(r.code, cli::kExitComputation);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, SynthSolveRoundTrip) {
    const Outcome s = run({"synth", "--out-prefix", path("p"), "--n1", "16", "--n2", "16", "--n3", "3", "--rank", "1",
                       "--m", "2", "--factors", "flat", "--seed", "5"});
    ASSERT_EQ(s.code, cli::kExitOk) << s.err;
    const Tensor3 x = read_tensor_file(path("p.X.t3"));
    EXPECT_EQ(x, read_tensor_file(path("p.L0.t3")) + read_tensor_file(path("p.E0.t3")));

    const Outcome r = run({"solve", "--in", path("p.X.t3"), "--out-L", path("L.t3"), "--out-E", path("E.t3")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("iters=", 0), 0u) << r.out;
    const Tensor3 l = read_tensor_file(path("L.t3"));
    const Tensor3 e = read_tensor_file(path("E.t3"));
    EXPECT_LE(norm(x - l - e) / norm(x), 1e-8);

    // repeated runs are byte identical
    ASSERT_EQ(run({"solve", "--in", path("p.X.t3"), "--out-L", path("L2.t3"), "--out-E", path("E2.t3")}).code, 0);
    EXPECT_EQ(slurp(path("L.t3")), slurp(path("L2.t3")));
    EXPECT_EQ(slurp(path("E.t3")), slurp(path("E2.t3")));
}

TEST_F(Cli, CertifyRecipeSatisfiesDegreeCondition) {
    ASSERT_EQ(run({"synth", "--out-prefix", path("c"), "--recipe", "certified", "--seed", "2"}).code, 0);
    const Outcome r = run({"certify", "--L", path("c.L0.t3"), "--E", path("c.E0.t3"), "--condition", "cor3", "--no-dual"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("gamma_range: "), std::string::npos);
    EXPECT_NE(r.out.find("condition: cor3 satisfied"), std::string::npos) << r.out;
    const Outcome again =
        run({"certify", "--L", path("c.L0.t3"), "--E", path("c.E0.t3"), "--condition", "cor3", "--no-dual"});
    EXPECT_EQ(r.out, again.out);
}

TEST_F(Cli, CertifyCoherentInstanceExitsThree) {
    Tensor3 l({4, 4, 2});
    l(0, 0, 0) = 1.0;
    Tensor3 e({4, 4, 2});
    e(2, 3, 1) = 1.0;
    write_tensor_file(path("L.t3"), l);
    write_tensor_file(path("E.t3"), e);
    const Outcome r = run({"certify", "--L", path("L.t3"), "--E", path("E.t3"), "--condition", "thm3"});
    EXPECT_EQ(r.code, cli::kExitConditionFailed);
    EXPECT_NE(r.out.find("condition: thm3 not_satisfied"), std::string::npos) << r.out;
}

TEST_F(Cli, SweepCsvIsReproducible) {
    const std::vector<std::string> base{"sweep", "--n1", "12", "--n2", "12", "--n3", "3", "--ranks", "1,2",
                                        "--m", "1,4", "--seed", "3"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a.csv")});
    b.insert(b.end(), {"--out", path("b.csv")});
    ASSERT_EQ(run(a).code, cli::kExitOk);
    ASSERT_EQ(run(b).code, cli::kExitOk);
    const std::string csv = slurp(path("a.csv"));
    EXPECT_EQ(csv, slurp(path("b.csv")));
    EXPECT_EQ(csv.rfind("r,sparsity,gamma,p,inc,mu,deg_max,cert_ok,dual_ok,err_L,err_E,success,seconds\n", 0), 0u);
}

// The installed executable forwards dispatch's status as its exit code.
TEST_F(Cli, BinaryExitCodes) {
    const std::string bin = RTPCA_BINARY;
    const auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status("tsvd --nope"), 2);
    write_tensor_file(path("A.t3"), identity_tensor(2, 2));
    EXPECT_EQ(status("tsvd --in " + path("A.t3")), 0);
}
