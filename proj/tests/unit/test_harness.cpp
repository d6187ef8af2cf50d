#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lclt/error.hpp"
#include "lclt/exact_oracle.hpp"
#include "lclt/harness.hpp"

using namespace lclt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class HarnessTest : public testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("lclt_harness_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    Manifest manifest(const std::string& text) const {
        Manifest mf = parse_manifest_text(text);
        mf.out = (root_ / "out").string();
        return mf;
    }

    fs::path root_;
};

} // namespace

TEST(Manifest, ParsesListsCommentsAndNumbers) {
    const auto mf = parse_manifest_text(
        "# comment\n"
        "kind = distances\n"
        "n = 64, 128 # trailing\n"
        "p = 0.1,0.25\n"
        "samples = 1e7\n"
        "seed = 0x10\n"
        "gamma = 0.05\n"
        "\n");
    EXPECT_EQ(mf.kind, ExperimentKind::distances);
    EXPECT_EQ(mf.n, (std::vector<std::size_t>{64, 128}));
    EXPECT_EQ(mf.p, (std::vector<double>{0.1, 0.25}));
    EXPECT_EQ(mf.samples, 10000000U);
    EXPECT_EQ(mf.seed, 16U);
    EXPECT_EQ(mf.gamma, (std::vector<double>{0.05}));
}

TEST(Manifest, UnknownKeyAndBadValuesRejected) {
    for (const char* text : {"bogus = 1\n", "n = abc\n", "samples = 1.5\n", "kind = nonsense\n", "no equals sign\n"}) {
        try {
            (void)parse_manifest_text(text);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter) << text;
        }
    }
}

TEST(Manifest, TextRoundTrip) {
    auto mf = parse_manifest_text("kind = charfn\nn = 512\np = 0.35\ngamma = 0.05\nt = -1.5, 0, 2\nK = 3\n"
                                  "c_edge = 0.5\nseed = 99\nsamples = 12345\nworkers = 3\nout = somewhere\n");
    const auto again = parse_manifest_text(to_text(mf));
    EXPECT_EQ(to_text(again), to_text(mf));
    EXPECT_EQ(again.t, mf.t);
    EXPECT_EQ(again.workers, 3U);
    EXPECT_EQ(again.out, "somewhere");
}

TEST(Manifest, OutputKeyIgnoresRuntimeKeys) {
    auto a = parse_manifest_text("kind = pmf\nn = 5\np = 0.4\n");
    auto b = a;
    b.workers = 7;
    b.out = "elsewhere";
    b.cache_dir = "cachehere";
    EXPECT_EQ(output_key(a), output_key(b));
    b.seed = 2;
    EXPECT_NE(output_key(a), output_key(b));
    EXPECT_EQ(output_key(a).rfind("pmf_", 0), 0U);
}

TEST(Manifest, PPathIsUsedWhenPIsEmpty) {
    const auto mf = parse_manifest_text("kind = distances\nn = 64, 512\np_scale = 8\np_exponent = -0.5\np_cap = 0.4\n");
    EXPECT_DOUBLE_EQ(p_values(mf, 64).front(), 0.4);
    EXPECT_DOUBLE_EQ(p_values(mf, 512).front(), 8 / std::sqrt(512.0));
}

TEST(Manifest, ValidateRejectsGammaOutsideRange) {
    auto mf = parse_manifest_text("kind = charfn\nn = 64\np = 0.3\ngamma = 0.2\n");
    try {
        validate(mf);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
        EXPECT_NE(std::string(e.what()).find("gamma = 0.2 outside (0, 1/8)"), std::string::npos);
    }
}

TEST(Manifest, KindNames) {
    EXPECT_EQ(to_string(ExperimentKind::toolbox_verify), "toolbox-verify");
    EXPECT_EQ(to_string(ExperimentKind::cover_check), "cover-check");
    EXPECT_EQ(parse_kind("decouple"), ExperimentKind::decoupling);
    EXPECT_EQ(parse_kind("verify"), ExperimentKind::toolbox_verify);
    EXPECT_EQ(parse_kind("cover"), ExperimentKind::cover_check);
}

TEST(ExitCodes, FollowTheContract) {
    EXPECT_EQ(exit_code(ErrorKind::invalid_parameter), 2);
    EXPECT_EQ(exit_code(ErrorKind::domain), 3);
    EXPECT_EQ(exit_code(ErrorKind::numeric), 4);
}

TEST_F(HarnessTest, PmfSmallNIsExactOracle) {
    const auto r = run(manifest("kind = pmf\nn = 6\np = 0.3\n"));
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const auto summary = nlohmann::json::parse(slurp(r.directory / "summary.json"));
    EXPECT_EQ(summary["source"], "exact-oracle");
    const std::string csv = slurp(r.directory / "results.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,p,k,prob,ci,source");
    EXPECT_TRUE(fs::exists(r.directory / "manifest.echo"));
    EXPECT_TRUE(fs::exists(root_ / "out" / "cache" / "triangle_table_n6.csv"));
}

TEST_F(HarnessTest, ManifestEchoRerunsIdentically) {
    const auto first = run(manifest("kind = pmf\nn = 12\np = 0.3\nsamples = 20000\nseed = 4\n"));
    ASSERT_EQ(first.exit_code, 0) << first.message;
    auto echo = parse_manifest_text(slurp(first.directory / "manifest.echo"));
    echo.out = (root_ / "again").string();
    const auto second = run(echo);
    ASSERT_EQ(second.exit_code, 0) << second.message;
    EXPECT_EQ(first.directory.filename(), second.directory.filename());
    EXPECT_EQ(slurp(first.directory / "results.csv"), slurp(second.directory / "results.csv"));
}

TEST_F(HarnessTest, CharfnRerunIsByteIdenticalAcrossWorkers) {
    auto mf = manifest("kind = charfn\nn = 40\np = 0.3\ngamma = 0.05\nK = 2\nt = -2, -0.5, 0, 0.5, 2, 30\n"
                       "samples = 3000\nseed = 8\nworkers = 1\n");
    const auto a = run(mf);
    ASSERT_EQ(a.exit_code, 0) << a.message;
    const std::string first = slurp(a.directory / "results.csv");
    mf.workers = 3;
    const auto b = run(mf);
    ASSERT_EQ(b.exit_code, 0) << b.message;
    EXPECT_EQ(first, slurp(b.directory / "results.csv"));
    EXPECT_EQ(first.substr(0, first.find('\n')), "t,re,im,modulus,ci,regime,bound");
}

TEST_F(HarnessTest, GammaOutsideRangeExitsTwoAndLeavesNothing) {
    const auto r = run(manifest("kind = charfn\nn = 64\np = 0.3\ngamma = 0.2\n"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.message.find("gamma"), std::string::npos);
    EXPECT_TRUE(!fs::exists(root_ / "out") || fs::is_empty(root_ / "out"));
}

TEST_F(HarnessTest, DomainErrorExitsThreeAndRemovesPartialOutput) {
    const auto r = run(manifest("kind = decoupling\nn = 400\nm = 10\np = 0.2\ntrials = 5\n"));
    EXPECT_EQ(r.exit_code, 3);
    if (fs::exists(root_ / "out"))
        for (const auto& entry : fs::directory_iterator(root_ / "out"))
            EXPECT_EQ(entry.path().filename(), "cache") << entry.path();
}

TEST_F(HarnessTest, DecouplingWritesTrialCsvAndChecks) {
    const auto r = run(manifest("kind = decoupling\nn = 6\nm = 2\np = 0.5\nt = 0.5, 1\ntrials = 0\n"));
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const std::string checks = slurp(r.directory / "checks.csv");
    EXPECT_EQ(checks.substr(0, checks.find('\n')), "n,m,p,t,lhs,lhs_ci,rhs,rhs_ci,margin,combined_ci,method");
    EXPECT_NE(checks.find(",exact"), std::string::npos);
    const std::string csv = slurp(r.directory / "results.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,m,|A|,|A'|,ratio,pass");
}

TEST_F(HarnessTest, DistancesWritesJsonPerReport) {
    const auto r = run(manifest("kind = distances\nn = 6\np = 0.3\nepsilon = 0.1\n"));
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const auto j = nlohmann::json::parse(slurp(r.directory / "distance_n6_p0.3_eps0.1.json"));
    EXPECT_NEAR(j["sup_lattice"].get<double>(), 0.25438972920980524, 1e-9);
    EXPECT_EQ(j.size(), 9U);
}

TEST_F(HarnessTest, CoverCheckRuns) {
    const auto r = run(manifest("kind = cover\nn = 10000000\np = 0.2\ngamma = 0.05\n"));
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const auto j = nlohmann::json::parse(slurp(r.directory / "summary.json"));
    EXPECT_EQ(j["kind"], "cover-check");
    EXPECT_TRUE(j["cells"][0]["overlaps_hold"].get<bool>());
}

TEST_F(HarnessTest, CacheRoundTrip) {
    const auto table = build_table(5);
    cache(table, root_);
    EXPECT_EQ(load_cache(5, root_), table);
}

TEST_F(HarnessTest, MissingCacheBuildsOnDemand) {
    const auto start = std::chrono::steady_clock::now();
    const auto got = cached_table(4, root_);
    EXPECT_TRUE(got.rebuilt);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
    EXPECT_TRUE(fs::exists(cache_path(root_, 4)));
    EXPECT_FALSE(cached_table(4, root_).rebuilt);
    try {
        (void)load_cache(5, root_);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resource_limit);
    }
}

TEST_F(HarnessTest, TamperedCacheIsRebuilt) {
    cache(build_table(5), root_);
    const auto path = cache_path(root_, 5);
    std::string text = slurp(path);
    const auto pos = text.find("\n0,0,1\n");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 7, "\n0,0,2\n");
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
    try {
        (void)load_cache(5, root_);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::checksum);
    }
    const auto got = cached_table(5, root_);
    EXPECT_TRUE(got.rebuilt);
    EXPECT_EQ(got.table, build_table(5));
    EXPECT_EQ(load_cache(5, root_), build_table(5));
}
