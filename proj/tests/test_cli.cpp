#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "soalens/cli.hpp"
#include "soalens/frontend.hpp"

using namespace soalens;
namespace fx = soalens::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "soalens");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("soalens_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& content) const {
        std::ofstream(path_ / name) << content;
        return (path_ / name).string();
    }
    [[nodiscard]] std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"transform"}).code, kExitUsage);
    EXPECT_EQ(cli({"transform", "x.minic", "--dialect", "fortran"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, TransformToStdoutAndFile) {
    Outcome o = cli({"transform", fx::source_path("corpus/drift.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(o.out, fx::read_source("tests/golden/drift_transformed.minic"));
    TempDir dir;
    Outcome f = cli({"transform", fx::source_path("corpus/drift.minic"), "-o", dir.path("out.minic")});
    ASSERT_EQ(f.code, kExitOk) << f.err;
    EXPECT_EQ(read_text_file(dir.path("out.minic")), o.out);
}

TEST(Cli, TransformC99) {
    Outcome o = cli({"transform", "--dialect", "c99", fx::source_path("corpus/kick1.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(contains(o.out, "#include <stdlib.h>"));
    EXPECT_TRUE(contains(o.out, "malloc("));
    EXPECT_TRUE(contains(o.out, "free(vel0_soa0_t);"));
}

TEST(Cli, NoConversionLeavesLoopAlone) {
    Outcome o = cli({"transform", "--no-conversion", fx::source_path("corpus/drift.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_FALSE(contains(o.out, "_soa"));
    EXPECT_FALSE(contains(o.out, "soa_conversion"));
}

TEST(Cli, DiagnosticsExitOne) {
    TempDir dir;
    std::string bad = fx::kSmallDrift;
    bad.replace(bad.find("[[clang::soa_conversion_target_size(size)]]"), 43, "");
    Outcome o = cli({"transform", dir.file("bad.minic", bad)});
    EXPECT_EQ(o.code, kExitDiagnostics);
    EXPECT_TRUE(contains(o.err, "bad.minic:")) << o.err;
    Outcome p = cli({"transform", dir.file("syntax.minic", "void f( {")});
    EXPECT_EQ(p.code, kExitDiagnostics);
}

TEST(Cli, MissingFileExitThree) {
    Outcome o = cli({"transform", "/nonexistent/x.minic"});
    EXPECT_EQ(o.code, kExitIo);
    EXPECT_FALSE(o.err.empty());
}

TEST(Cli, StripRemovesAnnotations) {
    Outcome o = cli({"strip", fx::source_path("corpus/force.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_FALSE(contains(o.out, "soa_conversion"));
    EXPECT_TRUE(contains(o.out, "void force("));
}

TEST(Cli, CheckCorpusDirectory) {
    Outcome o = cli({"check", fx::source_path("corpus"), "--seeds", "0..3", "--n", "0,5"});
    EXPECT_EQ(o.code, kExitOk) << o.out << o.err;
    EXPECT_TRUE(contains(o.out, "all pass")) << o.out;
    EXPECT_FALSE(contains(o.out, "# generated")) << o.out;
}

TEST(Cli, CheckBundled) {
    Outcome o = cli({"check", "--seeds", "0,1", "--n", "2"});
    EXPECT_EQ(o.code, kExitOk) << o.out << o.err;
    EXPECT_TRUE(contains(o.out, "all pass (20 checks)")) << o.out;
}

TEST(Cli, CheckAgainstBrokenTransformExitsTwo) {
    TempDir dir;
    Outcome t = cli({"transform", fx::source_path("corpus/drift.minic")});
    std::string text = t.out;
    const std::string line = "        particles[soa0_i].pos[0] = pos0_soa0_t[soa0_i];\n";
    text.erase(text.find(line), line.size());
    Outcome o = cli({"check", fx::source_path("corpus/drift.minic"), "--against", dir.file("broken.minic", text),
                     "--seeds", "0", "--n", "4"});
    EXPECT_EQ(o.code, kExitVerification) << o.out << o.err;
    EXPECT_TRUE(contains(o.out + o.err, "pos[0]")) << o.out << o.err;
}

TEST(Cli, RunPrintsStore) {
    Outcome o = cli({"run", fx::source_path("corpus/drift.minic"), "--entry", "drift", "--n", "2", "--print-store"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(contains(o.out, "particles[1].pos[2] = f64:")) << o.out;
}

TEST(Cli, RunRuntimeErrorExitsTwo) {
    TempDir dir;
    std::string f = dir.file("div.minic", "long main() { long z = 0; return 1 / z; }");
    EXPECT_EQ(cli({"run", f, "--entry", "main"}).code, kExitVerification);
}

TEST(Cli, TimestampsOnlyWhenAsked) {
    Outcome plain = cli({"check", "--seeds", "0", "--n", "1"});
    Outcome stamped = cli({"check", "--seeds", "0", "--n", "1", "--timestamps"});
    ASSERT_EQ(plain.code, kExitOk) << plain.err;
    ASSERT_EQ(stamped.code, kExitOk) << stamped.err;
    EXPECT_EQ(plain.out, cli({"check", "--seeds", "0", "--n", "1"}).out);
    EXPECT_FALSE(contains(plain.out, "# generated "));
    EXPECT_EQ(stamped.out.rfind("# generated ", 0), 0u) << stamped.out;
}

TEST(Cli, InspectShowsLeafTable) {
    Outcome o = cli({"inspect", fx::source_path("corpus/drift.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(contains(o.out, "256")) << o.out;
    EXPECT_TRUE(contains(o.out, "pos.[0]")) << o.out;
}

TEST(Cli, ConfigFile) {
    TempDir dir;
    std::string cfg = dir.file("c.ini", "[transform]\ndialect=c99\n");
    Outcome o = cli({"--config", cfg, "transform", fx::source_path("corpus/drift.minic")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(contains(o.out, "malloc(")) << o.out.substr(0, 200);
}

TEST(Cli, BenchSmall) {
    TempDir dir;
    Outcome o = cli({"bench", "--n", "16", "--samples", "2", "--kernels", "drift", "--modes", "soa-views", "--csv",
                     dir.path("b.csv")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(contains(o.out, "16 particles (2 samples)")) << o.out;
    EXPECT_TRUE(contains(read_text_file(dir.path("b.csv")), "drift,soa-views,16,2,"));
}
