// Drives the built command-line tool end to end.

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code;
    std::string out;
};

CliRun run(const std::string& args) {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("unirigid_cli_" + std::to_string(::getpid()) + "_" +
                                                     std::to_string(counter++) + ".txt");
    const std::string cmd = std::string("\"") + UNIRIGID_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    const std::string text = unirigid::detail::read_file(out);
    fs::remove(out);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

std::string fx(const std::string& name) { return "\"" + support::fixture(name) + "\""; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("unirigid_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Cli, AnalyzeExitCodes) {
    const CliRun lad = run("analyze " + fx("ladder.json"));
    EXPECT_EQ(lad.code, 10) << lad.out;
    EXPECT_NE(lad.out.find("ranks [2,1]"), std::string::npos);
    EXPECT_EQ(run("analyze " + fx("triangle.json")).code, 0);
    const CliRun sq = run("analyze " + fx("square4cycle.json"));
    EXPECT_EQ(sq.code, 20);
    EXPECT_NE(sq.out.find("final affine dim = 3"), std::string::npos);
    EXPECT_EQ(run("analyze " + fx("ladder.json") + " --mode exact1d").code, 30);
}

TEST(Cli, VerifyExitCodes) {
    EXPECT_EQ(run("verify " + fx("ladder.json") + " " + fx("ladder.cert.json")).code, 10);
    EXPECT_EQ(run("verify " + fx("ladder_plus_diagonal.json") + " " + fx("ladder.cert.json")).code, 0);
    const CliRun bad = run("verify " + fx("ladder.json") + " " + fx("ladder_negated.cert.json"));
    EXPECT_EQ(bad.code, 20);
    EXPECT_NE(bad.out.find("NSD at level 1"), std::string::npos);
}

TEST(Cli, ConicAndStressSpace) {
    const CliRun c = run("conic " + fx("ladder.json"));
    EXPECT_EQ(c.code, 0);
    EXPECT_EQ(c.out, "[[0,1],[1,0]]\n");
    EXPECT_EQ(run("conic " + fx("triangle.json")).out, "none\n");
    const CliRun s = run("stress-space " + fx("k4square.json"));
    EXPECT_EQ(s.code, 0);
    EXPECT_EQ(s.out.rfind("dimension 1\n", 0), 0u);
}

TEST(Cli, TransformIdentityAndExceptionalHyperplane) {
    const fs::path f = scratch("t.json");
    const fs::path c = scratch("t.cert.json");
    const CliRun r = run("transform " + fx("ladder.json") + " " + fx("ladder.cert.json") +
                      " --map \"[[1,0,0],[0,1,0],[0,0,1]]\" --out-framework \"" + f.string() + "\" --out-cert \"" +
                      c.string() + "\"");
    EXPECT_EQ(r.code, 0) << r.out;
    // Same document up to float formatting.
    EXPECT_EQ(unirigid::Json::parse(unirigid::detail::read_file(f)),
              unirigid::Json::parse(unirigid::detail::read_file(support::fixture("ladder.json"))));
    EXPECT_EQ(run("verify " + fx("ladder.json") + " \"" + c.string() + "\"").code, 10);

    const CliRun x = run("transform " + fx("ladder.json") + " " + fx("ladder.cert.json") +
                      " --map \"[[0,0,1],[0,1,0],[1,0,0]]\"");
    EXPECT_EQ(x.code, 3) << x.out;
}

TEST(Cli, InputErrorsExitTwo) {
    const fs::path bad = scratch("bad.json");
    unirigid::write_file(bad, "{\"dim\": 2,\n \"vertices\": [[0,0],[1,0]]\n \"members\": []}");
    const CliRun r = run("analyze \"" + bad.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find(":3:10: JSON syntax error"), std::string::npos) << r.out;
    EXPECT_EQ(run("analyze " + fx("no_such_file.json")).code, 2);
    EXPECT_EQ(run("analyze " + fx("ladder.json") + " --mode bogus").code, 2);
    EXPECT_EQ(run("analyze " + fx("ladder.json") + " --mode user").code, 2);
}

TEST(Cli, ReportsAreReproducible) {
    const fs::path a = scratch("a.json");
    const fs::path b = scratch("b.json");
    ASSERT_EQ(run("analyze " + fx("fourpole.json") + " --seed 7 --json-out \"" + a.string() + "\"").code, 10);
    ASSERT_EQ(run("analyze " + fx("fourpole.json") + " --seed 7 --json-out \"" + b.string() + "\"").code, 10);
    EXPECT_EQ(unirigid::detail::read_file(a), unirigid::detail::read_file(b));
    EXPECT_EQ(unirigid::detail::read_file(scratch("a.cert.json")), unirigid::detail::read_file(scratch("b.cert.json")));
    const unirigid::Json j = unirigid::Json::parse(unirigid::detail::read_file(a));
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["mode"], "random");
}

TEST(Cli, AnalyzeThenVerifyRoundTrips) {
    for (const char* name : {"ladder", "ladder_plus_diagonal", "triangle", "k4square", "pole3", "fourpole",
                             "fourpole_extended", "onepole", "hidden_stress"}) {
        const fs::path cert = scratch(std::string(name) + ".found.cert.json");
        const CliRun a = run("analyze " + fx(std::string(name) + ".json") + " --cert-out \"" + cert.string() + "\"");
        const CliRun v = run("verify " + fx(std::string(name) + ".json") + " \"" + cert.string() + "\"");
        EXPECT_EQ(a.code, v.code) << name << "\n" << a.out << v.out;
        const CliRun u = run("analyze " + fx(std::string(name) + ".json") + " --mode user --cert \"" + cert.string() + "\"");
        EXPECT_EQ(u.code, v.code) << name << "\n" << u.out;
    }
}
