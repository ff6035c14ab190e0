#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status = -1;
    std::string out, err;
};

std::string cli_path() { return GROUPSLEUTH_CLI_PATH; }

CliResult run_cli(const testutil::TempDir& dir, const std::string& args) {
    std::string out_file = dir.file("cli_stdout.txt"), err_file = dir.file("cli_stderr.txt");
    std::string cmd = "\"" + cli_path() + "\" " + args + " >\"" + out_file + "\" 2>\"" + err_file + "\"";
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.status = rc == -1 ? -1 : WEXITSTATUS(rc);
    r.out = testutil::read_file(out_file);
    r.err = testutil::read_file(err_file);
    return r;
}

void write_tiny_config(const std::string& path) {
    testutil::write_file(path,
                         "# small deterministic end-to-end configuration\n"
                         "synth.n_fraud_groups = 3\n"
                         "synth.n_genuine_groups = 3\n"
                         "synth.group_size_min = 3\n"
                         "synth.group_size_max = 4\n"
                         "synth.n_windows = 4\n"
                         "cbow.dim = 16\n"
                         "cbow.epochs = 5\n"
                         "spatial.epochs = 40\n"
                         "temporal.epochs = 30\n"
                         "temporal.hidden = 16\n"
                         "gcn.epochs = 20\n"
                         "fc.epochs = 50\n"
                         "m_max = 8\n"
                         "seed = 5\n");
}

}  // namespace

TEST_CASE("run-all is byte-for-byte reproducible under a fixed seed") {
    testutil::TempDir dir("gs_test_cli_repro");
    write_tiny_config(dir.file("cfg.txt"));
    for (const char* run : {"a", "b"}) {
        auto r = run_cli(dir, std::string("run-all --run-dir \"") + dir.file(run) +
                                  "\" --config \"" + dir.file("cfg.txt") + "\"");
        INFO(r.err);
        REQUIRE(r.status == 0);
    }
    auto read = [&](const char* run, const char* rel) {
        return testutil::read_file((fs::path(dir.file(run)) / rel).string());
    };
    std::string va = read("a", "classify/verdicts.tsv");
    CHECK(!va.empty());
    CHECK(va == read("b", "classify/verdicts.tsv"));
    std::string ma = read("a", "eval/metrics.tsv");
    CHECK(!ma.empty());
    CHECK(ma == read("b", "eval/metrics.tsv"));
    // the lock is released after each invocation
    CHECK(!fs::exists(fs::path(dir.file("a")) / ".lock"));
}

TEST_CASE("ablation emits one row per configuration") {
    testutil::TempDir dir("gs_test_cli_ablate");
    write_tiny_config(dir.file("cfg.txt"));
    std::string rd = "--run-dir \"" + dir.file("run") + "\" --config \"" + dir.file("cfg.txt") + "\"";
    REQUIRE(run_cli(dir, "synth " + rd).status == 0);
    auto r = run_cli(dir, "ablate " + rd);
    INFO(r.err);
    REQUIRE(r.status == 0);
    auto table = testutil::read_file((fs::path(dir.file("run")) / "ablate/ablation.tsv").string());
    CHECK(table.find("#groupsleuth-metrics v1") == 0);
    CHECK(table.find("spatial\t") != std::string::npos);
    CHECK(table.find("spatial+temporal\t") != std::string::npos);
    CHECK(table.find("spatial+temporal+gcn\t") != std::string::npos);
    CHECK(table.find("full\t") != std::string::npos);
}

TEST_CASE("stages demand their upstream artifacts by name") {
    testutil::TempDir dir("gs_test_cli_missing");
    std::string rd = "--run-dir \"" + dir.file("run") + "\"";
    auto r = run_cli(dir, "embed " + rd);
    CHECK(r.status == 1);
    CHECK(r.err.find("error: missing artifact: corpus (run synth)") != std::string::npos);

    // a full run, then knock out the gcn representations
    write_tiny_config(dir.file("cfg.txt"));
    std::string cfg = rd + " --config \"" + dir.file("cfg.txt") + "\"";
    REQUIRE(run_cli(dir, "run-all " + cfg).status == 0);
    fs::remove(fs::path(dir.file("run")) / "gcn/refined_reps.tsv");
    auto r2 = run_cli(dir, "classify " + cfg);
    CHECK(r2.status == 1);
    CHECK(r2.err.find("missing artifact: refined reps (run gcn-refine)") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected with the valid key list") {
    testutil::TempDir dir("gs_test_cli_badkey");
    testutil::write_file(dir.file("bad.txt"), "synth.n_windowz = 4\n");
    auto r = run_cli(dir, "synth --run-dir \"" + dir.file("run") + "\" --config \"" +
                              dir.file("bad.txt") + "\"");
    CHECK(r.status == 1);
    CHECK(r.err.find("unknown config key \"synth.n_windowz\"") != std::string::npos);
    CHECK(r.err.find("valid keys:") != std::string::npos);
}

TEST_CASE("a stale lock blocks the run directory") {
    testutil::TempDir dir("gs_test_cli_lock");
    fs::create_directories(dir.file("run"));
    testutil::write_file((fs::path(dir.file("run")) / ".lock").string(), "");
    auto r = run_cli(dir, "synth --run-dir \"" + dir.file("run") + "\"");
    CHECK(r.status == 1);
    CHECK(r.err.find("run directory is locked by another invocation") != std::string::npos);
}
