// SPDX-License-Identifier: Apache-2.0
#include "dynmod/io.hpp"
#include "dynmod/patterns.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct result {
    int code;
    std::string output;
};

struct scratch_dir {
    fs::path path;
    scratch_dir() : path(fs::temp_directory_path() / ("dynmod_cli_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~scratch_dir() { fs::remove_all(path); }
} const scratch_root;

const fs::path& scratch() { return scratch_root.path; }

result run(const std::string& args, const std::string& env = "")
{
    const fs::path log = scratch() / "out.txt";
    const std::string cmd = env + " \"" + DYNMOD_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, dynmod::io::read_text_file(log)};
}

} // namespace

TEST_CASE("help and usage errors")
{
    CHECK(run("--help").code == 0);
    CHECK(run("").code != 0);
    CHECK(run("frobnicate").code != 0);
    CHECK(run("thresholds --formats bpsk").code != 0);
}

TEST_CASE("thresholds subcommand")
{
    const auto out = scratch() / "cat.json";
    const auto r = run("thresholds --formats bpsk,qpsk,qam16 --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(dynmod::io::read_text_file(out));
    CHECK(doc["entries"].size() == 3);
    CHECK(doc["entries"][1]["phase_threshold_deg"].get<double>() == doctest::Approx(45.0).epsilon(1e-5));

    const auto bad = run("thresholds --formats qam32 --out \"" + out.string() + "\"");
    CHECK(bad.code == 1);
    CHECK(bad.output.find("supported") != std::string::npos);
}

TEST_CASE("pattern subcommand")
{
    const auto out = scratch() / "pattern.csv";
    const auto r = run("pattern --dipole-length 1.5 --feed-offset 0.5 --step 1 --segments 1024 --out \"" +
                       out.string() + "\"");
    REQUIRE(r.code == 0);
    const auto ant = dynmod::load_pattern_csv(out);
    CHECK(ant.grid().size() == 181);
    CHECK(std::abs(ant.state1().gain()[90] - ant.state2().gain()[90]) < 1e-9);

    CHECK(run("pattern --dipole-length 1.5 --feed-offset 0 --out \"" + out.string() + "\"").code == 1);
    CHECK(run("pattern --dipole-length 1.5 --feed-offset 0.9 --out \"" + out.string() + "\"").code == 1);
}

TEST_CASE("run subcommand")
{
    const auto dir = scratch() / "scn";
    fs::create_directories(dir);
    dynmod::io::write_text_file(dir / "s.json", R"({
  "name": "cli",
  "broadside_deg": 90,
  "antenna": {"kind": "amplitude", "slope_db_per_deg": 0.1, "center_deg": 90,
              "grid": {"start_deg": 0, "stop_deg": 180, "step_deg": 2}},
  "formats": ["qpsk", "qam16"],
  "channel": {"snr_db": 20, "noise_seed": 4},
  "n_symbols": 1000
})");
    const auto r = run("run \"" + (dir / "s.json").string() + "\"", "DYNMOD_LOG=info");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("secure region") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "cli_summary.json"));
    CHECK(fs::exists(dir / "out" / "cli_qam16_sweep.csv"));

    dynmod::io::write_text_file(dir / "bad.json", "{\n  \"broadside_deg\": 90,\n  \"nope\": 1\n}\n");
    const auto bad = run("run \"" + (dir / "bad.json").string() + "\"");
    CHECK(bad.code == 1);
    CHECK(bad.output.find("bad.json:3") != std::string::npos);

    CHECK(run("run \"" + (dir / "missing.json").string() + "\"").code == 1);
}
