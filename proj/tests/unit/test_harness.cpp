#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qfep/error.hpp"
#include "qfep/harness.hpp"

using namespace qfep;

namespace {

RunConfig config(const std::string &scenario, const std::string &text = "") {
    RunConfig c;
    c.scenario = scenario;
    c.seed = 17;
    c.config_text = text;
    c.config_dir = QFEP_FIXTURES;
    c.params = parse_config_text(text, scenario);
    return c;
}

}  // namespace

TEST_CASE("registry") {
    CHECK(scenario_names() ==
          std::vector<std::string>{"asymptotic", "chsh", "contextuality", "fep-align", "leggett-garg", "memory-cycle"});
    try {
        (void)run_in_memory(config("bell"));
        FAIL("expected validation-error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::validation_error);
        CHECK(std::string(e.what()).find("leggett-garg") != std::string::npos);
    }
}

TEST_CASE("config parsing") {
    const auto kv = parse_config_text("seed_note = x\n[chsh]\nshots = 10\n[leggett-garg]\nomega = 2\n", "chsh");
    CHECK(kv.at("shots") == "10");
    CHECK(kv.count("omega") == 0);
    CHECK(kv.at("seed_note") == "x");
    try {
        (void)parse_config_text("[chsh\nshots=1\n", "chsh");
        FAIL("expected parse-error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::parse_error);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("validation lists every violation") {
    try {
        (void)run_in_memory(config("memory-cycle", "[memory-cycle]\nticks = -1\nflip_probability = 2\ncolour = red\n"));
        FAIL("expected validation-error");
    } catch (const Error &e) {
        const std::string w = e.what();
        CHECK(e.kind() == ErrorKind::validation_error);
        CHECK(w.find("ticks") != std::string::npos);
        CHECK(w.find("flip_probability") != std::string::npos);
        CHECK(w.find("colour") != std::string::npos);
    }
}

TEST_CASE("chsh report") {
    const RunOutput out = run_in_memory(config("chsh"));
    const auto j = nlohmann::json::parse(out.files.at("report.json"));
    CHECK(j["S"].get<double>() == doctest::Approx(2.8284271247).epsilon(1e-9));
    CHECK(j["joint_feasible"] == false);
    const auto m = nlohmann::json::parse(out.files.at("manifest.json"));
    CHECK(m["files"]["report.json"] == sha256_hex(out.files.at("report.json")));
    CHECK(m["seed"] == 17);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("context ingestion") {
    const std::string dir = QFEP_FIXTURES;
    CHECK(ingest_contexts(dir + "/two_contexts.csv").contexts.size() == 2);
    try {
        (void)ingest_contexts(dir + "/unnormalized.csv");
        FAIL("expected validation-error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::validation_error);
        CHECK(std::string(e.what()).find("XY") != std::string::npos);
    }
    try {
        (void)ingest_contexts(dir + "/malformed.csv");
        FAIL("expected parse-error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::parse_error);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    const RunOutput out = run_in_memory(config("contextuality", "[contextuality]\ninput = pr_box.csv\n"));
    const auto j = nlohmann::json::parse(out.files.at("report.json"));
    CHECK(j["feasible"] == false);
}

TEST_CASE("determinism of the fast scenarios") {
    for (const char *s : {"chsh", "leggett-garg", "contextuality", "memory-cycle"}) {
        RunConfig c = config(s);
        c.shots = 500;
        CHECK(run_in_memory(c).files == run_in_memory(c).files);
    }
}

TEST_CASE("files are written") {
    RunConfig c = config("leggett-garg");
    c.out_dir = std::filesystem::temp_directory_path() / "qfep_harness_test";
    std::filesystem::remove_all(c.out_dir);
    const RunOutput out = run(c);
    for (const auto &[name, body] : out.files) {
        std::ifstream in(c.out_dir / name);
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str() == body);
    }
    std::filesystem::remove_all(c.out_dir);
}
