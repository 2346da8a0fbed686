#include "fracns/cli.hpp"
#include "fracns/errors.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fracns;
using namespace fracns::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string strip_wall_clock(const std::string& json) {
    auto j = nlohmann::ordered_json::parse(json);
    j.erase("wall_clock_seconds");
    return j.dump();
}

}  // namespace

TEST_CASE("minimal zk_scaling config parses and is gated") {
    const auto cfg = parse_config(
        "# reference parameter set\n"
        "[experiment]\n"
        "suite = zk_scaling\n"
        "seed = 7\n"
        "[params]\n"
        "alpha = 0.9\n"
        "nu = 0.1\n"
        "hurst = 0.8\n");
    CHECK(cfg.suite == Suite::zk_scaling);
    CHECK(cfg.seed == 7);
    CHECK(cfg.params.alpha == 0.9);
    CHECK(cfg.model.c == 2.0);
    CHECK(cfg.model.J == 64);
    const auto echo = cfg.echo();
    CHECK(echo["experiment"]["suite"] == "zk_scaling");
    CHECK(echo["params"]["hurst"] == 0.8);
}

TEST_CASE("range violations are parse errors with line numbers") {
    try {
        parse_config("[experiment]\nsuite = zk_scaling\n[params]\nalpha = 1.2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("every problem is reported at once") {
    try {
        parse_config(
            "[experiment]\n"
            "suite = zk_scaling\n"
            "typo = 1\n"
            "[params]\n"
            "alpha = 1.2\n"
            "alpha = 0.5\n"
            "k = seven\n"
            "[nowhere]\n"
            "x = 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string m = e.what();
        for (const char* s : {"line 3", "line 5", "line 6", "line 7", "line 8"}) {
            CHECK_MESSAGE(m.find(s) != std::string::npos, s);
        }
    }
    CHECK_THROWS_AS(parse_config("[params]\nalpha = 0.5\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[experiment]\nsuite = nope\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[experiment]\nsuite = solve\n[solver]\nT = 0.1\ndt = 0.003\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[experiment]\nsuite = nclt\n[nclt]\nN_values = 256, 64\n"), ParseError);
    const auto autot = parse_config("[experiment]\nsuite = mlf_check\nthreads = auto\n");
    CHECK(autot.threads == 0);
}

TEST_CASE("gate failures name the violated inequality") {
    try {
        parse_config("[experiment]\nsuite = solve\n[params]\nalpha = 0.8\nnu = 0.3\nhurst = 0.9\n");
        FAIL("expected GateError");
    } catch (const GateError& e) {
        CHECK(std::string(e.what()).find("alpha*(nu+1) = 1.04 >= 1") != std::string::npos);
    }
    // the same triple is fine for the linear suites
    CHECK_NOTHROW(parse_config("[experiment]\nsuite = zk_scaling\n[params]\nalpha = 0.8\nnu = 0.3\nhurst = 0.9\n"));
    CHECK_THROWS_AS(
        parse_config("[experiment]\nsuite = zk_scaling\n[params]\nalpha = 0.5\nnu = 0.5\nhurst = 0.6\n"),
        GateError);
    const std::string text = gate_text(0.8, 0.3, 0.9);
    CHECK(text.find("1.04") != std::string::npos);
    CHECK(text.find("rejected") != std::string::npos);
}

TEST_CASE("too few replicates surface with the minimum") {
    auto cfg = parse_config("[experiment]\nsuite = zk_scaling\n[convolution]\nreplicates = 10\n");
    try {
        run_suite(cfg, false);
        FAIL("expected InsufficientReplicates");
    } catch (const InsufficientReplicates& e) {
        CHECK(e.minimum() == 100);
    }
}

TEST_CASE("reruns give identical reports apart from the wall clock") {
    const auto dir = std::filesystem::temp_directory_path() / "fracns_cli_test";
    std::filesystem::remove_all(dir);
    const std::string text =
        "[experiment]\nsuite = zk_scaling\nseed = 11\noutput_dir = " + dir.string() +
        "\n[convolution]\nreplicates = 200\nN_noise = 256\n";
    const auto cfg = parse_config(text);
    run_suite(cfg);
    const std::string first = slurp(dir / "zk_scaling_report.json");
    const std::string first_csv = slurp(dir / "zk_scaling.csv");
    run_suite(cfg);
    const std::string second = slurp(dir / "zk_scaling_report.json");
    CHECK(strip_wall_clock(first) == strip_wall_clock(second));
    CHECK(first_csv == slurp(dir / "zk_scaling.csv"));
    CHECK(first_csv.rfind("t,mean_sq_norm,ci_lo,ci_hi\n", 0) == 0);

    const auto j = nlohmann::ordered_json::parse(first);
    CHECK(j["schema_version"] == 1);
    CHECK(j["suite"] == "zk_scaling");
    CHECK(j["seed"] == 11);
    CHECK(j["checks"][0]["formula"] == "alpha*(1-nu)+2H-2");
    CHECK(j.contains("wall_clock_seconds"));
    // the echoed config reproduces the run
    std::ostringstream ini;
    for (const auto& [sec, keys] : j["config"].items()) {
        ini << "[" << sec << "]\n";
        for (const auto& [k, v] : keys.items()) {
            std::string val;
            if (v.is_string()) val = v.get<std::string>();
            else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) val += (i ? "," : "") + v[i].dump();
            } else val = v.dump();
            ini << k << " = " << val << "\n";
        }
    }
    const auto again = parse_config(ini.str());
    CHECK(again.echo() == cfg.echo());
    std::filesystem::remove_all(dir);
}

TEST_CASE("mlf_check passes quickly") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = run_suite(parse_config("[experiment]\nsuite = mlf_check\n"), false);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(rep.pass);
    CHECK(secs < 10.0);
    CHECK(rep.json["checks"].size() == 18);
}

TEST_CASE("format reference lists every section") {
    const std::string f = formats_text();
    for (const char* s : {"[experiment]", "[params]", "[model]", "[noise]", "[hs]", "[convolution]", "[solver]",
                          "[nclt]", "schema_version"}) {
        CHECK_MESSAGE(f.find(s) != std::string::npos, s);
    }
    for (Suite s : all_suites()) CHECK(parse_suite(suite_name(s)) == s);
}

TEST_CASE("shipped configs parse") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(FRACNS_CONFIG_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        ++seen;
        const std::string text = slurp(entry.path());
        if (entry.path().stem() == "bad_gate") {
            CHECK_THROWS_AS(parse_config(text), GateError);
        } else {
            CHECK_NOTHROW(parse_config(text));
            CHECK(suite_name(parse_config(text).suite) == entry.path().stem().string());
        }
    }
    CHECK(seen == 10);
}
