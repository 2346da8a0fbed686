#include "fracns/cli.hpp"
#include "fracns/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw fracns::ParseError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator and verification suite for time-fractional stochastic Navier-Stokes "
                 "equations driven by Hermite noise"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the suite named in a config file");
    std::string config_path, out_dir, threads;
    std::uint64_t seed = 0;
    run->add_option("--config", config_path, "INI configuration")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override [experiment] seed");
    run->add_option("--threads", threads, "override [experiment] threads (integer or auto)");
    run->add_option("--out", out_dir, "override [experiment] output_dir");

    auto* gate = app.add_subcommand("gate", "check the well-posedness inequalities");
    double alpha = 0, nu = 0, hurst = 0;
    gate->add_option("--alpha", alpha, "fractional order")->required();
    gate->add_option("--nu", nu, "Sobolev index")->required();
    gate->add_option("--hurst", hurst, "Hurst parameter")->required();

    app.add_subcommand("formats", "print config keys and CSV/JSON schemas");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gate) {
            const auto g = fracns::solver::param_gate(alpha, nu, hurst);
            std::cout << fracns::cli::gate_text(alpha, nu, hurst);
            return g.accepted() ? 0 : 1;
        }
        if (app.got_subcommand("formats")) {
            std::cout << fracns::cli::formats_text();
            return 0;
        }
        std::string text = read_file(config_path);
        auto cfg = fracns::cli::parse_config(text);
        if (*seed_opt) cfg.seed = seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!threads.empty()) {
            if (threads == "auto") {
                cfg.threads = 0;
            } else {
                const int t = std::stoi(threads);
                if (t < 1) throw fracns::ParseError("--threads must be >= 1 or auto");
                cfg.threads = static_cast<unsigned>(t);
            }
        }
        const auto rep = fracns::cli::run_suite(cfg);
        for (const auto& c : rep.json["checks"]) {
            std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
                      << "  estimate=" << c["estimate"].dump() << " theory=" << c["theory"].dump() << "\n";
        }
        std::cout << rep.suite << ": " << (rep.pass ? "PASS" : "FAIL") << " ("
                  << rep.json["wall_clock_seconds"].get<double>() << " s), report in " << cfg.output_dir
                  << "/" << rep.suite << "_report.json\n";
        return rep.pass ? 0 : 1;
    } catch (const fracns::GateError& e) {
        std::cerr << "GateError: " << e.what() << "\n";
        return 2;
    } catch (const fracns::ParseError& e) {
        std::cerr << "ParseError: " << e.what() << "\n";
        return 2;
    } catch (const fracns::InsufficientReplicates& e) {
        std::cerr << "InsufficientReplicates: " << e.what() << " (minimum " << e.minimum() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
