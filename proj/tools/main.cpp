// swflow command-line driver.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swflow/cli.hpp"

namespace {

void apply_thread_cap() {
    const char* env = std::getenv("SWFLOW_THREADS");
    if (!env || !*env) return;
    try {
        const int n = std::stoi(env);
        if (n > 0) swflow::set_worker_threads(n);
    } catch (const std::exception&) {
        std::cerr << "ignoring malformed SWFLOW_THREADS=" << env << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice Seiberg-Witten functional toolkit"};
    app.footer(
        "Commands: check-identities gradcheck energy minimize saddle enumerate homotopy convergence-study\n"
        "Exit codes: 0 ok, 2 configuration error, 3 numeric abort (sector change, stagnation,\n"
        "            Poisson failure), 4 non-convergence or diagnostic outside tolerance\n"
        "Environment: SWFLOW_THREADS caps the worker thread count");

    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("command", command, "command to run")->required()->check(CLI::IsMember(swflow::command_names()));
    app.add_option("--config", config_path, "JSON experiment config")->required();
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << swflow::error_json("usage", e.what()).dump() << "\n";
        return swflow::kExitConfig;
    }

    apply_thread_cap();

    swflow::ExperimentConfig cfg;
    try {
        nlohmann::json j;
        {
            std::ifstream f(config_path);
            if (!f) throw swflow::ConfigError("cannot open config " + config_path);
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw swflow::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
        }
        if (!j.is_object()) throw swflow::ConfigError("config must be a JSON object");
        if (j.contains("command") && j["command"] != command)
            throw swflow::ConfigError("config command '" + j["command"].dump() + "' does not match '" + command + "'");
        j["command"] = command;
        if (*seed_opt) j["seed"] = seed;
        if (!out_dir.empty()) j["output_dir"] = out_dir;
        const std::filesystem::path p(config_path);
        cfg = swflow::parse_config(j, p.parent_path().empty() ? std::filesystem::path(".") : p.parent_path());
    } catch (const swflow::ConfigError& e) {
        std::cout << swflow::error_json("config", e.what()).dump() << "\n";
        return swflow::kExitConfig;
    }

    const swflow::RunResult r = swflow::run(cfg);
    const auto& results = r.report["results"];
    if (results.contains("table"))
        std::cout << results["table"].get<std::string>();
    else
        std::cout << results.dump(2) << "\n";
    return r.exit_code;
}
