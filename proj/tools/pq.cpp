#include <cstdio>
#include <exception>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "pq/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Phonon-transmon circuit quantization toolkit"};
    app.set_version_flag("--version", std::string(pq::kVersion));
    app.require_subcommand(1, 1);

    std::string config, out;
    unsigned threads = 0;
    const std::pair<const char*, const char*> commands[] = {
        {"fbar", "tabulate the FBAR admittance and its pole-zero pairs"},
        {"fit", "vector-fit a sampled admittance and extract its Foster network"},
        {"couple", "single-mode coupling rate and gate-capacitance sweep"},
        {"bbq", "black-box quantization: polaritons, Kerr matrix, detuning sweep"},
        {"oracle", "exact diagonalization checks of g and Kerr coefficients"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON run configuration")->required();
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--threads", threads, "worker threads (default: PHONON_QUANT_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto result = pq::cli::run(command, config, threads);
        pq::cli::write_outputs(out, result.files);
        for (const auto& m : result.messages) std::fprintf(stderr, "%s\n", m.c_str());
        return result.exit_code;
    } catch (const pq::Error& e) {
        std::fprintf(stderr, "pq %s: %s\n", command.c_str(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pq %s: %s\n", command.c_str(), e.what());
        return 3;
    }
}
