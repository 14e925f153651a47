// Command-line benchmark harness. Talks to the core through the C API.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>

#include "fdtwrc/fdtwrc.h"

namespace {

struct CommonArgs {
    std::string spec_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int runs = 0;
    std::string schemes;
    bool audit = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--spec", args.spec_path, "experiment spec (JSON)")->required();
    cmd->add_option("--out", args.out_path, "output CSV path")->required();
    cmd->add_option("--seed", args.seed, "override the spec's RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--runs", args.runs, "override the number of runs per point");
    cmd->add_option("--schemes", args.schemes, "comma-separated scheme subset");
    cmd->add_flag("--audit", args.audit, "re-check final points against the signal-level simulators");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run_command(const CommonArgs& args, bool trace) {
    char err[512] = {0};
    fdtwrc_spec* spec = nullptr;
    int rc = fdtwrc_spec_load(args.spec_path.c_str(), &spec, err, sizeof(err));
    if (rc != FDTWRC_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        return rc == FDTWRC_CONFIG_ERROR ? 2 : 1;
    }
    if (args.seed_set) fdtwrc_spec_set_seed(spec, args.seed);
    if (args.runs > 0 && fdtwrc_spec_set_runs(spec, args.runs, err, sizeof(err)) != FDTWRC_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        fdtwrc_spec_free(spec);
        return 2;
    }
    if (!args.schemes.empty() &&
        fdtwrc_spec_set_schemes(spec, args.schemes.c_str(), err, sizeof(err)) != FDTWRC_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        fdtwrc_spec_free(spec);
        return 2;
    }
    fdtwrc_spec_set_oracle_audit(spec, args.audit ? 1 : 0);

    fdtwrc_table* table = nullptr;
    rc = trace ? fdtwrc_run_trace(spec, &table, err, sizeof(err))
               : fdtwrc_run_sweep(spec, &table, err, sizeof(err));
    fdtwrc_spec_free(spec);
    if (rc != FDTWRC_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        return rc == FDTWRC_CONFIG_ERROR ? 2 : 1;
    }

    rc = fdtwrc_table_write_csv(table, args.out_path.c_str(), err, sizeof(err));
    if (rc != FDTWRC_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        fdtwrc_table_free(table);
        return 1;
    }

    const double hard_rate = fdtwrc_table_hard_failure_rate(table);
    if (!args.quiet) {
        std::fprintf(stderr, "wrote %d rows to %s (worst hard-failure rate %.1f%%)\n",
                     fdtwrc_table_rows(table), args.out_path.c_str(), 100.0 * hard_rate);
    }
    fdtwrc_table_free(table);
    return hard_rate > 0.2 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"full-duplex two-way relay beamforming benchmark"};
    app.require_subcommand(1);

    CommonArgs sweep_args, trace_args;
    CLI::App* sweep = app.add_subcommand("sweep", "total power versus SINR target");
    add_common(sweep, sweep_args);
    CLI::App* trace = app.add_subcommand("trace", "mean power versus iteration at one target");
    add_common(trace, trace_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (sweep->parsed()) return run_command(sweep_args, false);
    return run_command(trace_args, true);
}
