// selertion CLI: regression test selection at assertion granularity for
// MiniJ projects. Subcommands cover the store lifecycle (init/run), the
// RetestAll baseline, mutant generation, report access, and the
// brute-force affected-test oracle.

#include <CLI11.hpp>
#include <iostream>

#include "selertion/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"assertion-granularity regression test selection for MiniJ projects"};
    app.require_subcommand(1);

    std::string storeOpt;
    bool json = false;
    app.add_option("--store", storeOpt, "store directory (default <project>/.selertion)");
    app.add_flag("--json", json, "machine-readable output");

    std::string dir = ".", dirV2, revision, mutantOut;
    unsigned long long seed = 0;
    bool collect = false, methodLevel = false;

    CLI::App* init = app.add_subcommand("init", "initial full analysis, collection and run");
    init->add_option("dir", dir, "project directory (default .)");

    CLI::App* run = app.add_subcommand("run", "analyze changes, select, execute, restore");
    run->add_option("dir", dir, "project directory (default .)");
    run->add_flag("--collect", collect, "refresh the dependency database afterwards");
    run->add_flag("--method-level", methodLevel, "disable assertion-level granularity");

    CLI::App* retestall = app.add_subcommand("retestall", "run the full suite, no selection");
    retestall->add_option("dir", dir, "project directory (default .)");

    CLI::App* mutate = app.add_subcommand("mutate", "emit a deterministic one-change mutant");
    mutate->add_option("dir", dir, "project directory (default .)");
    mutate->add_option("--seed", seed, "mutation seed")->required();
    mutate->add_option("--out", mutantOut, "output directory (default <dir>.mutant<seed>)");

    CLI::App* report = app.add_subcommand("report", "print a stored per-revision report");
    report->add_option("dir", dir, "project directory (default .)");
    report->add_option("--revision", revision, "revision id")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "brute-force affected tests of V1 -> V2");
    oracle->add_option("dirV1", dir, "old revision directory")->required();
    oracle->add_option("dirV2", dirV2, "new revision directory")->required();

    CLI11_PARSE(app, argc, argv);

    selertion::DriverOptions opts;
    opts.projectDir = dir;
    opts.storeDir = selertion::resolve_store_dir(dir, storeOpt);
    opts.json = json;
    opts.collect = collect;
    opts.methodLevel = methodLevel;

    try {
        if (init->parsed()) return selertion::cmd_init(opts);
        if (run->parsed()) return selertion::cmd_run(opts);
        if (retestall->parsed()) return selertion::cmd_retestall(opts);
        if (mutate->parsed()) return selertion::cmd_mutate(opts, seed, mutantOut);
        if (report->parsed()) return selertion::cmd_report(opts, revision);
        if (oracle->parsed()) return selertion::cmd_oracle(opts, dir, dirV2);
    } catch (const selertion::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
