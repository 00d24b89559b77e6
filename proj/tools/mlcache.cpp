#include "mlcache/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int emit(const mlcache::cli::CommandResult& result, const std::string& out_path) {
    for (const auto& m : result.messages)
        std::cerr << m << '\n';
    if (out_path.empty() || out_path == "-") {
        std::cout << result.output;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return mlcache::cli::kInputError;
        }
        out << result.output;
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mlcache::cli;

    CLI::App app{"Multi-library coded caching: tradeoffs, allocation, converse bounds and bit-exact simulation"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "-";
    std::string format;  // defaults: csv for tradeoff and sweep, json otherwise
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "network config JSON");
    app.add_option("--out", out_path, "output path or - for stdout");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", seed, "seed for file contents");

    TradeoffOptions topt;
    auto* tradeoff = app.add_subcommand("tradeoff", "single-library tradeoff corners and samples");
    tradeoff->add_option("--n", topt.num_files, "number of files")->required();
    tradeoff->add_option("--k", topt.num_users, "number of users")->required();
    tradeoff->add_option("--kind", topt.kind, "scheme or exact2x2");
    tradeoff->add_option("--samples", topt.samples, "evaluation grid size");

    AllocateOptions aopt;
    std::string oracle;
    auto* allocate = app.add_subcommand("allocate", "greedy cache allocation across libraries");
    allocate->add_option("--kinds", aopt.kinds, "auto, scheme, exact2x2, or a per-library list");
    auto* oracle_opt = allocate->add_option("--oracle", oracle, "brute-force grid step to cross-check against");

    SweepOptions sopt;
    std::string summary;
    auto* sweep = app.add_subcommand("sweep", "two-library rate as a function of the cache split");
    sweep->add_option("--kinds", sopt.kinds, "auto, scheme, exact2x2, or a per-library list");
    sweep->add_option("--samples", sopt.samples, "uniform lambda grid size");
    auto* summary_opt = sweep->add_option("--summary", summary, "write the segment summary JSON here");

    ConverseOptions copt;
    auto* converse = app.add_subcommand("converse", "concatenation bound and gap report");
    converse->add_option("--kinds", copt.kinds, "auto, scheme, exact2x2, or a per-library list");

    SimulateOptions mopt;
    std::string explicit_alloc, dump;
    auto* simulate = app.add_subcommand("simulate", "bit-exact placement, delivery and decoding over all demands");
    simulate->add_option("--alloc", mopt.allocation, "greedy, proportional or explicit")
        ->check(CLI::IsMember({"greedy", "proportional", "explicit"}));
    auto* explicit_opt = simulate->add_option("--explicit", explicit_alloc, "comma-separated per-library cache shares");
    simulate->add_option("--bit-multiplier", mopt.bit_multiplier, "scale the auto-selected F");
    simulate->add_option("--max-bits", mopt.max_base_bits, "budget for F");
    auto* dump_opt = simulate->add_option("--dump", dump, "binary dump of files, caches and the first transcript");
    simulate->add_flag("--reduction", mopt.reduction, "also serve every concatenated-library demand");

    // Global flags are accepted after the subcommand too.
    for (auto* sub : {tradeoff, allocate, sweep, converse, simulate}) {
        sub->add_option("--config", config_path, "network config JSON");
        sub->add_option("--out", out_path, "output path or - for stdout");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", seed, "seed for file contents");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (format.empty())
            format = (tradeoff->parsed() || sweep->parsed()) ? "csv" : "json";
        if (tradeoff->parsed()) {
            topt.format = format;
            return emit(cmd_tradeoff(topt), out_path);
        }
        if (format == "csv" && !sweep->parsed())
            throw InputError("--format csv is only available for tradeoff and sweep");
        if (allocate->parsed()) {
            aopt.config_path = config_path;
            if (*oracle_opt)
                aopt.oracle_step = oracle;
            return emit(cmd_allocate(aopt), out_path);
        }
        if (sweep->parsed()) {
            sopt.config_path = config_path;
            sopt.format = format;
            if (*summary_opt)
                sopt.summary_path = summary;
            return emit(cmd_sweep(sopt), out_path);
        }
        if (converse->parsed()) {
            copt.config_path = config_path;
            return emit(cmd_converse(copt), out_path);
        }
        if (simulate->parsed()) {
            mopt.config_path = config_path;
            mopt.seed = seed;
            if (*explicit_opt)
                mopt.explicit_allocation = explicit_alloc;
            if (*dump_opt)
                mopt.dump_path = dump;
            return emit(cmd_simulate(mopt), out_path);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kInputError;
}
