#pragma once

#include "mlcache/io.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mlcache::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kInputError = 2 };

struct CommandResult {
    int exit_code = kSuccess;
    std::string output;                 // CSV or JSON text, newline-terminated
    std::vector<std::string> messages;  // warnings and errors for stderr
};

/// Thrown for anything the user can fix: bad flags, unreadable or invalid configs.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string digest(const json& canonical) {
    // FNV-1a over the canonical dump; keys are sorted by nlohmann::json.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

inline json run_record(const std::string& command, const std::optional<NetworkConfig>& config, json inputs,
                       json outputs, std::optional<std::uint64_t> seed = std::nullopt) {
    json record = {{"command", command},
                   {"inputs", std::move(inputs)},
                   {"outputs", std::move(outputs)},
                   {"version", kToolVersion}};
    record["config_digest"] = config ? json(digest(to_json(*config))) : json(nullptr);
    record["seed"] = seed ? json(*seed) : json(nullptr);
    return record;
}

struct LoadedConfig {
    NetworkConfig config;
    std::vector<std::string> warnings;
};

inline LoadedConfig load_config(const std::string& path) {
    if (path.empty())
        throw InputError("--config is required");
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config '" + path + "'");
    NetworkConfig config;
    try {
        config = config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw InputError("malformed config '" + path + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError("malformed config '" + path + "': " + e.what());
    }
    const auto violations = validate(config);
    if (!violations.empty()) {
        std::string message = "invalid config '" + path + "':";
        for (const auto& v : violations)
            message += " [" + v.detail + "]";
        throw InputError(message);
    }
    auto clamped = clamp_cache_size(std::move(config));
    LoadedConfig out{std::move(clamped.config), {}};
    if (clamped.warning)
        out.warnings.push_back("warning: " + *clamped.warning);
    return out;
}

/// "auto", a single kind for every library, or a comma-separated list, one per library.
inline std::vector<PiecewiseLinearTradeoff> tradeoffs_for(const NetworkConfig& config, const std::string& kinds) {
    std::vector<std::string> parts;
    std::stringstream ss(kinds);
    for (std::string item; std::getline(ss, item, ',');)
        parts.push_back(item);
    if (parts.size() != 1 && parts.size() != config.num_libraries())
        throw InputError("--kinds needs one entry or one per library (" + std::to_string(config.num_libraries()) + ")");
    std::vector<PiecewiseLinearTradeoff> out;
    for (std::size_t l = 0; l < config.num_libraries(); ++l) {
        try {
            out.push_back(build_tradeoff(parts.size() == 1 ? parts[0] : parts[l], config.libraries[l].num_files,
                                         config.num_users));
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("library ") + std::to_string(l + 1) + ": " + e.what());
        }
    }
    return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            row += ',';
        row += cells[i];
    }
    return row + '\n';
}

inline std::vector<Rational> uniform_grid(const Rational& upper, std::int64_t samples) {
    std::vector<Rational> grid;
    for (std::int64_t j = 0; j <= samples; ++j)
        grid.push_back(upper * j / samples);
    return grid;
}

struct TradeoffOptions {
    std::int64_t num_files = 0;
    std::int64_t num_users = 0;
    std::string kind = "scheme";
    std::int64_t samples = 20;
    std::string format = "csv";
};

inline CommandResult cmd_tradeoff(const TradeoffOptions& opt) {
    if (opt.num_files < 1 || opt.num_users < 1)
        throw InputError("--n and --k must be >= 1");
    if (opt.samples < 1)
        throw InputError("--samples must be >= 1");
    if (opt.kind != "scheme" && opt.kind != "exact2x2")
        throw InputError("unknown tradeoff kind '" + opt.kind + "' (expected scheme or exact2x2)");
    PiecewiseLinearTradeoff t = [&] {
        try {
            return build_tradeoff(opt.kind, opt.num_files, opt.num_users);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }();
    const auto grid = uniform_grid(Rational(opt.num_files), opt.samples);
    CommandResult result;
    if (opt.format == "csv") {
        result.output = csv_row({"type", "memory", "rate", "memory_decimal", "rate_decimal"});
        for (const auto& c : t.corners())
            result.output += csv_row({"corner", to_string(c.memory), to_string(c.rate), to_decimal(c.memory), to_decimal(c.rate)});
        for (const auto& m : grid)
            result.output += csv_row({"sample", to_string(m), to_string(t(m)), to_decimal(m), to_decimal(t(m))});
        return result;
    }
    json samples = json::array();
    for (const auto& m : grid)
        samples.push_back({to_string(m), to_string(t(m))});
    json outputs = {{"label", t.label()}, {"exact", t.is_exact()}, {"corners", to_json(t)}, {"samples", samples}};
    json inputs = {{"n", opt.num_files}, {"k", opt.num_users}, {"kind", opt.kind}, {"samples", opt.samples}};
    result.output = run_record("tradeoff", std::nullopt, inputs, outputs).dump(2) + "\n";
    return result;
}

struct AllocateOptions {
    std::string config_path;
    std::string kinds = "auto";
    std::optional<std::string> oracle_step;
};

inline CommandResult cmd_allocate(const AllocateOptions& opt) {
    auto loaded = load_config(opt.config_path);
    const auto& config = loaded.config;
    const auto tradeoffs = tradeoffs_for(config, opt.kinds);
    CommandResult result;
    result.messages = loaded.warnings;
    const AllocationTrace trace = greedy_allocate(config, tradeoffs);
    json outputs = {{"trace", to_json(trace)}};
    json inputs = {{"config", to_json(config)}, {"kinds", opt.kinds}};
    if (opt.oracle_step) {
        Rational step;
        try {
            step = parse_rational(*opt.oracle_step);
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("--oracle: ") + e.what());
        }
        if (step <= 0)
            throw InputError("--oracle grid step must be positive");
        inputs["oracle_step"] = to_string(step);
        const BruteForceResult brute = brute_force_allocate(config, tradeoffs, step);
        const bool agree = brute.rate == trace.rate;
        outputs["oracle"] = {{"rate", to_string(brute.rate)},
                             {"allocation", to_json(brute.allocation)},
                             {"candidates", brute.candidates},
                             {"agree", agree}};
        if (!agree) {
            result.exit_code = kFailure;
            result.messages.push_back("oracle disagreement: greedy rate " + to_string(trace.rate) +
                                      ", brute-force rate " + to_string(brute.rate));
        }
    }
    result.output = run_record("allocate", config, inputs, outputs).dump(2) + "\n";
    return result;
}

struct SweepOptions {
    std::string config_path;
    std::string kinds = "auto";
    std::int64_t samples = 100;
    std::string format = "csv";
    std::optional<std::string> summary_path;  // segment summary JSON alongside CSV
};

inline CommandResult cmd_sweep(const SweepOptions& opt) {
    auto loaded = load_config(opt.config_path);
    const auto& config = loaded.config;
    if (config.num_libraries() != 2)
        throw InputError("sweep needs exactly 2 libraries, config has " + std::to_string(config.num_libraries()));
    if (opt.samples < 1)
        throw InputError("--samples must be >= 1");
    const auto tradeoffs = tradeoffs_for(config, opt.kinds);
    const LambdaSweep sweep = lambda_sweep(config, tradeoffs, opt.samples);
    CommandResult result;
    result.messages = loaded.warnings;
    json inputs = {{"config", to_json(config)}, {"kinds", opt.kinds}, {"samples", opt.samples}};
    json summary = to_json(sweep);
    summary.erase("samples");
    if (opt.summary_path) {
        std::ofstream out(*opt.summary_path);
        if (!out)
            throw InputError("cannot write summary '" + *opt.summary_path + "'");
        out << run_record("sweep", config, inputs, summary).dump(2) << "\n";
    }
    if (opt.format == "csv") {
        result.output = csv_row({"lambda", "rate", "lambda_decimal", "rate_decimal"});
        for (const auto& s : sweep.samples)
            result.output += csv_row({to_string(s.lambda), to_string(s.rate), to_decimal(s.lambda), to_decimal(s.rate)});
        return result;
    }
    result.output = run_record("sweep", config, inputs, to_json(sweep)).dump(2) + "\n";
    return result;
}

struct ConverseOptions {
    std::string config_path;
    std::string kinds = "auto";
};

inline CommandResult cmd_converse(const ConverseOptions& opt) {
    auto loaded = load_config(opt.config_path);
    const auto& config = loaded.config;
    const auto tradeoffs = tradeoffs_for(config, opt.kinds);
    CommandResult result;
    result.messages = loaded.warnings;
    const ConcatenatedLibrary lib = concatenate(config);
    const GapReport gap = conjecture_gap(config, tradeoffs);
    json outputs = {{"concatenated", to_json(lib)}, {"cutset_converse", to_string(cut_set_converse(config))},
                    {"gap", to_json(gap)}};
    json inputs = {{"config", to_json(config)}, {"kinds", opt.kinds}};
    result.output = run_record("converse", config, inputs, outputs).dump(2) + "\n";
    return result;
}

struct SimulateOptions {
    std::string config_path;
    std::string allocation = "greedy";  // greedy | proportional | explicit
    std::optional<std::string> explicit_allocation;  // "a,b,..." rationals
    std::uint64_t seed = 1;
    std::uint64_t bit_multiplier = 1;
    std::uint64_t max_base_bits = kDefaultMaxBaseBits;
    std::optional<std::string> dump_path;
    bool reduction = false;
};

inline Allocation parse_allocation(const std::string& text, std::size_t libraries) {
    Allocation alloc;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            alloc.per_library.push_back(parse_rational(item));
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("--explicit: ") + e.what());
        }
    }
    if (alloc.per_library.size() != libraries)
        throw InputError("--explicit needs " + std::to_string(libraries) + " entries");
    return alloc;
}

inline CommandResult cmd_simulate(const SimulateOptions& opt) {
    auto loaded = load_config(opt.config_path);
    const auto& config = loaded.config;
    CommandResult result;
    result.messages = loaded.warnings;

    Allocation alloc;
    std::vector<std::string> labels;
    if (opt.allocation == "greedy") {
        // Greedy over the curves the simulator actually realises.
        const auto tradeoffs = tradeoffs_for(config, "scheme");
        const auto trace = greedy_allocate(config, tradeoffs);
        alloc = trace.final;
        labels = trace.tradeoff_labels;
    } else if (opt.allocation == "proportional") {
        alloc = proportional_allocation(config);
    } else if (opt.allocation == "explicit") {
        if (!opt.explicit_allocation)
            throw InputError("--alloc explicit needs --explicit a,b,...");
        alloc = parse_allocation(*opt.explicit_allocation, config.num_libraries());
        if (alloc.total() != config.cache_size)
            throw InputError("explicit allocation sums to " + to_string(alloc.total()) + ", cache size is " +
                             to_string(config.cache_size));
    } else {
        throw InputError("unknown allocation source '" + opt.allocation + "'");
    }

    VerifyOptions vopt;
    vopt.seed = opt.seed;
    vopt.bit_multiplier = opt.bit_multiplier;
    vopt.max_base_bits = opt.max_base_bits;
    VerificationReport report;
    try {
        report = verify_all(config, alloc, vopt);
    } catch (const DivisibilityError& e) {
        throw InputError(std::string(e.what()) + " (F must be a multiple of " + e.required_multiple().str() + ")");
    } catch (const EnumerationCapExceeded& e) {
        throw InputError(e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    json inputs = {{"config", to_json(config)},
                   {"allocation_source", opt.allocation},
                   {"bit_multiplier", opt.bit_multiplier},
                   {"max_base_bits", opt.max_base_bits}};
    json outputs = {{"allocation", to_json(alloc)}, {"verification", to_json(report)}};
    if (!labels.empty())
        outputs["tradeoff_labels"] = labels;
    if (!report.ok()) {
        result.exit_code = kFailure;
        result.messages.push_back("decode failure: " + std::to_string(report.errors) + " mismatches");
    }
    if (opt.reduction) {
        const auto rr = reduction_demo(config, alloc, all_concatenated_demands(config), vopt);
        outputs["reduction"] = {{"demands_checked", rr.demands_checked},
                                {"concatenated_file_bits", rr.concatenated_file_bits},
                                {"dummy_decodes_discarded", rr.dummy_decodes_discarded},
                                {"transcripts_identical", rr.transcripts_identical},
                                {"cache_bits_per_user", rr.cache_bits},
                                {"errors", rr.errors},
                                {"ok", rr.ok()}};
        if (!rr.ok()) {
            result.exit_code = kFailure;
            result.messages.push_back("reduction failure on concatenated demands");
        }
    }
    if (opt.dump_path) {
        const SchemePlan plan = plan_scheme(config, alloc, report.base_bits);
        const FileStore store = make_file_store(config, report.base_bits, opt.seed);
        const PlacementState placement = place(store, plan);
        const auto first = enumerate_demands(config).at(0);
        std::ofstream out(*opt.dump_path, std::ios::binary);
        if (!out)
            throw InputError("cannot write dump '" + *opt.dump_path + "'");
        write_dump(out, store, placement, deliver(store, plan, first));
        outputs["dump"] = {{"path", *opt.dump_path}, {"demand", first.files}};
    }
    result.output = run_record("simulate", config, inputs, outputs, opt.seed).dump(2) + "\n";
    return result;
}

}  // namespace mlcache::cli
