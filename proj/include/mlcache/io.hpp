#pragma once

#include "mlcache/allocation.hpp"
#include "mlcache/converse.hpp"
#include "mlcache/model.hpp"
#include "mlcache/sim.hpp"
#include "mlcache/tradeoff.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

using json = nlohmann::json;

// Rationals travel as strings ("p/q" or "n") so nothing is rounded.

inline json rational_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const json& j, const std::string& field) {
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    throw std::invalid_argument("field '" + field + "' must be a rational string or an integer");
}

inline json rationals_json(const std::vector<Rational>& values) {
    json out = json::array();
    for (const auto& v : values)
        out.push_back(to_string(v));
    return out;
}

inline json to_json(const NetworkConfig& config) {
    json libs = json::array();
    for (const auto& lib : config.libraries)
        libs.push_back({{"num_files", lib.num_files}, {"alpha", to_string(lib.alpha)}});
    return {{"libraries", libs}, {"num_users", config.num_users}, {"cache_size", to_string(config.cache_size)}};
}

inline NetworkConfig config_from_json(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("config must be a JSON object");
    for (const char* field : {"libraries", "num_users", "cache_size"})
        if (!j.contains(field))
            throw std::invalid_argument(std::string("config is missing '") + field + "'");
    NetworkConfig config;
    if (!j.at("libraries").is_array())
        throw std::invalid_argument("'libraries' must be an array");
    for (const auto& lib : j.at("libraries")) {
        if (!lib.contains("num_files") || !lib.contains("alpha"))
            throw std::invalid_argument("each library needs 'num_files' and 'alpha'");
        if (!lib.at("num_files").is_number_integer())
            throw std::invalid_argument("'num_files' must be an integer");
        config.libraries.push_back({lib.at("num_files").get<std::int64_t>(), rational_from_json(lib.at("alpha"), "alpha")});
    }
    if (!j.at("num_users").is_number_integer())
        throw std::invalid_argument("'num_users' must be an integer");
    config.num_users = j.at("num_users").get<std::int64_t>();
    config.cache_size = rational_from_json(j.at("cache_size"), "cache_size");
    return config;
}

/// Corner-point list form: [["0","2"],["1/2","1"],...].
inline json to_json(const PiecewiseLinearTradeoff& t) {
    json out = json::array();
    for (const auto& c : t.corners())
        out.push_back({to_string(c.memory), to_string(c.rate)});
    return out;
}

inline PiecewiseLinearTradeoff tradeoff_from_json(const json& j, std::int64_t num_files, std::string label = "file",
                                                  TradeoffKind kind = TradeoffKind::achievable) {
    if (!j.is_array())
        throw std::invalid_argument("tradeoff must be a list of corner points");
    std::vector<CornerPoint> corners;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2)
            throw std::invalid_argument("corner point must be a [memory, rate] pair");
        corners.push_back({rational_from_json(p[0], "memory"), rational_from_json(p[1], "rate")});
    }
    return PiecewiseLinearTradeoff::from_corners(num_files, corners, std::move(label), kind);
}

inline json to_json(const Allocation& alloc) { return rationals_json(alloc.per_library); }

inline json to_json(const AllocationTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"library", s.library + 1},
                         {"segment_before", s.segment_before},
                         {"delta", to_string(s.delta)},
                         {"allocated_total", to_string(s.allocated_total)}});
    return {{"steps", steps},
            {"final", to_json(trace.final)},
            {"rate", to_string(trace.rate)},
            {"rate_decimal", to_decimal(trace.rate)},
            {"tradeoff_labels", trace.tradeoff_labels}};
}

inline json to_json(const LambdaSweep& sweep) {
    json segments = json::array();
    for (const auto& s : sweep.segments)
        segments.push_back({{"start", to_string(s.start)},
                            {"end", to_string(s.end)},
                            {"intercept", to_string(s.intercept)},
                            {"slope", to_string(s.slope)}});
    json samples = json::array();
    for (const auto& s : sweep.samples)
        samples.push_back({to_string(s.lambda), to_string(s.rate)});
    return {{"breakpoints", rationals_json(sweep.breakpoints)}, {"segments", segments}, {"samples", samples}};
}

inline json to_json(const ConcatenatedLibrary& lib) {
    std::vector<std::size_t> order;
    for (auto o : lib.order)
        order.push_back(o + 1);
    return {{"num_files", lib.num_files},
            {"betas", rationals_json(lib.betas)},
            {"sorted_order", order},
            {"scale", to_string(lib.scale())}};
}

inline json to_json(const GapReport& r) {
    return {{"achievable", to_string(r.achievable)},
            {"converse", to_string(r.converse)},
            {"gap", to_string(r.gap)},
            {"status", r.status},
            {"converse_kind", r.converse_kind},
            {"tradeoff_labels", r.tradeoff_labels}};
}

inline json to_json(const OptimalityCertificate& c) {
    return {{"single_library_rate", to_string(c.single_library_rate)},
            {"proportional_rate", to_string(c.proportional_rate)},
            {"greedy_rate", to_string(c.greedy_rate)},
            {"converse_rate", to_string(c.converse_rate)},
            {"tradeoff_label", c.tradeoff_label},
            {"exact_tradeoff", c.exact_tradeoff},
            {"holds", c.holds}};
}

inline json to_json(const VerificationReport& r) {
    json out = {{"demands_checked", r.demands_checked},
                {"decodes_checked", r.decodes_checked},
                {"errors", r.errors},
                {"error_rate", std::to_string(r.errors) + "/" + std::to_string(r.decodes_checked)},
                {"base_bits", r.base_bits},
                {"seed", r.seed},
                {"cache_bits_per_user", r.cache_bits},
                {"cache_segment_bits", r.cache_segment_bits},
                {"max_transcript_bits", r.max_transcript_bits},
                {"max_library_bits", r.max_library_bits},
                {"measured_rate", to_string(r.measured_rate)},
                {"formula_rate", to_string(r.formula_rate)},
                {"measured_rate_decimal", to_decimal(r.measured_rate)},
                {"ok", r.ok()}};
    if (r.witness)
        out["witness"] = {{"demand", r.witness->demand.files}, {"user", r.witness->user}, {"library", r.witness->library}};
    return out;
}

}  // namespace mlcache
