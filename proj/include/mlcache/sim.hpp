#pragma once

#include "mlcache/allocation.hpp"
#include "mlcache/bits.hpp"
#include "mlcache/converse.hpp"
#include "mlcache/model.hpp"
#include "mlcache/tradeoff.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

// Bit-exact centralized coded caching, one independent instance per library.
// Each user's cache is the concatenation of its per-library segments and the
// broadcast is the concatenation of the per-library payloads.

inline constexpr std::int64_t kMaxSimUsers = 12;
inline constexpr std::uint64_t kDefaultMaxBaseBits = std::uint64_t{1} << 24;

class DivisibilityError : public std::runtime_error {
public:
    DivisibilityError(const std::string& what, BigInt required)
        : std::runtime_error(what), required_(std::move(required)) {}
    /// F must be a multiple of this.
    const BigInt& required_multiple() const { return required_; }

private:
    BigInt required_;
};

/// One memory-sharing share of a library's files, run at cache parameter t.
struct SchemePart {
    std::int64_t cached_by = 0;        // t: every subfile is cached by exactly t users
    std::uint64_t offset = 0;          // first bit of this part inside each file
    std::uint64_t bits = 0;            // part length per file
    std::uint64_t subfile_bits = 0;    // bits / C(K, t)
    std::vector<std::uint32_t> subsets;             // t-subsets of users as bitmasks, lexicographic
    std::vector<std::int64_t> subset_rank;          // mask -> index in `subsets`, -1 otherwise
    std::vector<std::uint32_t> messages;            // (t+1)-subsets, lexicographic
    std::vector<std::int64_t> message_rank;
    std::vector<std::vector<std::int64_t>> rank_for_user;  // [k][mask] -> position among subsets holding k
    std::uint64_t cached_per_file = 0;                     // C(K-1, t-1)
};

struct LibraryPlan {
    Rational memory_share;       // M_l
    Rational normalized_memory;  // M_l / alpha_l
    std::uint64_t file_bits = 0;
    std::uint64_t cache_bits = 0;        // per user
    std::vector<std::uint64_t> part_cache_offset;
    std::vector<SchemePart> parts;
    Rational scheme_rate;                // R_scheme(M_l / alpha_l), units of this library's file size
};

struct SchemePlan {
    NetworkConfig config;
    Allocation allocation;
    std::uint64_t base_bits = 0;  // F
    std::vector<LibraryPlan> libraries;

    std::uint64_t cache_bits() const {
        std::uint64_t total = 0;
        for (const auto& lib : libraries)
            total += lib.cache_bits;
        return total;
    }

    /// sum_l alpha_l R_scheme(M_l / alpha_l)
    Rational formula_rate() const {
        Rational rate = 0;
        for (std::size_t l = 0; l < libraries.size(); ++l)
            rate += config.libraries[l].alpha * libraries[l].scheme_rate;
        return rate;
    }
};

struct FileStore {
    std::uint64_t base_bits = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<BitString>> files;  // [library][file]
};

struct PlacementState {
    std::vector<std::vector<BitString>> segments;  // [user][library]

    std::uint64_t cache_bits(std::size_t user) const {
        std::uint64_t total = 0;
        for (const auto& s : segments[user])
            total += s.size();
        return total;
    }

    BitString cache(std::size_t user) const {
        BitString z;
        for (const auto& s : segments[user])
            z.append(s);
        return z;
    }
};

struct DeliveryTranscript {
    DemandVector demand;
    std::vector<BitString> payloads;  // per library
    std::uint64_t total_bits = 0;
};

namespace detail {

struct PartShare {
    std::int64_t cached_by;
    Rational fraction;  // share of every file run at this t
};

/// Memory-sharing between the scheme-envelope corners around `memory`.
inline std::vector<PartShare> part_shares(std::int64_t num_files, std::int64_t num_users, const Rational& memory) {
    const auto envelope = build_centralized_scheme_tradeoff(num_files, num_users);
    const auto& theta = envelope.breakpoints();
    auto users_at = [&](const Rational& corner) {
        const Rational t = corner * num_users / num_files;
        if (!is_integer(t))
            throw std::logic_error("scheme corner off the integer grid");
        return numerator_of(t).convert_to<std::int64_t>();
    };
    const std::size_t i = envelope.segment_at(memory);
    if (i >= envelope.segment_count() || theta[i] == memory)
        return {{users_at(theta[std::min(i, theta.size() - 1)]), Rational(1)}};
    const Rational right = (memory - theta[i]) / (theta[i + 1] - theta[i]);
    return {{users_at(theta[i]), 1 - right}, {users_at(theta[i + 1]), right}};
}

inline std::vector<std::uint32_t> subsets_of_size(std::int64_t n, std::int64_t t) {
    // Lexicographic order on sorted member lists.
    std::vector<std::uint32_t> out;
    if (t < 0 || t > n)
        return out;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(t));
    for (std::int64_t i = 0; i < t; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        std::uint32_t mask = 0;
        for (auto v : idx)
            mask |= 1u << v;
        out.push_back(mask);
        std::int64_t pos = t - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - t + pos)
            --pos;
        if (pos < 0)
            break;
        ++idx[static_cast<std::size_t>(pos)];
        for (std::int64_t j = pos + 1; j < t; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

inline std::vector<std::int64_t> rank_table(const std::vector<std::uint32_t>& masks, std::int64_t num_users) {
    std::vector<std::int64_t> rank(std::size_t{1} << num_users, -1);
    for (std::size_t i = 0; i < masks.size(); ++i)
        rank[masks[i]] = static_cast<std::int64_t>(i);
    return rank;
}

inline void check_allocation(const NetworkConfig& config, const Allocation& alloc) {
    require_valid(config);
    if (config.num_users > kMaxSimUsers)
        throw std::invalid_argument("simulation supports at most " + std::to_string(kMaxSimUsers) + " users");
    if (alloc.per_library.size() != config.num_libraries())
        throw std::invalid_argument("allocation does not match the number of libraries");
    if (alloc.total() > config.cache_size)
        throw std::invalid_argument("allocation " + to_string(alloc.total()) + " exceeds cache size " +
                                    to_string(config.cache_size));
    for (std::size_t l = 0; l < alloc.per_library.size(); ++l) {
        const auto& lib = config.libraries[l];
        if (alloc.per_library[l] < 0 || alloc.per_library[l] > lib.alpha * lib.num_files)
            throw std::invalid_argument("allocation " + to_string(alloc.per_library[l]) + " for library " +
                                        std::to_string(l + 1) + " outside [0, " +
                                        to_string(lib.alpha * lib.num_files) + "]");
    }
}

}  // namespace detail

/// Smallest F for which every part of every file splits into whole-bit subfiles.
inline BigInt required_base_bits(const NetworkConfig& config, const Allocation& alloc) {
    detail::check_allocation(config, alloc);
    BigInt required = 1;
    for (std::size_t l = 0; l < config.num_libraries(); ++l) {
        const auto& lib = config.libraries[l];
        for (const auto& share : detail::part_shares(lib.num_files, config.num_users, alloc.per_library[l] / lib.alpha)) {
            if (share.fraction == 0)
                continue;
            const Rational per_subfile = share.fraction * lib.alpha / binomial(config.num_users, share.cached_by);
            required = lcm_of(required, denominator_of(per_subfile));
        }
    }
    return required;
}

inline SchemePlan plan_scheme(const NetworkConfig& config, const Allocation& alloc, std::uint64_t base_bits) {
    detail::check_allocation(config, alloc);
    const BigInt required = required_base_bits(config, alloc);
    if (base_bits == 0 || BigInt(base_bits) % required != 0)
        throw DivisibilityError("F = " + std::to_string(base_bits) + " bits is not a multiple of the required " +
                                    required.str(),
                                required);
    const std::int64_t K = config.num_users;
    SchemePlan plan;
    plan.config = config;
    plan.allocation = alloc;
    plan.base_bits = base_bits;
    for (std::size_t l = 0; l < config.num_libraries(); ++l) {
        const auto& lib = config.libraries[l];
        LibraryPlan lp;
        lp.memory_share = alloc.per_library[l];
        lp.normalized_memory = alloc.per_library[l] / lib.alpha;
        lp.file_bits = (lib.alpha * base_bits).convert_to<std::uint64_t>();
        lp.scheme_rate = build_centralized_scheme_tradeoff(lib.num_files, K)(lp.normalized_memory);
        std::uint64_t offset = 0;
        for (const auto& share : detail::part_shares(lib.num_files, K, lp.normalized_memory)) {
            if (share.fraction == 0)
                continue;
            SchemePart part;
            part.cached_by = share.cached_by;
            part.offset = offset;
            part.bits = (share.fraction * lib.alpha * base_bits).convert_to<std::uint64_t>();
            part.subfile_bits = part.bits / binomial(K, part.cached_by).convert_to<std::uint64_t>();
            part.subsets = detail::subsets_of_size(K, part.cached_by);
            part.subset_rank = detail::rank_table(part.subsets, K);
            part.messages = detail::subsets_of_size(K, part.cached_by + 1);
            part.message_rank = detail::rank_table(part.messages, K);
            part.rank_for_user.assign(static_cast<std::size_t>(K), std::vector<std::int64_t>(std::size_t{1} << K, -1));
            for (std::int64_t k = 0; k < K; ++k) {
                std::int64_t r = 0;
                for (auto mask : part.subsets)
                    if (mask & (1u << k))
                        part.rank_for_user[static_cast<std::size_t>(k)][mask] = r++;
                part.cached_per_file = static_cast<std::uint64_t>(r);
            }
            lp.part_cache_offset.push_back(lp.cache_bits);
            lp.cache_bits += static_cast<std::uint64_t>(lib.num_files) * part.cached_per_file * part.subfile_bits;
            offset += part.bits;
            lp.parts.push_back(std::move(part));
        }
        if (offset != lp.file_bits)
            throw std::logic_error("parts do not tile the file");
        plan.libraries.push_back(std::move(lp));
    }
    return plan;
}

/// Pseudorandom library contents; identical for identical (config, F, seed).
inline FileStore make_file_store(const NetworkConfig& config, std::uint64_t base_bits, std::uint64_t seed) {
    FileStore store;
    store.base_bits = base_bits;
    store.seed = seed;
    std::mt19937_64 rng(seed);
    for (const auto& lib : config.libraries) {
        const auto bits = (lib.alpha * base_bits).convert_to<std::uint64_t>();
        std::vector<BitString> files;
        for (std::int64_t n = 0; n < lib.num_files; ++n)
            files.push_back(BitString::random(bits, rng));
        store.files.push_back(std::move(files));
    }
    return store;
}

namespace detail {

inline BitString subfile(const BitString& file, const SchemePart& part, std::uint32_t mask) {
    const auto rank = static_cast<std::uint64_t>(part.subset_rank[mask]);
    return file.slice(part.offset + rank * part.subfile_bits, part.subfile_bits);
}

inline std::vector<std::int64_t> distinct_requests(const std::vector<std::int64_t>& requests) {
    std::vector<std::int64_t> out = requests;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::uint64_t part_payload_bits(const SchemePart& part, std::int64_t num_users,
                                       const std::vector<std::int64_t>& requests) {
    if (part.cached_by == num_users)
        return 0;
    if (part.cached_by == 0)
        return distinct_requests(requests).size() * part.bits;
    return part.messages.size() * part.subfile_bits;
}

}  // namespace detail

/// Caching functions: user k keeps, for every file and part, the subfiles whose index set contains k.
inline PlacementState place(const FileStore& store, const SchemePlan& plan) {
    const auto K = plan.config.num_users;
    PlacementState state;
    state.segments.assign(static_cast<std::size_t>(K), {});
    for (std::int64_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < plan.libraries.size(); ++l) {
            BitString segment;
            for (const auto& part : plan.libraries[l].parts)
                for (const auto& file : store.files[l])
                    for (auto mask : part.subsets)
                        if (mask & (1u << k))
                            segment.append(detail::subfile(file, part, mask));
            state.segments[static_cast<std::size_t>(k)].push_back(std::move(segment));
        }
    }
    return state;
}

/// Encoding functions: per library, an XOR for every (t+1)-subset of users,
/// or each distinct requested file once when nothing is cached.
inline DeliveryTranscript deliver(const FileStore& store, const SchemePlan& plan, const DemandVector& demand) {
    require_demand_matches(plan.config, demand);
    const auto K = plan.config.num_users;
    DeliveryTranscript transcript;
    transcript.demand = demand;
    for (std::size_t l = 0; l < plan.libraries.size(); ++l) {
        const auto& requests = demand.files[l];
        BitString payload;
        for (const auto& part : plan.libraries[l].parts) {
            if (part.cached_by == K)
                continue;
            if (part.cached_by == 0) {
                for (auto n : detail::distinct_requests(requests))
                    payload.append(store.files[l][static_cast<std::size_t>(n - 1)].slice(part.offset, part.bits));
                continue;
            }
            for (auto group : part.messages) {
                BitString message(part.subfile_bits);
                for (std::int64_t k = 0; k < K; ++k) {
                    if (!(group & (1u << k)))
                        continue;
                    const auto& file = store.files[l][static_cast<std::size_t>(requests[static_cast<std::size_t>(k)] - 1)];
                    message ^= detail::subfile(file, part, group & ~(1u << k));
                }
                payload.append(message);
            }
        }
        transcript.total_bits += payload.size();
        transcript.payloads.push_back(std::move(payload));
    }
    return transcript;
}

/// Decoding function for user k and library i. Reads only user k's cache, the
/// broadcast and the public demand; no access to the file store.
inline BitString decode(const SchemePlan& plan, const PlacementState& placement, const DeliveryTranscript& transcript,
                        std::size_t user, std::size_t library) {
    const auto K = plan.config.num_users;
    const auto& lib = plan.libraries[library];
    const auto& requests = transcript.demand.files[library];
    const auto& cache = placement.segments[user][library];
    const auto& payload = transcript.payloads[library];
    const auto wanted = requests[user];

    auto cached = [&](std::size_t p, std::int64_t file, std::uint32_t mask) {
        const auto& part = lib.parts[p];
        const auto rank = static_cast<std::uint64_t>(part.rank_for_user[user][mask]);
        const auto pos = lib.part_cache_offset[p] +
                         (static_cast<std::uint64_t>(file - 1) * part.cached_per_file + rank) * part.subfile_bits;
        return cache.slice(pos, part.subfile_bits);
    };

    BitString out;
    std::uint64_t payload_offset = 0;
    for (std::size_t p = 0; p < lib.parts.size(); ++p) {
        const auto& part = lib.parts[p];
        if (part.cached_by == 0) {
            const auto distinct = detail::distinct_requests(requests);
            const auto slot = static_cast<std::uint64_t>(
                std::lower_bound(distinct.begin(), distinct.end(), wanted) - distinct.begin());
            out.append(payload.slice(payload_offset + slot * part.bits, part.bits));
        } else {
            for (auto mask : part.subsets) {
                if (mask & (1u << user)) {
                    out.append(cached(p, wanted, mask));
                    continue;
                }
                const std::uint32_t group = mask | (1u << user);
                const auto index = static_cast<std::uint64_t>(part.message_rank[group]);
                BitString piece = payload.slice(payload_offset + index * part.subfile_bits, part.subfile_bits);
                for (std::int64_t j = 0; j < K; ++j)
                    if (static_cast<std::size_t>(j) != user && (group & (1u << j)))
                        piece ^= cached(p, requests[static_cast<std::size_t>(j)], group & ~(1u << j));
                out.append(piece);
            }
        }
        payload_offset += detail::part_payload_bits(part, K, requests);
    }
    return out;
}

struct DecodeFailure {
    DemandVector demand;
    std::size_t user = 0;     // 1-based
    std::size_t library = 0;  // 1-based
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::uint64_t bit_multiplier = 1;              // F = required multiple * bit_multiplier
    std::uint64_t max_base_bits = kDefaultMaxBaseBits;
    std::uint64_t demand_cap = kDefaultDemandCap;
    std::function<void(DeliveryTranscript&)> tamper;  // fault injection for tests
};

struct VerificationReport {
    std::uint64_t demands_checked = 0;
    std::uint64_t decodes_checked = 0;
    std::uint64_t errors = 0;
    std::uint64_t base_bits = 0;
    std::uint64_t seed = 0;
    std::uint64_t cache_bits = 0;                  // per user
    std::uint64_t max_transcript_bits = 0;
    std::vector<std::uint64_t> max_library_bits;   // per library, over demands
    std::vector<std::uint64_t> cache_segment_bits; // per library, per user
    Rational measured_rate;                        // max transcript bits / F
    Rational formula_rate;                         // sum alpha R_scheme
    std::optional<DecodeFailure> witness;

    bool ok() const { return errors == 0; }
};

/// Picks F = required multiple * options.bit_multiplier, within the bit budget.
inline std::uint64_t select_base_bits(const NetworkConfig& config, const Allocation& alloc, const VerifyOptions& options) {
    const BigInt base = required_base_bits(config, alloc) * std::max<std::uint64_t>(options.bit_multiplier, 1);
    if (base > options.max_base_bits)
        throw DivisibilityError("required F = " + base.str() + " bits exceeds the budget of " +
                                    std::to_string(options.max_base_bits),
                                required_base_bits(config, alloc));
    return base.convert_to<std::uint64_t>();
}

/// Runs every demand vector and checks every decoded file bit for bit.
/// Stops at the first (lexicographically smallest) failing demand.
inline VerificationReport verify_all(const NetworkConfig& config, const Allocation& alloc,
                                     const VerifyOptions& options = {}) {
    const auto demands = enumerate_demands(config, options.demand_cap);
    const std::uint64_t F = select_base_bits(config, alloc, options);
    const SchemePlan plan = plan_scheme(config, alloc, F);
    const FileStore store = make_file_store(config, F, options.seed);
    const PlacementState placement = place(store, plan);

    VerificationReport report;
    report.base_bits = F;
    report.seed = options.seed;
    report.cache_bits = plan.cache_bits();
    report.formula_rate = plan.formula_rate();
    report.max_library_bits.assign(config.num_libraries(), 0);
    for (const auto& lib : plan.libraries)
        report.cache_segment_bits.push_back(lib.cache_bits);

    for (const auto& demand : demands) {
        DeliveryTranscript transcript = deliver(store, plan, demand);
        if (options.tamper)
            options.tamper(transcript);
        ++report.demands_checked;
        report.max_transcript_bits = std::max(report.max_transcript_bits, transcript.total_bits);
        for (std::size_t l = 0; l < config.num_libraries(); ++l)
            report.max_library_bits[l] = std::max<std::uint64_t>(report.max_library_bits[l], transcript.payloads[l].size());
        for (std::size_t k = 0; k < static_cast<std::size_t>(config.num_users); ++k) {
            for (std::size_t l = 0; l < config.num_libraries(); ++l) {
                ++report.decodes_checked;
                const auto& truth = store.files[l][static_cast<std::size_t>(demand.files[l][k] - 1)];
                if (decode(plan, placement, transcript, k, l) != truth) {
                    ++report.errors;
                    if (!report.witness)
                        report.witness = DecodeFailure{demand, k + 1, l + 1};
                }
            }
        }
        if (report.witness)
            break;
    }
    report.measured_rate = Rational(report.max_transcript_bits, F);
    return report;
}

struct ReductionReport {
    std::uint64_t demands_checked = 0;
    std::uint64_t base_bits = 0;
    std::uint64_t cache_bits = 0;
    std::vector<std::uint64_t> concatenated_file_bits;  // per concatenated file n
    std::uint64_t dummy_decodes_discarded = 0;
    bool transcripts_identical = true;
    std::uint64_t errors = 0;
    std::optional<std::vector<std::int64_t>> witness;  // failing d'

    bool ok() const { return errors == 0 && transcripts_identical; }
};

/// Induced multi-library demand d^(l)_k = min(d'_k, N_l), in original library order.
inline DemandVector induced_demand(const NetworkConfig& config, const std::vector<std::int64_t>& demand_prime) {
    DemandVector d;
    for (const auto& lib : config.libraries) {
        std::vector<std::int64_t> row;
        for (auto n : demand_prime)
            row.push_back(std::min(n, lib.num_files));
        d.files.push_back(std::move(row));
    }
    return d;
}

/// Serves concatenated-library demands with the multi-library scheme: the same
/// caches, the same broadcast for the induced demand, and per user the
/// decoders of the libraries at or above f(d'_k) concatenated. Reconstructions
/// from libraries below f(d'_k) are dummies and are discarded.
inline ReductionReport reduction_demo(const NetworkConfig& config, const Allocation& alloc,
                                      const std::vector<std::vector<std::int64_t>>& demands_prime,
                                      const VerifyOptions& options = {}) {
    const ConcatenatedLibrary target = concatenate(config);
    const NetworkConfig sorted = sorted_by_size_copy(config, target.order);
    const std::uint64_t F = select_base_bits(config, alloc, options);
    const SchemePlan plan = plan_scheme(config, alloc, F);
    const FileStore store = make_file_store(config, F, options.seed);
    const PlacementState placement = place(store, plan);
    const std::size_t L = config.num_libraries();

    ReductionReport report;
    report.base_bits = F;
    report.cache_bits = plan.cache_bits();

    // W_n = [W^(f(n))_n, ..., W^(L)_n] over sorted libraries.
    std::vector<BitString> concatenated;
    for (std::int64_t n = 1; n <= target.num_files; ++n) {
        BitString w;
        for (std::size_t j = subfile_level(sorted, n) - 1; j < L; ++j)
            w.append(store.files[target.order[j]][static_cast<std::size_t>(n - 1)]);
        report.concatenated_file_bits.push_back(w.size());
        concatenated.push_back(std::move(w));
    }

    for (const auto& dprime : demands_prime) {
        if (static_cast<std::int64_t>(dprime.size()) != config.num_users)
            throw std::invalid_argument("concatenated demand must list every user");
        for (auto n : dprime)
            if (n < 1 || n > target.num_files)
                throw std::invalid_argument("concatenated demand " + std::to_string(n) + " out of range");
        ++report.demands_checked;
        const DemandVector induced = induced_demand(config, dprime);
        const DeliveryTranscript transcript = deliver(store, plan, induced);
        const DeliveryTranscript direct = deliver(store, plan, induced);
        for (std::size_t l = 0; l < L; ++l)
            if (transcript.payloads[l].to_bytes() != direct.payloads[l].to_bytes())
                report.transcripts_identical = false;

        bool failed = false;
        for (std::size_t k = 0; k < static_cast<std::size_t>(config.num_users); ++k) {
            const auto n = dprime[k];
            const std::size_t first = subfile_level(sorted, n) - 1;
            report.dummy_decodes_discarded += first;
            BitString w;
            for (std::size_t j = first; j < L; ++j)
                w.append(decode(plan, placement, transcript, k, target.order[j]));
            if (w != concatenated[static_cast<std::size_t>(n - 1)])
                failed = true;
        }
        if (failed) {
            ++report.errors;
            if (!report.witness)
                report.witness = dprime;
        }
    }
    return report;
}

/// Every d' in [N_L]^K, lexicographic.
inline std::vector<std::vector<std::int64_t>> all_concatenated_demands(const NetworkConfig& config,
                                                                      std::uint64_t cap = kDefaultDemandCap) {
    std::int64_t largest = 0;
    for (const auto& lib : config.libraries)
        largest = std::max(largest, lib.num_files);
    const BigInt count = boost::multiprecision::pow(BigInt(largest), static_cast<unsigned>(config.num_users));
    if (count > cap)
        throw EnumerationCapExceeded("concatenated demand vectors", count);
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> d(static_cast<std::size_t>(config.num_users), 1);
    while (true) {
        out.push_back(d);
        std::size_t pos = d.size();
        while (pos > 0) {
            if (++d[pos - 1] <= largest)
                break;
            d[pos - 1] = 1;
            --pos;
        }
        if (pos == 0)
            break;
    }
    return out;
}

// Binary dump: "MLCD", u32 record count, then per record a u32 byte length,
// a u8 count of zero pad bits and the MSB-first bytes. All integers big-endian.
// Record order: files (l, n), caches (k, l), payloads l.

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                           static_cast<char>(v)};
    out.write(bytes, 4);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4))
        throw std::runtime_error("truncated dump");
    return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) |
           std::uint32_t{bytes[3]};
}

}  // namespace detail

inline void write_dump(std::ostream& out, const FileStore& store, const PlacementState& placement,
                       const DeliveryTranscript& transcript) {
    std::vector<const BitString*> records;
    for (const auto& lib : store.files)
        for (const auto& f : lib)
            records.push_back(&f);
    for (const auto& user : placement.segments)
        for (const auto& s : user)
            records.push_back(&s);
    for (const auto& p : transcript.payloads)
        records.push_back(&p);
    out.write("MLCD", 4);
    detail::put_u32(out, static_cast<std::uint32_t>(records.size()));
    for (const auto* bits : records) {
        const auto bytes = bits->to_bytes();
        detail::put_u32(out, static_cast<std::uint32_t>(bytes.size()));
        out.put(static_cast<char>(bytes.size() * 8 - bits->size()));
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
}

inline std::vector<BitString> read_dump(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "MLCD")
        throw std::runtime_error("not a dump file");
    const std::uint32_t count = detail::get_u32(in);
    std::vector<BitString> records;
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t length = detail::get_u32(in);
        const int pad = in.get();
        if (pad < 0 || pad > 7)
            throw std::runtime_error("bad pad length in dump");
        std::vector<std::uint8_t> bytes(length);
        if (!in.read(reinterpret_cast<char*>(bytes.data()), length))
            throw std::runtime_error("truncated dump");
        records.push_back(BitString::from_bytes(bytes, std::size_t{length} * 8 - static_cast<std::size_t>(pad)));
    }
    return records;
}

}  // namespace mlcache
