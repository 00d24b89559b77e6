#pragma once

#include "mlcache/rational.hpp"

#include <cstdint>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

/// One library: `num_files` equally sized files of `alpha * F` bits each.
struct LibrarySpec {
    std::int64_t num_files = 1;
    Rational alpha = 1;

    friend bool operator==(const LibrarySpec&, const LibrarySpec&) = default;
};

/// A multi-library broadcast caching network. `cache_size` is in units of F.
struct NetworkConfig {
    std::vector<LibrarySpec> libraries;
    std::int64_t num_users = 1;
    Rational cache_size = 0;

    std::size_t num_libraries() const { return libraries.size(); }

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Requests: `files[l][k]` is the 1-based file index user k asks from library l.
struct DemandVector {
    std::vector<std::vector<std::int64_t>> files;

    friend bool operator==(const DemandVector&, const DemandVector&) = default;
    friend auto operator<=>(const DemandVector&, const DemandVector&) = default;
};

struct Violation {
    std::string invariant;
    std::string detail;
};

inline Rational total_content(const NetworkConfig& config) {
    Rational total = 0;
    for (const auto& lib : config.libraries)
        total += lib.alpha * lib.num_files;
    return total;
}

inline Rational alpha_sum(const NetworkConfig& config) {
    Rational sum = 0;
    for (const auto& lib : config.libraries)
        sum += lib.alpha;
    return sum;
}

inline std::vector<Violation> validate(const NetworkConfig& config) {
    std::vector<Violation> out;
    if (config.libraries.empty())
        out.push_back({"libraries", "at least one library is required"});
    for (std::size_t l = 0; l < config.libraries.size(); ++l) {
        const auto& lib = config.libraries[l];
        const std::string where = "library " + std::to_string(l + 1);
        if (lib.num_files < 1)
            out.push_back({"num_files", where + ": num_files = " + std::to_string(lib.num_files) + " < 1"});
        if (lib.alpha <= 0)
            out.push_back({"alpha", where + ": alpha = " + to_string(lib.alpha) + " <= 0"});
    }
    if (config.num_users < 1)
        out.push_back({"num_users", "num_users = " + std::to_string(config.num_users) + " < 1"});
    if (config.cache_size < 0)
        out.push_back({"cache_size", "cache_size = " + to_string(config.cache_size) + " < 0"});
    if (!config.libraries.empty()) {
        const Rational sum = alpha_sum(config);
        if (sum != 1)
            out.push_back({"normalization", "normalization sum = " + to_string(sum) + " ≠ 1"});
    }
    return out;
}

inline bool is_valid(const NetworkConfig& config) { return validate(config).empty(); }

inline void require_valid(const NetworkConfig& config) {
    const auto violations = validate(config);
    if (violations.empty())
        return;
    std::string message = "invalid config:";
    for (const auto& v : violations)
        message += " [" + v.detail + "]";
    throw std::invalid_argument(message);
}

struct ClampedConfig {
    NetworkConfig config;
    std::optional<std::string> warning;
};

/// Caches beyond the total content are useless; clamp them and say so.
inline ClampedConfig clamp_cache_size(NetworkConfig config) {
    const Rational total = total_content(config);
    if (config.cache_size <= total)
        return {std::move(config), std::nullopt};
    std::string warning = "cache_size " + to_string(config.cache_size) +
                          " exceeds total content " + to_string(total) + "; clamped";
    config.cache_size = total;
    return {std::move(config), std::move(warning)};
}

class EnumerationCapExceeded : public std::runtime_error {
public:
    EnumerationCapExceeded(const std::string& what, BigInt count)
        : std::runtime_error(what + ": " + count.str() + " items exceed the enumeration cap"),
          count_(std::move(count)) {}
    const BigInt& count() const { return count_; }

private:
    BigInt count_;
};

inline constexpr std::uint64_t kDefaultDemandCap = 1u << 20;

/// All demand vectors of a config in lexicographic order, library-major.
/// Index-addressable so callers can split the space.
class DemandSpace {
public:
    DemandSpace(std::vector<std::int64_t> files_per_library, std::int64_t num_users, std::uint64_t count)
        : files_(std::move(files_per_library)), users_(num_users), count_(count) {}

    std::uint64_t size() const { return count_; }

    DemandVector at(std::uint64_t index) const {
        DemandVector d;
        d.files.assign(files_.size(), std::vector<std::int64_t>(static_cast<std::size_t>(users_), 1));
        for (std::size_t l = files_.size(); l-- > 0;) {
            for (std::int64_t k = users_; k-- > 0;) {
                const auto n = static_cast<std::uint64_t>(files_[l]);
                d.files[l][static_cast<std::size_t>(k)] = static_cast<std::int64_t>(index % n) + 1;
                index /= n;
            }
        }
        return d;
    }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = DemandVector;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const DemandSpace* space, std::uint64_t index) : space_(space), index_(index) {}
        DemandVector operator*() const { return space_->at(index_); }
        iterator& operator++() { ++index_; return *this; }
        iterator operator++(int) { auto copy = *this; ++index_; return copy; }
        bool operator==(const iterator& other) const { return index_ == other.index_; }

    private:
        const DemandSpace* space_ = nullptr;
        std::uint64_t index_ = 0;
    };

    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, count_}; }

private:
    std::vector<std::int64_t> files_;
    std::int64_t users_;
    std::uint64_t count_;
};

inline BigInt demand_count(const NetworkConfig& config) {
    BigInt count = 1;
    for (const auto& lib : config.libraries)
        count *= boost::multiprecision::pow(BigInt(lib.num_files), static_cast<unsigned>(config.num_users));
    return count;
}

inline DemandSpace enumerate_demands(const NetworkConfig& config, std::uint64_t cap = kDefaultDemandCap) {
    require_valid(config);
    const BigInt count = demand_count(config);
    if (count > cap)
        throw EnumerationCapExceeded("demand vectors", count);
    std::vector<std::int64_t> files;
    for (const auto& lib : config.libraries)
        files.push_back(lib.num_files);
    return DemandSpace(std::move(files), config.num_users, count.convert_to<std::uint64_t>());
}

inline void require_demand_matches(const NetworkConfig& config, const DemandVector& demand) {
    if (demand.files.size() != config.num_libraries())
        throw std::invalid_argument("demand has " + std::to_string(demand.files.size()) +
                                    " libraries, config has " + std::to_string(config.num_libraries()));
    for (std::size_t l = 0; l < demand.files.size(); ++l) {
        if (static_cast<std::int64_t>(demand.files[l].size()) != config.num_users)
            throw std::invalid_argument("demand for library " + std::to_string(l + 1) +
                                        " does not list every user");
        for (auto n : demand.files[l])
            if (n < 1 || n > config.libraries[l].num_files)
                throw std::invalid_argument("demand " + std::to_string(n) + " out of range for library " +
                                            std::to_string(l + 1));
    }
}

}  // namespace mlcache
