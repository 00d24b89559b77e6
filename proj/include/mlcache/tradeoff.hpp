#pragma once

#include "mlcache/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

struct CornerPoint {
    Rational memory;
    Rational rate;

    friend bool operator==(const CornerPoint&, const CornerPoint&) = default;
};

/// How much a tradeoff curve can be trusted as R*(1, M, 1, N).
enum class TradeoffKind {
    exact,       // the true memory-rate tradeoff
    achievable,  // an upper bound realised by a concrete scheme
};

/*
 * Convex piecewise-linear memory-rate curve of a single library with N equal files:
 *
 *     R(M) = intercept[i] - slope[i] * M   for breakpoint[i] <= M < breakpoint[i+1]
 *
 * with 0 = breakpoint[0] < ... < breakpoint[r] = N, slopes strictly decreasing and
 * positive, continuity at every interior breakpoint and R(N) = 0. Beyond N the
 * rate is 0, which plays the role of a terminal slope of 0.
 */
class PiecewiseLinearTradeoff {
public:
    static PiecewiseLinearTradeoff from_segments(std::int64_t num_files, std::vector<Rational> breakpoints,
                                                 std::vector<Rational> slopes, std::vector<Rational> intercepts,
                                                 std::string label, TradeoffKind kind) {
        PiecewiseLinearTradeoff t;
        t.num_files_ = num_files;
        t.breakpoints_ = std::move(breakpoints);
        t.slopes_ = std::move(slopes);
        t.intercepts_ = std::move(intercepts);
        t.label_ = std::move(label);
        t.kind_ = kind;
        t.check_invariants();
        return t;
    }

    /// Builds the curve through strictly convex corner points (0, R0), ..., (N, 0).
    /// Collinear or non-convex input is rejected; use lower_convex_envelope to repair it.
    static PiecewiseLinearTradeoff from_corners(std::int64_t num_files, const std::vector<CornerPoint>& corners,
                                                std::string label, TradeoffKind kind) {
        if (corners.size() < 2)
            throw std::invalid_argument("a tradeoff needs at least two corner points");
        std::vector<Rational> breakpoints, slopes, intercepts;
        for (const auto& c : corners)
            breakpoints.push_back(c.memory);
        for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
            const Rational run = corners[i + 1].memory - corners[i].memory;
            if (run <= 0)
                throw std::invalid_argument("corner memories must be strictly increasing");
            const Rational slope = (corners[i].rate - corners[i + 1].rate) / run;
            slopes.push_back(slope);
            intercepts.push_back(corners[i].rate + slope * corners[i].memory);
        }
        return from_segments(num_files, std::move(breakpoints), std::move(slopes), std::move(intercepts),
                             std::move(label), kind);
    }

    std::int64_t num_files() const { return num_files_; }
    std::size_t segment_count() const { return slopes_.size(); }
    const std::vector<Rational>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& slopes() const { return slopes_; }
    const std::vector<Rational>& intercepts() const { return intercepts_; }
    const std::string& label() const { return label_; }
    TradeoffKind kind() const { return kind_; }
    bool is_exact() const { return kind_ == TradeoffKind::exact; }

    /// Slope magnitude of segment i, with the sentinel 0 for i >= r.
    Rational right_slope(std::size_t segment) const {
        return segment < slopes_.size() ? slopes_[segment] : Rational(0);
    }

    /// Index i with breakpoint[i] <= memory < breakpoint[i+1]; r once memory >= N.
    std::size_t segment_at(const Rational& memory) const {
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), memory);
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    Rational operator()(const Rational& memory) const {
        if (memory < 0)
            throw std::invalid_argument("negative memory " + to_string(memory));
        const std::size_t i = segment_at(memory);
        if (i >= slopes_.size())
            return 0;
        return intercepts_[i] - slopes_[i] * memory;
    }

    std::vector<CornerPoint> corners() const {
        std::vector<CornerPoint> out;
        for (const auto& theta : breakpoints_)
            out.push_back({theta, (*this)(theta)});
        return out;
    }

    /// Same curve, regardless of label.
    bool same_curve(const PiecewiseLinearTradeoff& other) const {
        return num_files_ == other.num_files_ && breakpoints_ == other.breakpoints_ && slopes_ == other.slopes_;
    }

private:
    PiecewiseLinearTradeoff() = default;

    void check_invariants() const {
        if (num_files_ < 1)
            throw std::invalid_argument("tradeoff num_files must be >= 1");
        const std::size_t r = slopes_.size();
        if (r == 0 || breakpoints_.size() != r + 1 || intercepts_.size() != r)
            throw std::invalid_argument("tradeoff needs r >= 1 segments with r+1 breakpoints");
        if (breakpoints_.front() != 0 || breakpoints_.back() != num_files_)
            throw std::invalid_argument("breakpoints must run from 0 to N = " + std::to_string(num_files_));
        for (std::size_t i = 0; i < r; ++i) {
            if (breakpoints_[i] >= breakpoints_[i + 1])
                throw std::invalid_argument("breakpoints must be strictly increasing");
            if (slopes_[i] <= 0)
                throw std::invalid_argument("slope " + to_string(slopes_[i]) + " of segment " +
                                            std::to_string(i) + " is not positive");
            if (i > 0 && slopes_[i] >= slopes_[i - 1])
                throw std::invalid_argument("slopes must be strictly decreasing (convexity)");
            if (i > 0 && intercepts_[i - 1] - slopes_[i - 1] * breakpoints_[i] !=
                             intercepts_[i] - slopes_[i] * breakpoints_[i])
                throw std::invalid_argument("discontinuity at breakpoint " + to_string(breakpoints_[i]));
        }
        if (intercepts_[r - 1] - slopes_[r - 1] * num_files_ != 0)
            throw std::invalid_argument("rate must vanish at M = N");
        if (intercepts_[0] > num_files_)
            throw std::invalid_argument("rate at M = 0 exceeds N");
    }

    std::int64_t num_files_ = 1;
    std::vector<Rational> breakpoints_;
    std::vector<Rational> slopes_;
    std::vector<Rational> intercepts_;
    std::string label_;
    TradeoffKind kind_ = TradeoffKind::achievable;
};

inline Rational evaluate(const PiecewiseLinearTradeoff& t, const Rational& memory) { return t(memory); }

/// Lower convex envelope of memory-sharing between the given points.
inline PiecewiseLinearTradeoff lower_convex_envelope(std::vector<CornerPoint> points, std::int64_t num_files,
                                                     std::string label = "envelope",
                                                     TradeoffKind kind = TradeoffKind::achievable) {
    if (points.size() < 2)
        throw std::invalid_argument("envelope needs at least two points");
    std::sort(points.begin(), points.end(),
              [](const CornerPoint& a, const CornerPoint& b) { return a.memory < b.memory; });
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i].memory == points[i + 1].memory)
            throw std::invalid_argument("duplicate memory " + to_string(points[i].memory));
    if (points.front().memory != 0)
        throw std::invalid_argument("missing anchor point at memory 0");
    if (points.back().memory != num_files || points.back().rate != 0)
        throw std::invalid_argument("missing anchor point (N, 0) with N = " + std::to_string(num_files));
    for (const auto& p : points)
        if (p.rate < 0)
            throw std::invalid_argument("negative rate " + to_string(p.rate));

    // Andrew's monotone chain, lower hull; collinear points are dropped.
    std::vector<CornerPoint> hull;
    for (const auto& p : points) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const Rational cross = (b.memory - a.memory) * (p.rate - a.rate) - (b.rate - a.rate) * (p.memory - a.memory);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    return PiecewiseLinearTradeoff::from_corners(num_files, hull, std::move(label), kind);
}

/// Envelope of the centralized placement/XOR-delivery scheme for N files and K users.
inline PiecewiseLinearTradeoff build_centralized_scheme_tradeoff(std::int64_t num_files, std::int64_t num_users) {
    if (num_files < 1 || num_users < 1)
        throw std::invalid_argument("scheme tradeoff needs N >= 1 and K >= 1");
    std::vector<CornerPoint> points;
    points.push_back({0, Rational(std::min(num_files, num_users))});
    for (std::int64_t t = 1; t <= num_users; ++t)
        points.push_back({Rational(t * num_files, num_users), Rational(num_users - t, 1 + t)});
    // With one file or one user the scheme meets the cut-set bound 1 - M/N.
    const auto kind = (num_files == 1 || num_users == 1) ? TradeoffKind::exact : TradeoffKind::achievable;
    return lower_convex_envelope(std::move(points), num_files,
                                 "scheme(N=" + std::to_string(num_files) + ",K=" + std::to_string(num_users) + ")",
                                 kind);
}

/// The known exact tradeoff for two files and two users.
inline PiecewiseLinearTradeoff build_exact_two_by_two() {
    return PiecewiseLinearTradeoff::from_corners(
        2, {{0, 2}, {Rational(1, 2), 1}, {1, Rational(1, 2)}, {2, 0}}, "exact(N=2,K=2)", TradeoffKind::exact);
}

inline Rational cut_set_bound(std::int64_t num_files, std::int64_t num_users, const Rational& memory) {
    if (memory < 0 || memory > num_files)
        throw std::invalid_argument("memory " + to_string(memory) + " outside [0, " + std::to_string(num_files) + "]");
    Rational best = 0;
    for (std::int64_t s = 1; s <= std::min(num_files, num_users); ++s) {
        const std::int64_t rounds = num_files / s;
        const Rational bound = Rational(s) - s * memory / rounds;
        if (bound > best)
            best = bound;
    }
    return best;
}

/// Selects a tradeoff builder by name: "scheme", "exact2x2", or "auto"
/// (exact2x2 when N = K = 2, scheme otherwise).
inline PiecewiseLinearTradeoff build_tradeoff(const std::string& kind, std::int64_t num_files, std::int64_t num_users) {
    if (kind == "scheme")
        return build_centralized_scheme_tradeoff(num_files, num_users);
    if (kind == "exact2x2") {
        if (num_files != 2 || num_users != 2)
            throw std::invalid_argument("exact2x2 requires N = K = 2 (got N = " + std::to_string(num_files) +
                                        ", K = " + std::to_string(num_users) + ")");
        return build_exact_two_by_two();
    }
    if (kind == "auto")
        return (num_files == 2 && num_users == 2) ? build_exact_two_by_two()
                                                  : build_centralized_scheme_tradeoff(num_files, num_users);
    throw std::invalid_argument("unknown tradeoff kind '" + kind + "'");
}

}  // namespace mlcache
