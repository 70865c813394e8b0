#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "usco/core.hpp"

namespace usco {

struct KCenterSolution {
    CenterSet centers;
    double radius = 0.0;
};

struct IterConfig {
    int max_iters = 100;
    double tol = 1e-6;  // relative objective-improvement threshold
};

struct LloydOptions {
    IterConfig iter;
    bool restrict_centers_to_input = false;  // snap updated centers to nearest input point
};

// Farthest-point traversal with an explicit first pick. Pads with duplicate
// picks once the distinct points are exhausted, so exactly k centers return.
inline KCenterSolution gonzalez_kcenter_from(const Dataset& P, int k, std::size_t first_index) {
    if (k < 1) throw std::invalid_argument("gonzalez: k < 1");
    const std::size_t n = P.size();
    if (first_index >= n) throw std::invalid_argument("gonzalez: first index out of range");

    CenterSet H;
    H.centers.push_back(P.points[first_index]);
    std::vector<double> min_sq(n);
    for (std::size_t i = 0; i < n; ++i) min_sq[i] = sq_dist(P.points[i], H.centers[0]);

    while (H.centers.size() < static_cast<std::size_t>(k)) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (min_sq[i] > min_sq[far]) far = i;  // ties keep lowest index
        H.centers.push_back(P.points[far]);
        for (std::size_t i = 0; i < n; ++i)
            min_sq[i] = std::min(min_sq[i], sq_dist(P.points[i], P.points[far]));
    }
    double r2 = 0.0;
    for (double v : min_sq) r2 = std::max(r2, v);
    return {std::move(H), std::sqrt(r2)};
}

inline KCenterSolution gonzalez_kcenter(const Dataset& P, int k, std::mt19937_64& rng) {
    if (k < 1) throw std::invalid_argument("gonzalez: k < 1");
    std::uniform_int_distribution<std::size_t> pick(0, P.size() - 1);
    return gonzalez_kcenter_from(P, k, pick(rng));
}

namespace detail {

// Greedy disk cover at radius r: k rounds of "pick the point whose r-ball
// covers the most uncovered points, then remove everything within 3r".
// Succeeds when at most z points stay uncovered.
inline bool charikar_greedy(const std::vector<std::vector<double>>& d, int k, int z, double r,
                            std::vector<std::size_t>* chosen) {
    const std::size_t n = d.size();
    std::vector<char> covered(n, 0);
    std::size_t uncovered = n;
    if (chosen) chosen->clear();
    for (int round = 0; round < k && uncovered > 0; ++round) {
        std::size_t best = 0, best_count = 0;
        for (std::size_t p = 0; p < n; ++p) {
            std::size_t count = 0;
            for (std::size_t q = 0; q < n; ++q)
                if (!covered[q] && d[p][q] <= r) ++count;
            if (count > best_count) {
                best_count = count;
                best = p;
            }
        }
        if (chosen) chosen->push_back(best);
        for (std::size_t q = 0; q < n; ++q)
            if (!covered[q] && d[best][q] <= 3.0 * r) {
                covered[q] = 1;
                --uncovered;
            }
    }
    return uncovered <= static_cast<std::size_t>(z);
}

}  // namespace detail

// Greedy-disk k-center with z outliers; the candidate radii are the sorted
// pairwise distances, binary-searched for the smallest feasible one. The
// returned radius is the max distance of the n-z retained inliers to the
// centers, which is within 3x of the optimal radius with exactly z outliers.
inline KCenterSolution charikar_kcenter_outliers(const Dataset& P, int k, int z) {
    if (k < 1) throw std::invalid_argument("charikar: k < 1");
    const std::size_t n = P.size();
    if (z < 0 || static_cast<std::size_t>(z) >= n)
        throw std::invalid_argument("charikar: need 0 <= z < n");

    if (static_cast<std::size_t>(k + z) >= n) {
        // Keeping only (up to) k distinct points as centers already wins.
        CenterSet H;
        for (std::size_t i = 0; i < n && H.centers.size() < static_cast<std::size_t>(k); ++i)
            H.centers.push_back(P.points[i]);
        while (H.centers.size() < static_cast<std::size_t>(k)) H.centers.push_back(P.points[0]);
        const double r = objective_with_outliers(P, H, z, ObjectiveKind::Center);
        return {std::move(H), r};
    }

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    std::vector<double> radii;
    radii.reserve(n * (n - 1) / 2 + 1);
    radii.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = dist(P.points[i], P.points[j]);
            radii.push_back(d[i][j]);
        }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    std::size_t lo = 0, hi = radii.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (detail::charikar_greedy(d, k, z, radii[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    std::vector<std::size_t> chosen;
    detail::charikar_greedy(d, k, z, radii[lo], &chosen);

    CenterSet H;
    for (std::size_t i : chosen) H.centers.push_back(P.points[i]);
    while (H.centers.size() < static_cast<std::size_t>(k))
        H.centers.push_back(H.centers.front());  // fewer disks needed than k
    const double inlier_radius = objective_with_outliers(P, H, z, ObjectiveKind::Center);
    return {std::move(H), inlier_radius};
}

// Greedy D^2 seeding: each round draws 2+log2(k) candidates by D^2 weight and
// keeps the one minimizing the resulting potential, which makes seeding a
// center on an isolated far point (an outlier) rare. Exact duplicate draws are
// resampled up to a small retry cap, then accepted as-is.
inline CenterSet kmeanspp_seed(const Dataset& P, int k, std::mt19937_64& rng) {
    if (k < 1) throw std::invalid_argument("kmeanspp: k < 1");
    const std::size_t n = P.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    CenterSet H;
    H.centers.push_back(P.points[pick(rng)]);

    std::vector<double> min_sq(n);
    for (std::size_t i = 0; i < n; ++i) min_sq[i] = sq_dist(P.points[i], H.centers[0]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int kDuplicateRetries = 16;
    const int local_trials = 2 + static_cast<int>(std::log2(std::max(2, k)));
    while (H.centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double v : min_sq) total += v;

        auto draw_one = [&]() {
            std::size_t next = 0;
            for (int attempt = 0;; ++attempt) {
                if (total <= 0.0) {
                    next = pick(rng);  // all mass at existing centers
                } else {
                    double target = unit(rng) * total;
                    next = n - 1;
                    for (std::size_t i = 0; i < n; ++i) {
                        target -= min_sq[i];
                        if (target <= 0.0) {
                            next = i;
                            break;
                        }
                    }
                }
                const bool duplicate = std::any_of(
                    H.centers.begin(), H.centers.end(),
                    [&](const Point& c) { return c == P.points[next]; });
                if (!duplicate || attempt >= kDuplicateRetries) break;
            }
            return next;
        };

        std::size_t best = draw_one();
        double best_pot = std::numeric_limits<double>::infinity();
        for (int t = 0; t < local_trials; ++t) {
            const std::size_t cand = t == 0 ? best : draw_one();
            double pot = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                pot += std::min(min_sq[i], sq_dist(P.points[i], P.points[cand]));
            if (pot < best_pot) {
                best_pot = pot;
                best = cand;
            }
        }
        H.centers.push_back(P.points[best]);
        for (std::size_t i = 0; i < n; ++i)
            min_sq[i] = std::min(min_sq[i], sq_dist(P.points[i], P.points[best]));
    }
    return H;
}

namespace detail {

// Weiszfeld iteration for the geometric median of the given points.
inline Point geometric_median(const std::vector<const Point*>& pts, Point start) {
    constexpr double kTol = 1e-7;
    constexpr int kMaxIters = 100;
    constexpr double kSingular = 1e-12;
    const std::size_t d = start.size();
    Point y = std::move(start);
    for (int it = 0; it < kMaxIters; ++it) {
        Point num(d, 0.0);
        double den = 0.0;
        for (const Point* p : pts) {
            double dy = dist(*p, y);
            if (dy < kSingular) dy = kSingular;  // shift off the singularity
            const double w = 1.0 / dy;
            for (std::size_t j = 0; j < d; ++j) num[j] += (*p)[j] * w;
            den += w;
        }
        Point next(d);
        for (std::size_t j = 0; j < d; ++j) next[j] = num[j] / den;
        const double moved = dist(next, y);
        y = std::move(next);
        if (moved < kTol) break;
    }
    return y;
}

inline Point cluster_mean(const std::vector<const Point*>& pts, std::size_t d) {
    Point m(d, 0.0);
    for (const Point* p : pts)
        for (std::size_t j = 0; j < d; ++j) m[j] += (*p)[j];
    for (std::size_t j = 0; j < d; ++j) m[j] /= static_cast<double>(pts.size());
    return m;
}

inline void snap_to_input(const Dataset& P, CenterSet& H) {
    for (auto& c : H.centers) {
        std::size_t best = 0;
        double best_sq = sq_dist(c, P.points[0]);
        for (std::size_t i = 1; i < P.size(); ++i) {
            const double s = sq_dist(c, P.points[i]);
            if (s < best_sq) {
                best_sq = s;
                best = i;
            }
        }
        c = P.points[best];
    }
}

// Shared Lloyd body; z > 0 trims the z costliest points before each update.
inline CenterSet lloyd_impl(const Dataset& P, CenterSet H, int z, ObjectiveKind kind,
                            const LloydOptions& opt, std::vector<double>* trace) {
    if (H.centers.empty()) throw std::invalid_argument("lloyd: empty init");
    if (kind == ObjectiveKind::Center) throw std::invalid_argument("lloyd: center kind unsupported");
    if (z < 0 || static_cast<std::size_t>(z) >= P.size())
        throw std::invalid_argument("lloyd: need 0 <= z < n");
    const std::size_t n = P.size();
    const std::size_t d = P.dim();
    const std::size_t kk = H.centers.size();

    double prev_obj = std::numeric_limits<double>::infinity();
    if (trace) trace->clear();
    for (int it = 0; it < opt.iter.max_iters; ++it) {
        std::vector<double> costs(n);
        std::vector<std::size_t> nearest(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto nc = dist_to_set(P.points[i], H);
            nearest[i] = nc.index;
            costs[i] = kind == ObjectiveKind::Means ? nc.distance * nc.distance : nc.distance;
        }
        const auto kept = kept_after_trim(costs, z);

        std::vector<std::vector<const Point*>> members(kk);
        for (std::size_t i : kept) members[nearest[i]].push_back(&P.points[i]);

        for (std::size_t c = 0; c < kk; ++c) {
            if (members[c].empty()) {
                // Re-seed an empty cluster at the farthest non-trimmed point.
                std::size_t far = kept.front();
                for (std::size_t i : kept)
                    if (costs[i] > costs[far]) far = i;
                H.centers[c] = P.points[far];
                continue;
            }
            H.centers[c] = kind == ObjectiveKind::Means
                               ? cluster_mean(members[c], d)
                               : geometric_median(members[c], H.centers[c]);
        }
        if (opt.restrict_centers_to_input) snap_to_input(P, H);

        const double obj = objective_with_outliers(P, H, z, kind);
        if (trace) trace->push_back(obj);
        if (prev_obj < std::numeric_limits<double>::infinity() &&
            prev_obj - obj < opt.iter.tol * std::max(prev_obj, 1e-300))
            break;
        prev_obj = std::min(prev_obj, obj);
    }
    return H;
}

}  // namespace detail

inline CenterSet lloyd(const Dataset& P, CenterSet init, ObjectiveKind kind,
                       const LloydOptions& opt = {}, std::vector<double>* trace = nullptr) {
    return detail::lloyd_impl(P, std::move(init), 0, kind, opt, trace);
}

// k-means-- style trimmed Lloyd: every iteration marks the z costliest points
// as outliers before the assignment/update step.
inline CenterSet trimmed_lloyd(const Dataset& P, int z, CenterSet init, ObjectiveKind kind,
                               const LloydOptions& opt = {},
                               std::vector<double>* trace = nullptr) {
    return detail::lloyd_impl(P, std::move(init), z, kind, opt, trace);
}

}  // namespace usco
