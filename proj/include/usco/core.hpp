#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace usco {

using Point = std::vector<double>;

// Membership / label value marking a point as an outlier.
inline constexpr int kOutlier = -1;

struct Dataset {
    std::vector<Point> points;
    std::vector<int> labels;                 // empty if unlabeled; kOutlier marks outliers
    std::vector<std::string> label_names;    // names for label ids 0..L-1
    std::string name;

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
    bool has_labels() const { return !labels.empty(); }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("dataset: empty");
        const std::size_t d = points.front().size();
        if (d == 0) throw std::invalid_argument("dataset: zero-dimensional points");
        for (const auto& p : points) {
            if (p.size() != d) throw std::invalid_argument("dataset: inconsistent dimension");
            for (double c : p)
                if (!std::isfinite(c)) throw std::invalid_argument("dataset: non-finite coordinate");
        }
        if (!labels.empty() && labels.size() != points.size())
            throw std::invalid_argument("dataset: label count != point count");
    }
};

struct CenterSet {
    std::vector<Point> centers;

    std::size_t size() const { return centers.size(); }
    std::size_t dim() const { return centers.empty() ? 0 : centers.front().size(); }
};

enum class ObjectiveKind { Center, Median, Means };

inline const char* to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::Center: return "center";
        case ObjectiveKind::Median: return "median";
        case ObjectiveKind::Means: return "means";
    }
    return "?";
}

inline ObjectiveKind objective_kind_from_string(const std::string& s) {
    if (s == "center") return ObjectiveKind::Center;
    if (s == "median") return ObjectiveKind::Median;
    if (s == "means") return ObjectiveKind::Means;
    throw std::invalid_argument("unknown objective kind: " + s);
}

struct ClusteringResult {
    CenterSet centers;
    std::vector<int> memberships;  // per-point center index, or kOutlier
    int outlier_count = 0;
    double objective = 0.0;
    ObjectiveKind kind = ObjectiveKind::Center;
};

inline double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(sq_dist(a, b)); }

struct NearestCenter {
    double distance = 0.0;
    std::size_t index = 0;
};

// Nearest center by Euclidean distance; ties resolve to the lowest center index.
inline NearestCenter dist_to_set(const Point& p, const CenterSet& H) {
    if (H.centers.empty()) throw std::invalid_argument("dist_to_set: empty center set");
    if (p.size() != H.centers.front().size())
        throw std::invalid_argument("dist_to_set: dimension mismatch");
    double best = sq_dist(p, H.centers[0]);
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < H.centers.size(); ++i) {
        const double d = sq_dist(p, H.centers[i]);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    return {std::sqrt(best), best_i};
}

// Pairwise (tree) summation; bounds rounding drift for large n.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Per-point cost under a given objective: distance for center/median, squared for means.
inline double point_cost(const Point& p, const CenterSet& H, ObjectiveKind kind) {
    const auto nc = dist_to_set(p, H);
    return kind == ObjectiveKind::Means ? nc.distance * nc.distance : nc.distance;
}

// Indices kept after discarding the z largest costs. Ties on cost discard the
// higher point index first. Result is in ascending point-index order.
inline std::vector<std::size_t> kept_after_trim(const std::vector<double>& costs, int z) {
    const std::size_t n = costs.size();
    if (z < 0 || static_cast<std::size_t>(z) >= n)
        throw std::invalid_argument("trim: need 0 <= z < n");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (costs[a] != costs[b]) return costs[a] < costs[b];
        return a < b;
    });
    order.resize(n - static_cast<std::size_t>(z));
    std::sort(order.begin(), order.end());
    return order;
}

// Aggregate a trimmed per-point cost vector per the objective definitions.
inline double aggregate_trimmed(const std::vector<double>& costs, int z, ObjectiveKind kind) {
    const auto kept = kept_after_trim(costs, z);
    if (kind == ObjectiveKind::Center) {
        double m = 0.0;
        for (std::size_t i : kept) m = std::max(m, costs[i]);
        return m;
    }
    std::vector<double> kept_costs;
    kept_costs.reserve(kept.size());
    for (std::size_t i : kept) kept_costs.push_back(costs[i]);
    return pairwise_sum(kept_costs) / static_cast<double>(kept.size());
}

inline std::vector<double> per_point_costs(const Dataset& P, const CenterSet& H,
                                           ObjectiveKind kind) {
    std::vector<double> costs;
    costs.reserve(P.size());
    for (const auto& p : P.points) costs.push_back(point_cost(p, H, kind));
    return costs;
}

// Trimmed clustering objective: discard the z costliest points, then
// center -> max, median -> mean distance, means -> mean squared distance.
inline double objective_with_outliers(const Dataset& P, const CenterSet& H, int z,
                                      ObjectiveKind kind) {
    if (z < 0 || static_cast<std::size_t>(z) >= P.size())
        throw std::invalid_argument("objective_with_outliers: need 0 <= z < n");
    return aggregate_trimmed(per_point_costs(P, H, kind), z, kind);
}

// Sum of squared distances of X to its nearest centers in Y.
inline double cost(const Dataset& X, const CenterSet& Y) {
    if (X.points.empty() || Y.centers.empty())
        throw std::invalid_argument("cost: empty input");
    std::vector<double> sq;
    sq.reserve(X.size());
    for (const auto& p : X.points) {
        const double d = dist_to_set(p, Y).distance;
        sq.push_back(d * d);
    }
    return pairwise_sum(sq);
}

inline ClusteringResult assign_memberships(const Dataset& P, const CenterSet& H, int z,
                                           ObjectiveKind kind) {
    if (z < 0 || static_cast<std::size_t>(z) >= P.size())
        throw std::invalid_argument("assign_memberships: need 0 <= z < n");
    const std::size_t n = P.size();
    std::vector<double> costs(n);
    std::vector<int> memberships(n, kOutlier);
    std::vector<std::size_t> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nc = dist_to_set(P.points[i], H);
        nearest[i] = nc.index;
        costs[i] = kind == ObjectiveKind::Means ? nc.distance * nc.distance : nc.distance;
    }
    for (std::size_t i : kept_after_trim(costs, z)) memberships[i] = static_cast<int>(nearest[i]);

    ClusteringResult res;
    res.centers = H;
    res.memberships = std::move(memberships);
    res.outlier_count = z;
    res.objective = aggregate_trimmed(costs, z, kind);
    res.kind = kind;
    return res;
}

}  // namespace usco
