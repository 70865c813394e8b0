#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <utility>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "usco/core.hpp"

namespace usco {

struct SyntheticSpec {
    int k = 8;
    int n = 100000;
    int z = 2000;
    int dim = 100;
    double side = 400.0;              // hypercube side for the cluster centers
    double sigma = std::sqrt(1000.0);  // per-coordinate stddev
    double min_cluster_frac = 0.0;     // 0 -> even split
    std::uint64_t seed = 0;
};

struct GroundTruth {
    CenterSet generating_centers;
    std::vector<int> labels;
    std::vector<double> r_bound;  // per cluster, recomputed max distance to its center
    double max_diameter = 0.0;    // L, over all clusters
    std::string diameter_method;  // "exact-pairs" or "radius-bound"
    double epsilon1 = 0.0;        // realized k * min|C_j| / n
    double epsilon2 = 0.0;        // realized k * z / n
};

struct AdversarialSpec {
    int k = 2;
    std::vector<int> cluster_sizes = {10, 10};
    int z = 3;
    double separation = 10.0;  // x
    int dim = 1;
};

namespace detail {

inline std::vector<int> split_cluster_sizes(int k, int inliers, double min_cluster_frac) {
    std::vector<int> sizes(k);
    int smallest = min_cluster_frac > 0.0
                       ? static_cast<int>(min_cluster_frac * inliers)
                       : inliers / k;
    smallest = std::max(1, std::min(smallest, inliers / k));
    sizes[0] = smallest;
    const int rest = inliers - smallest;
    const int per = rest / (k - 1 > 0 ? k - 1 : 1);
    for (int j = 1; j < k; ++j) sizes[j] = per;
    int assigned = smallest + per * (k - 1);
    for (int j = 1; assigned < inliers; ++j, ++assigned) sizes[1 + (j - 1) % std::max(1, k - 1)]++;
    return sizes;
}

inline double cluster_diameter(const std::vector<const Point*>& pts, double r_bound,
                               std::string* method) {
    constexpr std::size_t kExactThreshold = 2000;
    if (pts.size() <= kExactThreshold) {
        double best_sq = 0.0;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                best_sq = std::max(best_sq, sq_dist(*pts[a], *pts[b]));
        *method = "exact-pairs";
        return std::sqrt(best_sq);
    }
    *method = "radius-bound";  // 2 * max distance to the cluster center
    return 2.0 * r_bound;
}

}  // namespace detail

// Recompute per-cluster radius bounds, the max intra-cluster diameter, and the
// realized significance parameters from the labeled data.
inline void audit_ground_truth(const Dataset& data, GroundTruth& gt) {
    const int k = static_cast<int>(gt.generating_centers.size());
    std::vector<std::vector<const Point*>> clusters(k);
    int z = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int lab = gt.labels[i];
        if (lab == kOutlier)
            ++z;
        else
            clusters[lab].push_back(&data.points[i]);
    }
    gt.r_bound.assign(k, 0.0);
    gt.max_diameter = 0.0;
    std::size_t min_size = data.size();
    for (int j = 0; j < k; ++j) {
        for (const Point* p : clusters[j])
            gt.r_bound[j] = std::max(gt.r_bound[j], dist(*p, gt.generating_centers.centers[j]));
        std::string method;
        gt.max_diameter = std::max(
            gt.max_diameter, detail::cluster_diameter(clusters[j], gt.r_bound[j], &method));
        gt.diameter_method = method;
        min_size = std::min(min_size, clusters[j].size());
    }
    gt.epsilon1 = static_cast<double>(k) * min_size / data.size();
    gt.epsilon2 = static_cast<double>(k) * z / data.size();
}

// Synthetic significant instance: Gaussian clusters around centers drawn in a
// hypercube, plus z outliers rejection-sampled outside every cluster's
// enclosing ball (center + max realized inlier distance).
inline std::pair<Dataset, GroundTruth> gen_synthetic(const SyntheticSpec& spec) {
    if (spec.k < 1 || spec.n < 1 || spec.z < 0 || spec.z >= spec.n || spec.dim < 1)
        throw std::invalid_argument("gen_synthetic: invalid spec");
    const int inliers = spec.n - spec.z;
    if (inliers < spec.k) throw std::invalid_argument("gen_synthetic: n-z < k");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> in_box(0.0, spec.side);
    std::normal_distribution<double> gauss(0.0, spec.sigma);

    Dataset data;
    data.name = "synthetic";
    GroundTruth gt;
    for (int j = 0; j < spec.k; ++j) {
        Point c(spec.dim);
        for (auto& x : c) x = in_box(rng);
        gt.generating_centers.centers.push_back(std::move(c));
        data.label_names.push_back("c" + std::to_string(j));
    }

    const auto sizes = detail::split_cluster_sizes(spec.k, inliers, spec.min_cluster_frac);
    std::vector<double> ball_radius(spec.k, 0.0);
    for (int j = 0; j < spec.k; ++j) {
        const Point& c = gt.generating_centers.centers[j];
        for (int i = 0; i < sizes[j]; ++i) {
            Point p(spec.dim);
            for (int t = 0; t < spec.dim; ++t) p[t] = c[t] + gauss(rng);
            ball_radius[j] = std::max(ball_radius[j], dist(p, c));
            data.points.push_back(std::move(p));
            data.labels.push_back(j);
        }
    }

    // Outliers: uniform in the inflated box, outside every enclosing ball.
    double box_scale = 3.0;
    const double mid = spec.side / 2.0;
    for (int placed = 0; placed < spec.z;) {
        long attempts = 0;
        const double half = box_scale * spec.side / 2.0;
        std::uniform_real_distribution<double> out_box(mid - half, mid + half);
        bool enlarged = false;
        while (placed < spec.z) {
            Point p(spec.dim);
            for (auto& x : p) x = out_box(rng);
            bool outside = true;
            for (int j = 0; j < spec.k && outside; ++j)
                outside = dist(p, gt.generating_centers.centers[j]) > ball_radius[j];
            if (outside) {
                data.points.push_back(std::move(p));
                data.labels.push_back(kOutlier);
                ++placed;
            } else if (++attempts > 1000000) {
                if (box_scale > 3.0 * 32.0)
                    throw std::runtime_error("gen_synthetic: outlier rejection cap exceeded");
                box_scale *= 2.0;
                enlarged = true;
                break;
            }
        }
        if (!enlarged) break;
    }

    gt.labels = data.labels;
    audit_ground_truth(data, gt);
    return {std::move(data), std::move(gt)};
}

// Worst-case instance: k duplicate clusters and z single outliers laid out at
// x-spaced positions along the first axis, so r_opt = 0.
inline std::pair<Dataset, GroundTruth> gen_adversarial(const AdversarialSpec& spec) {
    if (spec.k < 1 || static_cast<int>(spec.cluster_sizes.size()) != spec.k || spec.z < 0 ||
        spec.dim < 1 || spec.separation <= 0.0)
        throw std::invalid_argument("gen_adversarial: invalid spec");
    Dataset data;
    data.name = "adversarial";
    GroundTruth gt;
    for (int j = 0; j < spec.k; ++j) {
        Point loc(spec.dim, 0.0);
        loc[0] = spec.separation * j;
        gt.generating_centers.centers.push_back(loc);
        data.label_names.push_back("c" + std::to_string(j));
        for (int i = 0; i < spec.cluster_sizes[j]; ++i) {
            data.points.push_back(loc);
            data.labels.push_back(j);
        }
    }
    for (int o = 0; o < spec.z; ++o) {
        Point loc(spec.dim, 0.0);
        loc[0] = spec.separation * (spec.k + o);
        data.points.push_back(std::move(loc));
        data.labels.push_back(kOutlier);
    }
    gt.labels = data.labels;
    audit_ground_truth(data, gt);
    return {std::move(data), std::move(gt)};
}

namespace detail {

inline bool parse_double(const std::string& s, double* out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [ptr, ec] = std::from_chars(b, e, *out);
    if (ec != std::errc{}) return false;
    while (ptr < e && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    return ptr == e;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace detail

// CSV loader: one point per row, optional trailing string label column
// (detected by a non-numeric last field), optional header row (detected by a
// non-numeric first field). "OUTLIER" is the reserved outlier label.
inline Dataset load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_points: cannot open " + path);
    Dataset data;
    data.name = path;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    bool labeled = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = detail::split_csv(line);
        double v;
        if (data.points.empty() && ncols == 0) {
            if (!detail::parse_double(fields[0], &v)) continue;  // header row
            ncols = fields.size();
            labeled = !detail::parse_double(fields.back(), &v);
        }
        if (fields.size() != ncols)
            throw std::invalid_argument("load_points: ragged row at line " +
                                        std::to_string(lineno));
        const std::size_t d = labeled ? ncols - 1 : ncols;
        Point p(d);
        for (std::size_t c = 0; c < d; ++c)
            if (!detail::parse_double(fields[c], &p[c]))
                throw std::invalid_argument("load_points: non-numeric field at line " +
                                            std::to_string(lineno));
        data.points.push_back(std::move(p));
        if (labeled) {
            std::string lab = fields.back();
            if (!lab.empty() && lab.back() == '\r') lab.pop_back();
            if (lab == "OUTLIER") {
                data.labels.push_back(kOutlier);
            } else {
                auto it = std::find(data.label_names.begin(), data.label_names.end(), lab);
                if (it == data.label_names.end()) {
                    data.label_names.push_back(lab);
                    it = std::prev(data.label_names.end());
                }
                data.labels.push_back(
                    static_cast<int>(std::distance(data.label_names.begin(), it)));
            }
        }
    }
    data.validate();
    return data;
}

inline void save_points(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_points: cannot write " + path);
    out.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t c = 0; c < data.points[i].size(); ++c) {
            if (c) out << ',';
            out << data.points[i][c];
        }
        if (data.has_labels()) {
            const int lab = data.labels[i];
            out << ',' << (lab == kOutlier ? std::string("OUTLIER") : data.label_names[lab]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_points: write failed for " + path);
}

// Append uniformly drawn points outside every labeled cluster's enclosing ball
// (centroid + max member distance) until the outlier fraction reaches target.
inline Dataset augment_outliers(const Dataset& data, double fraction, std::mt19937_64& rng) {
    if (!data.has_labels()) throw std::invalid_argument("augment_outliers: labels required");
    if (fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("augment_outliers: fraction out of range");
    Dataset out = data;
    if (fraction == 0.0) return out;

    const std::size_t d = data.dim();
    const int nlab = static_cast<int>(data.label_names.size());
    std::vector<Point> centroids(nlab, Point(d, 0.0));
    std::vector<std::size_t> counts(nlab, 0);
    std::size_t existing_outliers = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int lab = data.labels[i];
        if (lab == kOutlier) {
            ++existing_outliers;
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) centroids[lab][c] += data.points[i][c];
        ++counts[lab];
    }
    std::vector<double> radius(nlab, 0.0);
    for (int j = 0; j < nlab; ++j)
        if (counts[j])
            for (std::size_t c = 0; c < d; ++c) centroids[j][c] /= counts[j];
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.labels[i] != kOutlier)
            radius[data.labels[i]] =
                std::max(radius[data.labels[i]], dist(data.points[i], centroids[data.labels[i]]));

    // target: (z0 + a) / (n0 + a) >= fraction
    const double n0 = static_cast<double>(data.size());
    const double z0 = static_cast<double>(existing_outliers);
    const long extra =
        std::max(0L, static_cast<long>(std::ceil((fraction * n0 - z0) / (1.0 - fraction))));

    Point lo(d, std::numeric_limits<double>::infinity());
    Point hi(d, -std::numeric_limits<double>::infinity());
    for (const auto& p : data.points)
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    double scale = 3.0;
    long placed = 0;
    long attempts = 0;
    int enlargements = 0;
    while (placed < extra) {
        Point p(d);
        for (std::size_t c = 0; c < d; ++c) {
            const double mid = (lo[c] + hi[c]) / 2.0;
            const double half = std::max(hi[c] - lo[c], 1.0) * scale / 2.0;
            p[c] = std::uniform_real_distribution<double>(mid - half, mid + half)(rng);
        }
        bool outside = true;
        for (int j = 0; j < nlab && outside; ++j)
            if (counts[j]) outside = dist(p, centroids[j]) > radius[j];
        if (outside) {
            out.points.push_back(std::move(p));
            out.labels.push_back(kOutlier);
            ++placed;
            attempts = 0;
        } else if (++attempts > 1000000) {
            if (++enlargements > 5)
                throw std::runtime_error("augment_outliers: rejection cap exceeded");
            scale *= 2.0;
            attempts = 0;
        }
    }
    return out;
}

}  // namespace usco
