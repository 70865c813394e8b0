#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "usco/core.hpp"
#include "usco/sampler.hpp"

namespace usco {

struct CandidateSet {
    std::vector<CenterSet> candidates;
    std::vector<std::uint64_t> seeds;  // per-candidate provenance, optional
};

struct SelectionResult {
    std::size_t best_index = 0;
    ClusteringResult result;
    std::size_t points_read = 0;  // instrumented: scans of the full dataset
};

// Scan P once, computing every candidate's trimmed objective and the winner's
// memberships. Per-candidate costs are buffered so the trimmed aggregation is
// identical to objective_with_outliers; memberships for all candidates are
// buffered only while n*m stays under membership_buffer_cap, otherwise the
// winner's memberships come from a second scan.
inline SelectionResult one_pass_select(const Dataset& P, const CandidateSet& cands, int z,
                                       ObjectiveKind kind,
                                       std::size_t membership_buffer_cap = std::size_t(1) << 31) {
    const std::size_t m = cands.candidates.size();
    if (m == 0) throw std::invalid_argument("one_pass_select: no candidates");
    const std::size_t n = P.size();
    if (z < 0 || static_cast<std::size_t>(z) >= n)
        throw std::invalid_argument("one_pass_select: need 0 <= z < n");

    const bool buffer_memberships = n * m <= membership_buffer_cap;
    std::vector<std::vector<double>> costs(m, std::vector<double>(n));
    std::vector<std::vector<std::int32_t>> nearest;
    if (buffer_memberships) nearest.assign(m, std::vector<std::int32_t>(n));

    SelectionResult out;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = P.points[i];
        ++out.points_read;
        for (std::size_t l = 0; l < m; ++l) {
            const auto nc = dist_to_set(p, cands.candidates[l]);
            costs[l][i] =
                kind == ObjectiveKind::Means ? nc.distance * nc.distance : nc.distance;
            if (buffer_memberships) nearest[l][i] = static_cast<std::int32_t>(nc.index);
        }
    }

    std::size_t best = 0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < m; ++l) {
        const double obj = aggregate_trimmed(costs[l], z, kind);
        if (obj < best_obj) {  // ties keep the lowest index
            best_obj = obj;
            best = l;
        }
    }

    ClusteringResult res;
    res.centers = cands.candidates[best];
    res.kind = kind;
    res.outlier_count = z;
    res.objective = best_obj;
    res.memberships.assign(n, kOutlier);
    if (buffer_memberships) {
        for (std::size_t i : kept_after_trim(costs[best], z))
            res.memberships[i] = nearest[best][i];
    } else {
        for (std::size_t i = 0; i < n; ++i) ++out.points_read;
        res = assign_memberships(P, res.centers, z, kind);
    }
    out.best_index = best;
    out.result = std::move(res);
    return out;
}

struct BoostedResult {
    std::size_t best_index = 0;
    ClusteringResult result;
    CandidateSet candidates;
    SampleBudget budget_used;
    bool precondition_warning = false;
    double runs_seconds = 0.0;    // all sample+solve phases
    double select_seconds = 0.0;  // the full-data scan
};

// Run the framework m times with derived seeds and keep the lowest-objective
// candidate via the one-pass scan.
inline BoostedResult boosted_run(const Dataset& P, const FrameworkConfig& cfg, int m,
                                 std::mt19937_64& rng) {
    if (m < 1) throw std::invalid_argument("boosted_run: m < 1");
    using clock = std::chrono::steady_clock;
    BoostedResult out;
    const auto t0 = clock::now();
    for (int run = 0; run < m; ++run) {
        const std::uint64_t child_seed = rng();
        std::mt19937_64 child(child_seed);
        FrameworkResult fr = run_framework(P, cfg, child);
        out.candidates.candidates.push_back(std::move(fr.centers));
        out.candidates.seeds.push_back(child_seed);
        out.budget_used = fr.budget_used;
        out.precondition_warning = out.precondition_warning || fr.precondition_warning;
    }
    const auto t1 = clock::now();
    SelectionResult sel = one_pass_select(P, out.candidates, cfg.z, cfg.kind);
    const auto t2 = clock::now();
    out.best_index = sel.best_index;
    out.result = std::move(sel.result);
    out.runs_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.select_seconds = std::chrono::duration<double>(t2 - t1).count();
    return out;
}

}  // namespace usco
