#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>

#include "usco/core.hpp"
#include "usco/subroutines.hpp"

namespace usco {

// Significance parameters: every optimal cluster holds at least (eps1/k)n
// points and z = (eps2/k)n.
struct SignificanceParams {
    double epsilon1 = 0.5;
    double epsilon2 = 0.1;
    double eta = 0.5;
    double delta = 0.5;
    double xi = 0.2;

    double t() const { return eta * (1.0 - delta) * epsilon1 / epsilon2; }
};

struct SampleBudget {
    int sample_size = 1;  // |S|
    int extra = 0;        // k' for variant I, z' for variant II
};

enum class Variant { I, II };

struct FrameworkConfig {
    Variant variant = Variant::I;
    ObjectiveKind kind = ObjectiveKind::Center;
    int k = 1;
    int z = 0;
    std::optional<SampleBudget> budget;         // direct mode
    std::optional<SignificanceParams> params;   // theory mode
    IterConfig iter;
    bool restrict_centers_to_input = false;
    std::uint64_t seed = 0;
};

namespace detail {

inline int ceil_or_floor_guard(double value, int k) {
    if (!(value > 0.0)) return std::max(1, k);
    return static_cast<int>(std::ceil(value));
}

}  // namespace detail

// |S| = ceil((k/eps1) ln(k/eta)); when the log term is nonpositive, max(1, k).
inline int sample_size_alg1(int k, double epsilon1, double eta) {
    const double logterm = std::log(static_cast<double>(k) / eta);
    return detail::ceil_or_floor_guard(k / epsilon1 * logterm, k);
}

// |S| = ceil((3k/(delta^2 eps1)) ln(2k/eta)).
inline int sample_size_concentration(int k, double epsilon1, double delta, double eta) {
    const double logterm = std::log(2.0 * k / eta);
    return detail::ceil_or_floor_guard(3.0 * k / (delta * delta * epsilon1) * logterm, k);
}

// |S| = ceil(max(3k/(delta^2 eps1), k/(2 xi^2 eps1 (1-delta))) ln(2k/eta)).
inline int sample_size_means(int k, double epsilon1, double delta, double xi, double eta) {
    const double logterm = std::log(2.0 * k / eta);
    const double coef = std::max(3.0 * k / (delta * delta * epsilon1),
                                 k / (2.0 * xi * xi * epsilon1 * (1.0 - delta)));
    return detail::ceil_or_floor_guard(coef * logterm, k);
}

// k' (variant I) or z' (variant II): ceil((1/eta)(eps2/k)|S|).
inline int budget_extra(double eta, double epsilon2, int k, int sample_size) {
    const double v = (1.0 / eta) * (epsilon2 / k) * sample_size;
    if (v <= 0.0) return 0;
    return static_cast<int>(std::ceil(v));
}

// m i.i.d. draws with replacement; labels carried through for diagnostics.
inline Dataset uniform_sample(const Dataset& P, int m, std::mt19937_64& rng) {
    if (m < 1) throw std::invalid_argument("uniform_sample: m < 1");
    std::uniform_int_distribution<std::size_t> pick(0, P.size() - 1);
    Dataset S;
    S.name = P.name + ":sample";
    S.label_names = P.label_names;
    S.points.reserve(m);
    if (P.has_labels()) S.labels.reserve(m);
    for (int i = 0; i < m; ++i) {
        const std::size_t j = pick(rng);
        S.points.push_back(P.points[j]);
        if (P.has_labels()) S.labels.push_back(P.labels[j]);
    }
    return S;
}

struct FrameworkResult {
    CenterSet centers;
    SampleBudget budget_used;
    bool precondition_warning = false;
    double sample_seconds = 0.0;
    double solve_seconds = 0.0;
};

namespace detail {

inline SampleBudget resolve_budget(const FrameworkConfig& cfg, bool* warning) {
    if (cfg.budget) return *cfg.budget;
    if (!cfg.params) throw std::invalid_argument("run_framework: no budget or params");
    const auto& sp = *cfg.params;
    SampleBudget b;
    if (cfg.kind == ObjectiveKind::Center) {
        b.sample_size = cfg.variant == Variant::I
                            ? sample_size_alg1(cfg.k, sp.epsilon1, sp.eta)
                            : sample_size_concentration(cfg.k, sp.epsilon1, sp.delta, sp.eta);
        if (cfg.variant == Variant::II &&
            sp.epsilon1 / sp.epsilon2 <= 1.0 / (sp.eta * (1.0 - sp.delta)))
            *warning = true;
    } else {
        b.sample_size = sample_size_means(cfg.k, sp.epsilon1, sp.delta, sp.xi, sp.eta);
        if (cfg.variant == Variant::II && sp.t() <= 1.0) *warning = true;
    }
    b.extra = budget_extra(sp.eta, sp.epsilon2, cfg.k, b.sample_size);
    return b;
}

}  // namespace detail

// One sampling-framework run: draw S, solve the sample, return the centers.
// Variant I runs a (k+extra)-center/means/median subroutine on S; variant II
// runs a k-clustering with extra sample-level outliers. The caller evaluates
// the returned centers against the full dataset.
inline FrameworkResult run_framework(const Dataset& P, const FrameworkConfig& cfg,
                                     std::mt19937_64& rng) {
    if (cfg.k < 1) throw std::invalid_argument("run_framework: k < 1");
    FrameworkResult out;
    const SampleBudget budget = detail::resolve_budget(cfg, &out.precondition_warning);
    if (budget.sample_size < 1) throw std::invalid_argument("run_framework: sample size < 1");
    if (static_cast<double>(budget.sample_size) * std::max<std::size_t>(P.dim(), 1) > 2e9)
        throw std::invalid_argument("run_framework: sample budget exceeds memory cap");
    out.budget_used = budget;

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    Dataset S = uniform_sample(P, budget.sample_size, rng);
    const auto t1 = clock::now();

    LloydOptions lopt;
    lopt.iter = cfg.iter;
    lopt.restrict_centers_to_input = cfg.restrict_centers_to_input;

    if (cfg.kind == ObjectiveKind::Center) {
        if (cfg.variant == Variant::I)
            out.centers = gonzalez_kcenter(S, cfg.k + budget.extra, rng).centers;
        else
            out.centers =
                charikar_kcenter_outliers(S, cfg.k, std::min<int>(budget.extra, S.size() - 1))
                    .centers;
    } else {
        if (cfg.variant == Variant::I) {
            CenterSet init = kmeanspp_seed(S, cfg.k + budget.extra, rng);
            out.centers = lloyd(S, std::move(init), cfg.kind, lopt);
        } else {
            CenterSet init = kmeanspp_seed(S, cfg.k, rng);
            out.centers = trimmed_lloyd(S, std::min<int>(budget.extra, S.size() - 1),
                                        std::move(init), cfg.kind, lopt);
        }
    }
    const auto t2 = clock::now();
    out.sample_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    return out;
}

}  // namespace usco
