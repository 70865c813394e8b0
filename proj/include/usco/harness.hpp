#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "usco/core.hpp"
#include "usco/datagen.hpp"
#include "usco/sampler.hpp"
#include "usco/selector.hpp"

namespace usco {

using json = nlohmann::json;

// Fraction of the ground-truth outliers that the algorithm discarded.
// Absent when the truth has no outliers.
inline std::optional<double> precision(const ClusteringResult& result,
                                       const std::vector<int>& truth_labels) {
    if (truth_labels.size() != result.memberships.size())
        throw std::invalid_argument("precision: label count mismatch");
    std::size_t truth_out = 0, hit = 0;
    for (std::size_t i = 0; i < truth_labels.size(); ++i) {
        if (truth_labels[i] != kOutlier) continue;
        ++truth_out;
        if (result.memberships[i] == kOutlier) ++hit;
    }
    if (truth_out == 0) return std::nullopt;
    return static_cast<double>(hit) / static_cast<double>(truth_out);
}

// Max-overlap purity over the returned inliers: (1/(n-z)) sum_j max_l |C'_j ∩ C_l|.
inline double purity(const ClusteringResult& result, const std::vector<int>& truth_labels) {
    if (truth_labels.size() != result.memberships.size())
        throw std::invalid_argument("purity: label count mismatch");
    // overlap[obtained cluster][truth cluster] over returned inliers
    std::map<int, std::map<int, std::size_t>> overlap;
    std::size_t inliers = 0;
    for (std::size_t i = 0; i < truth_labels.size(); ++i) {
        const int mem = result.memberships[i];
        if (mem == kOutlier) continue;
        ++inliers;
        if (truth_labels[i] != kOutlier) overlap[mem][truth_labels[i]]++;
    }
    if (inliers == 0) return 0.0;
    std::size_t agree = 0;
    for (const auto& [c, row] : overlap) {
        std::size_t best = 0;
        for (const auto& [t, cnt] : row) best = std::max(best, cnt);
        agree += best;
    }
    return static_cast<double>(agree) / static_cast<double>(inliers);
}

struct EvalReport {
    json config;
    std::string instance;
    std::string algorithm;
    int trial = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    double normalized_objective = 0.0;
    std::optional<double> precision_v;
    std::optional<double> purity_v;
    double sample_seconds = 0.0;
    double solve_seconds = 0.0;
    double select_seconds = 0.0;
    int sample_size = 0;
    int extra = 0;
    int runs = 1;
    bool warning = false;
    bool normalized_degenerate = false;

    json to_json() const {
        json j{{"schema", "usco-report-v1"},
               {"config", config},
               {"instance", instance},
               {"algorithm", algorithm},
               {"trial", trial},
               {"seed", seed},
               {"objective", objective},
               {"normalized_objective", normalized_objective},
               {"timings",
                {{"sample_s", sample_seconds},
                 {"solve_s", solve_seconds},
                 {"select_s", select_seconds}}},
               {"sample_size", sample_size},
               {"extra", extra},
               {"runs", runs},
               {"warning", warning}};
        if (precision_v) j["precision"] = *precision_v;
        if (purity_v) j["purity"] = *purity_v;
        return j;
    }
};

// Divide each report's objective by the group minimum; a zero minimum falls
// back to machine epsilon and flags the group.
inline void normalize_group(std::vector<EvalReport>& reports) {
    if (reports.empty()) return;
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) mn = std::min(mn, r.objective);
    const bool degenerate = mn <= 0.0;
    const double denom = std::max(mn, std::numeric_limits<double>::epsilon());
    for (auto& r : reports) {
        r.normalized_objective = r.objective / denom;
        r.normalized_degenerate = degenerate;
    }
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline int parse_sample_size(const json& v, std::size_t n) {
    if (v.is_number_integer()) return v.get<int>();
    const std::string s = v.get<std::string>();
    if (!s.empty() && s.size() > 2 && s.substr(s.size() - 2) == "%n") {
        const double pct = std::stod(s.substr(0, s.size() - 2));
        return std::max(1, static_cast<int>(std::llround(pct / 100.0 * n)));
    }
    return std::stoi(s);
}

}  // namespace detail

struct PlanInstance {
    std::string name;
    Dataset data;
    std::optional<GroundTruth> truth;
    int z = 0;
};

inline PlanInstance load_plan_instance(const json& spec) {
    PlanInstance inst;
    inst.name = spec.at("name").get<std::string>();
    if (spec.contains("synthetic")) {
        const json& s = spec["synthetic"];
        SyntheticSpec ss;
        ss.k = s.value("k", ss.k);
        ss.n = s.value("n", ss.n);
        ss.z = s.value("z", ss.z);
        ss.dim = s.value("dim", ss.dim);
        ss.side = s.value("side", ss.side);
        ss.sigma = s.value("sigma", ss.sigma);
        ss.min_cluster_frac = s.value("min_cluster_frac", ss.min_cluster_frac);
        ss.seed = s.value("seed", ss.seed);
        auto [data, gt] = gen_synthetic(ss);
        inst.data = std::move(data);
        inst.truth = std::move(gt);
        inst.z = ss.z;
    } else if (spec.contains("adversarial")) {
        const json& s = spec["adversarial"];
        AdversarialSpec as;
        as.k = s.value("k", as.k);
        as.cluster_sizes = s.value("cluster_sizes", as.cluster_sizes);
        as.z = s.value("z", as.z);
        as.separation = s.value("separation", as.separation);
        as.dim = s.value("dim", as.dim);
        auto [data, gt] = gen_adversarial(as);
        inst.data = std::move(data);
        inst.truth = std::move(gt);
        inst.z = as.z;
    } else if (spec.contains("dataset")) {
        inst.data = load_points(spec["dataset"].get<std::string>());
        inst.z = 0;
    } else {
        throw std::invalid_argument("plan instance: need synthetic/adversarial/dataset");
    }
    if (spec.contains("z")) inst.z = spec["z"].get<int>();
    return inst;
}

inline FrameworkConfig framework_config_from_json(const json& a, const PlanInstance& inst) {
    FrameworkConfig cfg;
    const std::string variant = a.value("variant", std::string("I"));
    cfg.variant = variant == "II" ? Variant::II : Variant::I;
    cfg.kind = objective_kind_from_string(a.value("objective", std::string("center")));
    cfg.k = a.at("k").get<int>();
    cfg.z = inst.z;
    cfg.restrict_centers_to_input = a.value("restrict_centers_to_input", false);

    if (a.contains("params")) {
        const json& p = a["params"];
        SignificanceParams sp;
        sp.epsilon1 = p.value("epsilon1", sp.epsilon1);
        sp.epsilon2 = p.value("epsilon2", sp.epsilon2);
        sp.eta = p.value("eta", sp.eta);
        sp.delta = p.value("delta", sp.delta);
        sp.xi = p.value("xi", sp.xi);
        cfg.params = sp;
    } else {
        SampleBudget b;
        b.sample_size = a.contains("sample_size")
                            ? detail::parse_sample_size(a["sample_size"], inst.data.size())
                            : std::max<int>(1, inst.data.size() / 50);
        if (a.contains("extra")) {
            b.extra = a["extra"].get<int>();
        } else if (cfg.variant == Variant::I) {
            const double tau = a.value("tau", 2.0);
            b.extra = static_cast<int>(std::llround((tau - 1.0) * cfg.k));
        } else {
            // z' = factor * expected outliers in S (default 2x)
            const double factor = a.value("zprime_factor", 2.0);
            const double ztilde =
                static_cast<double>(inst.z) / inst.data.size() * b.sample_size;
            b.extra = static_cast<int>(std::ceil(factor * ztilde));
        }
        cfg.budget = b;
    }
    return cfg;
}

// Execute one algorithm config on one instance (m boosted runs) and fill a report.
inline EvalReport run_cell(const PlanInstance& inst, const json& alg, int trial,
                           std::uint64_t seed) {
    FrameworkConfig cfg = framework_config_from_json(alg, inst);
    cfg.seed = seed;
    const int m = alg.value("runs", 1);
    std::mt19937_64 rng(seed);
    BoostedResult br = boosted_run(inst.data, cfg, m, rng);

    EvalReport rep;
    rep.config = alg;
    rep.instance = inst.name;
    rep.algorithm = alg.value("name", std::string("alg"));
    rep.trial = trial;
    rep.seed = seed;
    rep.objective = br.result.objective;
    rep.sample_seconds = br.runs_seconds;  // all sample+solve phases
    rep.select_seconds = br.select_seconds;
    rep.sample_size = br.budget_used.sample_size;
    rep.extra = br.budget_used.extra;
    rep.runs = m;
    rep.warning = br.precondition_warning;
    if (inst.truth) {
        rep.precision_v = precision(br.result, inst.truth->labels);
        rep.purity_v = purity(br.result, inst.truth->labels);
    }
    return rep;
}

namespace detail {

inline void write_csv_header(std::ofstream& out) {
    out << "instance,algorithm,trial,seed,objective,normalized_objective,precision,purity,"
           "sample_solve_s,select_s,sample_size,extra,runs,warning\n";
}

inline void write_csv_row(std::ofstream& out, const EvalReport& r) {
    out << r.instance << ',' << r.algorithm << ',' << r.trial << ',' << r.seed << ','
        << r.objective << ',' << r.normalized_objective << ','
        << (r.precision_v ? std::to_string(*r.precision_v) : std::string()) << ','
        << (r.purity_v ? std::to_string(*r.purity_v) : std::string()) << ','
        << r.sample_seconds << ',' << r.select_seconds << ',' << r.sample_size << ','
        << r.extra << ',' << r.runs << ',' << (r.warning ? 1 : 0) << '\n';
}

}  // namespace detail

// Run a plan: cross-product of instances x algorithms x trials with seeds
// derived from the master seed. Writes one JSON record per run, a long-format
// CSV, and per-cell mean/std aggregates. Individual failures are recorded
// without aborting the plan.
inline std::vector<EvalReport> run_experiment(const json& plan, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "records");
    const std::uint64_t master = plan.value("master_seed", 0ULL);
    const int trials = plan.value("trials", 1);

    std::vector<EvalReport> reports;
    std::ofstream csv(fs::path(out_dir) / "records.csv");
    detail::write_csv_header(csv);
    std::ofstream errs(fs::path(out_dir) / "failures.log");

    std::size_t inst_idx = 0;
    for (const json& ispec : plan.at("instances")) {
        PlanInstance inst = load_plan_instance(ispec);
        std::vector<EvalReport> group;
        std::size_t alg_idx = 0;
        for (const json& alg : plan.at("algorithms")) {
            for (int trial = 0; trial < trials; ++trial) {
                const std::uint64_t seed = detail::splitmix64(
                    master ^ detail::splitmix64((inst_idx << 40) ^ (alg_idx << 20) ^
                                                static_cast<std::uint64_t>(trial)));
                try {
                    group.push_back(run_cell(inst, alg, trial, seed));
                } catch (const std::exception& e) {
                    errs << inst.name << ',' << alg.value("name", "alg") << ",trial " << trial
                         << ": " << e.what() << '\n';
                }
            }
            ++alg_idx;
        }
        normalize_group(group);
        for (const auto& r : group) {
            const std::string fname =
                r.instance + "__" + r.algorithm + "__t" + std::to_string(r.trial) + ".json";
            std::ofstream rec(fs::path(out_dir) / "records" / fname);
            rec << r.to_json().dump(2) << '\n';
            detail::write_csv_row(csv, r);
            reports.push_back(r);
        }
        ++inst_idx;
    }

    // Per-cell aggregates (mean, std over trials).
    std::map<std::pair<std::string, std::string>, std::vector<const EvalReport*>> cells;
    for (const auto& r : reports) cells[{r.instance, r.algorithm}].push_back(&r);
    std::ofstream agg(fs::path(out_dir) / "aggregate.csv");
    agg << "instance,algorithm,trials,objective_mean,objective_std,precision_mean,purity_mean,"
           "sample_solve_s_mean,select_s_mean\n";
    for (const auto& [key, rs] : cells) {
        const double n = static_cast<double>(rs.size());
        double om = 0, pm = 0, um = 0, tm = 0, sm = 0;
        std::size_t np = 0, nu = 0;
        for (const auto* r : rs) {
            om += r->objective;
            tm += r->sample_seconds;
            sm += r->select_seconds;
            if (r->precision_v) {
                pm += *r->precision_v;
                ++np;
            }
            if (r->purity_v) {
                um += *r->purity_v;
                ++nu;
            }
        }
        om /= n;
        double var = 0;
        for (const auto* r : rs) var += (r->objective - om) * (r->objective - om);
        agg << key.first << ',' << key.second << ',' << rs.size() << ',' << om << ','
            << std::sqrt(var / n) << ',' << (np ? std::to_string(pm / np) : std::string())
            << ',' << (nu ? std::to_string(um / nu) : std::string()) << ',' << tm / n << ','
            << sm / n << '\n';
    }
    return reports;
}

// Dataset metadata sidecar: spec echo plus realized significance quantities.
inline void save_metadata(const std::string& dataset_path, const json& spec_echo,
                          const GroundTruth& gt) {
    json j{{"schema", "usco-dataset-meta-v1"},
           {"spec", spec_echo},
           {"epsilon1", gt.epsilon1},
           {"epsilon2", gt.epsilon2},
           {"r_bound", gt.r_bound},
           {"max_diameter", gt.max_diameter},
           {"diameter_method", gt.diameter_method}};
    std::ofstream out(dataset_path + ".meta.json");
    out << j.dump(2) << '\n';
}

}  // namespace usco
