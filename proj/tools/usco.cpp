// Command-line front end: dataset generation, single runs, benchmark plans,
// metric re-evaluation, and report comparison.
//
// Exit codes: 0 success, 1 input error, 2 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "usco/harness.hpp"

using namespace usco;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

void write_memberships(const ClusteringResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (int m : res.memberships) {
        if (m == kOutlier)
            out << "OUTLIER\n";
        else
            out << m << '\n';
    }
}

std::vector<int> read_memberships(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::vector<int> mem;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "OUTLIER")
            mem.push_back(kOutlier);
        else
            mem.push_back(std::stoi(line));
    }
    if (mem.size() != n)
        throw std::invalid_argument("membership file has " + std::to_string(mem.size()) +
                                    " rows, dataset has " + std::to_string(n));
    return mem;
}

struct RunFlags {
    std::string data_path;
    std::string out_path;
    std::string members_path;
    std::string variant = "I";
    std::string objective = "center";
    std::string sample_size = "2%n";
    int k = 0;
    int z = 0;
    std::optional<int> extra;
    double tau = 2.0;
    double zprime_factor = 2.0;
    int runs = 1;
    std::uint64_t seed = 0;
    bool restrict_centers = false;
};

json alg_json(const RunFlags& f) {
    json a{{"name", "cli"},
           {"variant", f.variant},
           {"objective", f.objective},
           {"k", f.k},
           {"sample_size", f.sample_size},
           {"runs", f.runs},
           {"restrict_centers_to_input", f.restrict_centers}};
    if (f.extra)
        a["extra"] = *f.extra;
    else if (f.variant == "I")
        a["tau"] = f.tau;
    else
        a["zprime_factor"] = f.zprime_factor;
    return a;
}

int cmd_gen(const std::string& spec_path, const std::string& out_path, std::uint64_t seed,
            bool have_seed) {
    json spec = read_json_file(spec_path);
    Dataset data;
    GroundTruth gt;
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
        ss.seed = have_seed ? seed : s.value("seed", ss.seed);
        std::tie(data, gt) = gen_synthetic(ss);
    } else if (spec.contains("adversarial")) {
        const json& s = spec["adversarial"];
        AdversarialSpec as;
        as.k = s.value("k", as.k);
        as.cluster_sizes = s.value("cluster_sizes", as.cluster_sizes);
        as.z = s.value("z", as.z);
        as.separation = s.value("separation", as.separation);
        as.dim = s.value("dim", as.dim);
        std::tie(data, gt) = gen_adversarial(as);
    } else {
        throw std::invalid_argument("spec file needs a 'synthetic' or 'adversarial' section");
    }
    save_points(data, out_path);
    save_metadata(out_path, spec, gt);
    std::printf("wrote %zu points (dim %zu) to %s\n", data.size(), data.dim(),
                out_path.c_str());
    return 0;
}

int cmd_run(const RunFlags& f) {
    PlanInstance inst;
    inst.name = f.data_path;
    inst.data = load_points(f.data_path);
    inst.z = f.z;

    FrameworkConfig cfg = framework_config_from_json(alg_json(f), inst);
    cfg.seed = f.seed;
    std::mt19937_64 rng(f.seed);
    BoostedResult br = boosted_run(inst.data, cfg, f.runs, rng);

    EvalReport rep;
    rep.config = alg_json(f);
    rep.instance = inst.name;
    rep.algorithm = "cli";
    rep.seed = f.seed;
    rep.objective = br.result.objective;
    rep.sample_seconds = br.runs_seconds;
    rep.select_seconds = br.select_seconds;
    rep.sample_size = br.budget_used.sample_size;
    rep.extra = br.budget_used.extra;
    rep.runs = f.runs;
    rep.warning = br.precondition_warning;
    if (inst.data.has_labels()) {
        rep.precision_v = precision(br.result, inst.data.labels);
        rep.purity_v = purity(br.result, inst.data.labels);
    }
    if (!f.members_path.empty()) write_memberships(br.result, f.members_path);
    write_json_file(rep.to_json(), f.out_path);
    return 0;
}

int cmd_eval(const std::string& data_path, const std::string& members_path,
             const std::string& centers_path, int z, const std::string& objective,
             const std::string& out_path) {
    Dataset data = load_points(data_path);
    ClusteringResult res;
    res.memberships = read_memberships(members_path, data.size());
    res.outlier_count = static_cast<int>(
        std::count(res.memberships.begin(), res.memberships.end(), kOutlier));
    json j{{"schema", "usco-eval-v1"}, {"dataset", data_path}, {"n", data.size()}};
    if (data.has_labels()) {
        auto p = precision(res, data.labels);
        if (p) j["precision"] = *p;
        j["purity"] = purity(res, data.labels);
    }
    if (!centers_path.empty()) {
        Dataset centers = load_points(centers_path);
        CenterSet H{centers.points};
        const auto kind = objective_kind_from_string(objective);
        j["objective"] = objective_with_outliers(data, H, z, kind);
        j["objective_kind"] = objective;
    }
    write_json_file(j, out_path);
    return 0;
}

int cmd_bench(const std::string& plan_path, const std::string& out_dir, int trials_override,
              std::uint64_t seed, bool have_seed) {
    json plan = read_json_file(plan_path);
    if (trials_override > 0) plan["trials"] = trials_override;
    if (have_seed) plan["master_seed"] = seed;
    auto reports = run_experiment(plan, out_dir);
    std::printf("%zu runs recorded under %s\n", reports.size(), out_dir.c_str());
    return 0;
}

int cmd_compare(const std::string& dir, const std::string& out_path) {
    namespace fs = std::filesystem;
    const fs::path records = fs::path(dir) / "records";
    if (!fs::is_directory(records))
        throw std::invalid_argument("no records directory under " + dir);

    // mean objective per (instance, algorithm), then min-normalize per instance
    std::map<std::string, std::map<std::string, std::pair<double, int>>> cells;
    for (const auto& entry : fs::directory_iterator(records)) {
        if (entry.path().extension() != ".json") continue;
        json r = read_json_file(entry.path().string());
        auto& cell = cells[r.at("instance")][r.at("algorithm")];
        cell.first += r.at("objective").get<double>();
        cell.second += 1;
    }
    if (cells.empty()) throw std::invalid_argument("no records found under " + dir);

    std::ostringstream table;
    table << "instance,algorithm,trials,objective_mean,normalized\n";
    for (const auto& [inst, algs] : cells) {
        double mn = std::numeric_limits<double>::infinity();
        for (const auto& [alg, cell] : algs) mn = std::min(mn, cell.first / cell.second);
        const double denom = std::max(mn, std::numeric_limits<double>::epsilon());
        for (const auto& [alg, cell] : algs) {
            const double mean = cell.first / cell.second;
            table << inst << ',' << alg << ',' << cell.second << ',' << mean << ','
                  << mean / denom << '\n';
        }
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << table.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write file: " + out_path);
        out << table.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"center-based clustering with outliers via uniform sampling"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a dataset from a spec file");
    std::string gen_spec, gen_out = "data.csv";
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "JSON spec file")->required();
    gen->add_option("--out", gen_out, "output CSV path");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "override the spec's seed");

    // run
    auto* run = app.add_subcommand("run", "one algorithm config on one dataset");
    RunFlags rf;
    run->add_option("--data", rf.data_path, "dataset CSV")->required();
    run->add_option("--k", rf.k, "number of centers")->required();
    run->add_option("--z", rf.z, "number of outliers to discard on the full data");
    run->add_option("--variant", rf.variant, "I or II")
        ->check(CLI::IsMember({"I", "II"}));
    run->add_option("--objective", rf.objective, "center, median, or means")
        ->check(CLI::IsMember({"center", "median", "means"}));
    run->add_option("--sample-size", rf.sample_size, "absolute count or percentage ('2%n')");
    int run_extra = -1;
    run->add_option("--extra", run_extra, "k' (variant I) or z' (variant II)");
    run->add_option("--tau", rf.tau, "(k+k')/k for variant I (default 2)");
    run->add_option("--zprime-factor", rf.zprime_factor,
                    "z' as a multiple of expected sample outliers (variant II, default 2)");
    run->add_option("--runs", rf.runs, "boosting runs before the selection pass");
    run->add_option("--seed", rf.seed, "RNG seed");
    run->add_option("--out", rf.out_path, "report JSON path (default stdout)");
    run->add_option("--members", rf.members_path,
                    "write per-point memberships (center index or OUTLIER)");
    run->add_flag("--restrict-centers", rf.restrict_centers,
                  "snap median/means centers to input points");

    // bench
    auto* bench = app.add_subcommand("bench", "execute a plan file into a report directory");
    std::string bench_plan, bench_out = "report";
    int bench_trials = 0;
    std::uint64_t bench_seed = 0;
    bench->add_option("--plan", bench_plan, "JSON plan file")->required();
    bench->add_option("--out", bench_out, "report directory");
    bench->add_option("--trials", bench_trials, "override the plan's trial count");
    auto* bench_seed_opt = bench->add_option("--seed", bench_seed, "override the master seed");

    // eval
    auto* ev = app.add_subcommand("eval", "recompute metrics from dataset + memberships");
    std::string ev_data, ev_members, ev_centers, ev_out, ev_obj = "center";
    int ev_z = 0;
    ev->add_option("--data", ev_data, "dataset CSV")->required();
    ev->add_option("--members", ev_members, "membership file (one line per point)")
        ->required();
    ev->add_option("--centers", ev_centers, "optional centers CSV for the objective");
    ev->add_option("--z", ev_z, "outliers to discard when computing the objective");
    ev->add_option("--objective", ev_obj, "center, median, or means")
        ->check(CLI::IsMember({"center", "median", "means"}));
    ev->add_option("--out", ev_out, "output JSON path (default stdout)");

    // compare
    auto* cmp = app.add_subcommand("compare", "normalize and tabulate a report directory");
    std::string cmp_dir, cmp_out;
    cmp->add_option("--dir", cmp_dir, "report directory from 'bench'")->required();
    cmp->add_option("--out", cmp_out, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) return cmd_gen(gen_spec, gen_out, gen_seed, gen_seed_opt->count() > 0);
        if (*run) {
            if (run_extra >= 0) rf.extra = run_extra;
            return cmd_run(rf);
        }
        if (*bench)
            return cmd_bench(bench_plan, bench_out, bench_trials, bench_seed,
                             bench_seed_opt->count() > 0);
        if (*ev) return cmd_eval(ev_data, ev_members, ev_centers, ev_z, ev_obj, ev_out);
        if (*cmp) return cmd_compare(cmp_dir, cmp_out);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
