#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "usco/harness.hpp"

using namespace usco;
namespace fs = std::filesystem;

namespace {

ClusteringResult make_result(std::vector<int> memberships) {
    ClusteringResult r;
    r.memberships = std::move(memberships);
    r.outlier_count =
        static_cast<int>(std::count(r.memberships.begin(), r.memberships.end(), kOutlier));
    return r;
}

}  // namespace

TEST_CASE("precision") {
    // Out == Out_truth
    auto r = make_result({0, kOutlier, 1, kOutlier});
    CHECK(*precision(r, {0, kOutlier, 1, kOutlier}) == 1.0);

    // |Out ∩ Out_truth| = 2 of 4 truth outliers
    r = make_result({kOutlier, kOutlier, kOutlier, 0, 0, 0, 0});
    CHECK(*precision(r, {0, kOutlier, kOutlier, kOutlier, kOutlier, 0, 0}) == 0.5);

    // disjoint
    r = make_result({kOutlier, 0, 0});
    CHECK(*precision(r, {0, 0, kOutlier}) == 0.0);

    // no truth outliers -> absent
    r = make_result({0, 0, kOutlier});
    CHECK_FALSE(precision(r, {0, 0, 1}).has_value());
}

TEST_CASE("purity") {
    // perfect clustering
    auto r = make_result({0, 0, 1, 1});
    CHECK(purity(r, {0, 0, 1, 1}) == 1.0);

    // truth {a,a,b,b}, both obtained clusters split evenly -> 0.5
    r = make_result({0, 1, 0, 1});
    CHECK(purity(r, {0, 0, 1, 1}) == 0.5);

    // single obtained cluster over a balanced 2-class truth -> 0.5
    r = make_result({0, 0, 0, 0});
    CHECK(purity(r, {0, 0, 1, 1}) == 0.5);

    // returned outliers excluded from both sides
    r = make_result({0, 0, kOutlier, 1, 1, kOutlier});
    CHECK(purity(r, {0, 0, 0, 1, 1, kOutlier}) == 1.0);
}

TEST_CASE("purity is 1 exactly when every obtained cluster is truth-pure") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 20;
        std::vector<int> truth(n), mem(n);
        std::uniform_int_distribution<int> lab(0, 2);
        for (int i = 0; i < n; ++i) {
            truth[i] = lab(rng);
            mem[i] = lab(rng);
        }
        auto r = make_result(mem);
        const double p = purity(r, truth);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        bool pure = true;
        for (int c = 0; c <= 2 && pure; ++c) {
            int seen = -2;
            for (int i = 0; i < n; ++i)
                if (mem[i] == c) {
                    if (seen == -2) seen = truth[i];
                    pure = pure && truth[i] == seen;
                }
        }
        CHECK((p == 1.0) == pure);
    }
}

TEST_CASE("normalize_group") {
    std::vector<EvalReport> g(3);
    g[0].objective = 2;
    g[1].objective = 4;
    g[2].objective = 8;
    normalize_group(g);
    CHECK(g[0].normalized_objective == 1.0);
    CHECK(g[1].normalized_objective == 2.0);
    CHECK(g[2].normalized_objective == 4.0);
    CHECK_FALSE(g[0].normalized_degenerate);

    std::vector<EvalReport> single(1);
    single[0].objective = 5.5;
    normalize_group(single);
    CHECK(single[0].normalized_objective == 1.0);

    std::vector<EvalReport> equal(3);
    for (auto& r : equal) r.objective = 3.0;
    normalize_group(equal);
    for (auto& r : equal) CHECK(r.normalized_objective == 1.0);

    std::vector<EvalReport> zero(2);
    zero[0].objective = 0.0;
    zero[1].objective = 1.0;
    normalize_group(zero);
    CHECK(zero[0].normalized_degenerate);
}

TEST_CASE("run_experiment one-cell plan emits exactly one record") {
    const json plan = {
        {"master_seed", 11},
        {"trials", 1},
        {"instances",
         {{{"name", "tiny"},
           {"synthetic",
            {{"k", 3}, {"n", 600}, {"z", 12}, {"dim", 3}, {"side", 200.0}, {"sigma", 4.0},
             {"seed", 5}}}}}},
        {"algorithms",
         {{{"name", "a2"}, {"variant", "II"}, {"objective", "center"}, {"k", 3},
           {"sample_size", 120}, {"runs", 1}}}}};

    const fs::path out = fs::temp_directory_path() / "usco_plan_test";
    fs::remove_all(out);
    auto reports = run_experiment(plan, out.string());
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].instance == "tiny");
    CHECK(reports[0].precision_v.has_value());
    CHECK(fs::exists(out / "records" / "tiny__a2__t0.json"));
    CHECK(fs::exists(out / "records.csv"));
    CHECK(fs::exists(out / "aggregate.csv"));

    // fixed master seed reproduces every record exactly, timings aside
    const fs::path out2 = fs::temp_directory_path() / "usco_plan_test2";
    fs::remove_all(out2);
    run_experiment(plan, out2.string());
    std::ifstream fa(out / "records" / "tiny__a2__t0.json");
    std::ifstream fb(out2 / "records" / "tiny__a2__t0.json");
    json ja = json::parse(fa), jb = json::parse(fb);
    ja.erase("timings");
    jb.erase("timings");
    CHECK(ja == jb);
    fs::remove_all(out);
    fs::remove_all(out2);
}

TEST_CASE("run_experiment aggregates are recomputable from raw records") {
    const json plan = {
        {"master_seed", 4},
        {"trials", 3},
        {"instances",
         {{{"name", "g"},
           {"synthetic",
            {{"k", 2}, {"n", 400}, {"z", 8}, {"dim", 2}, {"side", 100.0}, {"sigma", 3.0},
             {"seed", 9}}}}}},
        {"algorithms",
         {{{"name", "a1"}, {"variant", "I"}, {"objective", "means"}, {"k", 2}, {"tau", 2.0},
           {"sample_size", 60}, {"runs", 2}}}}};
    const fs::path out = fs::temp_directory_path() / "usco_plan_agg";
    fs::remove_all(out);
    auto reports = run_experiment(plan, out.string());
    REQUIRE(reports.size() == 3);

    double mean = 0;
    for (const auto& r : reports) mean += r.objective;
    mean /= 3.0;
    std::ifstream agg(out / "aggregate.csv");
    std::string header, row;
    std::getline(agg, header);
    std::getline(agg, row);
    // objective_mean is the 4th field
    std::stringstream ss(row);
    std::string field;
    for (int i = 0; i < 4; ++i) std::getline(ss, field, ',');
    CHECK(std::stod(field) == doctest::Approx(mean).epsilon(1e-4));
    fs::remove_all(out);
}

TEST_CASE("metadata sidecar") {
    SyntheticSpec spec;
    spec.k = 2;
    spec.n = 300;
    spec.z = 6;
    spec.dim = 2;
    spec.seed = 2;
    auto [data, gt] = gen_synthetic(spec);
    const fs::path p = fs::temp_directory_path() / "usco_meta.csv";
    save_points(data, p.string());
    save_metadata(p.string(), json{{"k", 2}}, gt);
    std::ifstream in(p.string() + ".meta.json");
    json j = json::parse(in);
    CHECK(j["epsilon2"].get<double>() == doctest::Approx(gt.epsilon2));
    CHECK(j["r_bound"].size() == 2);
    fs::remove(p);
    fs::remove(p.string() + ".meta.json");
}
