#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "test_util.hpp"
#include "usco/datagen.hpp"

using namespace usco;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("gen_synthetic significance audit") {
    SyntheticSpec spec;
    spec.k = 5;
    spec.n = 5000;
    spec.z = 100;
    spec.dim = 8;
    spec.side = 300.0;
    spec.sigma = 5.0;
    spec.min_cluster_frac = 0.1;
    spec.seed = 42;
    auto [data, gt] = gen_synthetic(spec);

    CHECK(data.size() == 5000);
    CHECK(data.dim() == 8);
    CHECK(std::count(data.labels.begin(), data.labels.end(), kOutlier) == spec.z);

    // realized smallest cluster and significance parameters
    std::vector<int> sizes(spec.k, 0);
    for (int lab : data.labels)
        if (lab != kOutlier) sizes[lab]++;
    const int min_size = *std::min_element(sizes.begin(), sizes.end());
    CHECK(min_size >= static_cast<int>(spec.min_cluster_frac * (spec.n - spec.z)) - 1);
    CHECK(gt.epsilon1 == doctest::Approx(spec.k * double(min_size) / spec.n));
    CHECK(gt.epsilon2 == doctest::Approx(spec.k * double(spec.z) / spec.n));
    CHECK(min_size >= gt.epsilon1 / spec.k * spec.n - 1e-9);

    // every outlier lies outside every cluster's enclosing ball
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != kOutlier) continue;
        for (int j = 0; j < spec.k; ++j)
            CHECK(dist(data.points[i], gt.generating_centers.centers[j]) > gt.r_bound[j]);
    }
    // r_bound is recomputed from the data
    for (int j = 0; j < spec.k; ++j) {
        double mx = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.labels[i] == j)
                mx = std::max(mx, dist(data.points[i], gt.generating_centers.centers[j]));
        CHECK(gt.r_bound[j] == mx);
        CHECK(gt.max_diameter >= mx);  // diameter at least the radius
    }
}

TEST_CASE("gen_synthetic even split and z=0") {
    SyntheticSpec spec;
    spec.k = 4;
    spec.n = 1001;
    spec.z = 0;
    spec.dim = 2;
    spec.min_cluster_frac = 0.25;
    spec.seed = 1;
    auto [data, gt] = gen_synthetic(spec);
    CHECK(std::count(data.labels.begin(), data.labels.end(), kOutlier) == 0);
    std::vector<int> sizes(4, 0);
    for (int lab : data.labels) sizes[lab]++;
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*mx - *mn <= 1);
}

TEST_CASE("gen_synthetic defaults match the reference configuration") {
    SyntheticSpec spec;
    CHECK(spec.k == 8);
    CHECK(spec.n == 100000);
    CHECK(spec.z == 2000);
    CHECK(spec.dim == 100);
    CHECK(spec.side == 400.0);
    CHECK(spec.sigma == doctest::Approx(std::sqrt(1000.0)));
}

TEST_CASE("gen_adversarial layout and separation audit") {
    AdversarialSpec spec;
    spec.k = 2;
    spec.cluster_sizes = {10, 10};
    spec.z = 3;
    spec.separation = 10.0;
    spec.dim = 1;
    auto [data, gt] = gen_adversarial(spec);
    CHECK(data.size() == 23);

    std::set<double> locations;
    for (const auto& p : data.points) locations.insert(p[0]);
    CHECK(locations == std::set<double>{0, 10, 20, 30, 40});

    // the three pairwise separation constraints hold with >= x exactly
    for (std::size_t a = 0; a < data.size(); ++a)
        for (std::size_t b = a + 1; b < data.size(); ++b) {
            const bool same_cluster = data.labels[a] != kOutlier &&
                                      data.labels[a] == data.labels[b];
            if (!same_cluster)
                CHECK(dist(data.points[a], data.points[b]) >= spec.separation);
        }
    // optimal k-center-with-z-outliers objective is 0
    CHECK(objective_with_outliers(data, gt.generating_centers, spec.z,
                                  ObjectiveKind::Center) == 0.0);

    auto [noout, gt2] = gen_adversarial({2, {5, 5}, 0, 10.0, 1});
    CHECK(noout.size() == 10);
    CHECK(std::count(noout.labels.begin(), noout.labels.end(), kOutlier) == 0);
}

TEST_CASE("dataset generation is reproducible") {
    SyntheticSpec spec;
    spec.k = 3;
    spec.n = 500;
    spec.z = 10;
    spec.dim = 3;
    spec.seed = 99;
    auto [a, ga] = gen_synthetic(spec);
    auto [b, gb] = gen_synthetic(spec);
    CHECK(a.points == b.points);
    CHECK(a.labels == b.labels);
}

TEST_CASE("csv round trip") {
    SyntheticSpec spec;
    spec.k = 3;
    spec.n = 200;
    spec.z = 5;
    spec.dim = 4;
    spec.seed = 7;
    auto [data, gt] = gen_synthetic(spec);

    TempFile f("usco_roundtrip.csv");
    save_points(data, f.path);
    Dataset loaded = load_points(f.path);
    CHECK(loaded.points == data.points);
    CHECK(loaded.labels == data.labels);
    CHECK(loaded.label_names == data.label_names);

    // saving the loaded dataset again is byte-identical
    TempFile g("usco_roundtrip2.csv");
    save_points(loaded, g.path);
    std::ifstream fa(f.path), fb(g.path);
    std::string sa((std::istreambuf_iterator<char>(fa)), {});
    std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
}

TEST_CASE("csv parsing: header, unlabeled, and errors") {
    TempFile f("usco_parse.csv");
    {
        std::ofstream out(f.path);
        out << "x,y\n1,2\n3,4\n5,6\n";
    }
    Dataset d = load_points(f.path);
    CHECK(d.size() == 3);
    CHECK(d.dim() == 2);
    CHECK_FALSE(d.has_labels());

    {
        std::ofstream out(f.path);
        out << "1,2,a\n3,4,OUTLIER\n5,6,a\n";
    }
    d = load_points(f.path);
    CHECK(d.dim() == 2);
    CHECK(d.labels == std::vector<int>{0, kOutlier, 0});

    {
        std::ofstream out(f.path);
        out << "1,2\n3\n";
    }
    CHECK_THROWS_WITH_AS(load_points(f.path), "load_points: ragged row at line 2",
                         std::invalid_argument);

    {
        std::ofstream out(f.path);
        out << "1,2\n3,oops,5\n";
    }
    CHECK_THROWS_AS(load_points(f.path), std::invalid_argument);
    CHECK_THROWS_AS(load_points("/nonexistent/usco.csv"), std::invalid_argument);
}

TEST_CASE("augment_outliers") {
    SyntheticSpec spec;
    spec.k = 3;
    spec.n = 5900;
    spec.z = 0;
    spec.dim = 9;
    spec.side = 200.0;
    spec.sigma = 4.0;
    spec.seed = 17;
    auto [data, gt] = gen_synthetic(spec);

    std::mt19937_64 rng(5);
    auto same = augment_outliers(data, 0.0, rng);
    CHECK(same.points == data.points);

    auto aug = augment_outliers(data, 0.01, rng);
    const long added = static_cast<long>(aug.size()) - static_cast<long>(data.size());
    // smallest count reaching a 1% outlier fraction of the grown total
    CHECK(added == static_cast<long>(std::ceil(0.01 * 5900 / 0.99)));
    CHECK(std::count(aug.labels.begin(), aug.labels.end(), kOutlier) == added);

    // appended points sit outside every cluster's (centroid, max radius) ball
    std::vector<Point> centroids(3, Point(9, 0.0));
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (int c = 0; c < 9; ++c) centroids[data.labels[i]][c] += data.points[i][c];
        counts[data.labels[i]]++;
    }
    std::vector<double> radius(3, 0.0);
    for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 9; ++c) centroids[j][c] /= counts[j];
    for (std::size_t i = 0; i < data.size(); ++i)
        radius[data.labels[i]] =
            std::max(radius[data.labels[i]], dist(data.points[i], centroids[data.labels[i]]));
    for (std::size_t i = data.size(); i < aug.size(); ++i)
        for (int j = 0; j < 3; ++j) CHECK(dist(aug.points[i], centroids[j]) > radius[j]);

    Dataset unlabeled = testutil::random_dataset(rng, 50, 2);
    CHECK_THROWS_AS(augment_outliers(unlabeled, 0.01, rng), std::invalid_argument);
}
