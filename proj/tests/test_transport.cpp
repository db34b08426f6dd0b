#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ssn/transport.hpp"
#include "test_support.hpp"

using namespace ssn;
namespace tt = ssn::test;

namespace {

const Activation kRelu = Activation::relu();

std::vector<Vec> random_cloud(tt::Rng& rng, int n, int q, double span = 2.0) {
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) pts.push_back(tt::random_vec(rng, q, -span, span));
    return pts;
}

/// min over permutations of (mean matched distance^p)^(1/p); p = inf: minimax.
double brute_force_wp(const std::vector<Vec>& a, const std::vector<Vec>& b, double p) {
    const int n = static_cast<int>(a.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (size_t k = 0; k < a[i].size(); ++k) {
                const double d = a[i][k] - b[perm[i]][k];
                d2 += d * d;
            }
            const double d = std::sqrt(d2);
            if (std::isinf(p))
                acc = std::max(acc, d);
            else
                acc += std::pow(d, p);
        }
        const double total = std::isinf(p) ? acc : std::pow(acc / n, 1.0 / p);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("kr distance: identical measures and a single pair of atoms") {
    tt::Rng rng(12);
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform(random_cloud(rng, 4, 2));
    CHECK(kr_distance(mu, mu) == doctest::Approx(0.0).epsilon(1e-10));

    const EmpiricalMeasure d0 = EmpiricalMeasure::uniform({{0.0}});
    const EmpiricalMeasure d1 = EmpiricalMeasure::uniform({{1.0}});
    CHECK(kr_distance(d0, d1) == doctest::Approx(1.0));
}

TEST_CASE("kr distance handles non-uniform weights and unequal sizes") {
    const EmpiricalMeasure mu = EmpiricalMeasure::create({{0.0}}, {1.0});
    const EmpiricalMeasure nu = EmpiricalMeasure::create({{0.0}, {1.0}}, {0.5, 0.5});
    CHECK(kr_distance(mu, nu) == doctest::Approx(0.5));  // move half the mass one unit
    CHECK_THROWS_AS(kr_distance(mu, EmpiricalMeasure::uniform({{0.0, 0.0}})), std::invalid_argument);
}

TEST_CASE("kr distance equals the permutation oracle for uniform equal sizes") {
    tt::Rng rng(34);
    for (int trial = 0; trial < 8; ++trial) {
        const auto a = random_cloud(rng, 5, 2);
        const auto b = random_cloud(rng, 5, 2);
        const double lp = kr_distance(EmpiricalMeasure::uniform(a), EmpiricalMeasure::uniform(b));
        CHECK(lp == doctest::Approx(brute_force_wp(a, b, 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein_p: identical clouds and the two-point example") {
    tt::Rng rng(56);
    const auto cloud = random_cloud(rng, 4, 3);
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform(cloud);
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
        CHECK(wasserstein_p(mu, mu, p) == doctest::Approx(0.0));

    // identity matching costs 1 per atom, crossing costs 9
    const EmpiricalMeasure x = EmpiricalMeasure::uniform({{0.0}, {10.0}});
    const EmpiricalMeasure y = EmpiricalMeasure::uniform({{1.0}, {9.0}});
    CHECK(wasserstein_p(x, y, 1.0) == doctest::Approx(1.0));
    CHECK(wasserstein_p(x, y, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
}

TEST_CASE("wasserstein_p matches the permutation oracle") {
    tt::Rng rng(78);
    for (int trial = 0; trial < 8; ++trial) {
        const auto a = random_cloud(rng, 5, 2);
        const auto b = random_cloud(rng, 5, 2);
        const EmpiricalMeasure mu = EmpiricalMeasure::uniform(a);
        const EmpiricalMeasure nu = EmpiricalMeasure::uniform(b);
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
            CHECK(wasserstein_p(mu, nu, p) == doctest::Approx(brute_force_wp(a, b, p)).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein_p rejects unequal or non-uniform inputs") {
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform({{0.0}, {1.0}});
    const EmpiricalMeasure shorter = EmpiricalMeasure::uniform({{0.0}});
    CHECK_THROWS_AS(wasserstein_p(mu, shorter, 1.0), std::invalid_argument);
    const EmpiricalMeasure skew = EmpiricalMeasure::create({{0.0}, {1.0}}, {0.3, 0.7});
    CHECK_THROWS_AS(wasserstein_p(mu, skew, 1.0), std::invalid_argument);
}

TEST_CASE("kr distance is a metric on random triples") {
    tt::Rng rng(90);
    for (int trial = 0; trial < 6; ++trial) {
        const EmpiricalMeasure a = EmpiricalMeasure::uniform(random_cloud(rng, 4, 2));
        const EmpiricalMeasure b = EmpiricalMeasure::uniform(random_cloud(rng, 4, 2));
        const EmpiricalMeasure c = EmpiricalMeasure::uniform(random_cloud(rng, 4, 2));
        const double ab = kr_distance(a, b), ba = kr_distance(b, a);
        const double bc = kr_distance(b, c), ac = kr_distance(a, c);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ac <= ab + bc + 1e-8);
        CHECK(kr_distance(a, a) <= 1e-9);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("matching route equals the transport-lp route for W1") {
    tt::Rng rng(111);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        const EmpiricalMeasure mu = EmpiricalMeasure::uniform(random_cloud(rng, n, 3));
        const EmpiricalMeasure nu = EmpiricalMeasure::uniform(random_cloud(rng, n, 3));
        CHECK(wasserstein_p(mu, nu, 1.0) == doctest::Approx(kr_distance(mu, nu)).epsilon(1e-8));
    }
}

TEST_CASE("generalization report: interpolation on the training set itself") {
    tt::Rng rng(222);
    Mat f(3, 1);
    f(0, 0) = 0.2;
    f(1, 0) = 0.9;
    f(2, 0) = 1.7;
    const Dataset data = Dataset::create(std::move(f), {0.4, 1.8, 3.4});
    ShallowParams theta;  // f(x) = 2 relu(x) interpolates on positive features
    theta.neurons.push_back({2.0, {1.0}, 0.0});

    const GeneralizationReport r = generalization_report(theta, data, data, kRelu);
    CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.train_test == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.features == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.residual.total == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.holds());
    CHECK(r.to_text().find("holds") != std::string::npos);
}

TEST_CASE("generalization inequality holds for the empty network and random data") {
    tt::Rng rng(333);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 2);
        const Dataset train = tt::random_dataset(rng, 3 + static_cast<int>(rng() % 5), d);
        const Dataset test = tt::random_dataset(rng, 3 + static_cast<int>(rng() % 5), d);
        const GeneralizationReport r = generalization_report(ShallowParams{}, train, test, kRelu);
        CHECK(r.holds());
    }
}

TEST_CASE("mean-lp bounds hold on random triples") {
    tt::Rng rng(444);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 2);
        const int n = 3 + static_cast<int>(rng() % 4);
        const Dataset train = tt::random_dataset(rng, n, d);
        const Dataset test = tt::random_dataset(rng, n, d);
        const ShallowParams theta = tt::random_theta(rng, 4, d);
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            const MeanLpReport r = mean_lp_report(theta, train, test, p, kRelu);
            CHECK(r.holds());
        }
    }
}

TEST_CASE("parallel and serial cost kernels agree bitwise") {
    tt::Rng rng(555);
    const auto a = random_cloud(rng, 13, 4);
    const auto b = random_cloud(rng, 9, 4);
    const Mat par = pairwise_cost(a, b);
    const Mat ser = pairwise_cost_serial(a, b);
    REQUIRE(par.data.size() == ser.data.size());
    for (size_t i = 0; i < par.data.size(); ++i) CHECK(par.data[i] == ser.data[i]);
}
