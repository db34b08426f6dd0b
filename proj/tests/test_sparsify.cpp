#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ssn/relaxlp.hpp"
#include "ssn/sparsify.hpp"
#include "test_support.hpp"

using namespace ssn;
namespace tt = ssn::test;

namespace {

const Activation kRelu = Activation::relu();

Vec outputs_on(const ShallowParams& theta, const Mat& features) {
    Vec out(features.rows, 0.0);
    for (int i = 0; i < features.rows; ++i)
        out[i] = forward(theta, {features.row(i), static_cast<size_t>(features.cols)}, kRelu);
    return out;
}

}  // namespace

TEST_CASE("filter drops zero weights and keeps order") {
    ShallowParams t;
    t.neurons.push_back({0.0, {1.0}, 0.0});
    t.neurons.push_back({1.0, {2.0}, 3.0});
    const ShallowParams f = filter_zero_weights(t);
    REQUIRE(f.size() == 1);
    CHECK(f.neurons[0].direction[0] == 2.0);

    ShallowParams zeros;
    zeros.neurons.push_back({0.0, {1.0}, 0.0});
    zeros.neurons.push_back({1e-13, {1.0}, 0.0});
    CHECK(filter_zero_weights(zeros).size() == 0);

    ShallowParams keep;
    keep.neurons.push_back({0.5, {1.0}, 0.0});
    keep.neurons.push_back({-0.5, {2.0}, 0.0});
    CHECK(filter_zero_weights(keep).size() == 2);
}

TEST_CASE("null_vector: duplicate columns, full rank, constructed deficiency") {
    Mat dup(3, 3, 0.0);
    for (int i = 0; i < 3; ++i) {
        dup(i, 0) = i + 1.0;
        dup(i, 1) = i + 1.0;
        dup(i, 2) = 7.0 - i;
    }
    const auto v = null_vector(dup);
    REQUIRE(v);
    CHECK(norm_inf(*v) == doctest::Approx(1.0));
    CHECK(std::abs((*v)[0] + (*v)[1]) <= 1e-12);  // (1,-1,0) direction up to sign/scale
    CHECK(std::abs((*v)[2]) <= 1e-12);

    Mat eye(3, 3, 0.0);
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
    CHECK(!null_vector(eye));

    // B = C * D with inner dimension 2 < 5 columns: rank <= 2
    tt::Rng rng(808);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat c = tt::random_mat(rng, 6, 2, -2.0, 2.0);
        const Mat d = tt::random_mat(rng, 2, 5, -2.0, 2.0);
        Mat b(6, 5, 0.0);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 5; ++j)
                for (int k = 0; k < 2; ++k) b(i, j) += c(i, k) * d(k, j);
        const auto w = null_vector(b);
        REQUIRE(w);
        CHECK(norm_inf(*w) == doctest::Approx(1.0));
        CHECK(norm_inf(matvec(b, *w)) <= 1e-8 * max_abs(b) * norm_inf(*w));
    }
}

TEST_CASE("duplicate neuron collapses to a single doubled weight") {
    ShallowParams t;
    t.neurons.push_back({1.0, {0.7}, 0.4});
    t.neurons.push_back({1.0, {0.7}, 0.4});
    Mat features(2, 1);
    features(0, 0) = 0.5;
    features(1, 0) = -0.3;

    SparsifyTrace trace;
    const ShallowParams out = sparsify(t, features, kRelu, &trace);
    REQUIRE(out.size() == 1);
    CHECK(out.neurons[0].weight == doctest::Approx(2.0));
    CHECK(out.neurons[0].direction[0] == doctest::Approx(0.7));
    CHECK(out.neurons[0].bias == doctest::Approx(0.4));
    CHECK(outputs_on(out, features) == outputs_on(t, features));
    CHECK(l1_norm(out) == doctest::Approx(2.0));
}

TEST_CASE("full-column-rank input returns unchanged after filtering") {
    tt::Rng rng(112);
    Mat features(6, 2);
    for (double& v : features.data) v = tt::uniform(rng, -2.0, 2.0);
    ShallowParams t = tt::random_theta(rng, 3, 2);  // 3 columns over 6 rows: full rank a.s.
    t.neurons[1].weight = 0.0;                      // plus one dead neuron

    SparsifyTrace trace;
    const ShallowParams out = sparsify(t, features, kRelu, &trace);
    CHECK(trace.iterations == 1);
    REQUIRE(out.size() == 2);
    CHECK(out.neurons[0].weight == t.neurons[0].weight);
    CHECK(out.neurons[1].weight == t.neurons[2].weight);
}

TEST_CASE("random networks: outputs preserved, l1 monotone, bounded iterations") {
    tt::Rng rng(90210);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int n = 2 + static_cast<int>(rng() % 6);
        const int p = n + 1 + static_cast<int>(rng() % 12);
        Mat features(n, d);
        for (double& v : features.data) v = tt::uniform(rng, -2.0, 2.0);
        const ShallowParams t = tt::random_theta(rng, p, d);

        const Vec before = outputs_on(t, features);
        SparsifyTrace trace;
        const ShallowParams out = sparsify(t, features, kRelu, &trace);
        const Vec after = outputs_on(out, features);

        const double scale = 1.0 + norm_inf(before);
        for (int i = 0; i < n; ++i) CHECK(std::abs(after[i] - before[i]) <= 1e-8 * scale);
        for (double drift : trace.output_drift) CHECK(drift <= 1e-8 * scale);

        CHECK(out.size() <= n);
        CHECK(l1_norm(out) <= l1_norm(t) + 1e-10);
        CHECK(trace.iterations <= p + 1);
        CHECK(trace.min_combination >= -1e-12);

        // each pass loses l1 mass or a neuron
        for (size_t k = 1; k < trace.l1.size(); ++k) {
            CHECK(trace.l1[k] <= trace.l1[k - 1] + 1e-10);
            const bool l1_drop = trace.l1[k] < trace.l1[k - 1] - 1e-12;
            const bool neuron_drop = trace.active[k] <= trace.active[k - 1] - 1;
            CHECK((l1_drop || neuron_drop));
        }
    }
}

TEST_CASE("lp-optimal extracts keep their l1 norm exactly") {
    tt::Rng rng(1999);
    const ParamDomain dom = ParamDomain::hypercube({-1.0, -1.0}, {1.0, 1.0});
    int solved = 0;
    for (int trial = 0; trial < 12 && solved < 6; ++trial) {
        const Dataset data = tt::random_dataset(rng, 4, 1, 1.0, 1.5);
        std::vector<Vec> pts;
        for (int j = 0; j < 20; ++j) pts.push_back(tt::random_vec(rng, 2, -1.0, 1.0));
        const ParamGrid g = ParamGrid::build(std::move(pts), 0.5, dom, data, kRelu);
        const lp::LpSolution sol = lp::solve(build_pd_eps(g, data.labels, 0.1));
        if (!sol.optimal()) continue;
        ++solved;
        const ShallowParams theta = extract_theta(sol, g);

        SparsifyTrace trace;
        const ShallowParams out = sparsify(theta, data.features, kRelu, &trace);
        CHECK(l1_norm(out) == doctest::Approx(l1_norm(theta)).epsilon(1e-9));
        CHECK(out.size() <= data.n());
    }
    CHECK(solved >= 6);
}

TEST_CASE("all-zero input sparsifies to the empty network") {
    ShallowParams t;
    t.neurons.push_back({0.0, {1.0}, 0.0});
    Mat features(1, 1);
    features(0, 0) = 1.0;
    CHECK(sparsify(t, features, kRelu).size() == 0);
}
