#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "ssn/io.hpp"
#include "test_support.hpp"

using namespace ssn;
namespace tt = ssn::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("ssn_io_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void put_be32(std::ofstream& f, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx_fixture(const std::string& images, const std::string& labels,
                       const std::vector<std::vector<unsigned char>>& imgs,
                       const std::vector<unsigned char>& labs, uint32_t image_magic = 2051,
                       uint32_t label_magic = 2049, bool truncate_images = false) {
    std::ofstream fi(images, std::ios::binary);
    put_be32(fi, image_magic);
    put_be32(fi, static_cast<uint32_t>(imgs.size()));
    put_be32(fi, 28);
    put_be32(fi, 28);
    for (const auto& img : imgs) {
        const size_t n = truncate_images ? img.size() / 2 : img.size();
        fi.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(n));
        if (truncate_images) break;
    }
    std::ofstream fl(labels, std::ios::binary);
    put_be32(fl, label_magic);
    put_be32(fl, static_cast<uint32_t>(labs.size()));
    fl.write(reinterpret_cast<const char*>(labs.data()), static_cast<std::streamsize>(labs.size()));
}

std::vector<std::vector<unsigned char>> two_images() {
    std::vector<std::vector<unsigned char>> imgs(2, std::vector<unsigned char>(784, 0));
    for (int k = 0; k < 784; ++k) {
        imgs[0][k] = static_cast<unsigned char>(k % 251);
        imgs[1][k] = static_cast<unsigned char>((3 * k + 7) % 255);
    }
    return imgs;
}

}  // namespace

TEST_CASE("dataset csv round-trips at full precision") {
    TempDir tmp;
    tt::Rng rng(1);
    const Dataset data = tt::random_dataset(rng, 17, 3);
    const std::string path = tmp.file("data.csv");
    io::write_dataset_csv(path, data);
    const Dataset back = io::read_dataset_csv(path);
    REQUIRE(back.n() == data.n());
    REQUIRE(back.dim() == data.dim());
    CHECK(back.features.data == data.features.data);  // bitwise
    CHECK(back.labels == data.labels);

    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "x1,x2,x3,y");
}

TEST_CASE("model json round-trips with and without a domain") {
    TempDir tmp;
    tt::Rng rng(2);
    const ShallowParams theta = tt::random_theta(rng, 5, 3);

    const std::string p1 = tmp.file("m1.json");
    io::write_model_json(p1, theta, std::nullopt, Activation::relu());
    const io::ModelFile m1 = io::read_model_json(p1);
    REQUIRE(m1.theta.size() == theta.size());
    for (int j = 0; j < theta.size(); ++j) {
        CHECK(m1.theta.neurons[j].weight == theta.neurons[j].weight);
        CHECK(m1.theta.neurons[j].direction == theta.neurons[j].direction);
        CHECK(m1.theta.neurons[j].bias == theta.neurons[j].bias);
    }
    CHECK(!m1.domain);

    const std::string p2 = tmp.file("m2.json");
    io::write_model_json(p2, theta, ParamDomain::hypercube({-1.0, -2.0, -1.0, -0.5}, {1.0, 2.0, 1.0, 0.5}),
                         Activation::relu());
    const io::ModelFile m2 = io::read_model_json(p2);
    REQUIRE(m2.domain);
    CHECK(m2.domain->kind == ParamDomain::Kind::hypercube);
    CHECK(m2.domain->lo[1] == -2.0);

    const std::string p3 = tmp.file("m3.json");
    io::write_model_json(p3, theta, ParamDomain::unit_ball(4), Activation::relu());
    const io::ModelFile m3 = io::read_model_json(p3);
    REQUIRE(m3.domain);
    CHECK(m3.domain->kind == ParamDomain::Kind::unit_ball);
    CHECK(m3.domain->dim == 4);
}

TEST_CASE("idx fixture round-trips to 784-dimensional samples") {
    TempDir tmp;
    write_idx_fixture(tmp.file("img"), tmp.file("lab"), two_images(), {0, 2});
    const Dataset d = io::mnist_import(tmp.file("img"), tmp.file("lab"), {0, 1, 2}, 2, 42);
    CHECK(d.n() == 2);
    CHECK(d.dim() == 784);
    for (double v : d.features.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // labels preserved as reals
    std::vector<double> labels = d.labels;
    std::sort(labels.begin(), labels.end());
    CHECK(labels[0] == 0.0);
    CHECK(labels[1] == 2.0);
}

TEST_CASE("idx import filters out unwanted labels") {
    TempDir tmp;
    write_idx_fixture(tmp.file("img"), tmp.file("lab"), two_images(), {7, 1});
    const Dataset d = io::mnist_import(tmp.file("img"), tmp.file("lab"), {0, 1, 2}, 1, 0);
    CHECK(d.n() == 1);
    CHECK(d.labels[0] == 1.0);  // the 7 is excluded
    CHECK_THROWS_WITH_AS(static_cast<void>(io::mnist_import(tmp.file("img"), tmp.file("lab"),
                                                            {0, 1, 2}, 2, 0)),
                         doctest::Contains("only 1 match"), std::runtime_error);
}

TEST_CASE("idx import rejects bad magic and truncated files") {
    TempDir tmp;
    write_idx_fixture(tmp.file("img"), tmp.file("lab"), two_images(), {0, 1}, 123, 2049);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(io::mnist_import(tmp.file("img"), tmp.file("lab"), {0, 1}, 1, 0)),
        doctest::Contains("bad magic"), std::runtime_error);

    write_idx_fixture(tmp.file("img2"), tmp.file("lab2"), two_images(), {0, 1}, 2051, 11);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(io::mnist_import(tmp.file("img2"), tmp.file("lab2"), {0, 1}, 1, 0)),
        doctest::Contains("bad magic"), std::runtime_error);

    write_idx_fixture(tmp.file("img3"), tmp.file("lab3"), two_images(), {0, 1}, 2051, 2049, true);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(io::mnist_import(tmp.file("img3"), tmp.file("lab3"), {0, 1}, 1, 0)),
        doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("curve csv carries the documented columns") {
    TempDir tmp;
    HyperCurve curve;
    curve.kind = HyperCurve::Kind::U;
    CurveSample s1;
    s1.param = 0.0;
    s1.pd_value = 2.0;
    s1.curve_value = 1.5;
    s1.c_eps = 0.25;
    CurveSample s2;
    s2.param = 0.5;
    s2.pd_value = 1.0;
    s2.curve_value = 1.2;
    curve.samples = {s1, s2};
    const std::string path = tmp.file("curve.csv");
    io::write_curve_csv(path, curve);

    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "param,pd_value,curve_value,c_eps,C_eps");
    std::getline(f, line);
    CHECK(line.find("0.25") != std::string::npos);
    CHECK(line.find("nan") != std::string::npos);  // missing C_eps
}

TEST_CASE("svg chart is a standalone labeled vector drawing") {
    TempDir tmp;
    io::Series s;
    s.label = "accuracy";
    s.x = {0.0, 0.5, 1.0};
    s.y = {0.9, 0.95, 0.8};
    const std::string path = tmp.file("chart.svg");
    io::write_svg_chart(path, "sweep", "epsilon", "test accuracy", {s});
    std::ifstream f(path);
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all.find("<svg") != std::string::npos);
    CHECK(all.find("polyline") != std::string::npos);
    CHECK(all.find("epsilon") != std::string::npos);
    CHECK(all.find("accuracy") != std::string::npos);
}

TEST_CASE("matrix dump and training log") {
    TempDir tmp;
    Mat m(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -2.0;
    io::write_matrix_text(tmp.file("m.txt"), m);
    std::ifstream f(tmp.file("m.txt"));
    std::string line;
    std::getline(f, line);
    CHECK(line == "1.5 0");

    io::write_train_log_csv(tmp.file("log.csv"), {{0, 1.0, 0.5, 0.5}, {1, 0.8, 0.4, 0.4}});
    std::ifstream g(tmp.file("log.csv"));
    std::getline(g, line);
    CHECK(line == "epoch,objective,fidelity,l1");
}
