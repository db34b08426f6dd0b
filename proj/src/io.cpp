#include "ssn/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ssn::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.precision(17);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream f = open_out(path);
    for (int k = 0; k < data.dim(); ++k) f << "x" << (k + 1) << ",";
    f << "y\n";
    for (int i = 0; i < data.n(); ++i) {
        for (int k = 0; k < data.dim(); ++k) f << data.features(i, k) << ",";
        f << data.labels[i] << "\n";
    }
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("dataset csv empty: " + path);
    int d = 0;
    {
        std::stringstream hs(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "y")
            throw std::runtime_error("dataset csv: expected header x1,...,xd,y in " + path);
        d = static_cast<int>(cols.size()) - 1;
    }
    std::vector<double> flat;
    Vec labels;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        int k = 0;
        for (; std::getline(ls, cell, ','); ++k) {
            const double v = std::stod(cell);
            if (k < d)
                flat.push_back(v);
            else
                labels.push_back(v);
        }
        if (k != d + 1) throw std::runtime_error("dataset csv: ragged row in " + path);
    }
    Mat features(static_cast<int>(labels.size()), d);
    features.data = std::move(flat);
    return Dataset::create(std::move(features), std::move(labels));
}

void write_model_json(const std::string& path, const ShallowParams& theta,
                      const std::optional<ParamDomain>& domain, const Activation& act) {
    nlohmann::json j;
    j["omega"] = nlohmann::json::array();
    j["a"] = nlohmann::json::array();
    j["b"] = nlohmann::json::array();
    for (const Neuron& nrn : theta.neurons) {
        j["omega"].push_back(nrn.weight);
        j["a"].push_back(nrn.direction);
        j["b"].push_back(nrn.bias);
    }
    if (domain) {
        if (domain->kind == ParamDomain::Kind::hypercube)
            j["domain"] = {{"kind", "hypercube"}, {"lo", domain->lo}, {"hi", domain->hi}};
        else
            j["domain"] = {{"kind", "unit-ball"}, {"dim", domain->dim}};
    } else {
        j["domain"] = nullptr;
    }
    j["activation"] = act.name();
    std::ofstream f = open_out(path);
    f << j.dump(2) << "\n";
}

ModelFile read_model_json(const std::string& path) {
    std::ifstream f = open_in(path);
    nlohmann::json j;
    f >> j;
    ModelFile m;
    const auto& omega = j.at("omega");
    const auto& a = j.at("a");
    const auto& b = j.at("b");
    if (omega.size() != a.size() || omega.size() != b.size())
        throw std::runtime_error("model json: omega/a/b length mismatch in " + path);
    for (size_t i = 0; i < omega.size(); ++i) {
        Neuron nrn;
        nrn.weight = omega[i].get<double>();
        nrn.direction = a[i].get<Vec>();
        nrn.bias = b[i].get<double>();
        m.theta.neurons.push_back(std::move(nrn));
    }
    if (j.contains("domain") && !j["domain"].is_null()) {
        const auto& dj = j["domain"];
        const std::string kind = dj.at("kind").get<std::string>();
        if (kind == "hypercube")
            m.domain = ParamDomain::hypercube(dj.at("lo").get<Vec>(), dj.at("hi").get<Vec>());
        else if (kind == "unit-ball")
            m.domain = ParamDomain::unit_ball(dj.at("dim").get<int>());
        else
            throw std::runtime_error("model json: unknown domain kind '" + kind + "'");
    }
    const std::string act = j.at("activation").get<std::string>();
    if (act != "relu") throw std::runtime_error("model json: unknown activation '" + act + "'");
    m.act = Activation::relu();
    return m;
}

namespace {

uint32_t read_be32(std::istream& f, const std::string& path) {
    unsigned char b[4];
    if (!f.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("idx: truncated header in " + path);
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace

Dataset mnist_import(const std::string& images_path, const std::string& labels_path,
                     const std::set<int>& keep_labels, int count, uint64_t seed) {
    std::ifstream fi(images_path, std::ios::binary);
    if (!fi) throw std::runtime_error("cannot open for reading: " + images_path);
    std::ifstream fl(labels_path, std::ios::binary);
    if (!fl) throw std::runtime_error("cannot open for reading: " + labels_path);

    const uint32_t magic_i = read_be32(fi, images_path);
    if (magic_i != 2051)
        throw std::runtime_error("idx: bad magic " + std::to_string(magic_i) + " in " + images_path +
                                 " (expected 2051)");
    const uint32_t n_img = read_be32(fi, images_path);
    const uint32_t rows = read_be32(fi, images_path);
    const uint32_t cols = read_be32(fi, images_path);

    const uint32_t magic_l = read_be32(fl, labels_path);
    if (magic_l != 2049)
        throw std::runtime_error("idx: bad magic " + std::to_string(magic_l) + " in " + labels_path +
                                 " (expected 2049)");
    const uint32_t n_lab = read_be32(fl, labels_path);
    if (n_img != n_lab)
        throw std::runtime_error("idx: image/label count mismatch (" + std::to_string(n_img) +
                                 " vs " + std::to_string(n_lab) + ")");

    const size_t pix = static_cast<size_t>(rows) * cols;
    std::vector<std::vector<unsigned char>> images(n_img, std::vector<unsigned char>(pix));
    for (uint32_t i = 0; i < n_img; ++i)
        if (!fi.read(reinterpret_cast<char*>(images[i].data()), static_cast<std::streamsize>(pix)))
            throw std::runtime_error("idx: truncated image data in " + images_path);
    std::vector<unsigned char> labels(n_lab);
    if (!fl.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(n_lab)))
        throw std::runtime_error("idx: truncated label data in " + labels_path);

    std::vector<int> kept;
    for (uint32_t i = 0; i < n_img; ++i)
        if (keep_labels.count(labels[i])) kept.push_back(static_cast<int>(i));
    if (count > static_cast<int>(kept.size()))
        throw std::runtime_error("idx: requested " + std::to_string(count) + " samples but only " +
                                 std::to_string(kept.size()) + " match the kept labels");

    std::mt19937_64 rng(seed);
    std::shuffle(kept.begin(), kept.end(), rng);
    kept.resize(count);

    Mat features(count, static_cast<int>(pix));
    Vec y(count);
    for (int r = 0; r < count; ++r) {
        const int i = kept[r];
        for (size_t k = 0; k < pix; ++k) features(r, static_cast<int>(k)) = images[i][k] / 255.0;
        y[r] = static_cast<double>(labels[i]);
    }
    return Dataset::create(std::move(features), std::move(y));
}

void write_matrix_text(const std::string& path, const Mat& m) {
    std::ofstream f = open_out(path);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) f << (j ? " " : "") << m(i, j);
        f << "\n";
    }
}

void write_train_log_csv(const std::string& path, const std::vector<EpochRecord>& log) {
    std::ofstream f = open_out(path);
    f << "epoch,objective,fidelity,l1\n";
    for (const EpochRecord& r : log)
        f << r.epoch << "," << r.objective << "," << r.fidelity << "," << r.l1 << "\n";
}

void write_curve_csv(const std::string& path, const HyperCurve& curve) {
    std::ofstream f = open_out(path);
    f << "param,pd_value,curve_value,c_eps,C_eps\n";
    for (const CurveSample& s : curve.samples) {
        f << s.param << "," << s.pd_value << "," << s.curve_value << ",";
        if (s.c_eps)
            f << *s.c_eps;
        else
            f << "nan";
        f << ",";
        if (s.C_eps)
            f << *s.C_eps;
        else
            f << "nan";
        f << "\n";
    }
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_tick(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series, bool log_x) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double xv = log_x ? std::log10(s.x[i]) : s.x[i];
            if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.04 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream f = open_out(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
    // axes
    f << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + t * (xmax - xmin) / 5;
        const double yv = ymin + t * (ymax - ymin) / 5;
        f << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv) << "\" y2=\""
          << height - mb + 5 << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 20 << "\" text-anchor=\"middle\">"
          << (log_x ? "1e" + fmt_tick(xv) : fmt_tick(xv)) << "</text>\n";
        f << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\"" << py(yv)
          << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
          << fmt_tick(yv) << "</text>\n";
    }
    f << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    f << "<text x=\"18\" y=\"" << (mt + height - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (mt + height - mb) / 2 << ")\">" << ylabel << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kSeriesColors[si % 6];
        f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double xv = log_x ? std::log10(s.x[i]) : s.x[i];
            if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
            f << px(xv) << "," << py(s.y[i]) << " ";
        }
        f << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(si);
        f << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly << "\" x2=\"" << width - mr - 120
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        f << "<text x=\"" << width - mr - 114 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace ssn::io
