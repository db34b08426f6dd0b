#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssn/model.hpp"
#include "ssn/relaxlp.hpp"
#include "ssn/sgdtrain.hpp"

namespace ssn::io {

/// Dataset round-trips through delimiter-separated text with header
/// x1,...,xd,y at full double precision.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

struct ModelFile {
    ShallowParams theta;
    std::optional<ParamDomain> domain;
    Activation act;
};

/// Model persistence: JSON document with fields omega, a, b, domain,
/// activation.
void write_model_json(const std::string& path, const ShallowParams& theta,
                      const std::optional<ParamDomain>& domain, const Activation& act);
ModelFile read_model_json(const std::string& path);

/// IDX-format MNIST ingestion: images magic 2051, labels magic 2049, pixels
/// scaled to [0,1], filtered to `keep_labels`, seeded shuffle, first `count`
/// taken. Malformed or truncated files throw with a specific message.
Dataset mnist_import(const std::string& images_path, const std::string& labels_path,
                     const std::set<int>& keep_labels, int count, uint64_t seed);

/// Row-major text dump (one row per line), for grid/matrix debugging.
void write_matrix_text(const std::string& path, const Mat& m);

void write_train_log_csv(const std::string& path, const std::vector<EpochRecord>& log);

/// Curve samples as `param,pd_value,curve_value,c_eps,C_eps` (missing
/// certificates print as nan).
void write_curve_csv(const std::string& path, const HyperCurve& curve);

struct Series {
    std::string label;
    Vec x, y;
};

/// Standalone SVG line chart with axes, ticks and a legend; `log_x` switches
/// the horizontal axis to log10 scale.
void write_svg_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series,
                     bool log_x = false);

}  // namespace ssn::io
