#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gfsc/types.hpp"

namespace gfsc {

enum class Orientation
{
    FeaturesBySamples,
    SamplesByFeatures,
};

std::string to_string(Orientation o);
Orientation parse_orientation(const std::string& text);

struct ViewSource
{
    std::string path;
    std::string format = "csv";
    Orientation orientation = Orientation::FeaturesBySamples;
    bool header = false;
    std::string name;
};

/// Where a dataset's files live plus the shape it is expected to have.
struct DatasetManifest
{
    std::string name;
    std::vector<ViewSource> views;
    std::optional<std::string> labels_path;
    bool labels_header = false;
    std::optional<long> expected_n;
    std::optional<long> expected_t;
    std::optional<long> expected_k;
    /// Relative paths resolve against this directory.
    std::filesystem::path base_dir;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Comma-separated numeric matrix, one row per line.
Matrix<double> read_csv_matrix(const std::filesystem::path& path, bool header = false);
void write_csv_matrix(const Matrix<double>& m, const std::filesystem::path& path);

Labels read_labels(const std::filesystem::path& path, bool header = false);
void write_labels(const Labels& labels, const std::filesystem::path& path);

/// Loads every view (transposed to features x samples when needed),
/// validates against the manifest and normalizes each feature to [-1, 1].
MultiViewDataset<double> load_dataset(const DatasetManifest& manifest);

/// Writes views (features x samples) and labels next to a new manifest.
DatasetManifest write_dataset(const MultiViewDataset<double>& data, const std::string& name,
                              const std::filesystem::path& dir);

/// Planted partition: k balanced clusters, one orthogonal center per cluster
/// in every view, a random rotation per view, Gaussian noise of scale `noise`.
MultiViewDataset<double> generate_synthetic(long n, int t, int k, double noise,
                                            std::uint64_t seed);

} // namespace gfsc
