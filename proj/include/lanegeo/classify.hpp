#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lanegeo/geo.hpp"
#include "lanegeo/geometry.hpp"
#include "lanegeo/raster.hpp"

namespace lanegeo::classify {

enum class FeatureKind { pixel, hog, lbp };

std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct PatchSample {
  int size = 0;
  std::vector<std::uint8_t> pixels;  // size * size grayscale
  geo::TilePixel center;             // global pixel position of patch center
  bool positive = false;
};

using FeatureVector = std::vector<float>;

int feature_length(FeatureKind kind, int patch_size);

/// Sliding-window patches over a grid of top-left positions stepping by
/// stride. A patch is kept when it fits inside the tile and its center pixel
/// lies in the surface mask; it is labeled positive when any marking-mask
/// pixel falls inside its footprint.
std::vector<PatchSample> extract_patches(const Raster& tile,
                                         const Raster& surface_mask,
                                         const Raster& marking_mask, int size,
                                         int stride);

FeatureVector compute_features(const PatchSample& p, FeatureKind kind);

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  std::uint64_t seed = 1;
  int jobs = 1;  // parallel tree building; output independent of jobs
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  float threshold = 0.0f;
  int left = -1;
  int right = -1;
  float p_positive = 0.0f;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double predict(const FeatureVector& f) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  FeatureKind feature_kind = FeatureKind::pixel;
  int patch_size = 12;
  int n_features = 0;
};

struct LabeledSample {
  FeatureVector features;
  bool positive = false;
};

/// Bootstrap-sampled trees split by Gini impurity over sqrt(d)-sized random
/// feature subsets. Deterministic for a fixed seed. Throws when samples are
/// empty or single-class.
ForestModel train_forest(const std::vector<LabeledSample>& samples,
                         const ForestConfig& cfg, FeatureKind kind,
                         int patch_size);

/// Mean of per-tree leaf probabilities.
double predict_proba(const ForestModel& m, const FeatureVector& f);

/// Stratified fold index per sample; fold sizes differ by at most one within
/// each class.
std::vector<int> stratified_folds(const std::vector<char>& labels, int k,
                                  std::uint64_t seed);

struct CvScores {
  double precision = 0.0;
  double recall = 0.0;
  int folds = 0;
};

CvScores cross_validate(const std::vector<LabeledSample>& samples,
                        const ForestConfig& cfg, FeatureKind kind,
                        int patch_size, int k);

/// Patch-classifier output over one tile's sliding-window grid.
struct ProbabilityMap {
  geo::TileIndex georef;
  int stride = 4;
  int patch_size = 12;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<float> values;  // row-major, 0 outside the surface

  float at(int gx, int gy) const {
    return values[static_cast<std::size_t>(gy) * grid_w + gx];
  }
  /// Global pixel position of a grid cell's patch center.
  Vec2 center_px(int gx, int gy) const {
    return {georef.tx * 256.0 + gx * static_cast<double>(stride) +
                patch_size / 2.0,
            georef.ty * 256.0 + gy * static_cast<double>(stride) +
                patch_size / 2.0};
  }
};

ProbabilityMap predict_map(const Raster& gray_tile, const Raster& surface_mask,
                           const ForestModel& m, int stride);

void save_forest(const std::filesystem::path& path, const ForestModel& m);
ForestModel load_forest(const std::filesystem::path& path);

}  // namespace lanegeo::classify
