#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "hope/common.hpp"

namespace hope {

/// N points in R^n stored point-major. The first three channels are metric
/// xyz when the cloud comes from a LiDAR frame; the rest are feature channels.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws if `values.size()` is not a multiple of `ambient_dim` or any
  /// coordinate is non-finite.
  PointCloud(std::size_t ambient_dim, std::vector<double> values);

  std::size_t ambient_dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> point(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  const std::vector<double>& values() const { return values_; }

  void push_back(std::span<const double> p);

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// HPC1: "HPC1" | u32 N | u32 n | N*n float32, all little-endian, point-major.
void write_hpc(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_hpc(const std::filesystem::path& path);

// CSV with a `c0,c1,...` header row.
void write_csv(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_csv(const std::filesystem::path& path);

/// Dispatches on extension: `.csv` is CSV, everything else HPC1.
PointCloud read_point_cloud(const std::filesystem::path& path);

}  // namespace hope
