#include "hope/point_cloud.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace hope {

PointCloud::PointCloud(std::size_t ambient_dim, std::vector<double> values)
    : dim_(ambient_dim), values_(std::move(values)) {
  if (dim_ == 0) {
    throw Error("point cloud ambient dimension must be positive");
  }
  if (values_.size() % dim_ != 0) {
    throw Error("point cloud values are not a whole number of points");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error("point cloud contains a non-finite coordinate");
    }
  }
}

void PointCloud::push_back(std::span<const double> p) {
  if (dim_ == 0) {
    if (p.empty()) {
      throw Error("point cloud ambient dimension must be positive");
    }
    dim_ = p.size();
  }
  if (p.size() != dim_) {
    throw Error("point has wrong number of coordinates");
  }
  for (double v : p) {
    if (!std::isfinite(v)) {
      throw Error("point cloud contains a non-finite coordinate");
    }
  }
  values_.insert(values_.end(), p.begin(), p.end());
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "HPC1 I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'H', 'P', 'C', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_hpc(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(cloud.size()));
  put_u32(out, static_cast<std::uint32_t>(cloud.ambient_dim()));
  std::vector<float> buf(cloud.values().begin(), cloud.values().end());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

PointCloud read_hpc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw IoError(path.string() + ": bad HPC1 magic");
  }
  const std::uint32_t count = get_u32(in);
  const std::uint32_t dim = get_u32(in);
  if (!in || dim == 0) {
    throw IoError(path.string() + ": truncated HPC1 header");
  }
  std::vector<float> buf(static_cast<std::size_t>(count) * dim);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) {
    throw IoError(path.string() + ": truncated HPC1 payload");
  }
  return PointCloud(dim, std::vector<double>(buf.begin(), buf.end()));
}

void write_csv(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  for (std::size_t c = 0; c < cloud.ambient_dim(); ++c) {
    out << (c ? "," : "") << 'c' << c;
  }
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t c = 0; c < p.size(); ++c) {
      out << (c ? "," : "") << p[c];
    }
    out << '\n';
  }
}

PointCloud read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path.string() + ": missing CSV header");
  }
  std::size_t dim = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (cell.empty() || cell.front() != 'c') {
        throw IoError(path.string() + ": header must be c0,c1,...");
      }
      ++dim;
    }
  }
  if (dim == 0) {
    throw IoError(path.string() + ": empty CSV header");
  }
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number on row " +
                      std::to_string(row));
      }
      ++cols;
    }
    if (cols != dim) {
      throw IoError(path.string() + ": wrong column count on row " +
                    std::to_string(row));
    }
  }
  return PointCloud(dim, std::move(values));
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    return read_csv(path);
  }
  return read_hpc(path);
}

}  // namespace hope
