#pragma once

#include "antix/autodiff/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

namespace antix::testing {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, Scalar scale = 1) {
  Matrix m(rows, cols);
  fill_uniform(m, scale, rng);
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("antix_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data(), [](double x, double y) {
           return std::memcmp(&x, &y, sizeof(double)) == 0;
         });
}

}  // namespace antix::testing
