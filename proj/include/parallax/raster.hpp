#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <span>
#include <vector>

namespace parallax {

struct Rgba8 {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  friend bool operator==(const Rgba8&, const Rgba8&) = default;
};

/// Row-major 2D buffer, row 0 at the top of the image.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {}

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  [[nodiscard]] std::span<T> pixels() noexcept { return data_; }
  [[nodiscard]] std::span<const T> pixels() const noexcept { return data_; }
  [[nodiscard]] const std::vector<T>& storage() const noexcept { return data_; }

  /// Same size and samples; NaN (invalid depth) equals NaN so that equality
  /// stays reflexive.
  friend bool operator==(const Raster& a, const Raster& b) {
    if (a.width_ != b.width_ || a.height_ != b.height_) return false;
    if constexpr (std::is_floating_point_v<T>) {
      return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end(),
                        [](T x, T y) { return x == y || (std::isnan(x) && std::isnan(y)); });
    } else {
      return a.data_ == b.data_;
    }
  }

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Image = Raster<Rgba8>;
using DepthMap = Raster<float>;
using Bitmap = Raster<std::uint8_t>;

}  // namespace parallax
