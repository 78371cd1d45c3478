#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memant/errors.hpp"

namespace memant {

/// Pixel coordinate. Row-major, top-left origin.
struct Node {
  int row = 0;
  int col = 0;

  friend bool operator==(const Node&, const Node&) = default;
  friend auto operator<=>(const Node&, const Node&) = default;
};

/// Dense row-major 2-D array. Base for every per-pixel map in the library.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), data_(std::move(values)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ArgumentError("grid: value count " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  bool contains(Node n) const noexcept { return contains(n.row, n.col); }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](Node n) noexcept { return data_[index(n.row, n.col)]; }
  const T& operator[](Node n) const noexcept { return data_[index(n.row, n.col)]; }

  std::span<T> values() & noexcept { return data_; }
  std::span<const T> values() const& noexcept { return data_; }
  std::span<const T> values() && = delete;

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw ArgumentError("grid: dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace memant
