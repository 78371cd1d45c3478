#pragma once

// Grayscale image I/O, the contrast heuristic, noise injection and synthetic
// test scenes with exact ground truth.

#include <cstdint>
#include <span>
#include <vector>

#include "memant/grid.hpp"

namespace memant::imaging {

using Bytes = std::vector<std::uint8_t>;

/// 8-bit intensities; the element type enforces the [0, 255] range.
struct GrayImage : Grid<std::uint8_t> {
  using Grid::Grid;
};

/// Per-pixel contrast favorability in [0, 1].
struct HeuristicMap : Grid<double> {
  using Grid::Grid;
};

/// Binary edge flags (0 or 1).
struct EdgeMask : Grid<std::uint8_t> {
  using Grid::Grid;
  std::size_t count() const noexcept;
};

/// How out-of-range neighbors are resolved when computing contrast.
enum class BorderPolicy {
  clamp,   ///< a difference that needs a pixel outside the image is zero
  shrink,  ///< border pixels are skipped entirely (contrast 0)
};

// --- PGM ---------------------------------------------------------------

/// Decodes a P2 or P5 stream with maxval <= 255. Intensities are stored as
/// read (no rescaling to 255). Throws ParseError naming the bad field.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);

/// Binary P5, maxval 255.
Bytes save_pgm(const GrayImage& img);

/// Masks encode as {0, 255}.
Bytes save_pgm(const EdgeMask& mask);

/// Real-valued maps are min-max scaled to [0, 255] and rounded; a constant
/// map encodes as all zeros. Throws EncodeError on non-finite values.
Bytes save_pgm(const Grid<double>& map);

/// Min-max scaling used by the real-valued save_pgm overload.
GrayImage scale_to_gray(const Grid<double>& map);

// --- heuristics ---------------------------------------------------------

/// eta(i,j) = (|I(i,j-1) - I(i,j+1)| + |I(i-1,j) - I(i+1,j)|) / I_Max with I_Max
/// the largest bracketed sum over the image. A flat image gives all zeros.
HeuristicMap compute_heuristics(const GrayImage& img,
                                BorderPolicy border = BorderPolicy::clamp);

// --- noise ----------------------------------------------------------------

/// Adds an independent uniform draw from [-level*255, level*255] to every
/// pixel, rounds and clamps. Deterministic in seed.
GrayImage add_uniform_noise(const GrayImage& img, double level, std::uint64_t seed);

/// Replaces a fraction of pixels by 0 or 255 (salt and pepper).
GrayImage add_spike_noise(const GrayImage& img, double fraction, std::uint64_t seed);

// --- synthetic scenes -----------------------------------------------------

enum class ShapeKind { rectangle, triangle };

/// Axis-aligned shape. A triangle has its right angle at (row, col) and its
/// legs running down `height` rows and right `width` columns.
struct Shape {
  ShapeKind kind = ShapeKind::rectangle;
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
  std::uint8_t intensity = 255;
};

struct SceneSpec {
  std::uint8_t background = 0;
  std::vector<Shape> shapes;  ///< later shapes paint over earlier ones
};

struct Scene {
  GrayImage image;
  EdgeMask truth;
};

/// Renders the shapes and marks every pixel whose 4-neighborhood touches a
/// different region. Throws ArgumentError for shapes leaving the canvas.
Scene synth_shapes(int width, int height, const SceneSpec& spec);

/// Centered square covering half of each dimension: the two-region scene
/// used by the CLI defaults and the acceptance suite.
SceneSpec default_scene(int width, int height);

/// Outer square with an inner square of a third intensity.
SceneSpec nested_squares_scene(int width, int height);

// --- evaluation -----------------------------------------------------------

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

F1Score score_f1(const EdgeMask& predicted, const EdgeMask& truth);

/// Number of 8-connected components of set pixels.
int count_components(const EdgeMask& mask);

}  // namespace memant::imaging
