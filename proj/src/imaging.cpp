#include "memant/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

namespace memant::imaging {

std::size_t EdgeMask::count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values().begin(), values().end(), [](std::uint8_t v) { return v != 0; }));
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Header integers may be separated by whitespace and '#' comments.
  int header_int(const char* field) {
    skip_space_and_comments();
    return parse_int(field);
  }

  int payload_int(const char* field) {
    skip_space();
    return parse_int(field);
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void advance(std::size_t n) { pos_ += n; }
  bool at_space() const {
    return pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]));
  }

 private:
  void skip_space() {
    while (at_space()) ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      skip_space();
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }

  int parse_int(const char* field) {
    if (pos_ >= bytes_.size()) {
      throw ParseError(std::string("pgm: truncated stream while reading ") + field);
    }
    const auto* first = reinterpret_cast<const char*>(bytes_.data()) + pos_;
    const auto* last = reinterpret_cast<const char*>(bytes_.data()) + bytes_.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) {
      throw ParseError(std::string("pgm: malformed ") + field);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t clamp_byte(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("pgm: bad magic number (expected P2 or P5)");
  }
  const bool binary = bytes[1] == '5';
  PgmReader in(bytes);
  in.advance(2);
  if (!in.at_space()) throw ParseError("pgm: bad magic number (expected P2 or P5)");

  const int width = in.header_int("width");
  const int height = in.header_int("height");
  const int maxval = in.header_int("maxval");
  if (width <= 0) throw ParseError("pgm: width must be positive");
  if (height <= 0) throw ParseError("pgm: height must be positive");
  if (maxval <= 0 || maxval > 255) {
    throw ParseError("pgm: maxval " + std::to_string(maxval) + " outside 1..255");
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels(count);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (!in.at_space()) throw ParseError("pgm: missing separator before payload");
    in.advance(1);
    if (in.remaining() < count) {
      throw ParseError("pgm: truncated payload (" + std::to_string(in.remaining()) + " of " +
                       std::to_string(count) + " bytes)");
    }
    const std::size_t start = in.pos();
    for (std::size_t k = 0; k < count; ++k) {
      const auto v = bytes[start + k];
      if (v > maxval) throw ParseError("pgm: pixel value exceeds maxval");
      pixels[k] = v;
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const int v = in.payload_int("payload");
      if (v < 0 || v > maxval) throw ParseError("pgm: pixel value outside 0..maxval");
      pixels[k] = static_cast<std::uint8_t>(v);
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

namespace {

Bytes encode_p5(int width, int height, std::span<const std::uint8_t> raster) {
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

Bytes save_pgm(const GrayImage& img) { return encode_p5(img.width(), img.height(), img.values()); }

Bytes save_pgm(const EdgeMask& mask) {
  std::vector<std::uint8_t> raster(mask.size());
  std::transform(mask.values().begin(), mask.values().end(), raster.begin(),
                 [](std::uint8_t v) { return v ? std::uint8_t{255} : std::uint8_t{0}; });
  return encode_p5(mask.width(), mask.height(), raster);
}

GrayImage scale_to_gray(const Grid<double>& map) {
  const auto vals = map.values();
  for (double v : vals) {
    if (!std::isfinite(v)) throw EncodeError("pgm: cannot encode non-finite map value");
  }
  const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  GrayImage out(map.width(), map.height());
  if (range <= 0.0) return out;
  auto dst = out.values();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    dst[k] = clamp_byte(std::lround((vals[k] - lo) / range * 255.0));
  }
  return out;
}

Bytes save_pgm(const Grid<double>& map) { return save_pgm(scale_to_gray(map)); }

HeuristicMap compute_heuristics(const GrayImage& img, BorderPolicy border) {
  const int w = img.width();
  const int h = img.height();
  Grid<double> sums(w, h, 0.0);
  // A difference whose partner pixel lies outside the image contributes 0.
  auto diff = [&](int r0, int c0, int r1, int c1) {
    if (r0 < 0 || c0 < 0 || r1 >= h || c1 >= w) return 0;
    return std::abs(static_cast<int>(img(r0, c0)) - static_cast<int>(img(r1, c1)));
  };
  double i_max = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (border == BorderPolicy::shrink && (r == 0 || c == 0 || r == h - 1 || c == w - 1)) {
        continue;
      }
      const double s = diff(r, c - 1, r, c + 1) + diff(r - 1, c, r + 1, c);
      sums(r, c) = s;
      i_max = std::max(i_max, s);
    }
  }
  HeuristicMap eta(w, h, 0.0);
  if (i_max == 0.0) return eta;
  auto src = sums.values();
  auto dst = eta.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] / i_max;
  return eta;
}

GrayImage add_uniform_noise(const GrayImage& img, double level, std::uint64_t seed) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw ArgumentError("noise level must lie in [0, 1], got " + std::to_string(level));
  }
  GrayImage out = img;
  if (level == 0.0) return out;
  std::mt19937_64 rng(seed);
  const double amp = level * 255.0;
  std::uniform_real_distribution<double> dist(-amp, amp);
  for (auto& px : out.values()) {
    px = clamp_byte(std::lround(static_cast<double>(px) + dist(rng)));
  }
  return out;
}

GrayImage add_spike_noise(const GrayImage& img, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ArgumentError("spike fraction must lie in [0, 1]");
  }
  GrayImage out = img;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution hit(fraction);
  std::bernoulli_distribution salt(0.5);
  for (auto& px : out.values()) {
    if (hit(rng)) px = salt(rng) ? 255 : 0;
  }
  return out;
}

namespace {

bool shape_covers(const Shape& s, int r, int c) {
  const int dr = r - s.row;
  const int dc = c - s.col;
  if (dr < 0 || dc < 0 || dr >= s.height || dc >= s.width) return false;
  if (s.kind == ShapeKind::rectangle) return true;
  // Right triangle: dr/height + dc/width < 1 in integer form.
  return static_cast<long>(dr) * s.width + static_cast<long>(dc) * s.height <
         static_cast<long>(s.width) * s.height;
}

}  // namespace

Scene synth_shapes(int width, int height, const SceneSpec& spec) {
  Grid<int> label(width, height, 0);
  GrayImage image(width, height, spec.background);
  for (std::size_t k = 0; k < spec.shapes.size(); ++k) {
    const Shape& s = spec.shapes[k];
    if (s.width <= 0 || s.height <= 0 || s.row < 0 || s.col < 0 || s.row + s.height > height ||
        s.col + s.width > width) {
      throw ArgumentError("synth_shapes: shape " + std::to_string(k) + " leaves the canvas");
    }
    for (int r = s.row; r < s.row + s.height; ++r) {
      for (int c = s.col; c < s.col + s.width; ++c) {
        if (shape_covers(s, r, c)) {
          label(r, c) = static_cast<int>(k) + 1;
          image(r, c) = s.intensity;
        }
      }
    }
  }
  EdgeMask truth(width, height, 0);
  constexpr int dr[] = {0, 0, 1, -1};
  constexpr int dc[] = {1, -1, 0, 0};
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      for (int d = 0; d < 4; ++d) {
        const int nr = r + dr[d];
        const int nc = c + dc[d];
        if (label.contains(nr, nc) && label(nr, nc) != label(r, c)) {
          truth(r, c) = 1;
          break;
        }
      }
    }
  }
  return {std::move(image), std::move(truth)};
}

SceneSpec default_scene(int width, int height) {
  SceneSpec spec;
  spec.background = 0;
  spec.shapes.push_back({ShapeKind::rectangle, height / 4, width / 4, height / 2, width / 2, 255});
  return spec;
}

SceneSpec nested_squares_scene(int width, int height) {
  SceneSpec spec;
  spec.background = 0;
  spec.shapes.push_back({ShapeKind::rectangle, height / 8, width / 8, height - 2 * (height / 8),
                         width - 2 * (width / 8), 128});
  spec.shapes.push_back(
      {ShapeKind::rectangle, height * 3 / 8, width * 3 / 8, height / 4, width / 4, 255});
  return spec;
}

F1Score score_f1(const EdgeMask& predicted, const EdgeMask& truth) {
  if (!predicted.same_shape(truth)) throw ArgumentError("score_f1: mask dimensions differ");
  std::size_t tp = 0, fp = 0, fn = 0;
  const auto p = predicted.values();
  const auto t = truth.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] && t[k]) ++tp;
    else if (p[k]) ++fp;
    else if (t[k]) ++fn;
  }
  F1Score s;
  if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

int count_components(const EdgeMask& mask) {
  Grid<std::uint8_t> seen(mask.width(), mask.height(), 0);
  std::vector<Node> stack;
  int components = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask(r, c) || seen(r, c)) continue;
      ++components;
      stack.push_back({r, c});
      seen(r, c) = 1;
      while (!stack.empty()) {
        const Node n = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = n.row + dr;
            const int nc = n.col + dc;
            if (mask.contains(nr, nc) && mask(nr, nc) && !seen(nr, nc)) {
              seen(nr, nc) = 1;
              stack.push_back({nr, nc});
            }
          }
        }
      }
    }
  }
  return components;
}

}  // namespace memant::imaging
