// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftkernel/detail/parallel.hpp"
#include "shiftkernel/detail/rng.hpp"
#include "shiftkernel/kernels.hpp"

namespace shiftkernel {

inline constexpr double kPi = 3.14159265358979323846;

/// Grayscale image, pixel values in [0,1].
struct GrayImage {
  Matrix pixels;

  Eigen::Index height() const { return pixels.rows(); }
  Eigen::Index width() const { return pixels.cols(); }

  GrayImage& clamp() {
    pixels = pixels.cwiseMax(0.0).cwiseMin(1.0);
    return *this;
  }
};

/// Stack of projections: data(i, a) is the line integral at detector offset i
/// and angle angles[a]; angles are uniform over [0, pi).
struct Sinogram {
  Matrix data;  // n_det x n_ang
  std::vector<double> angles;

  Eigen::Index n_det() const { return data.rows(); }
  Eigen::Index n_ang() const { return data.cols(); }
};

namespace detail {

// Bilinear sample with zero outside the pixel grid; x is the column
// coordinate, y the row coordinate.
inline double sample_zero(const Matrix& img, double x, double y) {
  const Eigen::Index h = img.rows();
  const Eigen::Index w = img.cols();
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const Eigen::Index x0 = static_cast<Eigen::Index>(fx);
  const Eigen::Index y0 = static_cast<Eigen::Index>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  double v = 0.0;
  auto at = [&](Eigen::Index r, Eigen::Index c) -> double {
    if (r < 0 || r >= h || c < 0 || c >= w) return 0.0;
    return img(r, c);
  };
  v += (1.0 - ax) * (1.0 - ay) * at(y0, x0);
  v += ax * (1.0 - ay) * at(y0, x0 + 1);
  v += (1.0 - ax) * ay * at(y0 + 1, x0);
  v += ax * ay * at(y0 + 1, x0 + 1);
  return v;
}

inline Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace detail

/// Discrete Radon transform: per angle, the image is sampled along rotated
/// rays (bilinear, zero outside) and integrated; the detector axis spans the
/// image diagonal resampled to n_det bins. Output is exactly n_det x n_ang.
inline Sinogram radon(const GrayImage& img, int n_ang, int n_det) {
  if (img.pixels.size() == 0) throw std::invalid_argument("radon: empty image");
  if (n_ang < 1 || n_det < 1)
    throw std::invalid_argument("radon: need n_ang >= 1 and n_det >= 1");
  const Eigen::Index h = img.height();
  const Eigen::Index w = img.width();
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const double diag = std::hypot(static_cast<double>(h), static_cast<double>(w));
  const double ds = diag / n_det;
  const int n_t = static_cast<int>(std::ceil(diag / 0.5));
  const double dt = diag / n_t;

  Sinogram sino;
  sino.data.resize(n_det, n_ang);
  sino.angles.resize(static_cast<std::size_t>(n_ang));
  for (int a = 0; a < n_ang; ++a)
    sino.angles[static_cast<std::size_t>(a)] = kPi * a / n_ang;

  detail::parallel_for(0, n_ang, [&](int a) {
    const double theta = sino.angles[static_cast<std::size_t>(a)];
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < n_det; ++i) {
      const double offset = -diag / 2.0 + (i + 0.5) * ds;
      double acc = 0.0;
      for (int j = 0; j < n_t; ++j) {
        const double t = -diag / 2.0 + (j + 0.5) * dt;
        acc += detail::sample_zero(img.pixels, cx + offset * c - t * s,
                                   cy + offset * s + t * c);
      }
      sino.data(i, a) = acc * dt;
    }
  });
  return sino;
}

namespace detail {

// Ramp-filter one projection: zero-pad to the next power of two >= 2*n_det,
// multiply the spectrum by |xi| (cycles per unit, detector spacing ds),
// transform back. Returns the first n_det samples.
inline Vector ramp_filter(const Eigen::Ref<const Vector>& proj, double ds) {
  const Eigen::Index n = proj.size();
  const Eigen::Index N = next_pow2(2 * n);
  std::vector<double> padded(static_cast<std::size_t>(N), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    padded[static_cast<std::size_t>(i)] = proj(i);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (Eigen::Index k = 0; k < N; ++k) {
    const double cycles =
        static_cast<double>(k <= N / 2 ? k : N - k) / (static_cast<double>(N) * ds);
    freq[static_cast<std::size_t>(k)] *= cycles;
  }
  std::vector<double> filtered;
  fft.inv(filtered, freq);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out(i) = filtered[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace detail

/// Filtered backprojection without the final [0,1] clamp.
inline Matrix iradon_raw(const Sinogram& sino, int out_h, int out_w) {
  if (sino.data.size() == 0)
    throw std::invalid_argument("iradon: empty sinogram");
  if (out_h < 1 || out_w < 1)
    throw std::invalid_argument("iradon: bad output size");
  if (static_cast<Eigen::Index>(sino.angles.size()) != sino.n_ang())
    throw std::invalid_argument("iradon: angle count mismatch");
  const Eigen::Index n_det = sino.n_det();
  const Eigen::Index n_ang = sino.n_ang();
  const double diag = std::hypot(static_cast<double>(out_h),
                                 static_cast<double>(out_w));
  const double ds = diag / static_cast<double>(n_det);
  const double cx = (static_cast<double>(out_w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(out_h) - 1.0) / 2.0;

  Matrix filtered(n_det, n_ang);
  detail::parallel_for(0, static_cast<int>(n_ang), [&](int a) {
    filtered.col(a) = detail::ramp_filter(sino.data.col(a), ds);
  });

  Matrix out = Matrix::Zero(out_h, out_w);
  detail::parallel_for(0, out_h, [&](int r) {
    for (int c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (Eigen::Index a = 0; a < n_ang; ++a) {
        const double theta = sino.angles[static_cast<std::size_t>(a)];
        const double s =
            (c - cx) * std::cos(theta) + (r - cy) * std::sin(theta);
        const double u = (s + diag / 2.0) / ds - 0.5;
        const double fu = std::floor(u);
        const Eigen::Index i0 = static_cast<Eigen::Index>(fu);
        const double w1 = u - fu;
        double v = 0.0;
        if (i0 >= 0 && i0 < n_det) v += (1.0 - w1) * filtered(i0, a);
        if (i0 + 1 >= 0 && i0 + 1 < n_det) v += w1 * filtered(i0 + 1, a);
        acc += v;
      }
      out(r, c) = acc * kPi / static_cast<double>(n_ang);
    }
  });
  return out;
}

/// Inverse Radon transform via filtered backprojection, clamped to [0,1].
inline GrayImage iradon(const Sinogram& sino, int out_h, int out_w) {
  GrayImage img{iradon_raw(sino, out_h, out_w)};
  return img.clamp();
}

/// 9x9 out-of-focus blur: normalized Gaussian with sigma = 2.
inline Matrix gaussian_blur_kernel() {
  Matrix k(9, 9);
  double sum = 0.0;
  for (int u = -4; u <= 4; ++u)
    for (int v = -4; v <= 4; ++v) {
      const double g = std::exp(-(u * u + v * v) / 8.0);
      k(u + 4, v + 4) = g;
      sum += g;
    }
  k /= sum;
  return k;
}

/// 9x9 horizontal motion blur: central row 1/9, zero elsewhere.
inline Matrix motion_blur_kernel() {
  Matrix k = Matrix::Zero(9, 9);
  k.row(4).setConstant(1.0 / 9.0);
  return k;
}

/// 2-D convolution with zero padding, output the size of the input, kernel
/// anchored at its center cell.
inline Matrix convolve2d(const Eigen::Ref<const Matrix>& img,
                         const Eigen::Ref<const Matrix>& kernel) {
  if (kernel.size() == 0) throw std::invalid_argument("convolve2d: empty kernel");
  const Eigen::Index h = img.rows();
  const Eigen::Index w = img.cols();
  const Eigen::Index p = kernel.rows();
  const Eigen::Index q = kernel.cols();
  if (p > h || q > w)
    throw std::invalid_argument("convolve2d: kernel larger than image");
  const Eigen::Index pc = p / 2;
  const Eigen::Index qc = q / 2;
  Matrix out(h, w);
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j) {
      double acc = 0.0;
      for (Eigen::Index u = 0; u < p; ++u) {
        const Eigen::Index r = i - (u - pc);
        if (r < 0 || r >= h) continue;
        for (Eigen::Index v = 0; v < q; ++v) {
          const Eigen::Index c = j - (v - qc);
          if (c < 0 || c >= w) continue;
          acc += img(r, c) * kernel(u, v);
        }
      }
      out(i, j) = acc;
    }
  return out;
}

// ---------------------------------------------------------------------------
// PGM input/output (P2 ASCII and P5 binary, maxval up to 65535).

namespace detail {

struct PgmReader {
  std::string bytes;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("PGM parse error at byte " + std::to_string(pos) +
                             ": " + what);
  }

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      const char ch = bytes[pos];
      if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int() {
    skip_space_and_comments();
    if (pos >= bytes.size()) fail("unexpected end of header");
    if (!std::isdigit(static_cast<unsigned char>(bytes[pos])))
      fail(std::string("expected digit, got '") + bytes[pos] + "'");
    long v = 0;
    while (pos < bytes.size() &&
           std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000L) fail("integer overflow in header");
      ++pos;
    }
    return v;
  }
};

}  // namespace detail

/// Read a P2/P5 PGM file; pixel values scaled to [0,1] by maxval.
inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  detail::PgmReader r;
  r.bytes.assign(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());

  if (r.bytes.size() < 2) r.fail("file too short for magic");
  const bool binary = r.bytes[1] == '5';
  if (r.bytes[0] != 'P' || (r.bytes[1] != '2' && r.bytes[1] != '5'))
    r.fail("not a P2/P5 PGM file");
  r.pos = 2;

  const long w = r.read_int();
  const long h = r.read_int();
  const long maxval = r.read_int();
  if (w < 1 || h < 1) r.fail("non-positive image dimensions");
  if (maxval < 1 || maxval > 65535) r.fail("maxval out of range [1, 65535]");

  GrayImage img;
  img.pixels.resize(h, w);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (binary) {
    if (r.pos >= r.bytes.size()) r.fail("missing whitespace after maxval");
    if (!std::isspace(static_cast<unsigned char>(r.bytes[r.pos])))
      r.fail("expected single whitespace after maxval");
    ++r.pos;
    const int bytes_per = maxval > 255 ? 2 : 1;
    const std::size_t need =
        static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
        static_cast<std::size_t>(bytes_per);
    if (r.bytes.size() - r.pos < need) {
      r.pos = r.bytes.size();
      r.fail("truncated payload, need " + std::to_string(need) + " bytes");
    }
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < w; ++j) {
        unsigned long v = static_cast<unsigned char>(r.bytes[r.pos++]);
        if (bytes_per == 2)
          v = (v << 8) | static_cast<unsigned char>(r.bytes[r.pos++]);
        img.pixels(i, j) = static_cast<double>(v) * scale;
      }
  } else {
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < w; ++j) {
        const long v = r.read_int();
        if (v > maxval) r.fail("sample exceeds maxval");
        img.pixels(i, j) = static_cast<double>(v) * scale;
      }
  }
  return img.clamp();
}

/// Write binary P5, maxval 255, round-half-up quantization.
inline void write_pgm(const GrayImage& img, const std::string& path) {
  if (img.pixels.size() == 0)
    throw std::invalid_argument("write_pgm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  for (Eigen::Index i = 0; i < img.height(); ++i)
    for (Eigen::Index j = 0; j < img.width(); ++j) {
      const double v = std::min(1.0, std::max(0.0, img.pixels(i, j)));
      const auto q = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
      out.put(static_cast<char>(q));
    }
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

/// Bilinear resize with edge clamping.
inline GrayImage resize(const GrayImage& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize: bad size");
  const Eigen::Index h = img.height();
  const Eigen::Index w = img.width();
  GrayImage out;
  out.pixels.resize(out_h, out_w);
  for (int r = 0; r < out_h; ++r)
    for (int c = 0; c < out_w; ++c) {
      double y = (r + 0.5) * static_cast<double>(h) / out_h - 0.5;
      double x = (c + 0.5) * static_cast<double>(w) / out_w - 0.5;
      y = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
      x = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
      const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
      const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index y1 = std::min(y0 + 1, h - 1);
      const Eigen::Index x1 = std::min(x0 + 1, w - 1);
      const double ay = y - static_cast<double>(y0);
      const double ax = x - static_cast<double>(x0);
      out.pixels(r, c) = (1 - ay) * ((1 - ax) * img.pixels(y0, x0) +
                                     ax * img.pixels(y0, x1)) +
                         ay * ((1 - ax) * img.pixels(y1, x0) +
                               ax * img.pixels(y1, x1));
    }
  return out;
}

/// Centered disk of the given value, edge antialiased by 4x4 supersampling.
inline GrayImage disk_phantom(int size, double radius_frac = 0.375,
                              double value = 1.0) {
  if (size < 1) throw std::invalid_argument("disk_phantom: bad size");
  GrayImage img;
  img.pixels = Matrix::Zero(size, size);
  const double cx = (size - 1) / 2.0;
  const double r = radius_frac * size;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      int hits = 0;
      for (int si = 0; si < 4; ++si)
        for (int sj = 0; sj < 4; ++sj) {
          const double y = i - cx + (si + 0.5) / 4.0 - 0.5;
          const double x = j - cx + (sj + 0.5) / 4.0 - 0.5;
          if (x * x + y * y <= r * r) ++hits;
        }
      img.pixels(i, j) = value * hits / 16.0;
    }
  return img;
}

/// Random filled ellipses and rectangles on a dark background.
inline GrayImage random_shapes_image(int h, int w, std::uint64_t seed) {
  if (h < 1 || w < 1)
    throw std::invalid_argument("random_shapes_image: bad size");
  detail::Splitmix64 rng(detail::mix_seed(seed, 0xC0FFEE));
  const int n_shapes = 3 + static_cast<int>(rng.next_below(4));
  struct Shape {
    bool ellipse;
    double cx, cy, rx, ry, value;
  };
  std::vector<Shape> shapes;
  shapes.reserve(static_cast<std::size_t>(n_shapes));
  for (int k = 0; k < n_shapes; ++k) {
    Shape s;
    s.ellipse = rng.next_double() < 0.6;
    s.cx = (0.15 + 0.7 * rng.next_double()) * w;
    s.cy = (0.15 + 0.7 * rng.next_double()) * h;
    s.rx = (0.06 + 0.20 * rng.next_double()) * w;
    s.ry = (0.06 + 0.20 * rng.next_double()) * h;
    s.value = 0.35 + 0.65 * rng.next_double();
    shapes.push_back(s);
  }
  GrayImage img;
  img.pixels = Matrix::Zero(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      double v = 0.05;
      for (const auto& s : shapes) {
        // 2x2 supersampling softens the edges a little.
        double cover = 0.0;
        for (int si = 0; si < 2; ++si)
          for (int sj = 0; sj < 2; ++sj) {
            const double y = i + (si + 0.5) / 2.0 - 0.5 - s.cy;
            const double x = j + (sj + 0.5) / 2.0 - 0.5 - s.cx;
            const bool inside =
                s.ellipse
                    ? (x * x / (s.rx * s.rx) + y * y / (s.ry * s.ry) <= 1.0)
                    : (std::abs(x) <= s.rx && std::abs(y) <= s.ry);
            if (inside) cover += 0.25;
          }
        v = std::max(v, s.value * cover);
      }
      img.pixels(i, j) = v;
    }
  return img.clamp();
}

/// Shape corpus for pipeline runs without a photographic PGM set. Images are
/// normalized mixtures of a small fixed dictionary of shape images, so the
/// corpus has low-rank structure comparable to an aligned photo collection;
/// n_atoms = 0 makes every image an independent random_shapes_image instead.
inline std::vector<GrayImage> shape_mixture_corpus(int count, int size,
                                                   std::uint64_t seed,
                                                   int n_atoms = 24,
                                                   int n_active = 3) {
  if (count < 1 || size < 8)
    throw std::invalid_argument("shape_mixture_corpus: bad count or size");
  if (n_atoms < 0 || (n_atoms > 0 && (n_active < 1 || n_active > n_atoms)))
    throw std::invalid_argument("shape_mixture_corpus: bad dictionary shape");
  std::vector<GrayImage> corpus;
  corpus.reserve(static_cast<std::size_t>(count));
  if (n_atoms == 0) {
    for (int i = 0; i < count; ++i)
      corpus.push_back(random_shapes_image(
          size, size, seed + static_cast<std::uint64_t>(i)));
    return corpus;
  }
  std::vector<Matrix> atoms;
  atoms.reserve(static_cast<std::size_t>(n_atoms));
  for (int k = 0; k < n_atoms; ++k)
    atoms.push_back(random_shapes_image(
                        size, size,
                        detail::mix_seed(seed, 0xA70A + static_cast<std::uint64_t>(k)))
                        .pixels);
  for (int i = 0; i < count; ++i) {
    auto rng = detail::stream_rng(seed, 0xC0A9u + static_cast<std::uint64_t>(i));
    Matrix mix = Matrix::Zero(size, size);
    double total = 0.0;
    for (int a = 0; a < n_active; ++a) {
      const int k = static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(n_atoms)));
      const double w = 0.3 + 0.7 * rng.next_double();
      mix += w * atoms[static_cast<std::size_t>(k)];
      total += w;
    }
    GrayImage img{mix / total};
    corpus.push_back(img.clamp());
  }
  return corpus;
}

}  // namespace shiftkernel
