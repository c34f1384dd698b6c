// Copyright 2026 The AttnBM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnbm/data.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "attnbm/errors.hpp"

namespace attnbm {

namespace {

constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::uint32_t kIdxImageMagic = 0x00000803;

std::uint32_t read_be_u32(const std::vector<char>& buf, std::size_t offset) {
  if (offset + 4 > buf.size()) {
    throw FormatError("idx: truncated header", offset);
  }
  const auto* b = reinterpret_cast<const unsigned char*>(buf.data() + offset);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void append_be_u32(std::vector<char>& buf, std::uint32_t value) {
  buf.push_back(static_cast<char>((value >> 24) & 0xff));
  buf.push_back(static_cast<char>((value >> 16) & 0xff));
  buf.push_back(static_cast<char>((value >> 8) & 0xff));
  buf.push_back(static_cast<char>(value & 0xff));
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path, 0);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return buf;
}

}  // namespace

std::int64_t IdxTensor::element_count() const {
  std::int64_t n = 1;
  for (int d : dims) n *= d;
  return n;
}

IdxTensor load_idx(const std::string& path) {
  const std::vector<char> buf = slurp(path);
  const std::uint32_t magic = read_be_u32(buf, 0);
  int rank;
  if (magic == kIdxLabelMagic) {
    rank = 1;
  } else if (magic == kIdxImageMagic) {
    rank = 3;
  } else {
    throw FormatError("idx: unrecognized magic", 0);
  }
  IdxTensor tensor;
  std::size_t offset = 4;
  for (int d = 0; d < rank; ++d, offset += 4) {
    const std::uint32_t size = read_be_u32(buf, offset);
    tensor.dims.push_back(static_cast<int>(size));
  }
  const std::int64_t payload = tensor.element_count();
  if (buf.size() < offset + static_cast<std::size_t>(payload)) {
    throw FormatError("idx: truncated payload", offset);
  }
  tensor.bytes.assign(
      reinterpret_cast<const std::uint8_t*>(buf.data() + offset),
      reinterpret_cast<const std::uint8_t*>(buf.data() + offset + payload));
  return tensor;
}

void write_idx(const IdxTensor& tensor, const std::string& path) {
  const int rank = static_cast<int>(tensor.dims.size());
  std::uint32_t magic;
  if (rank == 1) {
    magic = kIdxLabelMagic;
  } else if (rank == 3) {
    magic = kIdxImageMagic;
  } else {
    throw std::invalid_argument("write_idx: rank must be 1 or 3");
  }
  if (tensor.element_count() != static_cast<std::int64_t>(tensor.bytes.size())) {
    throw std::invalid_argument("write_idx: dims do not match payload size");
  }
  std::vector<char> buf;
  append_be_u32(buf, magic);
  for (int d : tensor.dims) append_be_u32(buf, static_cast<std::uint32_t>(d));
  buf.insert(buf.end(), tensor.bytes.begin(), tensor.bytes.end());
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) {
    throw std::runtime_error("write_idx: cannot write " + path);
  }
}

Matrix idx_images_to_matrix(const IdxTensor& tensor) {
  if (tensor.dims.size() != 3) {
    throw std::invalid_argument("idx_images_to_matrix: need an image stack");
  }
  const int count = tensor.dims[0];
  const int pixels = tensor.dims[1] * tensor.dims[2];
  Matrix out(count, pixels);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < pixels; ++j) {
      out(i, j) =
          tensor.bytes[static_cast<std::size_t>(i) * pixels + j] / 255.0;
    }
  }
  return out;
}

double GrayImage::at(int r, int c) const {
  return pixels[static_cast<std::size_t>(r) * width + c];
}

GrayImage load_pgm(const std::string& path) {
  const std::vector<char> buf = slurp(path);
  // Header: "P5" <ws> width <ws> height <ws> maxval, one whitespace byte,
  // then the raster.
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < buf.size()) {
      if (buf[pos] == '#') {  // comment to end of line
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> int {
    skip_space();
    const std::size_t start = pos;
    long value = 0;
    while (pos < buf.size() &&
           std::isdigit(static_cast<unsigned char>(buf[pos]))) {
      value = value * 10 + (buf[pos] - '0');
      ++pos;
    }
    if (pos == start) throw FormatError("pgm: expected integer", start);
    return static_cast<int>(value);
  };
  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') {
    throw FormatError("pgm: not a P5 file", 0);
  }
  pos = 2;
  const int width = read_int();
  const int height = read_int();
  const int maxval = read_int();
  if (width < 1 || height < 1 || maxval != 255) {
    throw FormatError("pgm: unsupported geometry or depth", pos);
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t need = static_cast<std::size_t>(width) * height;
  if (buf.size() < pos + need) throw FormatError("pgm: truncated raster", pos);
  GrayImage image;
  image.height = height;
  image.width = width;
  image.pixels.resize(need);
  for (std::size_t i = 0; i < need; ++i) {
    image.pixels[i] =
        static_cast<unsigned char>(buf[pos + i]) / 255.0;
  }
  return image;
}

void save_pgm(const GrayImage& image, const std::string& path) {
  if (image.height < 1 || image.width < 1 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.height) * image.width) {
    throw std::invalid_argument("save_pgm: inconsistent image");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  std::vector<char> raster(image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const double clamped = std::clamp(image.pixels[i], 0.0, 1.0);
    raster[i] = static_cast<char>(
        static_cast<unsigned char>(std::lround(clamped * 255.0)));
  }
  if (!out.write(raster.data(), static_cast<std::streamsize>(raster.size()))) {
    throw std::runtime_error("save_pgm: write failed");
  }
}

ZcaTransform fit_zca(const Matrix& samples, double epsilon) {
  if (samples.rows() < 2) throw std::invalid_argument("fit_zca: need P >= 2");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("fit_zca: epsilon must be positive");
  }
  ZcaTransform t;
  t.epsilon = epsilon;
  t.mean = samples.colwise().mean().transpose();
  Matrix centered = samples.rowwise() - t.mean.transpose();
  Matrix cov =
      centered.transpose() * centered / static_cast<double>(samples.rows());
  if (!cov.allFinite()) {
    throw std::invalid_argument("fit_zca: non-finite covariance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector scale =
      (eig.eigenvalues().array() + epsilon).rsqrt().matrix();
  t.matrix = eig.eigenvectors() * scale.asDiagonal() *
             eig.eigenvectors().transpose();
  return t;
}

Matrix apply_zca(const ZcaTransform& transform, const Matrix& samples) {
  if (samples.cols() != transform.mean.size()) {
    throw std::invalid_argument("apply_zca: dimension mismatch");
  }
  return (samples.rowwise() - transform.mean.transpose()) * transform.matrix;
}

Dataset extract_patches(const std::vector<GrayImage>& corpus, int patch_size,
                        int stride, int count, Rng& rng) {
  if (patch_size < 1 || stride < 1) {
    throw std::invalid_argument("extract_patches: bad patch size or stride");
  }
  if (count < 0) throw std::invalid_argument("extract_patches: bad count");
  if (corpus.empty() && count > 0) {
    throw std::invalid_argument("extract_patches: empty corpus");
  }
  Dataset out;
  out.image_height = patch_size;
  out.image_width = patch_size;
  out.samples.resize(count, patch_size * patch_size);
  if (count == 0) return out;
  std::uniform_int_distribution<std::size_t> pick_image(0, corpus.size() - 1);
  for (int k = 0; k < count; ++k) {
    const GrayImage& img = corpus[pick_image(rng)];
    if (img.height < patch_size || img.width < patch_size) {
      throw std::invalid_argument("extract_patches: image smaller than patch");
    }
    const int rows = (img.height - patch_size) / stride + 1;
    const int cols = (img.width - patch_size) / stride + 1;
    std::uniform_int_distribution<int> pick_row(0, rows - 1);
    std::uniform_int_distribution<int> pick_col(0, cols - 1);
    const int r0 = pick_row(rng) * stride;
    const int c0 = pick_col(rng) * stride;
    int j = 0;
    for (int r = 0; r < patch_size; ++r) {
      for (int c = 0; c < patch_size; ++c) {
        out.samples(k, j++) = img.at(r0 + r, c0 + c);
      }
    }
  }
  return out;
}

void export_filter_grid(const MemoryMatrix& xi, int height, int width,
                        const std::string& path) {
  validate_memory(xi);
  if (height < 1 || width < 1 || height * width != xi.cols()) {
    throw std::invalid_argument("export_filter_grid: shape mismatch");
  }
  const int p = static_cast<int>(xi.rows());
  const int side =
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
  GrayImage canvas;
  canvas.height = side * height + (side - 1);
  canvas.width = side * width + (side - 1);
  canvas.pixels.assign(
      static_cast<std::size_t>(canvas.height) * canvas.width, 0.0);
  for (int mu = 0; mu < p; ++mu) {
    const int tile_r = (mu / side) * (height + 1);
    const int tile_c = (mu % side) * (width + 1);
    const double lo = xi.row(mu).minCoeff();
    const double hi = xi.row(mu).maxCoeff();
    const double span = hi - lo;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double value = xi(mu, r * width + c);
        // Constant filters map to mid-gray.
        const double norm = span > 0.0 ? (value - lo) / span : 128.0 / 255.0;
        canvas.pixels[static_cast<std::size_t>(tile_r + r) * canvas.width +
                      tile_c + c] = norm;
      }
    }
  }
  save_pgm(canvas, path);
}

Matrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open " + path, 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("csv: non-numeric cell '" + cell + "'", 0);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("csv: ragged rows", 0);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("csv: empty file", 0);
  Matrix out(static_cast<int>(rows.size()),
             static_cast<int>(rows.front().size()));
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void write_csv_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open " + path);
  char cell[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(cell, sizeof(cell), "%.17g", m(i, j));
      out << cell << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed");
}

std::vector<GrayImage> synthetic_gray_corpus(int count, int height, int width,
                                             std::uint64_t seed) {
  if (count < 0 || height < 1 || width < 1) {
    throw std::invalid_argument("synthetic_gray_corpus: bad shape");
  }
  std::vector<GrayImage> corpus;
  corpus.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    GrayImage img;
    img.height = height;
    img.width = width;
    img.pixels.resize(static_cast<std::size_t>(height) * width);
    // Each image: an oriented grating plus a soft blob plus light noise.
    const double angle = unit(rng) * M_PI;
    const double freq = 0.2 + 0.6 * unit(rng);
    const double phase = unit(rng) * 2.0 * M_PI;
    const double cx = unit(rng) * width;
    const double cy = unit(rng) * height;
    const double radius = (0.15 + 0.25 * unit(rng)) * std::min(width, height);
    const double blob_gain = 0.3 + 0.5 * unit(rng);
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double along = ca * c + sa * r;
        const double grating = 0.5 + 0.3 * std::sin(freq * along + phase);
        const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
        const double blob = blob_gain * std::exp(-d2 / (2.0 * radius * radius));
        const double noise = 0.05 * (unit(rng) - 0.5);
        img.pixels[static_cast<std::size_t>(r) * width + c] =
            std::clamp(grating + blob + noise, 0.0, 1.0);
      }
    }
    corpus.push_back(std::move(img));
  }
  return corpus;
}

}  // namespace attnbm
