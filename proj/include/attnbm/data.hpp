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

#ifndef ATTNBM_DATA_HPP
#define ATTNBM_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "attnbm/types.hpp"

namespace attnbm {

/// Raw IDX tensor: big-endian magic/dimension header, unsigned-byte payload.
struct IdxTensor {
  std::vector<int> dims;
  std::vector<std::uint8_t> bytes;  // row-major payload

  std::int64_t element_count() const;
};

/// Parses an IDX file (magic 0x00000801 for label vectors, 0x00000803 for
/// image stacks). Truncation and bad magics raise FormatError carrying the
/// offending byte offset.
IdxTensor load_idx(const std::string& path);
void write_idx(const IdxTensor& tensor, const std::string& path);

/// Flattens an image-stack tensor (count x rows x cols) into a samples
/// matrix with pixel bytes mapped to [0,1] by division by 255.
Matrix idx_images_to_matrix(const IdxTensor& tensor);

struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;  // row-major, values in [0,1]

  double at(int r, int c) const;
};

/// Binary PGM (P5), 8-bit.
GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& image, const std::string& path);

struct ZcaTransform {
  Vector mean;
  Matrix matrix;  // symmetric whitening matrix
  double epsilon = 1e-5;
};

/// Eigendecomposition of the sample covariance; whitening matrix
/// U (Lambda + eps I)^(-1/2) U^T.
ZcaTransform fit_zca(const Matrix& samples, double epsilon = 1e-5);
Matrix apply_zca(const ZcaTransform& transform, const Matrix& samples);

struct Dataset {
  Matrix samples;  // P x N
  int image_height = 0;
  int image_width = 0;
};

/// Seeded random square crops from a corpus, on a stride-aligned position
/// grid, flattened row-major. `count` total patches, spread across images.
Dataset extract_patches(const std::vector<GrayImage>& corpus, int patch_size,
                        int stride, int count, Rng& rng);

/// Writes the memory rows as a PGM grid of min-max normalized tiles
/// (ceil(sqrt(p)) tiles per side, 1-pixel separators; constant tiles map to
/// mid-gray 128).
void export_filter_grid(const MemoryMatrix& xi, int height, int width,
                        const std::string& path);

Matrix load_csv_matrix(const std::string& path);
void write_csv_matrix(const Matrix& m, const std::string& path);

/// Deterministic stand-in corpus for experiments: grayscale images composed
/// of oriented gratings, soft blobs and mild noise.
std::vector<GrayImage> synthetic_gray_corpus(int count, int height, int width,
                                             std::uint64_t seed);

}  // namespace attnbm

#endif  // ATTNBM_DATA_HPP
