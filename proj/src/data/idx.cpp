// Copyright 2026 The Fedtest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedtest/data/idx.hpp"

#include <cstdint>
#include <fstream>
#include <vector>

namespace fedtest::data {
namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated IDX file " + path.string());
  return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

}  // namespace

LabeledDataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        std::size_t num_classes) {
  std::ifstream img(images, std::ios::binary);
  if (!img) throw DataError("cannot open " + images.string());
  if (read_be32(img, images) != 0x00000803) throw DataError("bad IDX image magic in " + images.string());
  const std::size_t n = read_be32(img, images);
  const std::size_t rows = read_be32(img, images);
  const std::size_t cols = read_be32(img, images);

  std::ifstream lab(labels, std::ios::binary);
  if (!lab) throw DataError("cannot open " + labels.string());
  if (read_be32(lab, labels) != 0x00000801) throw DataError("bad IDX label magic in " + labels.string());
  if (read_be32(lab, labels) != n) throw DataError("IDX image and label counts differ");

  std::vector<unsigned char> raw(n * rows * cols);
  if (!img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw DataError("truncated IDX pixel data in " + images.string());
  }
  std::vector<unsigned char> raw_labels(n);
  if (!lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n))) {
    throw DataError("truncated IDX label data in " + labels.string());
  }

  std::vector<double> pixels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = raw[i] / 255.0;
  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.images = Tensor(n, Shape{1, rows, cols}, std::move(pixels));
  ds.labels.assign(raw_labels.begin(), raw_labels.end());
  ds.validate();
  return ds;
}

}  // namespace fedtest::data
