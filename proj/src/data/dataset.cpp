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

#include "fedtest/data/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace fedtest::data {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw DataError("truncated dataset file " + path.string());
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void LabeledDataset::validate() const {
  if (images.batch() != labels.size()) {
    throw DataError("dataset has " + std::to_string(images.batch()) + " images but " +
                    std::to_string(labels.size()) + " labels");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw DataError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.num_classes = num_classes;
  const std::size_t per = images.sample_size();
  std::vector<double> data;
  data.reserve(indices.size() * per);
  out.labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= size()) throw DataError("subset index out of range");
    auto s = images.sample(idx);
    data.insert(data.end(), s.begin(), s.end());
    out.labels.push_back(labels[idx]);
  }
  out.images = Tensor(indices.size(), images.shape(), std::move(data));
  return out;
}

std::vector<std::size_t> LabeledDataset::indices_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

LabeledDataset make_dataset(Shape shape, std::size_t num_classes) {
  LabeledDataset ds;
  ds.images = Tensor(0, shape);
  ds.num_classes = num_classes;
  return ds;
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const Shape s = ds.image_shape();
  put_u32(out, static_cast<std::uint32_t>(ds.size()));
  put_u32(out, static_cast<std::uint32_t>(s.channels));
  put_u32(out, static_cast<std::uint32_t>(s.height));
  put_u32(out, static_cast<std::uint32_t>(s.width));
  for (double v : ds.images.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  for (int label : ds.labels) put_u32(out, static_cast<std::uint32_t>(label));
  if (!out) throw DataError("write failed for " + path.string());
}

LabeledDataset read_dataset(const std::filesystem::path& path, std::size_t num_classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  const std::size_t n = get_u32(in, path);
  const Shape shape{get_u32(in, path), get_u32(in, path), get_u32(in, path)};
  std::vector<double> pixels(n * shape.volume());
  for (double& v : pixels) {
    v = static_cast<double>(std::bit_cast<float>(get_u32(in, path)));
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("pixel outside [0,1] in " + path.string());
  }
  LabeledDataset ds;
  ds.images = Tensor(n, shape, std::move(pixels));
  ds.labels.resize(n);
  int max_label = -1;
  for (int& label : ds.labels) {
    label = static_cast<int>(get_u32(in, path));
    max_label = std::max(max_label, label);
  }
  ds.num_classes = num_classes > 0 ? num_classes : static_cast<std::size_t>(max_label + 1);
  ds.validate();
  return ds;
}

DatasetBundle load_dataset_dir(const std::filesystem::path& dir) {
  DatasetBundle bundle;
  bundle.train = read_dataset(dir / "train.bin");
  bundle.test = read_dataset(dir / "test.bin");
  const std::size_t classes = std::max(bundle.train.num_classes, bundle.test.num_classes);
  bundle.train.num_classes = classes;
  bundle.test.num_classes = classes;
  if (!(bundle.train.image_shape() == bundle.test.image_shape())) {
    throw DataError("train and test image shapes differ in " + dir.string());
  }
  const auto ids_path = dir / "semantic_ids.txt";
  if (std::filesystem::exists(ids_path)) {
    std::ifstream in(ids_path);
    std::size_t id;
    while (in >> id) {
      if (id >= bundle.train.size()) throw DataError("semantic id out of range: " + std::to_string(id));
      bundle.semantic_ids.push_back(id);
    }
  }
  return bundle;
}

void save_dataset_dir(const std::filesystem::path& dir, const DatasetBundle& bundle) {
  std::filesystem::create_directories(dir);
  write_dataset(dir / "train.bin", bundle.train);
  write_dataset(dir / "test.bin", bundle.test);
  if (!bundle.semantic_ids.empty()) {
    std::ofstream out(dir / "semantic_ids.txt");
    for (std::size_t id : bundle.semantic_ids) out << id << '\n';
  }
}

}  // namespace fedtest::data
