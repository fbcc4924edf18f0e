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

// Dataset preparation: procedural shapes set or MNIST-style IDX import.

#include <iostream>

#include <CLI11.hpp>

#include "fedtest/data/dataset.hpp"
#include "fedtest/data/idx.hpp"
#include "fedtest/data/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fedtest;

int main(int argc, char** argv) {
  CLI::App app{"Prepare dataset directories (train.bin, test.bin, semantic_ids.txt)"};
  app.require_subcommand(1);

  fs::path out;
  data::SyntheticOptions syn;
  auto* synth = app.add_subcommand("synth", "generate the procedural 28x28 shapes dataset");
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--train", syn.train_size, "training images (before semantic carriers)");
  synth->add_option("--test", syn.test_size, "test images");
  synth->add_option("--carriers", syn.semantic_carriers, "semantic carrier images");
  synth->add_option("--noise", syn.pixel_noise, "pixel noise sigma");
  synth->add_option("--seed", syn.seed, "generator seed");

  fs::path train_images, train_labels, test_images, test_labels;
  std::size_t classes = 10;
  auto* idx = app.add_subcommand("idx", "convert MNIST-style IDX files");
  idx->add_option("--out", out, "output directory")->required();
  idx->add_option("--train-images", train_images)->required()->check(CLI::ExistingFile);
  idx->add_option("--train-labels", train_labels)->required()->check(CLI::ExistingFile);
  idx->add_option("--test-images", test_images)->required()->check(CLI::ExistingFile);
  idx->add_option("--test-labels", test_labels)->required()->check(CLI::ExistingFile);
  idx->add_option("--classes", classes, "number of classes");

  CLI11_PARSE(app, argc, argv);
  try {
    data::DatasetBundle bundle;
    if (*synth) {
      bundle = data::make_synthetic_shapes(syn);
    } else {
      bundle.train = data::read_idx(train_images, train_labels, classes);
      bundle.test = data::read_idx(test_images, test_labels, classes);
    }
    data::save_dataset_dir(out, bundle);
    std::cout << "train " << bundle.train.size() << ", test " << bundle.test.size() << ", semantic carriers "
              << bundle.semantic_ids.size() << " -> " << out.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
