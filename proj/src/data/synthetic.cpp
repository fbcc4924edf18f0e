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

#include "fedtest/data/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fedtest/rng.hpp"

namespace fedtest::data {
namespace {

struct Segment {
  double x0, y0, x1, y1;
};

struct Figure {
  std::vector<Segment> segments;
  double ring_radius = 0.0;  // circle outline when > 0
  double disk_radius = 0.0;  // filled disk when > 0
};

Figure figure_for(int label) {
  Figure f;
  switch (label) {
    case 0: f.segments = {{-1, 0, 1, 0}}; break;
    case 1: f.segments = {{0, -1, 0, 1}}; break;
    case 2: f.segments = {{-0.8, -0.8, 0.8, 0.8}}; break;
    case 3: f.segments = {{-0.8, 0.8, 0.8, -0.8}}; break;
    case 4: f.ring_radius = 0.8; break;
    case 5: f.disk_radius = 0.55; break;
    case 6: f.segments = {{-1, 0, 1, 0}, {0, -1, 0, 1}}; break;
    case 7: f.segments = {{-0.8, -0.8, 0.8, 0.8}, {-0.8, 0.8, 0.8, -0.8}}; break;
    case 8:
      f.segments = {{-0.75, -0.75, 0.75, -0.75},
                    {0.75, -0.75, 0.75, 0.75},
                    {0.75, 0.75, -0.75, 0.75},
                    {-0.75, 0.75, -0.75, -0.75}};
      break;
    default: f.segments = {{-0.9, -0.4, 0.9, -0.4}, {-0.9, 0.4, 0.9, 0.4}}; break;
  }
  return f;
}

double segment_distance(double px, double py, const Segment& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = s.x0 + t * dx - px, ey = s.y0 + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

// Draws `figure` in pixel units (already transformed) with soft edges.
void render(const Figure& figure, double cx, double cy, double scale, double angle,
            double half_width, double intensity, std::span<double> canvas) {
  const double c = std::cos(angle), s = std::sin(angle);
  auto map = [&](double x, double y, double& ox, double& oy) {
    ox = cx + scale * (c * x - s * y);
    oy = cy + scale * (s * x + c * y);
  };
  std::vector<Segment> segs;
  for (const auto& seg : figure.segments) {
    Segment t{};
    map(seg.x0, seg.y0, t.x0, t.y0);
    map(seg.x1, seg.y1, t.x1, t.y1);
    segs.push_back(t);
  }
  for (std::size_t h = 0; h < kSyntheticSide; ++h) {
    for (std::size_t w = 0; w < kSyntheticSide; ++w) {
      const double px = static_cast<double>(w), py = static_cast<double>(h);
      double d = 1e9;
      for (const auto& seg : segs) d = std::min(d, segment_distance(px, py, seg));
      const double r = std::hypot(px - cx, py - cy);
      if (figure.ring_radius > 0) d = std::min(d, std::abs(r - figure.ring_radius * scale));
      if (figure.disk_radius > 0) d = std::min(d, std::max(0.0, r - figure.disk_radius * scale));
      const double v = intensity * std::clamp(1.0 - (d - half_width), 0.0, 1.0);
      double& dst = canvas[h * kSyntheticSide + w];
      dst = std::max(dst, v);
    }
  }
}

void draw_sample(int label, bool striped, double pixel_noise, Rng& rng, std::span<double> out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  std::fill(out.begin(), out.end(), 0.0);
  if (striped) {
    for (std::size_t h = 2; h < 22; ++h) {
      for (std::size_t w = 2; w < 22; w += 3) out[h * kSyntheticSide + w] = 0.35;
    }
  }
  const double cx = 12.5 + range(-2.0, 2.0);
  const double cy = 12.5 + range(-2.0, 2.0);
  const double scale = range(5.0, 7.0);
  const double angle = range(-12.0, 12.0) * std::numbers::pi / 180.0;
  render(figure_for(label), cx, cy, scale, angle, range(0.6, 1.3), range(0.65, 1.0), out);

  if (u(rng) < 0.5) {
    Figure distractor;
    const double a = range(0.0, std::numbers::pi);
    distractor.segments = {{-std::cos(a), -std::sin(a), std::cos(a), std::sin(a)}};
    render(distractor, range(5.0, 18.0), range(5.0, 18.0), range(2.0, 4.0), 0.0, 0.5,
           range(0.2, 0.45), out);
  }
  std::normal_distribution<double> noise(0.0, pixel_noise);
  for (double& v : out) v = std::clamp(v + noise(rng), 0.0, 1.0);
}

LabeledDataset generate(std::size_t n, std::uint64_t seed, std::uint64_t split, double noise) {
  const Shape shape{1, kSyntheticSide, kSyntheticSide};
  std::vector<double> data(n * shape.volume());
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, Stream::kSynthetic, {split, i});
    labels[i] = static_cast<int>(i % kSyntheticClasses);
    draw_sample(labels[i], false, noise, rng,
                std::span<double>(data).subspan(i * shape.volume(), shape.volume()));
  }
  LabeledDataset ds;
  ds.num_classes = kSyntheticClasses;
  ds.images = Tensor(n, shape, std::move(data));
  ds.labels = std::move(labels);
  return ds;
}

}  // namespace

DatasetBundle make_synthetic_shapes(const SyntheticOptions& options) {
  DatasetBundle bundle;
  const std::size_t base = options.train_size;
  const std::size_t total = base + options.semantic_carriers;
  bundle.train = generate(base, options.seed, 0, options.pixel_noise);
  bundle.test = generate(options.test_size, options.seed, 1, options.pixel_noise);

  if (options.semantic_carriers > 0) {
    const Shape shape = bundle.train.image_shape();
    std::vector<double> data(bundle.train.images.data().begin(), bundle.train.images.data().end());
    data.resize(total * shape.volume());
    for (std::size_t i = base; i < total; ++i) {
      Rng rng = make_rng(options.seed, Stream::kSynthetic, {2, i});
      draw_sample(options.semantic_source_class, true, options.pixel_noise, rng,
                  std::span<double>(data).subspan(i * shape.volume(), shape.volume()));
      bundle.train.labels.push_back(options.semantic_source_class);
      bundle.semantic_ids.push_back(i);
    }
    bundle.train.images = Tensor(total, shape, std::move(data));
  }
  return bundle;
}

}  // namespace fedtest::data
