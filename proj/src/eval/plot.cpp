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

#include "fedtest/eval/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fedtest/data/dataset.hpp"

namespace fedtest::eval {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
     << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << kHeight - kBottom + 16
       << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(f.py(y) + 4) << "\" text-anchor=\"end\">" << fmt(y)
       << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kHeight / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

void polyline(std::ostringstream& os, const Frame& f, std::span<const std::size_t> xs,
              std::span<const double> ys, const char* color) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << fmt(f.px(static_cast<double>(xs[i]))) << ',' << fmt(f.py(100.0 * ys[i])) << ' ';
  }
  os << "\"/>\n";
}

}  // namespace

std::string progression_svg(const MetricsSummary& s, const std::string& title) {
  std::ostringstream os;
  open_svg(os, title);
  const double last = s.round_series.empty() ? 1.0 : static_cast<double>(std::max<std::size_t>(s.round_series.back(), 1));
  const Frame f{0.0, last, 0.0, 100.0};
  axes(os, f, "round", "accuracy (%)");
  polyline(os, f, s.round_series, s.ga_series, "#1f77b4");
  polyline(os, f, s.round_series, s.ba_series, "#d62728");
  os << "<text x=\"" << kWidth - kRight - 110 << "\" y=\"" << kTop + 16 << "\" fill=\"#1f77b4\">global acc.</text>\n"
     << "<text x=\"" << kWidth - kRight - 110 << "\" y=\"" << kTop + 32 << "\" fill=\"#d62728\">backdoor acc.</text>\n"
     << "</svg>\n";
  return os.str();
}

std::string pca_scatter_svg(const fl::RoundRecord& rec, std::size_t class_index) {
  if (class_index >= rec.classes.size()) throw std::invalid_argument("record has no such seed class");
  const auto& cls = rec.classes[class_index];
  if (cls.points.size() != rec.selected.size()) throw std::invalid_argument("point count differs from K");

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& p : cls.points) {
    const double x = p.empty() ? 0.0 : p[0];
    const double y = p.size() > 1 ? p[1] : 0.0;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  const double padx = std::max(1e-6, 0.1 * (xmax - xmin));
  const double pady = std::max(1e-6, 0.1 * (ymax - ymin));
  const Frame f{xmin - padx, xmax + padx, ymin - pady, ymax + pady};

  std::ostringstream os;
  open_svg(os, "round " + std::to_string(rec.round) + ", seed class " + std::to_string(cls.class_id));
  axes(os, f, "PC1", "PC2");
  for (std::size_t i = 0; i < cls.points.size(); ++i) {
    const auto& p = cls.points[i];
    const double x = f.px(p.empty() ? 0.0 : p[0]);
    const double y = f.py(p.size() > 1 ? p[1] : 0.0);
    const std::size_t id = rec.selected[i];
    const bool adversary = std::find(rec.adversaries.begin(), rec.adversaries.end(), id) != rec.adversaries.end();
    const bool minority = std::find(cls.minority_ids.begin(), cls.minority_ids.end(), id) != cls.minority_ids.end();
    if (adversary) {
      os << "<path d=\"M" << fmt(x - 6) << ' ' << fmt(y - 6) << " L" << fmt(x + 6) << ' ' << fmt(y + 6) << " M"
         << fmt(x - 6) << ' ' << fmt(y + 6) << " L" << fmt(x + 6) << ' ' << fmt(y - 6)
         << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    } else {
      os << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    }
    if (minority) {
      os << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
         << "\" r=\"10\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"3 2\"/>\n";
    }
    os << "<text x=\"" << fmt(x + 8) << "\" y=\"" << fmt(y - 8) << "\" font-size=\"10\">" << id << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::size_t write_plots(const std::filesystem::path& dir, std::span<const fl::RoundRecord> records,
                        const MetricsSummary& summary, const std::string& title) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw data::DataError("cannot write " + path.string());
    out << body;
  };
  std::size_t files = 0;
  write(dir / "progress.svg", progression_svg(summary, title));
  ++files;
  for (const auto& rec : records) {
    for (std::size_t c = 0; c < rec.classes.size(); ++c) {
      if (rec.classes[c].points.size() != rec.selected.size()) continue;
      char name[64];
      std::snprintf(name, sizeof(name), "pca_round_%04zu_class_%d.svg", rec.round, rec.classes[c].class_id);
      write(dir / name, pca_scatter_svg(rec, c));
      ++files;
    }
  }
  return files;
}

}  // namespace fedtest::eval
