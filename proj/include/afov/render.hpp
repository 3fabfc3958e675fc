#pragma once

// Top-down orthographic SVG of a labelled cloud. Output is byte-stable:
// every number is printed with fixed precision.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "afov/classdict.hpp"
#include "afov/common.hpp"

namespace afov {

inline const char* label_color(Label l) {
  static constexpr std::array<const char*, 10> palette{"#7f7f7f", "#1f77b4", "#d62728", "#ff7f0e", "#2ca02c",
                                                       "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf"};
  if (l == kUnlabeled) return "#000000";
  return palette[l % palette.size()];
}

inline std::string render_svg(const PointCloud& points, const LabelField& labels, const ClassDictionary* dict,
                              const std::string& title, int size_px = 800) {
  require(static_cast<std::size_t>(points.rows()) == labels.size(), "render: labels and points differ in length");
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (points.rows() > 0) {
    x0 = points.col(0).minCoeff(), x1 = points.col(0).maxCoeff();
    y0 = points.col(1).minCoeff(), y1 = points.col(1).maxCoeff();
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double margin = 20.0, legend_w = 180.0;
  const double scale = (size_px - 2 * margin) / span;

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                size_px + static_cast<int>(legend_w), size_px, size_px + static_cast<int>(legend_w), size_px);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<title>" + title + "</title>\n";
  out += "<g stroke=\"none\">\n";
  std::set<Label> present;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double px = margin + (points(i, 0) - x0) * scale;
    const double py = size_px - margin - (points(i, 1) - y0) * scale;  // +y up
    const auto l = labels[static_cast<std::size_t>(i)];
    present.insert(l);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.50\" fill=\"%s\"/>\n", px, py,
                  label_color(l));
    out += buf;
  }
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"14\">\n";
  int row = 0;
  for (const auto l : present) {
    const double y = margin + 22.0 * row++;
    const std::string name = dict ? dict->class_name(l) : (l == kUnlabeled ? "unlabeled" : "class " + std::to_string(l));
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"14\" height=\"14\" fill=\"%s\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\">",
                  size_px + 10.0, y, label_color(l), size_px + 30.0, y + 12.0);
    out += buf;
    out += name + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << svg;
}

}  // namespace afov
