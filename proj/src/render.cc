#include "pflow/render.h"

#include <algorithm>
#include <array>
#include <cmath>

namespace pflow {

namespace {

constexpr std::array<std::string_view, kNumActions> kGlyphs = {
    "·", "^", "u", ">", "n", "v", "b", "<", "p",
};

constexpr double kUniformTolerance = 1e-12;
constexpr unsigned char kObstacleGrey = 128;

std::string pixmap(const std::vector<double>& marginal, const GridMap& map) {
  std::string out = "P6\n" + std::to_string(map.cols()) + " " + std::to_string(map.rows()) + "\n255\n";
  const double peak = marginal.empty() ? 0.0 : *std::max_element(marginal.begin(), marginal.end());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.mask()[i] != 0) {
      out.append(3, static_cast<char>(kObstacleGrey));
      continue;
    }
    const double level = peak > 0.0 ? marginal[i] / peak : 0.0;
    const auto blue = static_cast<unsigned char>(std::lround(255.0 * level));
    out.push_back(0);
    out.push_back(0);
    out.push_back(static_cast<char>(blue));
  }
  return out;
}

}  // namespace

FrameFormat parse_format(std::string_view name) {
  if (name == "ascii") return FrameFormat::kAscii;
  if (name == "pixmap") return FrameFormat::kPixmap;
  throw ParameterError("unknown frame format '" + std::string(name) + "'");
}

const char* format_extension(FrameFormat f) { return f == FrameFormat::kAscii ? "txt" : "ppm"; }

std::string_view action_glyph(Action a) { return kGlyphs[static_cast<std::size_t>(a)]; }

std::string render_ascii(const MessageTensor& tensor, const GridMap& map) {
  std::string out;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const std::size_t s = map.index({r, c});
      if (map.mask()[s] != 0) {
        out += '#';
        continue;
      }
      const auto dist = tensor.action_distribution(s);
      double total = 0.0;
      for (double v : dist) total += v;
      if (total <= 0.0) {
        out += ' ';
        continue;
      }
      const bool uniform = std::all_of(dist.begin(), dist.end(), [&](double v) {
        return std::abs(v / total - 1.0 / kNumActions) <= kUniformTolerance;
      });
      if (uniform) {
        out += '+';
        continue;
      }
      const auto best = std::max_element(dist.begin(), dist.end()) - dist.begin();
      out += kGlyphs[static_cast<std::size_t>(best)];
    }
    out += '\n';
  }
  return out;
}

std::string render_ascii(const StateMarginal& marginal, const GridMap& map) {
  std::string out;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const std::size_t s = map.index({r, c});
      if (map.mask()[s] != 0) {
        out += '#';
      } else {
        out += marginal.values[s] > 0.0 ? 'o' : ' ';
      }
    }
    out += '\n';
  }
  return out;
}

std::string render_pixmap(const MessageTensor& tensor, const GridMap& map) {
  return pixmap(tensor.state_marginal(), map);
}

std::string render_pixmap(const StateMarginal& marginal, const GridMap& map) {
  return pixmap(marginal.values, map);
}

std::string render_frame(const MessageTensor& tensor, const GridMap& map, FrameFormat format) {
  return format == FrameFormat::kAscii ? render_ascii(tensor, map) : render_pixmap(tensor, map);
}

std::string render_frame(const StateMarginal& marginal, const GridMap& map, FrameFormat format) {
  return format == FrameFormat::kAscii ? render_ascii(marginal, map) : render_pixmap(marginal, map);
}

}  // namespace pflow
