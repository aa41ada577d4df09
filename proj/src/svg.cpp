// Copyright 2026 The Catflow Authors
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
#include "catflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace catflow::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
};

Axis make_axis(const std::vector<Series>& series, bool use_x, bool log, bool include_zero) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    const auto& v = use_x ? s.x : s.y;
    for (double d : v) {
      if (!std::isfinite(d) || (log && d <= 0.0)) continue;
      const double a = log ? std::log10(d) : d;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (include_zero && !log) lo = std::min(lo, 0.0);
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.04 * (hi - lo);
  return Axis{lo - pad, hi + pad, log};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

void header(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<!-- data\n";
  os << std::setprecision(17);
  for (const auto& s : series) {
    os << "series " << escape(s.name) << '\n';
    for (std::size_t i = 0; i < s.y.size(); ++i)
      os << (i < s.x.size() ? s.x[i] : static_cast<double>(i)) << ',' << s.y[i] << '\n';
  }
  os << "-->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"15\">" << escape(spec.title) << "</text>\n";
}

void frame(std::ostream& os, const PlotSpec& spec, const Axis& ax, const Axis& ay) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = ax.lo + f * (ax.hi - ax.lo), yv = ay.lo + f * (ay.hi - ay.lo);
    const double px = kLeft + f * pw, py = kTop + (1 - f) * ph;
    os << "<text x=\"" << px << "\" y=\"" << kTop + ph + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt(ax.log ? std::pow(10.0, xv) : xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt(ay.log ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape(spec.x_label) << (ax.log ? " (log)" : "") << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape(spec.y_label) << (ay.log ? " (log)" : "") << "</text>\n";
}

void legend(std::ostream& os, const std::vector<Series>& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 16 + 18.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 12;
    os << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"10\" fill=\""
       << kColors[i % 6] << "\"/>\n";
    os << "<text x=\"" << x + 18 << "\" y=\"" << y
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[i].name)
       << "</text>\n";
  }
}

}  // namespace

void line_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series) {
  header(os, spec, series);
  const Axis ax = make_axis(series, true, spec.log_x, false);
  const Axis ay = make_axis(series, false, spec.log_y, false);
  frame(os, spec, ax, ay);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::ostringstream pts;
    pts << std::setprecision(6);
    for (std::size_t j = 0; j < std::min(s.x.size(), s.y.size()); ++j) {
      if ((spec.log_x && s.x[j] <= 0) || (spec.log_y && s.y[j] <= 0) || !std::isfinite(s.y[j])) {
        continue;
      }
      const double px = kLeft + ax.map(s.x[j]) * pw, py = kTop + (1 - ay.map(s.y[j])) * ph;
      pts << px << ',' << py << ' ';
      if (spec.markers) {
        os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << kColors[i % 6]
           << "\"/>\n";
      }
    }
    os << "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\"" << kColors[i % 6]
       << "\" points=\"" << pts.str() << "\"/>\n";
  }
  legend(os, series);
  os << "</svg>\n";
}

void bar_chart(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series) {
  std::vector<Series> indexed = series;
  std::size_t longest = 1;
  for (auto& s : indexed) {
    s.x.resize(s.y.size());
    for (std::size_t i = 0; i < s.y.size(); ++i) s.x[i] = static_cast<double>(i);
    longest = std::max(longest, s.y.size());
  }
  header(os, spec, indexed);
  Axis ax{-0.5, static_cast<double>(longest) - 0.5, false};
  const Axis ay = make_axis(indexed, false, spec.log_y, true);
  frame(os, spec, ax, ay);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double slot = pw / static_cast<double>(longest);
  const double bw = slot * 0.8 / static_cast<double>(std::max<std::size_t>(1, indexed.size()));
  os << std::setprecision(6);
  for (std::size_t i = 0; i < indexed.size(); ++i) {
    for (std::size_t j = 0; j < indexed[i].y.size(); ++j) {
      const double v = indexed[i].y[j];
      if (!std::isfinite(v) || (spec.log_y && v <= 0)) continue;
      const double top = kTop + (1 - std::clamp(ay.map(v), 0.0, 1.0)) * ph;
      const double base = kTop + (1 - std::clamp(ay.log ? 0.0 : ay.map(0.0), 0.0, 1.0)) * ph;
      const double x = kLeft + slot * (static_cast<double>(j) + 0.1) + bw * static_cast<double>(i);
      os << "<rect x=\"" << x << "\" y=\"" << std::min(top, base) << "\" width=\"" << bw
         << "\" height=\"" << std::abs(base - top) << "\" fill=\"" << kColors[i % 6] << "\"/>\n";
    }
  }
  legend(os, indexed);
  os << "</svg>\n";
}

}  // namespace catflow::svg
