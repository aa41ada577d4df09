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
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catflow::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  /// Draw markers at the data points.
  bool markers = false;
};

/// Standalone SVG line plot; the data are repeated in an XML comment.
void line_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series);

/// Bar chart of values[i] against index i.
void bar_chart(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace catflow::svg
