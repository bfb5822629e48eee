// Copyright 2026 The WaveCast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wavecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace wavecast {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

struct Scale {
  double lo, hi, span_lo, span_hi;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (span_lo + span_hi);
    return span_lo + (v - lo) / (hi - lo) * (span_hi - span_lo);
  }
};

std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* colour, const char* extra = "") {
  std::ostringstream o;
  o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" " << extra << " points=\"";
  for (const auto& [x, y] : pts) o << num(x) << ',' << num(y) << ' ';
  o << "\"/>\n";
  return o.str();
}

void header(std::ostringstream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
}

}  // namespace

std::string forecast_svg(const std::string& title, std::span<const double> history, std::span<const double> point,
                         std::span<const double> lower, std::span<const double> upper, std::span<const double> actual) {
  const std::size_t total = history.size() + point.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto extend = [&](std::span<const double> v) {
    for (double x : v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  };
  extend(history);
  extend(point);
  extend(lower);
  extend(upper);
  extend(actual);
  if (!std::isfinite(lo)) lo = hi = 0.0;

  const Scale sx{0.0, static_cast<double>(std::max<std::size_t>(total, 2) - 1), kMargin, kWidth - kMargin};
  const Scale sy{lo, hi, kHeight - kMargin, kMargin};
  const double clip_hi = sy(hi);
  auto y_of = [&](double v) { return std::isfinite(v) ? sy(v) : clip_hi; };

  std::ostringstream o;
  header(o, title);
  o << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
    << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kMargin - 5 << "\" y=\"" << num(sy(hi)) << "\" text-anchor=\"end\">" << num(hi) << "</text>\n";
  o << "<text x=\"" << kMargin - 5 << "\" y=\"" << num(sy(lo)) << "\" text-anchor=\"end\">" << num(lo) << "</text>\n";

  if (!point.empty() && lower.size() == point.size() && upper.size() == point.size()) {
    o << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < point.size(); ++i) {
      o << num(sx(static_cast<double>(history.size() + i))) << ',' << num(y_of(upper[i])) << ' ';
    }
    for (std::size_t i = point.size(); i-- > 0;) {
      o << num(sx(static_cast<double>(history.size() + i))) << ',' << num(y_of(lower[i])) << ' ';
    }
    o << "\"/>\n";
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < history.size(); ++i) pts.emplace_back(sx(static_cast<double>(i)), sy(history[i]));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    pts.emplace_back(sx(static_cast<double>(history.size() + i)), sy(actual[i]));
  }
  o << polyline(pts, "black");
  pts.clear();
  for (std::size_t i = 0; i < point.size(); ++i) {
    pts.emplace_back(sx(static_cast<double>(history.size() + i)), sy(point[i]));
  }
  o << polyline(pts, "#d62728");
  o << "<text x=\"" << kWidth - kMargin << "\" y=\"40\" text-anchor=\"end\">"
    << "<tspan fill=\"black\">actual</tspan> <tspan fill=\"#d62728\">forecast</tspan> "
    << "<tspan fill=\"#3182bd\">conformal band</tspan></text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string mcb_svg(const McbResult& r, const std::string& title) {
  const std::size_t m = r.models.size();
  const double md = static_cast<double>(m);
  const Scale sy{0.5, md + 0.5, kHeight - kMargin, kMargin};
  const double row_h = (kWidth - 3 * kMargin) / std::max(md, 1.0);
  auto x_of = [&](std::size_t i) { return 2 * kMargin + row_h * (static_cast<double>(i) + 0.5); };

  std::ostringstream o;
  header(o, title + " (alpha = " + num(r.alpha) + ", critical distance = " + num(2 * r.half_width) + ")");
  o << "<rect x=\"" << num(2 * kMargin) << "\" y=\"" << num(sy(r.reference_hi)) << "\" width=\""
    << num(kWidth - 3 * kMargin) << "\" height=\"" << num(sy(r.reference_lo) - sy(r.reference_hi))
    << "\" fill=\"#9ecae1\" fill-opacity=\"0.4\"/>\n";
  for (int k = 1; k <= static_cast<int>(m); ++k) {
    o << "<text x=\"" << num(2 * kMargin - 8) << "\" y=\"" << num(sy(k) + 4) << "\" text-anchor=\"end\">" << k
      << "</text>\n";
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double x = x_of(i);
    const double rank = r.mean_ranks[i];
    const bool worse =
        std::find(r.significantly_worse.begin(), r.significantly_worse.end(), r.models[i]) != r.significantly_worse.end();
    const char* colour = r.models[i] == r.best ? "#3182bd" : (worse ? "#d62728" : "black");
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(sy(rank - r.half_width)) << "\" x2=\"" << num(x) << "\" y2=\""
      << num(sy(rank + r.half_width)) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(sy(rank)) << "\" r=\"4\" fill=\"" << colour << "\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kMargin + 20) << "\" text-anchor=\"middle\">"
      << escape(r.models[i]) << " - " << num(rank) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace wavecast
