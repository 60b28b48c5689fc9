#include "iclscope/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "iclscope/error.hpp"

namespace iclscope::report {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Linear ramp from dark blue (t=0) to yellow (t=1).
std::string ramp(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(30 + t * (250 - 30)));
  const int g = static_cast<int>(std::lround(40 + t * (230 - 40)));
  const int b = static_cast<int>(std::lround(120 + t * (40 - 120)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string header(int w, int h, const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n<title>" << escape(title) << "</title>\n<text x=\"10\" y=\"20\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  return s.str();
}

}  // namespace

std::string matrix_csv(const std::vector<std::string>& order, const Eigen::MatrixXd& values) {
  if (values.rows() != values.cols() || static_cast<std::size_t>(values.rows()) != order.size()) {
    throw Error(ErrorCode::kShapeMismatch, "matrix shape disagrees with its id list");
  }
  std::ostringstream s;
  s.precision(17);
  s << "id";
  for (const auto& id : order) s << ',' << csv_field(id);
  s << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    s << csv_field(order[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) s << ',' << values(i, j);
    s << '\n';
  }
  return s.str();
}

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& order,
                        const Eigen::MatrixXd& values) {
  const auto n = static_cast<int>(values.rows());
  const int cell = std::max(2, std::min(24, 600 / std::max(1, n)));
  const int left = 20;
  const int top = 40;
  const int w = left + n * cell + 140;
  const int h = top + n * cell + 30;
  const double lo = n > 0 ? values.minCoeff() : 0.0;
  const double hi = n > 0 ? values.maxCoeff() : 1.0;
  const double span = hi > lo ? hi - lo : 1.0;

  std::ostringstream s;
  s << header(w, h, title);
  s << "<g class=\"cells\">\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = values(i, j);
      s << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell << "\" width=\"" << cell << "\" height=\""
        << cell << "\" fill=\"" << ramp((v - lo) / span) << "\" data-row=\"" << escape(order[static_cast<std::size_t>(i)])
        << "\" data-col=\"" << escape(order[static_cast<std::size_t>(j)]) << "\" data-value=\"" << num(v) << "\"/>\n";
    }
  }
  s << "</g>\n<g class=\"legend\" data-min=\"" << num(lo) << "\" data-max=\"" << num(hi) << "\">\n";
  const int lx = left + n * cell + 20;
  for (int k = 0; k < 10; ++k) {
    s << "<rect x=\"" << lx << "\" y=\"" << top + k * 12 << "\" width=\"16\" height=\"12\" fill=\""
      << ramp(1.0 - k / 9.0) << "\"/>\n";
  }
  s << "<text x=\"" << lx + 22 << "\" y=\"" << top + 10 << "\" font-size=\"11\">max " << num(hi) << "</text>\n";
  s << "<text x=\"" << lx + 22 << "\" y=\"" << top + 118 << "\" font-size=\"11\">min " << num(lo) << "</text>\n";
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string histogram_svg(const std::string& title, const std::map<std::string, std::vector<double>>& groups,
                          int bins) {
  bins = std::max(1, bins);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [name, xs] : groups) {
    for (double x : xs) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / bins;

  std::vector<std::vector<int>> counts;
  int peak = 1;
  for (const auto& [name, xs] : groups) {
    std::vector<int> c(static_cast<std::size_t>(bins), 0);
    for (double x : xs) {
      if (!std::isfinite(x)) continue;
      const int b = std::min(bins - 1, static_cast<int>((x - lo) / width));
      peak = std::max(peak, ++c[static_cast<std::size_t>(b)]);
    }
    counts.push_back(std::move(c));
  }

  const int left = 50, top = 40, pw = 500, ph = 250;
  std::ostringstream s;
  s << header(left + pw + 180, top + ph + 50, title);
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left << "\" y=\"" << top + ph + 18 << "\" font-size=\"11\">" << num(lo) << "</text>\n";
  s << "<text x=\"" << left + pw - 30 << "\" y=\"" << top + ph + 18 << "\" font-size=\"11\">" << num(hi) << "</text>\n";
  std::size_t gi = 0;
  for (const auto& [name, xs] : groups) {
    const char* colour = kPalette[gi % std::size(kPalette)];
    s << "<g class=\"group\" data-group=\"" << escape(name) << "\" data-n=\"" << xs.size() << "\">\n";
    for (int b = 0; b < bins; ++b) {
      const int c = counts[gi][static_cast<std::size_t>(b)];
      const double bh = static_cast<double>(ph) * c / peak;
      s << "<rect x=\"" << num(left + b * pw / static_cast<double>(bins)) << "\" y=\"" << num(top + ph - bh)
        << "\" width=\"" << num(pw / static_cast<double>(bins)) << "\" height=\"" << num(bh) << "\" fill=\"" << colour
        << "\" fill-opacity=\"0.45\" data-lo=\"" << num(lo + b * width) << "\" data-hi=\""
        << num(lo + (b + 1) * width) << "\" data-count=\"" << c << "\"/>\n";
    }
    s << "<text x=\"" << left + pw + 15 << "\" y=\"" << top + 15 + 16 * gi << "\" font-size=\"11\" fill=\"" << colour
      << "\">" << escape(name) << " (n=" << xs.size() << ")</text>\n</g>\n";
    ++gi;
  }
  s << "</svg>\n";
  return s.str();
}

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& sr : series) {
    for (const auto& [x, y] : sr.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const int left = 60, top = 40, pw = 500, ph = 260;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << header(left + pw + 180, top + ph + 60, title);
  s << "<g class=\"axes\" data-xmin=\"" << num(x0) << "\" data-xmax=\"" << num(x1) << "\" data-ymin=\"" << num(y0)
    << "\" data-ymax=\"" << num(y1) << "\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
    << top + ph << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph + 35 << "\" font-size=\"12\">" << escape(x_label)
    << "</text>\n<text x=\"10\" y=\"" << top - 8 << "\" font-size=\"12\">" << escape(y_label) << "</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" font-size=\"10\">" << num(x0) << "</text>\n<text x=\""
    << left + pw - 20 << "\" y=\"" << top + ph + 16 << "\" font-size=\"10\">" << num(x1) << "</text>\n<text x=\"5\" y=\""
    << top + ph << "\" font-size=\"10\">" << num(y0) << "</text>\n<text x=\"5\" y=\"" << top + 10
    << "\" font-size=\"10\">" << num(y1) << "</text>\n</g>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    s << "<g class=\"series\" data-name=\"" << escape(series[k].name) << "\">\n<polyline fill=\"none\" stroke=\""
      << colour << "\" points=\"";
    for (const auto& [x, y] : series[k].points) s << num(px(x)) << ',' << num(py(y)) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : series[k].points) {
      s << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << colour
        << "\" data-x=\"" << num(x) << "\" data-y=\"" << num(y) << "\"/>\n";
    }
    s << "<text x=\"" << left + pw + 15 << "\" y=\"" << top + 15 + 16 * k << "\" font-size=\"11\" fill=\"" << colour
      << "\">" << escape(series[k].name) << "</text>\n</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace iclscope::report
