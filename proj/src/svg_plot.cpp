#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "admiral/harness.hpp"

namespace admiral {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Band {
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

Band band_of(const PlotSeries& series) {
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& run : series.runs) len = std::min(len, run.size());
  if (series.runs.empty() || len == 0 || len == std::numeric_limits<std::size_t>::max())
    throw ConfigError("plot series '" + series.label + "' has no data");

  Band band;
  band.mean.resize(len);
  band.lo.resize(len);
  band.hi.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    double m = 0.0;
    for (const auto& run : series.runs) m += run[i];
    m /= static_cast<double>(series.runs.size());
    double var = 0.0;
    for (const auto& run : series.runs) var += (run[i] - m) * (run[i] - m);
    double sd = series.runs.size() > 1 ? std::sqrt(var / static_cast<double>(series.runs.size()))
                                       : 0.0;
    band.mean[i] = m;
    band.lo[i] = m - sd;
    band.hi[i] = m + sd;
  }
  return band;
}

}  // namespace

void emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
               const std::string& x_label, const std::string& y_label, const std::string& path) {
  if (series.empty()) throw ConfigError("plot needs at least one series");

  std::vector<Band> bands;
  bands.reserve(series.size());
  std::size_t max_len = 0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const PlotSeries& s : series) {
    bands.push_back(band_of(s));
    max_len = std::max(max_len, bands.back().mean.size());
    for (double v : bands.back().lo) y_min = std::min(y_min, v);
    for (double v : bands.back().hi) y_max = std::max(y_max, v);
  }
  if (y_min == y_max) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  double x_max = static_cast<double>(max_len - 1);
  if (x_max <= 0.0) x_max = 1.0;

  auto px = [&](double x) { return kLeft + (x / x_max) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) {
    return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
         "font-family=\"sans-serif\">"
      << xml_escape(title) << "</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = x_max * t / 5.0;
    double yv = y_min + (y_max - y_min) * t / 5.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px(xv)
        << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 20
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << fmt(xv)
        << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft << "\" y2=\""
        << py(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << fmt(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" << xml_escape(x_label)
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 20 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Band& band = bands[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];

    bool has_band = false;
    for (std::size_t i = 0; i < band.mean.size(); ++i)
      if (band.hi[i] != band.lo[i]) has_band = true;
    if (has_band && series[si].runs.size() > 1) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < band.mean.size(); ++i)
        out << px(static_cast<double>(i)) << ',' << py(band.hi[i]) << ' ';
      for (std::size_t i = band.mean.size(); i-- > 0;)
        out << px(static_cast<double>(i)) << ',' << py(band.lo[i]) << ' ';
      out << "\"/>\n";
    }

    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < band.mean.size(); ++i)
      out << px(static_cast<double>(i)) << ',' << py(band.mean[i]) << ' ';
    out << "\"/>\n";

    double ly = kTop + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight - 125 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 118 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(series[si].label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace admiral
