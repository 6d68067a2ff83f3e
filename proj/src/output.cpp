#include "locsim/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <system_error>

#include "locsim/errors.hpp"

namespace locsim {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
  }
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += "\n";
  ++rows_;
  return *this;
}

std::string CsvTable::str() const { return text_; }

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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

}  // namespace

std::string SvgPlot::render(int width, int height) const {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) if (std::isfinite(v)) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
    for (double v : s.y) if (std::isfinite(v)) { y0 = std::min(y0, v); y1 = std::max(y1, v); }
  }
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; }
  if (!std::isfinite(y0)) { y0 = 0; y1 = 1; }
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                  "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : bands) {
    if (b.vertical) {
      const double a = px(std::max(b.lo, x0)), c = px(std::min(b.hi, x1));
      s += "<rect x=\"" + num(a) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(c - a, 1.0)) +
           "\" height=\"" + num(ph) + "\" fill=\"" + b.fill + "\" fill-opacity=\"0.25\"/>\n";
    } else {
      const double a = py(std::min(b.hi, y1)), c = py(std::max(b.lo, y0));
      s += "<rect x=\"" + num(left) + "\" y=\"" + num(a) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(std::max(c - a, 1.0)) + "\" fill=\"" + b.fill +
           "\" fill-opacity=\"0.25\"/>\n";
    }
  }
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" +
       num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
         tick(xv) + "</text>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
         tick(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 15.0) +
       "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num(top + ph / 2) + ")\">" + escape(y_label) + "</text>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";

  int legend = 0;
  for (const auto& ser : series) {
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    if (ser.line) {
      std::string pts;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
        pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
      }
      s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
        s += "<circle cx=\"" + num(px(ser.x[i])) + "\" cy=\"" + num(py(ser.y[i])) +
             "\" r=\"2\" fill=\"" + ser.color + "\"/>\n";
      }
    }
    if (!ser.label.empty()) {
      const double ly = top + 14 + 16 * legend++;
      s += "<rect x=\"" + num(left + pw - 150) + "\" y=\"" + num(ly - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + ser.color + "\"/>\n";
      s += "<text x=\"" + num(left + pw - 135) + "\" y=\"" + num(ly) + "\">" + escape(ser.label) +
           "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace locsim
