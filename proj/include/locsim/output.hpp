#pragma once

#include <string>
#include <vector>

namespace locsim {

/// Write via a temporary file in the same directory followed by rename.
void write_atomic(const std::string& path, const std::string& content);

/// Scientific notation with 17 significant digits.
std::string csv_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<std::string>& cells);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f4e9c";
  /// Polyline when true, dots otherwise.
  bool line = true;
  std::string label;
};

/// Bare-bones 2-D plot: framed axes, tick labels, a legend and the given series.
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  /// Optional shaded x- or y-bands (lo, hi) with a fill colour.
  struct Band {
    double lo;
    double hi;
    bool vertical;
    std::string fill;
  };
  std::vector<Band> bands;

  std::string render(int width = 720, int height = 480) const;
};

}  // namespace locsim
