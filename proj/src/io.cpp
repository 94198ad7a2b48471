#include "softmodes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "softmodes/observables.hpp"

namespace softmodes {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (const std::string& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::runtime_error("CSV row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_pgm(const std::filesystem::path& path, const LatticeField& field, bool binarize,
               const std::string& comment) {
  const int L = field.grid.side();
  const int height = field.grid.dim() == 1 ? 1 : L;
  std::ostringstream out;
  out << "P5\n";
  if (!comment.empty()) out << "# " << comment << '\n';
  out << L << ' ' << height << "\n255\n";
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < L; ++j) {
      const double x = field.grid.dim() == 1 ? field.at(j) : field.at(i, j);
      unsigned char gray;
      if (binarize) {
        gray = x < 0.0 ? 0 : 255;
      } else {
        const long g = std::lround(127.5 * (x + 1.0));
        gray = static_cast<unsigned char>(std::clamp(g, 0L, 255L));
      }
      out.put(static_cast<char>(gray));
    }
  }
  write_text_file(path, out.str());
}

std::string radial_correlation_csv(const RadialCorrelation& corr) {
  std::ostringstream out;
  out << "r,C\n";
  for (std::size_t b = 0; b < corr.radii.size(); ++b)
    out << format_g17(corr.radii[b]) << ',' << format_g17(corr.values[b]) << '\n';
  return out.str();
}

std::string observable_series_csv(const ObservableSeries& series) {
  std::ostringstream out;
  out << "# label = " << series.label << '\n';
  out << "# smoothing_width = " << format_g17(series.smoothing_width) << '\n';
  out << "t,value\n";
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out << format_g17(series.times[i]) << ',' << format_g17(series.values[i]) << '\n';
  return out.str();
}

}  // namespace softmodes
