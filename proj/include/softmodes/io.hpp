#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softmodes/lattice.hpp"

namespace softmodes {

/// 17-significant-digit decimal rendering used by every CSV artifact.
std::string format_g17(double v);

/// CSV with '#'-prefixed comment lines before the column header.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Binary P5 snapshot. gray = clamp(round(127.5*(x+1)), 0, 255); the binarized
/// variant maps sign(x) in {-1, +1} to {0, 255}.
void write_pgm(const std::filesystem::path& path, const LatticeField& field, bool binarize,
               const std::string& comment);

/// `r,C` table at 17 significant digits.
std::string radial_correlation_csv(const RadialCorrelation& corr);

struct ObservableSeries;  // observables.hpp

/// `t,value` table with the label and smoothing width in a '#' header.
std::string observable_series_csv(const ObservableSeries& series);

}  // namespace softmodes
