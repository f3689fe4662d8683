#pragma once

#include <filesystem>
#include <string>

namespace nlsrm {

enum class PlotKind { lines, histogram_overlay };

PlotKind plot_kind_from_string(const std::string& s);

struct PlotOptions {
    std::string x = "c";       // lines: abscissa column
    std::string y = "gamma2";  // lines: ordinate column, median over trials per (n, x)
    std::filesystem::path out;  // default: the CSV path with .svg
};

/// Renders a sweep CSV as a self-contained SVG with one series per n and a legend.
/// lines: polyline of the per-(n, x) median of y.
/// histogram-overlay: an esd CSV; empirical bars and the QVE density curve.
/// Returns the written path.
std::filesystem::path emit_plot(const std::filesystem::path& csv_path, PlotKind kind, const PlotOptions& opt = {});

}  // namespace nlsrm
