#include "nlsrm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "nlsrm/error.hpp"
#include "nlsrm/table.hpp"

namespace nlsrm {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 64, kRight = 150, kTop = 24, kBottom = 48;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Bounds {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity(), y1 = -std::numeric_limits<double>::infinity();

    void add(double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    void pad() {
        if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
        if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
        const double dy = 0.05 * (y1 - y0);
        if (y0 != 0.0) y0 -= dy;  // keep a zero baseline for densities
        y1 += dy;
    }
};

class Canvas {
public:
    Canvas(Bounds b, std::string xlabel, std::string ylabel) : b_(b), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    double px(double x) const { return kLeft + (x - b_.x0) / (b_.x1 - b_.x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - b_.y0) / (b_.y1 - b_.y0) * (kHeight - kTop - kBottom); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color, double width) {
        std::string d;
        for (const auto& [x, y] : pts) d += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
        body_ += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="{}" points="{}"/>)", color, width, d) + "\n";
    }

    void bar(double x0, double x1, double y, const char* color) {
        const double top = py(y), base = py(std::max(b_.y0, 0.0));
        body_ += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}" fill-opacity="0.35"/>)",
                             px(x0), std::min(top, base), std::abs(px(x1) - px(x0)), std::abs(base - top), color) +
                 "\n";
    }

    void legend(std::size_t slot, const std::string& label, const char* color) {
        const double y = kTop + 14 + 18 * static_cast<double>(slot), x = kWidth - kRight + 12;
        body_ += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", x, y - 4, x + 18, y - 4, color);
        body_ += fmt::format(R"(<text x="{}" y="{}" font-size="12">{}</text>)", x + 24, y, label) + "\n";
    }

    std::string svg() const {
        std::string s = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">)",
                                    kWidth, kHeight) +
                        "\n";
        s += fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", kWidth, kHeight) + "\n";
        const double xa = kLeft, xb = kWidth - kRight, ya = kTop, yb = kHeight - kBottom;
        s += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", xa, ya, xb - xa, yb - ya) + "\n";
        for (int i = 0; i <= 4; ++i) {
            auto tidy = [](double v, double span) { return std::abs(v) < 1e-9 * span ? 0.0 : v; };
            const double xv = tidy(b_.x0 + (b_.x1 - b_.x0) * i / 4.0, b_.x1 - b_.x0);
            const double yv = tidy(b_.y0 + (b_.y1 - b_.y0) * i / 4.0, b_.y1 - b_.y0);
            s += fmt::format(R"(<text x="{:.2f}" y="{}" font-size="11" text-anchor="middle">{:.3g}</text>)", px(xv), yb + 16, xv) + "\n";
            s += fmt::format(R"(<text x="{}" y="{:.2f}" font-size="11" text-anchor="end">{:.3g}</text>)", xa - 6, py(yv) + 4, yv) + "\n";
        }
        s += fmt::format(R"(<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>)", (xa + xb) / 2, kHeight - 10, xlabel_) + "\n";
        s += fmt::format(R"svg(<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>)svg",
                         (ya + yb) / 2, (ya + yb) / 2, ylabel_) +
             "\n";
        return s + body_ + "</svg>\n";
    }

private:
    Bounds b_;
    std::string xlabel_, ylabel_, body_;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string lines_svg(const Table& t, const PlotOptions& opt) {
    std::map<double, std::map<double, std::vector<double>>> groups;  // n -> x -> y values
    const bool has_n = t.has_column("n");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double y = t.number(r, opt.y);
        if (!std::isfinite(y)) continue;
        groups[has_n ? t.number(r, "n") : 0.0][t.number(r, opt.x)].push_back(y);
    }
    if (groups.empty()) throw FormatError("plot: no finite values in column \"" + opt.y + "\"");
    std::vector<Series> series;
    Bounds b;
    for (const auto& [n, by_x] : groups) {
        Series s{has_n ? fmt::format("n = {}", n) : opt.y, {}};
        for (const auto& [x, ys] : by_x) {
            s.points.emplace_back(x, median(ys));
            b.add(x, s.points.back().second);
        }
        series.push_back(std::move(s));
    }
    b.pad();
    Canvas canvas(b, opt.x, "median " + opt.y);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        canvas.polyline(series[i].points, color, 2.0);
        canvas.legend(i, series[i].label, color);
    }
    return canvas.svg();
}

std::string histogram_svg(const Table& t) {
    for (const char* c : {"n", "c", "series", "x", "density"}) (void)t.column(c);
    const auto series_col = t.column("series");
    std::map<std::pair<double, double>, Series> empirical;
    Series qve{"QVE density", {}};
    std::pair<double, double> qve_key{};
    Bounds b;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::pair key{t.number(r, "n"), t.number(r, "c")};
        const double x = t.number(r, "x"), y = t.number(r, "density");
        b.add(x, y);
        b.add(x, 0.0);
        if (t.rows[r][series_col] == "empirical") {
            auto& s = empirical[key];
            if (s.label.empty()) s.label = fmt::format("n = {}, c = {}", key.first, key.second);
            s.points.emplace_back(x, y);
        } else if (t.rows[r][series_col] == "qve") {
            if (qve.points.empty()) qve_key = key;
            if (key == qve_key) qve.points.emplace_back(x, y);
        } else {
            throw FormatError("plot: unknown series \"" + t.rows[r][series_col] + "\"");
        }
    }
    if (empirical.empty()) throw FormatError("plot: no empirical rows");
    b.pad();
    Canvas canvas(b, "eigenvalue", "density");
    std::size_t slot = 0;
    for (const auto& [key, s] : empirical) {
        const char* color = kPalette[slot % std::size(kPalette)];
        const double half = s.points.size() > 1 ? 0.5 * (s.points[1].first - s.points[0].first) : 0.5;
        for (const auto& [x, y] : s.points) canvas.bar(x - half, x + half, y, color);
        canvas.legend(slot++, s.label, color);
    }
    if (!qve.points.empty()) {
        canvas.polyline(qve.points, "black", 1.5);
        canvas.legend(slot, qve.label, "black");
    }
    return canvas.svg();
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
    if (s == "lines") return PlotKind::lines;
    if (s == "histogram-overlay") return PlotKind::histogram_overlay;
    throw ConfigError("unknown plot kind \"" + s + "\" (expected lines or histogram-overlay)");
}

std::filesystem::path emit_plot(const std::filesystem::path& csv_path, PlotKind kind, const PlotOptions& opt) {
    const Table t = read_csv(csv_path);
    const std::string svg = kind == PlotKind::lines ? lines_svg(t, opt) : histogram_svg(t);
    auto out = opt.out;
    if (out.empty()) {
        out = csv_path;
        out.replace_extension(".svg");
    }
    write_text(out, svg);
    return out;
}

}  // namespace nlsrm
