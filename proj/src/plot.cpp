#include "genbound/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace genbound {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 150.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 52.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

struct Point {
    double x, y;
};

struct Series {
    std::string label;
    std::vector<Point> points;
    std::vector<Point> median;
    std::vector<Point> bound;
};

// Decade-aligned log range covering every positive value.
struct LogAxis {
    double lo_exp = 0.0;
    double hi_exp = 1.0;

    static LogAxis fit(const std::vector<double>& values) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (double v : values) {
            if (v > 0.0 && std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        LogAxis a;
        if (hi > 0.0) {
            a.lo_exp = std::floor(std::log10(lo));
            a.hi_exp = std::ceil(std::log10(hi));
            if (a.hi_exp <= a.lo_exp) a.hi_exp = a.lo_exp + 1.0;
        }
        return a;
    }

    // Position in [0, 1]; non-positive values sit on the lower edge.
    double unit(double v) const {
        if (!(v > 0.0)) return 0.0;
        return (std::log10(v) - lo_exp) / (hi_exp - lo_exp);
    }
};

class Canvas {
public:
    Canvas(const std::string& title, const std::string& xlabel, const std::string& ylabel,
           LogAxis x, LogAxis y)
        : x_(x), y_(y) {
        out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
        out_ += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                "\" fill=\"white\"/>\n";
        out_ += "<text class=\"title\" x=\"" + num(kLeft) + "\" y=\"22\" font-size=\"14\">" +
                escape(title) + "</text>\n";
        axes(xlabel, ylabel);
    }

    double px(double v) const { return kLeft + x_.unit(v) * (kWidth - kLeft - kRight); }
    double py(double v) const { return kHeight - kBottom - y_.unit(v) * (kHeight - kTop - kBottom); }

    void points(const std::vector<Point>& pts, const char* color) {
        for (const Point& p : pts)
            out_ += "<circle class=\"point\" cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) +
                    "\" r=\"2.5\" fill=\"" + color + "\" fill-opacity=\"0.5\"/>\n";
    }

    void line(const std::vector<Point>& pts, const char* cls, const char* color, bool dashed) {
        out_ += std::string("<polyline class=\"") + cls + "\" fill=\"none\" stroke=\"" + color +
                "\" stroke-width=\"1.8\"" + (dashed ? " stroke-dasharray=\"6 4\"" : "") +
                " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out_ += ' ';
            out_ += num(px(pts[i].x)) + "," + num(py(pts[i].y));
        }
        out_ += "\"/>\n";
    }

    void legend(std::size_t row, const std::string& label, const char* color) {
        const double y = kTop + 14.0 + 16.0 * static_cast<double>(row);
        const double x = kWidth - kRight + 12.0;
        out_ += "<rect class=\"legend\" x=\"" + num(x) + "\" y=\"" + num(y - 8.0) +
                "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
        out_ += "<text x=\"" + num(x + 14.0) + "\" y=\"" + num(y + 1.0) + "\" font-size=\"11\">" +
                escape(label) + "</text>\n";
    }

    std::string finish() {
        out_ += "</svg>\n";
        return out_;
    }

private:
    void axes(const std::string& xlabel, const std::string& ylabel) {
        const double x0 = kLeft, x1 = kWidth - kRight;
        const double y0 = kHeight - kBottom, y1 = kTop;
        out_ += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
        out_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
                num(y0) + "\"/>\n";
        out_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
                num(y1) + "\"/>\n";
        out_ += "</g>\n";
        for (double e = x_.lo_exp; e <= x_.hi_exp; e += 1.0) {
            const double x = px(std::pow(10.0, e));
            out_ += "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" +
                    num(x) + "\" y2=\"" + num(y0 + 5.0) + "\" stroke=\"black\"/>\n";
            out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y0 + 18.0) +
                    "\" font-size=\"11\" text-anchor=\"middle\">1e" + std::to_string(int(e)) +
                    "</text>\n";
        }
        for (double e = y_.lo_exp; e <= y_.hi_exp; e += 1.0) {
            const double y = py(std::pow(10.0, e));
            out_ += "<line class=\"tick\" x1=\"" + num(x0 - 5.0) + "\" y1=\"" + num(y) + "\" x2=\"" +
                    num(x0) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
            out_ += "<text x=\"" + num(x0 - 8.0) + "\" y=\"" + num(y + 4.0) +
                    "\" font-size=\"11\" text-anchor=\"end\">1e" + std::to_string(int(e)) +
                    "</text>\n";
        }
        out_ += "<text class=\"xlabel\" x=\"" + num((x0 + x1) / 2.0) + "\" y=\"" +
                num(kHeight - 12.0) + "\" font-size=\"12\" text-anchor=\"middle\">" +
                escape(xlabel) + "</text>\n";
        out_ += "<text class=\"ylabel\" x=\"16\" y=\"" + num((y0 + y1) / 2.0) +
                "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
                num((y0 + y1) / 2.0) + ")\">" + escape(ylabel) + "</text>\n";
    }

    LogAxis x_, y_;
    std::string out_;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Per distinct x (ascending), the median of ys.
std::vector<Point> medians(const std::vector<Point>& pts) {
    std::map<double, std::vector<double>> by_x;
    for (const Point& p : pts) by_x[p.x].push_back(p.y);
    std::vector<Point> out;
    for (const auto& [x, ys] : by_x) out.push_back({x, median(ys)});
    return out;
}

// Rows grouped by the joined values of key columns, groups ordered by key.
std::map<std::string, std::vector<std::size_t>> group_rows(const CsvTable& t,
                                                           const std::vector<std::string>& keys) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::string label;
        for (const std::string& k : keys) {
            if (!label.empty()) label += ", ";
            label += k + "=" + t.cell(r, k);
        }
        groups[label].push_back(r);
    }
    return groups;
}

std::string render_series(const std::vector<Series>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Point>& diagonal_extent) {
    std::vector<double> xs, ys;
    for (const Series& s : series) {
        for (const auto* set : {&s.points, &s.median, &s.bound})
            for (const Point& p : *set) {
                xs.push_back(p.x);
                ys.push_back(p.y);
            }
    }
    for (const Point& p : diagonal_extent) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    Canvas c(title, xlabel, ylabel, LogAxis::fit(xs), LogAxis::fit(ys));
    if (!diagonal_extent.empty()) c.line(diagonal_extent, "bound", "#555555", true);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        const Series& s = series[i];
        c.points(s.points, color);
        if (!s.median.empty()) c.line(s.median, "median", color, false);
        if (!s.bound.empty()) c.line(s.bound, "bound", color, true);
        c.legend(i, s.label, color);
    }
    return c.finish();
}

} // namespace

PlotKind parse_plot_kind(const std::string& s) {
    if (s == "gap_vs_n") return PlotKind::gap_vs_n;
    if (s == "bound_vs_empirical") return PlotKind::bound_vs_empirical;
    if (s == "complexity_vs_n") return PlotKind::complexity_vs_n;
    throw ContractError("unknown plot kind '" + s +
                        "' (expected gap_vs_n, bound_vs_empirical or complexity_vs_n)");
}

std::string to_string(PlotKind kind) {
    switch (kind) {
    case PlotKind::gap_vs_n:
        return "gap_vs_n";
    case PlotKind::bound_vs_empirical:
        return "bound_vs_empirical";
    case PlotKind::complexity_vs_n:
        return "complexity_vs_n";
    }
    return "?";
}

std::vector<std::string> plot_required_columns(PlotKind kind) {
    switch (kind) {
    case PlotKind::gap_vs_n:
        return {"n", "lambda", "gap", "bound_conservative"};
    case PlotKind::bound_vs_empirical:
        return {"lambda", "gap", "bound_conservative"};
    case PlotKind::complexity_vs_n:
        return {"n", "V", "width", "grid_levels", "mode", "estimate", "massart_bound"};
    }
    return {};
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

} // namespace

SchemaError::SchemaError(std::vector<std::string> missing)
    : InputError("csv is missing required columns: " + join(missing)), missing_(std::move(missing)) {}

std::string render_plot(const CsvTable& t, PlotKind kind) {
    const auto missing = t.missing(plot_required_columns(kind));
    if (!missing.empty()) throw SchemaError(missing);

    std::vector<Series> series;
    switch (kind) {
    case PlotKind::gap_vs_n: {
        for (const auto& [label, rows] : group_rows(t, {"lambda"})) {
            Series s{label, {}, {}, {}};
            std::vector<Point> bound;
            for (std::size_t r : rows) {
                s.points.push_back({t.real(r, "n"), std::abs(t.real(r, "gap"))});
                bound.push_back({t.real(r, "n"), t.real(r, "bound_conservative")});
            }
            s.median = medians(s.points);
            s.bound = medians(bound);
            series.push_back(std::move(s));
        }
        return render_series(series, "generalization gap vs sample size", "n", "|gap|", {});
    }
    case PlotKind::bound_vs_empirical: {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& [label, rows] : group_rows(t, {"lambda"})) {
            Series s{label, {}, {}, {}};
            for (std::size_t r : rows) {
                const double b = t.real(r, "bound_conservative");
                s.points.push_back({b, std::abs(t.real(r, "gap"))});
                if (b > 0.0) {
                    lo = std::min(lo, b);
                    hi = std::max(hi, b);
                }
            }
            series.push_back(std::move(s));
        }
        std::vector<Point> diagonal;
        if (hi > 0.0) diagonal = {{lo, lo}, {hi, hi}};
        return render_series(series, "measured gap vs conservative bound", "bound_conservative",
                             "|gap|", diagonal);
    }
    case PlotKind::complexity_vs_n: {
        for (const auto& [label, rows] : group_rows(t, {"mode", "V", "width", "grid_levels"})) {
            Series s{label, {}, {}, {}};
            std::vector<Point> bound;
            for (std::size_t r : rows) {
                s.points.push_back({t.real(r, "n"), t.real(r, "estimate")});
                bound.push_back({t.real(r, "n"), t.real(r, "massart_bound")});
            }
            s.median = medians(s.points);
            s.bound = medians(bound);
            series.push_back(std::move(s));
        }
        return render_series(series, "empirical Rademacher complexity vs sample size", "n",
                             "estimate", {});
    }
    }
    return {};
}

void plot_csv(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out) {
    const CsvTable t = read_csv(csv);
    const std::string svg = render_plot(t, kind);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.string());
    f << svg;
    if (!f) throw std::runtime_error("failed writing " + out.string());
}

} // namespace genbound
