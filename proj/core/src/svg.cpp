#include "ltsa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ltsa::svg {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 600;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

// Blue-to-red ramp for t in [0,1].
std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double hue = 240.0 * (1.0 - t);  // degrees
    const double s = 0.85, v = 0.85;
    const double c = v * s;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else             { r = x; b = c; }  // hue <= 240 here
    const double mm = v - c;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround((r + mm) * 255)),
                  static_cast<int>(std::lround((g + mm) * 255)),
                  static_cast<int>(std::lround((b + mm) * 255)));
    return buf;
}

const char* palette(int label) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    const int n = static_cast<int>(sizeof(colors) / sizeof(colors[0]));
    int idx = label % n;
    if (idx < 0) idx += n;
    return colors[idx];
}

struct AxisScale {
    double lo, hi;      // data range (padded)
    double tick_step;
    double tick_start;
};

AxisScale make_scale(const Vector& v) {
    double lo = v.minCoeff(), hi = v.maxCoeff();
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double raw_step = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
    const double frac = raw_step / mag;
    const double nice = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
    AxisScale s;
    s.lo = lo;
    s.hi = hi;
    s.tick_step = nice * mag;
    s.tick_start = std::ceil(lo / s.tick_step) * s.tick_step;
    return s;
}

}  // namespace

std::string render_scatter(const ScatterSpec& spec) {
    if (spec.x.size() != spec.y.size())
        throw InvalidArgument("render_scatter: x and y sizes differ");
    if (spec.x.size() == 0) throw InvalidArgument("render_scatter: empty input");
    if (spec.color_by.size() != 0 && spec.color_by.size() != spec.x.size())
        throw InvalidArgument("render_scatter: color_by size mismatch");
    if (!spec.labels.empty() && static_cast<Index>(spec.labels.size()) != spec.x.size())
        throw InvalidArgument("render_scatter: labels size mismatch");

    const AxisScale xs = make_scale(spec.x);
    const AxisScale ys = make_scale(spec.y);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double v) { return kMarginLeft + plot_w * (v - xs.lo) / (xs.hi - xs.lo); };
    auto py = [&](double v) { return kMarginTop + plot_h * (ys.hi - v) / (ys.hi - ys.lo); };

    double cmin = 0.0, cmax = 1.0;
    if (spec.color_by.size() > 0) {
        cmin = spec.color_by.minCoeff();
        cmax = spec.color_by.maxCoeff();
        if (!(cmax > cmin)) cmax = cmin + 1.0;
    }

    std::string out;
    out.reserve(1024 + 80 * static_cast<std::size_t>(spec.x.size()));
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    out += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + spec.title + "</text>\n";

    // Frame.
    out += "<rect x=\"" + fmt("%.2f", kMarginLeft) + "\" y=\"" + fmt("%.2f", kMarginTop) +
           "\" width=\"" + fmt("%.2f", plot_w) + "\" height=\"" + fmt("%.2f", plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks and labels.
    for (double t = xs.tick_start; t <= xs.hi + 1e-12 * xs.tick_step; t += xs.tick_step) {
        const double x = px(t);
        out += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", kMarginTop + plot_h) +
               "\" x2=\"" + fmt("%.2f", x) + "\" y2=\"" +
               fmt("%.2f", kMarginTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", kMarginTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt("%g", t == 0.0 ? 0.0 : t) + "</text>\n";
    }
    for (double t = ys.tick_start; t <= ys.hi + 1e-12 * ys.tick_step; t += ys.tick_step) {
        const double y = py(t);
        out += "<line x1=\"" + fmt("%.2f", kMarginLeft - 5) + "\" y1=\"" + fmt("%.2f", y) +
               "\" x2=\"" + fmt("%.2f", kMarginLeft) + "\" y2=\"" + fmt("%.2f", y) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt("%.2f", kMarginLeft - 8) + "\" y=\"" + fmt("%.2f", y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt("%g", t == 0.0 ? 0.0 : t) + "</text>\n";
    }
    out += "<text x=\"" + fmt("%.2f", kMarginLeft + plot_w / 2) + "\" y=\"" +
           fmt("%.2f", kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           spec.x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt("%.2f", kMarginTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + fmt("%.2f", kMarginTop + plot_h / 2) + ")\">" +
           spec.y_label + "</text>\n";

    for (Index i = 0; i < spec.x.size(); ++i) {
        std::string color = "#1f77b4";
        if (!spec.labels.empty())
            color = palette(spec.labels[static_cast<std::size_t>(i)]);
        else if (spec.color_by.size() > 0)
            color = ramp_color((spec.color_by[i] - cmin) / (cmax - cmin));
        out += "<circle cx=\"" + fmt("%.2f", px(spec.x[i])) + "\" cy=\"" +
               fmt("%.2f", py(spec.y[i])) + "\" r=\"" + fmt("%g", spec.point_radius) +
               "\" fill=\"" + color + "\" fill-opacity=\"0.8\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_scatter(const std::string& path, const ScatterSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    const std::string bytes = render_scatter(spec);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ltsa::svg
