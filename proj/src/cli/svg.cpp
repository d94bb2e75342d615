#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "spin7/analysis.hpp"
#include "spin7/cli.hpp"

namespace spin7::cli {

namespace {

constexpr double kSize = 800.0;
constexpr double kMargin = 60.0;
constexpr double kSpan = kSize - 2.0 * kMargin;
constexpr int kCurveSamples = 400;
constexpr std::size_t kMaxTracePoints = 4000;

double px(double X) { return kMargin + kSpan * X; }
double py(double Y) { return kSize - kMargin - kSpan * Y; }

std::string fixed2(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string point(double X, double Y)
{
    return fixed2(px(X)) + "," + fixed2(py(Y));
}

std::string escape(const std::string& s)
{
    std::string r;
    for (char c : s) {
        switch (c) {
        case '&':
            r += "&amp;";
            break;
        case '<':
            r += "&lt;";
            break;
        case '>':
            r += "&gt;";
            break;
        case '"':
            r += "&quot;";
            break;
        default:
            r += c;
        }
    }
    return r;
}

// X on the Q = 0 curve, clamped to the unit square.
double q_zero_x(double Y)
{
    return std::clamp((5.0 * Y * Y - 6.0 * Y + 5.0) / (3.0 * (1.0 + Y)), 0.0, 1.0);
}

// Boundary points (q_zero_x(Y), Y) for Y from y0 to y1.
std::vector<std::array<double, 2>> q_boundary(double y0, double y1)
{
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i <= kCurveSamples; ++i) {
        const double Y = y0 + (y1 - y0) * i / kCurveSamples;
        pts.push_back({q_zero_x(Y), Y});
    }
    return pts;
}

std::string polygon(const std::vector<std::array<double, 2>>& pts, const std::string& region, const char* fill)
{
    std::string s = "<polygon class=\"region\" data-region=\"" + region + "\" fill=\"" + fill + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            s += ' ';
        }
        s += point(pts[i][0], pts[i][1]);
    }
    return s + "\"/>\n";
}

}  // namespace

std::string render_phase_portrait(const std::vector<PlotTrace>& traces, const std::vector<std::string>& metadata)
{
    const double yc = cone::Y_c();
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n"
                      "<metadata>\n";
    for (const std::string& line : metadata) {
        svg += escape(line) + "\n";
    }
    svg += "</metadata>\n<defs><clipPath id=\"square\"><rect x=\"" + fixed2(kMargin) + "\" y=\"" + fixed2(kMargin) +
           "\" width=\"" + fixed2(kSpan) + "\" height=\"" + fixed2(kSpan) + "\"/></clipPath></defs>\n";
    svg += "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";

    // Q > 0 lies left of the curve; D1/D2 above Y_c, D3/D4 below.
    {
        auto upper = q_boundary(yc, 1.0);
        std::vector<std::array<double, 2>> d1{{0.0, yc}};
        d1.insert(d1.end(), upper.begin(), upper.end());
        d1.push_back({0.0, 1.0});
        svg += polygon(d1, "D1", "#ececec");

        std::vector<std::array<double, 2>> d2(upper.begin(), upper.end());
        d2.push_back({1.0, 1.0});
        d2.push_back({1.0, yc});
        svg += polygon(d2, "D2", "#b4b4b4");

        auto lower = q_boundary(0.0, yc);
        std::vector<std::array<double, 2>> d3{{0.0, 0.0}};
        d3.insert(d3.end(), lower.begin(), lower.end());
        d3.push_back({0.0, yc});
        svg += polygon(d3, "D3", "#f8f8f8");

        std::vector<std::array<double, 2>> d4(lower.begin(), lower.end());
        d4.push_back({1.0, yc});
        d4.push_back({1.0, 0.0});
        svg += polygon(d4, "D4", "#8c8c8c");
    }

    svg += "<rect class=\"frame\" x=\"" + fixed2(kMargin) + "\" y=\"" + fixed2(kMargin) + "\" width=\"" + fixed2(kSpan) +
           "\" height=\"" + fixed2(kSpan) + "\" fill=\"none\" stroke=\"black\"/>\n";

    svg += "<polyline class=\"q-curve\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\" points=\"";
    bool first = true;
    for (int i = 0; i <= kCurveSamples; ++i) {
        const double Y = static_cast<double>(i) / kCurveSamples;
        if (q_function(1.0, Y) <= 0.0) {
            svg += (first ? "" : " ") + point(q_zero_x(Y), Y);
            first = false;
        }
    }
    svg += "\"/>\n";
    svg += "<line class=\"yc-line\" x1=\"" + fixed2(px(0.0)) + "\" y1=\"" + fixed2(py(yc)) + "\" x2=\"" + fixed2(px(1.0)) +
           "\" y2=\"" + fixed2(py(yc)) + "\" stroke=\"black\" stroke-dasharray=\"2,3\"/>\n";

    svg += "<g font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">\n";
    svg += "<text x=\"" + fixed2(px(0.3)) + "\" y=\"" + fixed2(py(0.5 * (1.0 + yc))) + "\">D1</text>\n";
    svg += "<text x=\"" + fixed2(px(0.9)) + "\" y=\"" + fixed2(py(0.5 * (1.0 + yc))) + "\">D2</text>\n";
    svg += "<text x=\"" + fixed2(px(0.3)) + "\" y=\"" + fixed2(py(0.5 * yc)) + "\">D3</text>\n";
    svg += "<text x=\"" + fixed2(px(0.92)) + "\" y=\"" + fixed2(py(0.5 * (yc + 0.26))) + "\">D4</text>\n";
    svg += "<text x=\"" + fixed2(px(0.5)) + "\" y=\"" + fixed2(kSize - 20.0) + "\">X</text>\n";
    svg += "<text x=\"20\" y=\"" + fixed2(py(0.5)) + "\">Y</text>\n";
    svg += "<text x=\"" + fixed2(px(0.0)) + "\" y=\"" + fixed2(py(0.0) + 24.0) + "\">0</text>\n";
    svg += "<text x=\"" + fixed2(px(1.0)) + "\" y=\"" + fixed2(py(0.0) + 24.0) + "\">1</text>\n";
    svg += "<text x=\"" + fixed2(px(0.0) - 20.0) + "\" y=\"" + fixed2(py(1.0) + 6.0) + "\">1</text>\n";
    svg += "</g>\n";

    svg += "<g clip-path=\"url(#square)\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
    for (const PlotTrace& trace : traces) {
        const std::size_t stride = std::max<std::size_t>(1, (trace.xy.size() + kMaxTracePoints - 1) / kMaxTracePoints);
        std::string d;
        for (std::size_t i = 0; i < trace.xy.size(); i += stride) {
            d += (d.empty() ? "M" : " L") + point(trace.xy[i][0], trace.xy[i][1]);
        }
        if (!trace.xy.empty() && (trace.xy.size() - 1) % stride != 0) {
            d += " L" + point(trace.xy.back()[0], trace.xy.back()[1]);
        }
        svg += "<path class=\"trajectory\" d=\"" + d + "\"><title>" + escape(trace.label) + "</title></path>\n";
    }
    svg += "</g>\n";

    svg += "<g fill=\"black\">\n";
    for (FixedPointId id : kAllFixedPoints) {
        const Vec3 p = fixed_point_xyz(id);
        svg += "<circle class=\"fixed-point\" cx=\"" + fixed2(px(p[0])) + "\" cy=\"" + fixed2(py(p[1])) +
               "\" r=\"4\"><title>" + fixed_point_name(id) + "</title></circle>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace spin7::cli
