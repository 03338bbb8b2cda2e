#pragma once

// SVG figures: one pane per target showing the chain, the target star and its
// approach arrow; links past the active end-effector are dashed. Output is
// byte-stable for identical input (fixed precision, no timestamps).

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "vinedesign/design.hpp"
#include "vinedesign/io.hpp"

namespace vine {

struct SvgOptions {
    double pane_size = 320.0;  // px, square panes
    double margin = 0.08;      // meters of padding around the drawn content
    double arrow_length = 0.08;
    bool show_nodes = true;
};

inline constexpr std::array<const char*, 10> kLinkPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

namespace detail {

struct Viewport {
    double min_x, min_y, span;  // world square
    double px;                  // pane size

    double sx(double x) const { return (x - min_x) / span * px; }
    double sy(double y) const { return px - (y - min_y) / span * px; }
};

inline Viewport fit_viewport(std::span<const Vec2> points, const SvgOptions& o) {
    double lo_x = 0.0, lo_y = 0.0, hi_x = 0.0, hi_y = 0.0;
    for (const auto& p : points) {
        lo_x = std::min(lo_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_x = std::max(hi_x, p.x());
        hi_y = std::max(hi_y, p.y());
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 0.1}) + 2.0 * o.margin;
    const double cx = 0.5 * (lo_x + hi_x);
    const double cy = 0.5 * (lo_y + hi_y);
    return Viewport{cx - 0.5 * span, cy - 0.5 * span, span, o.pane_size};
}

inline std::string star_points(double cx, double cy, double r) {
    std::string pts;
    for (int k = 0; k < 10; ++k) {
        const double radius = k % 2 == 0 ? r : 0.45 * r;
        const double a = -kPi / 2.0 + k * kPi / 5.0;
        pts += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", cx + radius * std::cos(a),
                           cy + radius * std::sin(a));
    }
    return pts;
}

inline std::string svg_header(double width, double height) {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" "
        "height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n"
        "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"4\" "
        "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"#222\"/></marker></defs>\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n",
        width, height, width, height);
}

}  // namespace detail

/// Renders one pane per target. `active_links` (1-based, may be empty) picks
/// which links are drawn solid.
inline std::string render_svg(const Design& design, std::span<const Configuration> configs,
                              std::span<const Target> targets,
                              std::span<const std::size_t> active_links = {},
                              const SvgOptions& options = {}) {
    if (design.links() == 0) throw ValidationError("cannot render a design with no links", "design");
    if (configs.size() != targets.size())
        throw DimensionError("render_svg: one configuration per target required");

    std::vector<ChainPose> poses;
    std::vector<Vec2> extent;
    for (const auto& c : configs) {
        poses.push_back(forward_kinematics(design, c));
        extent.insert(extent.end(), poses.back().nodes.begin(), poses.back().nodes.end());
    }
    for (const auto& t : targets) extent.push_back(t.position);
    const detail::Viewport vp = detail::fit_viewport(extent, options);
    const double px_per_m = options.pane_size / vp.span;

    const double width = options.pane_size * static_cast<double>(std::max<std::size_t>(1, targets.size()));
    std::string svg = detail::svg_header(width, options.pane_size + 24.0);

    for (std::size_t j = 0; j < targets.size(); ++j) {
        const double ox = options.pane_size * static_cast<double>(j);
        svg += fmt::format("<g class=\"pane\" id=\"pane-{}\" transform=\"translate({:.2f},24)\">\n",
                           j + 1, ox);
        svg += fmt::format(
            "<rect x=\"0\" y=\"0\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
            "stroke=\"#cccccc\"/>\n",
            options.pane_size, options.pane_size);
        svg += fmt::format(
            "<text x=\"{:.2f}\" y=\"-8\" font-family=\"sans-serif\" font-size=\"13\" "
            "text-anchor=\"middle\">Target {}</text>\n",
            options.pane_size / 2.0, j + 1);

        const ChainPose& pose = poses[j];
        const std::size_t active = j < active_links.size() ? active_links[j] : design.links();
        for (std::size_t i = 0; i < design.links(); ++i) {
            const Vec2& a = pose.nodes[i];
            const Vec2& b = pose.nodes[i + 1];
            const bool used = i < active;
            svg += fmt::format(
                "<line class=\"link link-{}{}\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" "
                "y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"4\" stroke-linecap=\"round\"{}/>\n",
                i + 1, used ? "" : " unused", vp.sx(a.x()), vp.sy(a.y()), vp.sx(b.x()),
                vp.sy(b.y()), kLinkPalette[i % kLinkPalette.size()],
                used ? "" : " stroke-dasharray=\"6,5\" stroke-opacity=\"0.6\"");
        }
        if (options.show_nodes)
            for (std::size_t i = 0; i + 1 < pose.nodes.size(); ++i)
                svg += fmt::format("<circle class=\"node\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" "
                                   "fill=\"#222\"/>\n",
                                   vp.sx(pose.nodes[i].x()), vp.sy(pose.nodes[i].y()));

        const Target& t = targets[j];
        const double tx = vp.sx(t.position.x());
        const double ty = vp.sy(t.position.y());
        const double len = options.arrow_length * px_per_m;
        svg += fmt::format(
            "<line class=\"heading\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
            "stroke=\"#222\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n",
            tx, ty, tx + len * std::cos(t.orientation), ty - len * std::sin(t.orientation));
        svg += fmt::format("<polygon class=\"target\" points=\"{}\" fill=\"#ffd700\" "
                           "stroke=\"#222\" stroke-width=\"1\"/>\n",
                           detail::star_points(tx, ty, 9.0));
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string render_svg(const SolutionDocument& doc, const SvgOptions& options = {}) {
    const auto configs = doc.configurations();
    const auto targets = doc.problem.base_frame_targets();
    std::vector<std::size_t> active;
    for (const auto& t : doc.targets) active.push_back(t.active_link);
    return render_svg(doc.design(), configs, targets, active, options);
}

/// Scatter of workspace samples over the (x, y) plane; feasible samples are
/// filled circles, infeasible ones hollow.
inline std::string render_workspace_svg(const WorkspaceResult& result, const Design& design,
                                        const SvgOptions& options = {}) {
    if (design.links() == 0) throw ValidationError("cannot render a design with no links", "design");
    std::vector<Vec2> extent;
    for (const auto& s : result.samples) extent.push_back(s.target.position);
    extent.push_back(Vec2::Zero());
    const detail::Viewport vp = detail::fit_viewport(extent, options);
    std::string svg = detail::svg_header(options.pane_size, options.pane_size + 24.0);
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\" "
        "text-anchor=\"middle\">Workspace: {:.1f}% of {} samples reached</text>\n",
        options.pane_size / 2.0, 100.0 * result.success_rate, result.samples.size());
    svg += "<g transform=\"translate(0,24)\">\n";
    svg += fmt::format("<circle class=\"base\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"#222\"/>\n",
                       vp.sx(0.0), vp.sy(0.0));
    svg += "<g class=\"scatter\">\n";
    for (const auto& s : result.samples)
        svg += fmt::format(
            "<circle class=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" {}/>\n",
            s.feasible ? "feasible" : "infeasible", vp.sx(s.target.position.x()),
            vp.sy(s.target.position.y()),
            s.feasible ? "fill=\"#2ca02c\"" : "fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.8\"");
    svg += "</g>\n</g>\n</svg>\n";
    return svg;
}

}  // namespace vine
