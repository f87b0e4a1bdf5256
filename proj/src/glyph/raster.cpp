// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/glyph/raster.hpp"

#include <algorithm>
#include <cmath>

namespace wordcraft::glyph {

namespace {

constexpr int kMaxSubdivision = 16;

double distance_to_line(Point p, Point a, Point b) {
    const Point d = b - a;
    const double len = std::hypot(d.x, d.y);
    if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    return std::abs(d.x * (p.y - a.y) - d.y * (p.x - a.x)) / len;
}

void flatten_recursive(const CubicSegment& s, double tolerance, int depth, std::vector<Point>& out) {
    // The curve lies in the hull of its control points, so bounding the control
    // points' distance from the chord bounds the curve's deviation.
    const double dev = std::max(distance_to_line(s.p[1], s.p[0], s.p[3]), distance_to_line(s.p[2], s.p[0], s.p[3]));
    if (dev <= tolerance || depth >= kMaxSubdivision) {
        out.push_back(s.p[3]);
        return;
    }
    const Point p01 = 0.5 * (s.p[0] + s.p[1]);
    const Point p12 = 0.5 * (s.p[1] + s.p[2]);
    const Point p23 = 0.5 * (s.p[2] + s.p[3]);
    const Point p012 = 0.5 * (p01 + p12);
    const Point p123 = 0.5 * (p12 + p23);
    const Point m = 0.5 * (p012 + p123);
    flatten_recursive({{s.p[0], p01, p012, m}}, tolerance, depth + 1, out);
    flatten_recursive({{m, p123, p23, s.p[3]}}, tolerance, depth + 1, out);
}

struct Edge {
    double x0, y0, x1, y1;
    int winding;
};

}  // namespace

void flatten(const CubicSegment& segment, double tolerance, std::vector<Point>& out) {
    flatten_recursive(segment, tolerance, 0, out);
}

Image rasterize(const GlyphOutline& outline, int width, int height, int supersample) {
    if (width <= 0 || height <= 0) {
        throw GlyphError(GlyphErrc::InvalidDimensions, "canvas must be at least 1x1");
    }
    if (supersample < 1) {
        throw GlyphError(GlyphErrc::InvalidDimensions, "supersample must be >= 1");
    }
    Image coverage(width, height, 1);
    const int sw = width * supersample;
    const int sh = height * supersample;

    // Build edges in subpixel space.
    std::vector<Edge> edges;
    std::vector<Point> poly;
    auto to_sub = [&](Point p) { return Point{p.x * sw, (1.0 - p.y) * sh}; };
    for (const Contour& contour : outline.contours) {
        if (contour.empty()) continue;
        poly.clear();
        poly.push_back(to_sub(contour.front().start()));
        for (const CubicSegment& seg : contour) {
            CubicSegment s{{to_sub(seg.p[0]), to_sub(seg.p[1]), to_sub(seg.p[2]), to_sub(seg.p[3])}};
            flatten(s, kFlatteningTolerance, poly);
        }
        poly.back() = poly.front();
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
            const Point a = poly[i], b = poly[i + 1];
            if (a.y == b.y) continue;
            // Downward in canvas space is upward in the y-up outline frame.
            edges.push_back(a.y < b.y ? Edge{a.x, a.y, b.x, b.y, -1} : Edge{b.x, b.y, a.x, a.y, +1});
        }
    }
    if (edges.empty()) return coverage;

    std::vector<int> hits(static_cast<std::size_t>(width));
    std::vector<std::pair<double, int>> crossings;
    const float weight = 1.0f / static_cast<float>(supersample * supersample);
    for (int py = 0; py < height; ++py) {
        std::fill(hits.begin(), hits.end(), 0);
        for (int sy = 0; sy < supersample; ++sy) {
            const double yc = py * supersample + sy + 0.5;
            crossings.clear();
            for (const Edge& e : edges) {
                if (yc < e.y0 || yc >= e.y1) continue;
                const double t = (yc - e.y0) / (e.y1 - e.y0);
                crossings.emplace_back(e.x0 + t * (e.x1 - e.x0), e.winding);
            }
            if (crossings.empty()) continue;
            std::sort(crossings.begin(), crossings.end());
            int winding = 0;
            for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
                winding += crossings[i].second;
                if (winding == 0) continue;
                // Fill sample columns whose centers lie in [x_a, x_b).
                const double xa = crossings[i].first, xb = crossings[i + 1].first;
                int first = static_cast<int>(std::ceil(xa - 0.5));
                int last = static_cast<int>(std::ceil(xb - 0.5)) - 1;
                first = std::max(first, 0);
                last = std::min(last, sw - 1);
                for (int sx = first; sx <= last; ++sx) {
                    ++hits[static_cast<std::size_t>(sx / supersample)];
                }
            }
        }
        for (int px = 0; px < width; ++px) {
            coverage.at(px, py) = std::min(1.0f, static_cast<float>(hits[static_cast<std::size_t>(px)]) * weight);
        }
    }
    return coverage;
}

GlyphOutline layout_word(std::span<const GlyphOutline> glyphs) {
    GlyphOutline word;
    double pen = 0.0;
    for (const GlyphOutline& g : glyphs) {
        GlyphOutline placed = transformed(g, Affine::translate(pen, 0.0));
        for (Contour& c : placed.contours) word.contours.push_back(std::move(c));
        pen += g.advance_width;
    }
    word.advance_width = pen;
    word.codepoint = glyphs.size() == 1 ? glyphs.front().codepoint : 0;
    return word;
}

Affine fit_transform(const Bounds& ink, int width, int height, int margin) {
    if (width <= 0 || height <= 0 || margin < 0 || 2 * margin >= width || 2 * margin >= height) {
        throw GlyphError(GlyphErrc::InvalidDimensions, "canvas minus margin must be non-empty");
    }
    if (ink.empty) return {};
    const double avail_w = width - 2.0 * margin;
    const double avail_h = height - 2.0 * margin;
    const double bw = std::max(ink.width(), 1e-12);
    const double bh = std::max(ink.height(), 1e-12);
    const double s = std::min(avail_w / bw, avail_h / bh);  // pixels per em
    const double pad_x = margin + 0.5 * (avail_w - ink.width() * s);
    const double pad_y = margin + 0.5 * (avail_h - ink.height() * s);
    // pixel x = pad_x + (x - x_min) s; pixel row from top = pad_y + (y_max - y) s.
    // Normalized: nx = px / width, ny = 1 - row / height.
    Affine m;
    m.xx = s / width;
    m.dx = (pad_x - ink.x_min * s) / width;
    m.yy = s / height;
    m.dy = 1.0 - (pad_y + ink.y_max * s) / height;
    return m;
}

Image compose_word(std::span<const GlyphOutline> glyphs, int width, int height, int margin, int supersample) {
    if (glyphs.empty()) {
        throw GlyphError(GlyphErrc::InvalidDimensions, "compose_word needs at least one glyph");
    }
    const GlyphOutline word = layout_word(glyphs);
    const Affine fit = fit_transform(control_bounds(word), width, height, margin);
    return rasterize(transformed(word, fit), width, height, supersample);
}

}  // namespace wordcraft::glyph
