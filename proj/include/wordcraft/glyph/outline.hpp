// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wordcraft::glyph {

enum class GlyphErrc {
    UnsupportedFont,
    MissingGlyph,
    MalformedOutline,
    InvalidDimensions,
};

const char* to_string(GlyphErrc code);

class GlyphError : public std::runtime_error {
public:
    GlyphError(GlyphErrc code, const std::string& what);
    GlyphErrc code() const noexcept { return code_; }

private:
    GlyphErrc code_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    bool operator==(const Point&) const = default;
};

struct CubicSegment {
    std::array<Point, 4> p;

    Point start() const { return p[0]; }
    Point end() const { return p[3]; }
    bool operator==(const CubicSegment&) const = default;
};

using Contour = std::vector<CubicSegment>;

/// Closed cubic contours in em-normalized units (y up, baseline at 0).
struct GlyphOutline {
    std::vector<Contour> contours;
    double advance_width = 0.0;
    char32_t codepoint = 0;

    bool empty() const { return contours.empty(); }
    bool operator==(const GlyphOutline&) const = default;
};

/// Maximum distance allowed between a contour's end and start point.
inline constexpr double kClosureTolerance = 1e-9;

/// Throws MalformedOutline when a contour is open or a coordinate falls outside
/// the [-0.5, 1.5] em guard band.
void validate(const GlyphOutline& outline);

/// Exact degree elevation; the cubic traces the same curve as the quadratic.
CubicSegment quadratic_to_cubic(Point q0, Point q1, Point q2);
CubicSegment line_to_cubic(Point a, Point b);

Point evaluate(const CubicSegment& segment, double u);

struct Affine {
    double xx = 1.0, xy = 0.0, yx = 0.0, yy = 1.0, dx = 0.0, dy = 0.0;

    Point apply(Point p) const { return {xx * p.x + xy * p.y + dx, yx * p.x + yy * p.y + dy}; }
    static Affine translate(double tx, double ty) { return {1.0, 0.0, 0.0, 1.0, tx, ty}; }
    static Affine scale(double sx, double sy) { return {sx, 0.0, 0.0, sy, 0.0, 0.0}; }
};

GlyphOutline transformed(const GlyphOutline& outline, const Affine& m);

struct Bounds {
    double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
    bool empty = true;

    double width() const { return empty ? 0.0 : x_max - x_min; }
    double height() const { return empty ? 0.0 : y_max - y_min; }
};

/// Bounding box of all control points, which contains the curves.
Bounds control_bounds(const GlyphOutline& outline);

/// Signed area by Green's theorem, exact for cubic segments. Positive for
/// counter-clockwise contours in a y-up frame.
double signed_area(const Contour& contour);

/// Plain-text contour exchange format: one contour per line,
/// `C x0 y0 x1 y1 x2 y2 x3 y3 ; C ...`.
GlyphOutline parse_contour_text(std::string_view text);
std::string format_contour_text(const GlyphOutline& outline);

/// Decodes UTF-8 into Unicode scalar values; throws std::invalid_argument on bad input.
std::u32string decode_utf8(std::string_view text);

}  // namespace wordcraft::glyph
