// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/glyph/outline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wordcraft::glyph {

const char* to_string(GlyphErrc code) {
    switch (code) {
    case GlyphErrc::UnsupportedFont: return "UnsupportedFont";
    case GlyphErrc::MissingGlyph: return "MissingGlyph";
    case GlyphErrc::MalformedOutline: return "MalformedOutline";
    case GlyphErrc::InvalidDimensions: return "InvalidDimensions";
    }
    return "GlyphError";
}

GlyphError::GlyphError(GlyphErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void validate(const GlyphOutline& outline) {
    for (std::size_t c = 0; c < outline.contours.size(); ++c) {
        const Contour& contour = outline.contours[c];
        if (contour.empty()) {
            throw GlyphError(GlyphErrc::MalformedOutline, "contour " + std::to_string(c) + " has no segments");
        }
        for (std::size_t s = 0; s < contour.size(); ++s) {
            for (const Point& p : contour[s].p) {
                if (!(p.x >= -0.5 && p.x <= 1.5 && p.y >= -0.5 && p.y <= 1.5)) {
                    throw GlyphError(GlyphErrc::MalformedOutline, "coordinate outside the em guard band in contour " + std::to_string(c));
                }
            }
            const Point next = contour[(s + 1) % contour.size()].start();
            const Point gap = next - contour[s].end();
            if (std::hypot(gap.x, gap.y) > kClosureTolerance) {
                throw GlyphError(GlyphErrc::MalformedOutline, "contour " + std::to_string(c) + " is not closed at segment " + std::to_string(s));
            }
        }
    }
}

CubicSegment quadratic_to_cubic(Point q0, Point q1, Point q2) {
    constexpr double k = 2.0 / 3.0;
    return {{q0, q0 + k * (q1 - q0), q2 + k * (q1 - q2), q2}};
}

CubicSegment line_to_cubic(Point a, Point b) {
    return {{a, a + (1.0 / 3.0) * (b - a), a + (2.0 / 3.0) * (b - a), b}};
}

Point evaluate(const CubicSegment& s, double u) {
    const double v = 1.0 - u;
    const double b0 = v * v * v, b1 = 3.0 * v * v * u, b2 = 3.0 * v * u * u, b3 = u * u * u;
    return {b0 * s.p[0].x + b1 * s.p[1].x + b2 * s.p[2].x + b3 * s.p[3].x,
            b0 * s.p[0].y + b1 * s.p[1].y + b2 * s.p[2].y + b3 * s.p[3].y};
}

GlyphOutline transformed(const GlyphOutline& outline, const Affine& m) {
    GlyphOutline out = outline;
    for (Contour& contour : out.contours) {
        for (CubicSegment& seg : contour) {
            for (Point& p : seg.p) {
                p = m.apply(p);
            }
        }
    }
    // Re-join endpoints so closure survives rounding in the transform.
    for (Contour& contour : out.contours) {
        for (std::size_t s = 0; s < contour.size(); ++s) {
            contour[s].p[3] = contour[(s + 1) % contour.size()].p[0];
        }
    }
    return out;
}

Bounds control_bounds(const GlyphOutline& outline) {
    Bounds b;
    for (const Contour& contour : outline.contours) {
        for (const CubicSegment& seg : contour) {
            for (const Point& p : seg.p) {
                if (b.empty) {
                    b = {p.x, p.y, p.x, p.y, false};
                } else {
                    b.x_min = std::min(b.x_min, p.x);
                    b.y_min = std::min(b.y_min, p.y);
                    b.x_max = std::max(b.x_max, p.x);
                    b.y_max = std::max(b.y_max, p.y);
                }
            }
        }
    }
    return b;
}

double signed_area(const Contour& contour) {
    // Integral of (x dy - y dx)/2 over a cubic in closed form.
    double twice = 0.0;
    for (const CubicSegment& s : contour) {
        const auto& [p0, p1, p2, p3] = s.p;
        auto cross = [](Point a, Point b) { return a.x * b.y - a.y * b.x; };
        twice += (6.0 * cross(p0, p1) + 3.0 * cross(p0, p2) + 1.0 * cross(p0, p3) + 3.0 * cross(p1, p2) +
                  3.0 * cross(p1, p3) + 6.0 * cross(p2, p3)) /
                 10.0;
    }
    return 0.5 * twice;
}

GlyphOutline parse_contour_text(std::string_view text) {
    GlyphOutline outline;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            if (eol == text.size()) break;
            continue;
        }
        Contour contour;
        std::stringstream segments(line);
        std::string piece;
        while (std::getline(segments, piece, ';')) {
            if (piece.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream in(piece);
            std::string tag;
            in >> tag;
            if (tag != "C") {
                throw GlyphError(GlyphErrc::MalformedOutline, "line " + std::to_string(line_no) + ": expected 'C'");
            }
            CubicSegment seg;
            for (Point& p : seg.p) {
                if (!(in >> p.x >> p.y)) {
                    throw GlyphError(GlyphErrc::MalformedOutline, "line " + std::to_string(line_no) + ": expected 8 coordinates");
                }
            }
            std::string extra;
            if (in >> extra) {
                throw GlyphError(GlyphErrc::MalformedOutline, "line " + std::to_string(line_no) + ": trailing data '" + extra + "'");
            }
            contour.push_back(seg);
        }
        if (!contour.empty()) outline.contours.push_back(std::move(contour));
        if (eol == text.size()) break;
    }
    validate(outline);
    return outline;
}

std::string format_contour_text(const GlyphOutline& outline) {
    std::string out;
    char buf[32];
    for (const Contour& contour : outline.contours) {
        for (std::size_t s = 0; s < contour.size(); ++s) {
            out += s == 0 ? "C" : " ; C";
            for (const Point& p : contour[s].p) {
                for (double v : {p.x, p.y}) {
                    // %.17g round-trips doubles exactly.
                    std::snprintf(buf, sizeof(buf), " %.17g", v);
                    out += buf;
                }
            }
        }
        out += '\n';
    }
    return out;
}

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        int extra = 0;
        char32_t cp = 0;
        if (lead < 0x80) {
            cp = lead;
        } else if ((lead & 0xE0) == 0xC0) {
            cp = lead & 0x1F;
            extra = 1;
        } else if ((lead & 0xF0) == 0xE0) {
            cp = lead & 0x0F;
            extra = 2;
        } else if ((lead & 0xF8) == 0xF0) {
            cp = lead & 0x07;
            extra = 3;
        } else {
            throw std::invalid_argument("invalid UTF-8 lead byte");
        }
        if (i + static_cast<std::size_t>(extra) >= text.size()) {
            throw std::invalid_argument("truncated UTF-8 sequence");
        }
        for (int k = 1; k <= extra; ++k) {
            const auto cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) throw std::invalid_argument("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (cont & 0x3F);
        }
        static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw std::invalid_argument("invalid Unicode scalar value");
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

}  // namespace wordcraft::glyph
