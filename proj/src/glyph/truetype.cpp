// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/glyph/truetype.hpp"

#include <cstdio>

#include "wordcraft/image.hpp"

namespace wordcraft::glyph {

namespace {

constexpr int kMaxCompositeDepth = 8;

// Big-endian reader that turns every out-of-range access into UnsupportedFont.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data, const char* what = "font")
        : data_(data), what_(what) {}

    std::size_t size() const { return data_.size(); }
    std::uint8_t u8(std::size_t at) const {
        need(at, 1);
        return data_[at];
    }
    std::uint16_t u16(std::size_t at) const {
        need(at, 2);
        return static_cast<std::uint16_t>((data_[at] << 8) | data_[at + 1]);
    }
    std::int16_t i16(std::size_t at) const { return static_cast<std::int16_t>(u16(at)); }
    std::uint32_t u32(std::size_t at) const {
        need(at, 4);
        return (static_cast<std::uint32_t>(data_[at]) << 24) | (static_cast<std::uint32_t>(data_[at + 1]) << 16) |
               (static_cast<std::uint32_t>(data_[at + 2]) << 8) | data_[at + 3];
    }
    double f2dot14(std::size_t at) const { return i16(at) / 16384.0; }
    std::span<const std::uint8_t> sub(std::size_t at, std::size_t len) const {
        need(at, len);
        return data_.subspan(at, len);
    }

private:
    void need(std::size_t at, std::size_t n) const {
        if (at > data_.size() || n > data_.size() - at) {
            throw GlyphError(GlyphErrc::UnsupportedFont, std::string("truncated ") + what_ + " data");
        }
    }

    std::span<const std::uint8_t> data_;
    const char* what_;
};

std::string tag_string(std::uint32_t tag) {
    std::string s(4, ' ');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((tag >> (24 - 8 * i)) & 0xFF);
    return s;
}

Point mid(Point a, Point b) { return 0.5 * (a + b); }

}  // namespace

Font::Font(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
    Reader r(bytes_);
    const std::uint32_t version = r.u32(0);
    if (version == 0x4F54544F) {  // 'OTTO'
        throw GlyphError(GlyphErrc::UnsupportedFont, "CFF outlines are not supported");
    }
    if (version == 0x74746366) {  // 'ttcf'
        throw GlyphError(GlyphErrc::UnsupportedFont, "font collections are not supported");
    }
    if (version != 0x00010000 && version != 0x74727565) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "not a TrueType font");
    }
    const std::uint16_t num_tables = r.u16(4);
    for (std::uint16_t i = 0; i < num_tables; ++i) {
        const std::size_t rec = 12 + 16 * static_cast<std::size_t>(i);
        const std::string tag = tag_string(r.u32(rec));
        const std::uint32_t offset = r.u32(rec + 8);
        const std::uint32_t length = r.u32(rec + 12);
        tables_[tag] = r.sub(offset, length);
    }
    for (const char* required : {"cmap", "head", "hhea", "hmtx", "loca", "glyf", "maxp"}) {
        if (!tables_.count(required)) {
            throw GlyphError(GlyphErrc::UnsupportedFont, std::string("missing required table '") + required + "'");
        }
    }

    Reader head(table("head"), "head");
    if (head.u32(12) != 0x5F0F3CF5) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "bad head magic");
    }
    units_per_em_ = head.u16(18);
    if (units_per_em_ < 16 || units_per_em_ > 16384) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "unitsPerEm out of range");
    }
    const std::int16_t loc_format = head.i16(50);
    if (loc_format != 0 && loc_format != 1) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "unknown indexToLocFormat");
    }
    long_loca_ = loc_format == 1;
    num_glyphs_ = Reader(table("maxp"), "maxp").u16(4);
    num_hmetrics_ = Reader(table("hhea"), "hhea").u16(34);
    if (num_hmetrics_ == 0) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "hhea declares no horizontal metrics");
    }
    parse_cmap();
}

Font Font::from_file(const std::filesystem::path& path) { return Font(read_file(path)); }

std::span<const std::uint8_t> Font::table(const char* tag) const { return tables_.at(tag); }

void Font::parse_cmap() {
    Reader cmap(table("cmap"), "cmap");
    const std::uint16_t count = cmap.u16(2);
    // Preference: full-repertoire format 12, then BMP format 4.
    std::size_t best = 0;
    int best_rank = -1;
    for (std::uint16_t i = 0; i < count; ++i) {
        const std::size_t rec = 4 + 8 * static_cast<std::size_t>(i);
        const std::uint16_t platform = cmap.u16(rec);
        const std::uint16_t encoding = cmap.u16(rec + 2);
        const std::uint32_t offset = cmap.u32(rec + 4);
        const std::uint16_t format = cmap.u16(offset);
        const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
        if (!unicode) continue;
        int rank = -1;
        if (format == 12) rank = 2;
        else if (format == 4) rank = 1;
        if (rank > best_rank) {
            best_rank = rank;
            best = offset;
        }
    }
    if (best_rank < 0) {
        throw GlyphError(GlyphErrc::UnsupportedFont, "no Unicode cmap subtable in format 4 or 12");
    }
    if (cmap.u16(best) == 12) {
        const std::uint32_t groups = cmap.u32(best + 12);
        for (std::uint32_t g = 0; g < groups; ++g) {
            const std::size_t at = best + 16 + 12 * static_cast<std::size_t>(g);
            const std::uint32_t start = cmap.u32(at), end = cmap.u32(at + 4), gid = cmap.u32(at + 8);
            if (end < start || end > 0x10FFFF) {
                throw GlyphError(GlyphErrc::UnsupportedFont, "bad cmap group");
            }
            for (std::uint32_t cp = start; cp <= end; ++cp) {
                const std::uint32_t glyph = gid + (cp - start);
                if (glyph != 0 && glyph < num_glyphs_) cmap_[cp] = static_cast<std::uint16_t>(glyph);
            }
        }
        return;
    }
    const std::uint16_t seg_count = cmap.u16(best + 6) / 2;
    const std::size_t ends = best + 14;
    const std::size_t starts = ends + 2 * seg_count + 2;
    const std::size_t deltas = starts + 2 * seg_count;
    const std::size_t range_offsets = deltas + 2 * seg_count;
    for (std::uint16_t s = 0; s < seg_count; ++s) {
        const std::uint16_t end = cmap.u16(ends + 2 * s);
        const std::uint16_t start = cmap.u16(starts + 2 * s);
        const std::uint16_t delta = cmap.u16(deltas + 2 * s);
        const std::uint16_t range = cmap.u16(range_offsets + 2 * s);
        if (start > end) continue;
        for (std::uint32_t cp = start; cp <= end && cp != 0xFFFF; ++cp) {
            std::uint16_t glyph = 0;
            if (range == 0) {
                glyph = static_cast<std::uint16_t>(cp + delta);
            } else {
                const std::size_t at = range_offsets + 2 * s + range + 2 * (cp - start);
                glyph = cmap.u16(at);
                if (glyph != 0) glyph = static_cast<std::uint16_t>(glyph + delta);
            }
            if (glyph != 0 && glyph < num_glyphs_) cmap_[cp] = glyph;
        }
    }
}

bool Font::has_glyph(char32_t codepoint) const { return cmap_.count(codepoint) != 0; }

std::uint16_t Font::glyph_index(char32_t codepoint) const {
    auto it = cmap_.find(codepoint);
    if (it == cmap_.end()) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(codepoint));
        throw GlyphError(GlyphErrc::MissingGlyph, std::string("no glyph mapped for ") + buf);
    }
    return it->second;
}

double Font::advance(std::uint16_t glyph) const {
    Reader hmtx(table("hmtx"), "hmtx");
    const std::uint16_t index = glyph < num_hmetrics_ ? glyph : static_cast<std::uint16_t>(num_hmetrics_ - 1);
    return hmtx.u16(4 * static_cast<std::size_t>(index)) / static_cast<double>(units_per_em_);
}

std::vector<Font::RawContour> Font::glyph_contours(std::uint16_t glyph, int depth) const {
    if (depth > kMaxCompositeDepth) {
        throw GlyphError(GlyphErrc::MalformedOutline, "composite glyph nesting too deep");
    }
    if (glyph >= num_glyphs_) {
        throw GlyphError(GlyphErrc::MalformedOutline, "glyph index out of range");
    }
    Reader loca(table("loca"), "loca");
    std::size_t begin = 0, end = 0;
    if (long_loca_) {
        begin = loca.u32(4 * static_cast<std::size_t>(glyph));
        end = loca.u32(4 * static_cast<std::size_t>(glyph) + 4);
    } else {
        begin = 2 * static_cast<std::size_t>(loca.u16(2 * static_cast<std::size_t>(glyph)));
        end = 2 * static_cast<std::size_t>(loca.u16(2 * static_cast<std::size_t>(glyph) + 2));
    }
    if (end < begin) {
        throw GlyphError(GlyphErrc::MalformedOutline, "loca offsets decrease");
    }
    if (end == begin) return {};  // no outline, e.g. space
    Reader g(Reader(table("glyf"), "glyf").sub(begin, end - begin), "glyf");

    const std::int16_t num_contours = g.i16(0);
    std::vector<RawContour> contours;
    if (num_contours >= 0) {
        std::vector<std::uint16_t> end_points(static_cast<std::size_t>(num_contours));
        for (int c = 0; c < num_contours; ++c) {
            end_points[c] = g.u16(10 + 2 * static_cast<std::size_t>(c));
            if (c > 0 && end_points[c] <= end_points[c - 1]) {
                throw GlyphError(GlyphErrc::MalformedOutline, "contour end points are not increasing");
            }
        }
        const std::size_t num_points = num_contours == 0 ? 0 : static_cast<std::size_t>(end_points.back()) + 1;
        std::size_t at = 10 + 2 * static_cast<std::size_t>(num_contours);
        at += 2 + g.u16(at);  // skip instructions

        std::vector<std::uint8_t> flags;
        flags.reserve(num_points);
        while (flags.size() < num_points) {
            const std::uint8_t f = g.u8(at++);
            flags.push_back(f);
            if (f & 0x08) {
                const std::uint8_t repeat = g.u8(at++);
                for (int k = 0; k < repeat; ++k) flags.push_back(f);
            }
        }
        if (flags.size() != num_points) {
            throw GlyphError(GlyphErrc::MalformedOutline, "flag repeat overruns the point count");
        }
        std::vector<int> xs(num_points), ys(num_points);
        auto read_axis = [&](std::vector<int>& coords, std::uint8_t short_bit, std::uint8_t same_bit) {
            int value = 0;
            for (std::size_t i = 0; i < num_points; ++i) {
                const std::uint8_t f = flags[i];
                if (f & short_bit) {
                    const int d = g.u8(at++);
                    value += (f & same_bit) ? d : -d;
                } else if (!(f & same_bit)) {
                    value += g.i16(at);
                    at += 2;
                }
                coords[i] = value;
            }
        };
        read_axis(xs, 0x02, 0x10);
        read_axis(ys, 0x04, 0x20);

        std::size_t first = 0;
        for (int c = 0; c < num_contours; ++c) {
            RawContour contour;
            for (std::size_t i = first; i <= end_points[c]; ++i) {
                contour.push_back({static_cast<double>(xs[i]), static_cast<double>(ys[i]), (flags[i] & 0x01) != 0});
            }
            first = static_cast<std::size_t>(end_points[c]) + 1;
            contours.push_back(std::move(contour));
        }
        return contours;
    }

    // Composite glyph.
    std::size_t at = 10;
    bool more = true;
    while (more) {
        const std::uint16_t flags = g.u16(at);
        const std::uint16_t component = g.u16(at + 2);
        at += 4;
        double dx = 0.0, dy = 0.0;
        if (!(flags & 0x0002)) {
            throw GlyphError(GlyphErrc::UnsupportedFont, "point-matched composite components are not supported");
        }
        if (flags & 0x0001) {
            dx = g.i16(at);
            dy = g.i16(at + 2);
            at += 4;
        } else {
            dx = static_cast<std::int8_t>(g.u8(at));
            dy = static_cast<std::int8_t>(g.u8(at + 1));
            at += 2;
        }
        Affine m;
        if (flags & 0x0008) {
            m.xx = m.yy = g.f2dot14(at);
            at += 2;
        } else if (flags & 0x0040) {
            m.xx = g.f2dot14(at);
            m.yy = g.f2dot14(at + 2);
            at += 4;
        } else if (flags & 0x0080) {
            m.xx = g.f2dot14(at);
            m.yx = g.f2dot14(at + 2);
            m.xy = g.f2dot14(at + 4);
            m.yy = g.f2dot14(at + 6);
            at += 8;
        }
        if (flags & 0x0800) {  // SCALED_COMPONENT_OFFSET
            const Point offset = m.apply({dx, dy});
            dx = offset.x;
            dy = offset.y;
        }
        m.dx = dx;
        m.dy = dy;
        for (RawContour& contour : glyph_contours(component, depth + 1)) {
            for (RawPoint& p : contour) {
                const Point q = m.apply({p.x, p.y});
                p.x = q.x;
                p.y = q.y;
            }
            contours.push_back(std::move(contour));
        }
        more = (flags & 0x0020) != 0;
    }
    return contours;
}

GlyphOutline Font::load_glyph(char32_t codepoint) const {
    const std::uint16_t glyph = glyph_index(codepoint);
    GlyphOutline outline;
    outline.codepoint = codepoint;
    outline.advance_width = advance(glyph);
    const double scale = 1.0 / units_per_em_;

    for (const RawContour& raw : glyph_contours(glyph, 0)) {
        if (raw.size() < 2) continue;  // a lone point encloses nothing
        std::vector<RawPoint> pts(raw);
        for (RawPoint& p : pts) {
            p.x *= scale;
            p.y *= scale;
        }
        const std::size_t n = pts.size();
        // Pick an on-curve start, or synthesize one between two off-curve points.
        std::size_t first_on = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (pts[i].on_curve) {
                first_on = i;
                break;
            }
        }
        Point start;
        std::size_t begin = 0;
        if (first_on == n) {
            start = mid({pts[n - 1].x, pts[n - 1].y}, {pts[0].x, pts[0].y});
            begin = 0;
        } else {
            start = {pts[first_on].x, pts[first_on].y};
            begin = first_on + 1;
        }

        Contour contour;
        Point current = start;
        bool pending = false;
        Point control;
        for (std::size_t k = 0; k < n - (first_on == n ? 0 : 1); ++k) {
            const RawPoint& rp = pts[(begin + k) % n];
            const Point p{rp.x, rp.y};
            if (rp.on_curve) {
                contour.push_back(pending ? quadratic_to_cubic(current, control, p) : line_to_cubic(current, p));
                current = p;
                pending = false;
            } else if (pending) {
                const Point m = mid(control, p);
                contour.push_back(quadratic_to_cubic(current, control, m));
                current = m;
                control = p;
            } else {
                control = p;
                pending = true;
            }
        }
        if (pending) {
            contour.push_back(quadratic_to_cubic(current, control, start));
        } else if (!(current == start)) {
            contour.push_back(line_to_cubic(current, start));
        }
        if (!contour.empty()) {
            contour.back().p[3] = contour.front().p[0];
            outline.contours.push_back(std::move(contour));
        }
    }
    validate(outline);
    return outline;
}

GlyphOutline load_glyph(std::span<const std::uint8_t> font_bytes, char32_t codepoint) {
    return Font(std::vector<std::uint8_t>(font_bytes.begin(), font_bytes.end())).load_glyph(codepoint);
}

}  // namespace wordcraft::glyph
