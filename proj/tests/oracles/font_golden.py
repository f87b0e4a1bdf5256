#!/usr/bin/env python3
"""Independent golden data for the glyph loader tests.

Walks TrueType outlines with fontTools (decomposing composites) and prints,
per character: unitsPerEm, advance width, and for each contour the number of
line/quadratic segments and the signed area in font units (positive = CCW).
"""
import sys
from fontTools.ttLib import TTFont
from fontTools.pens.recordingPen import DecomposingRecordingPen
from fontTools.pens.basePen import decomposeQuadraticSegment


def contours_of(font, ch):
    gs = font.getGlyphSet()
    name = font.getBestCmap()[ord(ch)]
    pen = DecomposingRecordingPen(gs)
    gs[name].draw(pen)
    out, cur, start, segs, area = [], None, None, 0, 0.0
    for op, args in pen.value:
        if op == "moveTo":
            start = cur = args[0]
            segs, area = 0, 0.0
        elif op == "lineTo":
            p = args[0]
            area += (cur[0] * p[1] - p[0] * cur[1]) / 2
            cur, segs = p, segs + 1
        elif op == "qCurveTo":
            if args[-1] is None:
                raise SystemExit("implicit-start contours not expected")
            for q1, q2 in decomposeQuadraticSegment(args):
                # exact signed area of a quadratic segment (Green's theorem)
                x0, y0 = cur
                x1, y1 = q1
                x2, y2 = q2
                area += (2 * (x0 * y1 - x1 * y0) + 2 * (x1 * y2 - x2 * y1) + (x0 * y2 - x2 * y0)) / 6
                cur, segs = q2, segs + 1
        elif op in ("closePath", "endPath"):
            if cur != start:
                area += (cur[0] * start[1] - start[0] * cur[1]) / 2
                segs += 1
            out.append((segs, area))
    return name, out


def main():
    font = TTFont(sys.argv[1])
    upem = font["head"].unitsPerEm
    for ch in sys.argv[2]:
        name, cs = contours_of(font, ch)
        adv = font["hmtx"][name][0]
        print(f"U+{ord(ch):04X} upem={upem} advance={adv} contours={len(cs)}")
        for segs, area in cs:
            print(f"  segments={segs} area={area:.1f}")


if __name__ == "__main__":
    main()
