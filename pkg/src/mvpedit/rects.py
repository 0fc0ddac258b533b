"""Axis-aligned float rectangles, (x0, y0) inclusive-min / (x1, y1) max edges."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    @property
    def area(self) -> float:
        return max(self.width, 0.0) * max(self.height, 0.0)

    def is_degenerate(self) -> bool:
        return self.width <= 0.0 or self.height <= 0.0

    def intersect(self, other: "Rect") -> "Rect":
        return Rect(max(self.x0, other.x0), max(self.y0, other.y0),
                    min(self.x1, other.x1), min(self.y1, other.y1))

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.x0, other.x0), min(self.y0, other.y0),
                    max(self.x1, other.x1), max(self.y1, other.y1))

    def overlaps(self, other: "Rect") -> bool:
        hit = self.intersect(other)
        return hit.width > 0.0 and hit.height > 0.0

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def from_center(self, width: float, height: float) -> "Rect":
        cx, cy = self.center
        return Rect(cx - 0.5 * width, cy - 0.5 * height,
                    cx + 0.5 * width, cy + 0.5 * height)
