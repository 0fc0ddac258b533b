"""Clothing attribute token: the generator-facing stand-in for text prompts.

The prompt template is fixed; only the two color words vary. Colors are
categorical, drawn from a configurable palette of named RGB values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PROMPT_TEMPLATE = "a pedestrian wearing a {top} top and {pants} pants"

DEFAULT_PALETTE: dict[str, tuple[int, int, int]] = {
    "white": (255, 255, 255),
    "black": (0, 0, 0),
    "red": (220, 40, 40),
    "green": (40, 170, 60),
    "blue": (50, 90, 220),
    "yellow": (235, 220, 50),
    "orange": (245, 140, 30),
    "purple": (140, 60, 190),
    "gray": (128, 128, 128),
}

SKIN_TONE = (224, 172, 138)


@dataclass(frozen=True)
class AttributeToken:
    top_color: str
    pants_color: str
    palette: dict[str, tuple[int, int, int]] = field(
        default_factory=lambda: dict(DEFAULT_PALETTE), compare=False)

    def __post_init__(self):
        for name in (self.top_color, self.pants_color):
            if name not in self.palette:
                raise ValueError(
                    f"color {name!r} not in palette {sorted(self.palette)}")

    @property
    def top_rgb(self) -> tuple[int, int, int]:
        return self.palette[self.top_color]

    @property
    def pants_rgb(self) -> tuple[int, int, int]:
        return self.palette[self.pants_color]

    def prompt(self) -> str:
        return PROMPT_TEMPLATE.format(top=self.top_color, pants=self.pants_color)
