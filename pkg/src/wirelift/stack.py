"""Metal layer stacks: names, pitches, and routing directions."""

from __future__ import annotations

from dataclasses import dataclass

HORIZONTAL = "H"
VERTICAL = "V"


@dataclass(frozen=True)
class Layer:
    name: str
    pitch_nm: int
    direction: str  # HORIZONTAL or VERTICAL


@dataclass(frozen=True)
class LayerStack:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        pitches = [l.pitch_nm for l in self.layers]
        if any(a > b for a, b in zip(pitches, pitches[1:])):
            raise ValueError("layer pitches must be non-decreasing")
        for i, l in enumerate(self.layers):
            expect = HORIZONTAL if (i + 1) % 2 == 1 else VERTICAL
            if l.direction != expect:
                raise ValueError(f"layer {l.name} must alternate direction ({expect})")

    def __len__(self) -> int:
        return len(self.layers)

    def index(self, name: str) -> int:
        """1-based index of a layer name."""
        for i, l in enumerate(self.layers, start=1):
            if l.name == name:
                return i
        raise KeyError(name)

    def name(self, idx: int) -> str:
        return self.layers[idx - 1].name

    def layer(self, name: str) -> Layer:
        return self.layers[self.index(name) - 1]

    def direction(self, idx: int) -> str:
        return self.layers[idx - 1].direction

    def horizontal(self, idx: int) -> bool:
        return self.direction(idx) == HORIZONTAL

    def to_doc(self) -> list[dict]:
        return [
            {"name": l.name, "pitch_nm": l.pitch_nm, "dir": l.direction}
            for l in self.layers
        ]

    @staticmethod
    def from_doc(doc: list[dict]) -> "LayerStack":
        return LayerStack(
            tuple(Layer(d["name"], d["pitch_nm"], d["dir"]) for d in doc)
        )


def _stack(pitches: list[int]) -> LayerStack:
    layers = tuple(
        Layer(
            name=f"M{i}",
            pitch_nm=p,
            direction=HORIZONTAL if i % 2 == 1 else VERTICAL,
        )
        for i, p in enumerate(pitches, start=1)
    )
    return LayerStack(layers)


def default_stack() -> LayerStack:
    """The 45nm 10-layer pitch stack."""
    return _stack([130, 140, 140, 280, 280, 280, 800, 800, 1600, 1600])


def twelve_layer_stack() -> LayerStack:
    """10-layer stack with two extra 280nm-pitch layers spliced in above M6."""
    return _stack([130, 140, 140, 280, 280, 280, 280, 280, 800, 800, 1600, 1600])


def via_pair_name(below_idx: int) -> str:
    """Name of the via layer between metal `below_idx` and the next one up (V45 style)."""
    return f"V{below_idx}{below_idx + 1}"
