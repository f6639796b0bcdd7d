"""Ready-made domain descriptors used in tests and as CLI starting points.

Each helper returns JSON-serializable curve descriptors, so the same data
drives both the library entry points and the command line.
"""

import numpy as np


def disk(center=0.0, radius=1.0):
    center = complex(center)
    return {"family": "circle",
            "params": {"center": {"re": center.real, "im": center.imag},
                       "radius": float(radius)}}


def ellipse(center=0.0, a=2.0, b=1.0):
    center = complex(center)
    return {"family": "ellipse",
            "params": {"center": {"re": center.real, "im": center.imag},
                       "axes": [float(a), float(b)]}}


def two_disks(radius=0.5, centers=(-1.0, 1.0)):
    return [disk(c, radius) for c in centers]


def square(center=0.0, half_side=0.5):
    center = complex(center)
    offs = [1 + 1j, 1 - 1j, -1 - 1j, -1 + 1j]  # clockwise
    verts = [center + half_side * o for o in offs]
    return {"family": "polygon",
            "params": {"vertices": [{"re": v.real, "im": v.imag} for v in verts]}}


def four_squares(spread=1.5, half_side=0.5):
    centers = [spread * (1 + 1j), spread * (1 - 1j),
               spread * (-1 - 1j), spread * (-1 + 1j)]
    return [square(c, half_side) for c in centers]


def circle_grid(rows=4, cols=4, spacing=1.0, radius=0.25):
    """Grid of circles, symmetric about both axes."""
    curves = []
    for r in range(rows):
        for c in range(cols):
            x = (c - (cols - 1) / 2.0) * spacing
            y = (r - (rows - 1) / 2.0) * spacing
            curves.append(disk(complex(x, y), radius))
    return curves


def _radial(center, terms):
    center = complex(center)
    return {"family": "trig_radial",
            "params": {"center": {"re": center.real, "im": center.imag},
                       "terms": terms}}


def seven_blobs(spacing=6.5):
    """Seven smooth nonconvex components spread along the real axis."""
    recipes = [
        [{"kind": "const", "value": 1.25},
         {"kind": "sin", "amplitude": 0.50, "frequency": 4},
         {"kind": "cos", "amplitude": 0.30, "frequency": 1}],
        [{"kind": "const", "value": 1.25},
         {"kind": "sin", "amplitude": 0.40, "frequency": 2},
         {"kind": "cos", "amplitude": 0.20, "frequency": 3}],
        [{"kind": "const", "value": 0.75},
         {"kind": "exp_cos_cos2", "amplitude": 0.25, "frequency": 3},
         {"kind": "exp_sin_sin2", "amplitude": 0.50, "frequency": 2}],
        [{"kind": "exp_cos_cos2", "amplitude": 1.0, "frequency": 2},
         {"kind": "exp_sin_sin2", "amplitude": 1.0, "frequency": 2}],
        [{"kind": "const", "value": 0.75},
         {"kind": "exp_cos_cos2", "amplitude": 0.25, "frequency": 2},
         {"kind": "exp_sin_sin2", "amplitude": 0.50, "frequency": 3}],
        [{"kind": "const", "value": 1.25},
         {"kind": "sin", "amplitude": 0.40, "frequency": 4},
         {"kind": "cos", "amplitude": 0.20, "frequency": 3}],
        [{"kind": "const", "value": 1.25},
         {"kind": "sin", "amplitude": 0.50, "frequency": 3},
         {"kind": "cos", "amplitude": 0.30, "frequency": 1}],
    ]
    offsets = [spacing * (j - 3) for j in range(7)]
    return [_radial(x, terms) for x, terms in zip(offsets, recipes)]


def blob_r4(center=0.0):
    """The fourth of the seven blobs on its own (strongly nonconvex)."""
    return _radial(center, [
        {"kind": "exp_cos_cos2", "amplitude": 1.0, "frequency": 2},
        {"kind": "exp_sin_sin2", "amplitude": 1.0, "frequency": 2}])


def problem_spec(curves, n, **extra):
    spec = {"curves": curves if isinstance(curves, list) else [curves], "n": int(n)}
    spec.update(extra)
    return spec
