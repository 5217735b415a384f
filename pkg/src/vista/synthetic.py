"""Synthetic smooth test videos: a positive rank-4 background plus a moving bump.

The background is four separable components (zonal, diurnal, semidiurnal,
constant) whose latitude profiles are projected onto a low spherical-
harmonic degree band, so every frame is rank <= 4 and nearly band-limited;
slowly varying weights animate it. The bump is a compact Gaussian blob
circulating just inside the default dayside bounding box, so structured
missingness centered on that box periodically hides it. Run
``python -m vista.synthetic out.vmc`` to write the default demo video.
"""

from __future__ import annotations

import numpy as np

from .missingness import default_bbox, perimeter_path
from .spherical import _norm_assoc_legendre


def _bandlimited(profile: np.ndarray, theta: np.ndarray, azimuthal_order: int,
                 degree_cap: int) -> np.ndarray:
    """Least-squares projection of a latitude profile onto degrees <= degree_cap."""
    table = _norm_assoc_legendre(degree_cap, np.cos(theta))
    columns = np.stack([table[l, azimuthal_order]
                        for l in range(azimuthal_order, degree_cap + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(columns, profile, rcond=None)
    return columns @ coef


def make_demo_video(m: int = 60, n: int = 90, frames: int = 24, seed: int = 11,
                    bump_amplitude: float = 16.0, bump_sigma: float = 8.0,
                    degree_cap: int = 6) -> np.ndarray:
    """Fully observed (frames, m, n) video, strictly positive everywhere."""
    rng = np.random.default_rng(seed)
    lat = 90.0 - 180.0 * (np.arange(m) + 0.5) / m
    theta = np.pi * (np.arange(m) + 0.5) / m
    azimuth = 2.0 * np.pi * (np.arange(n) + 0.5) / n

    row_profiles = np.stack([
        _bandlimited(np.exp(-(lat / 38.0) ** 2), theta, 0, degree_cap),
        _bandlimited(np.exp(-((lat - 8.0) / 22.0) ** 2), theta, 1, degree_cap),
        _bandlimited(np.exp(-((lat - 55.0) / 14.0) ** 2)
                     + np.exp(-((lat + 55.0) / 14.0) ** 2), theta, 2, degree_cap),
        np.ones(m),
    ])
    col_profiles = np.stack([
        np.ones(n),
        np.cos(azimuth - 2.0 * np.pi * 13.0 / 24.0),
        np.cos(2.0 * (azimuth - 2.0 * np.pi * 12.0 / 24.0)),
        np.ones(n),
    ])
    t_grid = np.arange(frames)
    weights = np.stack([
        22.0 * (1.0 + 0.15 * np.sin(2.0 * np.pi * t_grid / frames)),
        13.0 * (1.0 + 0.20 * np.cos(2.0 * np.pi * t_grid / frames + 0.7)),
        4.0 * np.ones(frames),
        10.0 * np.ones(frames),
    ])
    video = np.einsum("kt,km,kn->tmn", weights, row_profiles, col_profiles)

    # Bump path: the dayside bounding-box perimeter inset by up to 6 cells,
    # advanced 6 cells per frame from a seeded start.
    r0, r1, c0, c1 = default_bbox(m, n)
    inset = max(0, min(6, (r1 - r0 - 1) // 2, (c1 - c0 - 1) // 2))
    path = perimeter_path((r0 + inset, r1 - inset, c0 + inset, c1 - inset))
    start = int(rng.integers(len(path)))
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    for t in range(frames):
        ci, cj = path[(start + 6 * t) % len(path)]
        col_dist = np.minimum(np.abs(cols - cj), n - np.abs(cols - cj))
        dist2 = (rows - ci) ** 2 + col_dist ** 2
        video[t] += bump_amplitude * np.exp(-dist2 / (2.0 * bump_sigma ** 2))
    if video.min() <= 0:
        raise ValueError("demo video parameters produced non-positive values")
    return video


def main(argv=None):
    import argparse

    from . import io as vio

    parser = argparse.ArgumentParser(description="Write a synthetic demo video.")
    parser.add_argument("output", help="output video file")
    parser.add_argument("--rows", type=int, default=60)
    parser.add_argument("--cols", type=int, default=90)
    parser.add_argument("--frames", type=int, default=24)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args(argv)
    vio.write_frames(args.output, make_demo_video(args.rows, args.cols, args.frames, args.seed))
    print(f"wrote {args.frames}x{args.rows}x{args.cols} demo video to {args.output}")


if __name__ == "__main__":
    main()
