"""Reeds-Shepp shortest paths for a forward/backward vehicle with bounded turning.

Implements the twelve word families of Reeds & Shepp (with the usual rs.c
corrections), each expanded through the timeflip/reflect symmetries.  All
computation happens in a start-centered frame scaled by the turning radius.
Families compute raw parameter triples; steering/gear patterns live in static
templates so length queries (the search heuristic hot path) allocate almost
nothing.

An element is (steer, gear, param) with steer +1=left/0/-1=right, gear
+1=forward/-1=backward, param >= 0 (radians on arcs, radius units on
straights).
"""

from __future__ import annotations

import math
from typing import Callable, Iterator, Optional

from .geometry import Direction, Pose, normalize_angle

Element = tuple[int, int, float]
Word = tuple[Element, ...]

_HALF_PI = math.pi / 2.0

L, S, R = 1, 0, -1
FWD, BWD = 1, -1


def _wrap(theta: float) -> float:
    """Map onto [-pi, pi)."""
    theta = theta % (2.0 * math.pi)
    if theta >= math.pi:
        theta -= 2.0 * math.pi
    return theta


def _polar(x: float, y: float) -> tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _clip1(v: float) -> float:
    """Clamp into [-1, 1] against float noise at domain boundaries."""
    return max(-1.0, min(1.0, v))


# Each family returns parameter tuples matching its steering/gear template;
# None when the configuration is outside the family's domain.


def _family1(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CSC, same turns (8.1)."""
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    return (t, u, _wrap(phi - t))


def _family2(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CSC, opposite turns (8.2)."""
    phi = _wrap(phi)
    rho, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho * rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0)
    t = _wrap(t1 + math.atan2(2.0, u))
    return (t, u, _wrap(t - phi))


def _family3(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|C|C (8.3)."""
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0:
        return None
    a = math.acos(_clip1(rho / 4.0))
    t = _wrap(theta + _HALF_PI + a)
    u = _wrap(math.pi - 2.0 * a)
    return (t, u, _wrap(phi - t - u))


def _family4(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|CC (8.4 first form)."""
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0:
        return None
    a = math.acos(_clip1(rho / 4.0))
    t = _wrap(theta + _HALF_PI + a)
    u = _wrap(math.pi - 2.0 * a)
    return (t, u, _wrap(t + u - phi))


def _family5(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CC|C (8.4 second form)."""
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0 or rho < 1e-12:
        return None
    u = math.acos(_clip1(1.0 - rho * rho / 8.0))
    a = math.asin(_clip1(2.0 * math.sin(u) / rho))
    t = _wrap(theta + _HALF_PI - a)
    return (t, u, _wrap(t - u - phi))


def _family6(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CCu|CuC (8.7)."""
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho > 4.0:
        return None
    if rho <= 2.0:
        a = math.acos(_clip1((rho + 2.0) / 4.0))
        t = _wrap(theta + _HALF_PI + a)
        u = _wrap(a)
    else:
        a = math.acos(_clip1((rho - 2.0) / 4.0))
        t = _wrap(theta + _HALF_PI - a)
        u = _wrap(math.pi - a)
    return (t, u, u, _wrap(phi - t + 2.0 * u))


def _family7(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|CuCu|C (8.8)."""
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    u1 = (20.0 - rho * rho) / 16.0
    if rho > 6.0 or rho < 1e-12 or not (0.0 <= u1 <= 1.0):
        return None
    u = math.acos(u1)
    a = math.asin(_clip1(2.0 * math.sin(u) / rho))
    t = _wrap(theta + _HALF_PI + a)
    return (t, u, u, _wrap(t - phi))


def _family8(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|C[pi/2]SC (8.9 first form)."""
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(2.0, u + 2.0)
    t = _wrap(theta + _HALF_PI + a)
    return (t, _HALF_PI, u, _wrap(t - phi + _HALF_PI))


def _family9(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CSC[pi/2]|C (8.9 second form)."""
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(u + 2.0, 2.0)
    t = _wrap(theta + _HALF_PI - a)
    return (t, u, _HALF_PI, _wrap(t - phi - _HALF_PI))


def _family10(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|C[pi/2]SC (8.10 first form)."""
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta + _HALF_PI)
    u = rho - 2.0
    return (t, _HALF_PI, u, _wrap(phi - t - _HALF_PI))


def _family11(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """CSC[pi/2]|C (8.10 second form)."""
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta)
    u = rho - 2.0
    return (t, u, _HALF_PI, _wrap(phi - t - _HALF_PI))


def _family12(x: float, y: float, phi: float) -> Optional[tuple[float, ...]]:
    """C|C[pi/2]SC[pi/2]|C (8.11)."""
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 4.0
    a = math.atan2(2.0, u + 4.0)
    t = _wrap(theta + _HALF_PI + a)
    return (t, _HALF_PI, u, _HALF_PI, _wrap(t - phi))


# (steer, gear) per element, aligned with the parameter tuples above
_FAMILIES: tuple[tuple[Callable, tuple[tuple[int, int], ...]], ...] = (
    (_family1, ((L, FWD), (S, FWD), (L, FWD))),
    (_family2, ((L, FWD), (S, FWD), (R, FWD))),
    (_family3, ((L, FWD), (R, BWD), (L, FWD))),
    (_family4, ((L, FWD), (R, BWD), (L, BWD))),
    (_family5, ((L, FWD), (R, FWD), (L, BWD))),
    (_family6, ((L, FWD), (R, FWD), (L, BWD), (R, BWD))),
    (_family7, ((L, FWD), (R, BWD), (L, BWD), (R, FWD))),
    (_family8, ((L, FWD), (R, BWD), (S, BWD), (L, BWD))),
    (_family9, ((L, FWD), (S, FWD), (R, FWD), (L, BWD))),
    (_family10, ((L, FWD), (R, BWD), (S, BWD), (R, BWD))),
    (_family11, ((L, FWD), (S, FWD), (L, FWD), (R, BWD))),
    (_family12, ((L, FWD), (R, BWD), (S, BWD), (L, BWD), (R, FWD))),
)


def _variants(x: float, y: float, phi: float):
    """Coordinate images under identity/timeflip/reflect/both; flips per variant."""
    return (
        (x, y, phi, 1, 1),
        (-x, y, -phi, -1, 1),  # timeflip: negate gears
        (x, -y, -phi, 1, -1),  # reflect: negate steering
        (-x, -y, phi, -1, -1),
    )


def all_words(x: float, y: float, phi: float) -> list[Word]:
    """Candidate words reaching (x, y, phi) from the origin at unit radius."""
    words: list[Word] = []
    for family, template in _FAMILIES:
        for vx, vy, vphi, gear_flip, steer_flip in _variants(x, y, phi):
            params = family(vx, vy, vphi)
            if params is None:
                continue
            word = []
            for param, (steer, gear) in zip(params, template):
                steer *= steer_flip
                gear *= gear_flip
                if param < 0.0:
                    param, gear = -param, -gear
                if param > 1e-12:
                    word.append((steer, gear, param))
            words.append(tuple(word))
    return words


def word_length(word: Word) -> float:
    """Length in unit-radius units (multiply by the radius for meters)."""
    return sum(p for _s, _g, p in word)


def _min_length_units(x: float, y: float, phi: float) -> float:
    best = math.inf
    for family, _template in _FAMILIES:
        for vx, vy, vphi, _gf, _sf in _variants(x, y, phi):
            params = family(vx, vy, vphi)
            if params is None:
                continue
            total = 0.0
            for p in params:
                total += p if p >= 0.0 else -p
            if total < best:
                best = total
    return best


def _to_local(a: Pose, b: Pose, radius: float) -> tuple[float, float, float]:
    dx = b.x - a.x
    dy = b.y - a.y
    cos_t, sin_t = math.cos(a.theta), math.sin(a.theta)
    return (
        (dx * cos_t + dy * sin_t) / radius,
        (-dx * sin_t + dy * cos_t) / radius,
        normalize_angle(b.theta - a.theta),
    )


def reeds_shepp_length(a: Pose, b: Pose, radius: float) -> float:
    """Length in meters of the shortest Reeds-Shepp curve from a to b."""
    if radius <= 0:
        raise ValueError("turning radius must be positive")
    x, y, phi = _to_local(a, b, radius)
    return _min_length_units(x, y, phi) * radius


def optimal_word(a: Pose, b: Pose, radius: float) -> tuple[Word, float]:
    """The minimum-length word and its length in meters."""
    x, y, phi = _to_local(a, b, radius)
    best: Optional[Word] = None
    best_len = math.inf
    for word in all_words(x, y, phi):
        total = word_length(word)
        if total < best_len:
            best, best_len = word, total
    assert best is not None
    return best, best_len * radius


def _advance(pose: Pose, steer: int, gear: int, ds: float, radius: float) -> Pose:
    """Closed-form motion along one element piece of signed arc length gear*ds."""
    signed = gear * ds
    if steer == 0:
        return Pose(
            pose.x + signed * math.cos(pose.theta),
            pose.y + signed * math.sin(pose.theta),
            pose.theta,
        )
    kappa = steer / radius
    theta2 = pose.theta + kappa * signed
    return Pose(
        pose.x + (math.sin(theta2) - math.sin(pose.theta)) / kappa,
        pose.y - (math.cos(theta2) - math.cos(pose.theta)) / kappa,
        theta2,
    )


def sample_word(
    word: Word, start: Pose, radius: float, step: float
) -> list[tuple[Pose, Direction]]:
    """Poses along a word at spacing <= step meters, both endpoints included."""
    out: list[tuple[Pose, Direction]] = []
    pose = start
    first_dir = Direction.FORWARD if (not word or word[0][1] > 0) else Direction.REVERSE
    out.append((pose, first_dir))
    for steer, gear, param in word:
        length_m = param * radius
        if length_m <= 1e-12:
            continue
        direction = Direction.FORWARD if gear > 0 else Direction.REVERSE
        n = max(1, math.ceil(length_m / step))
        ds = length_m / n
        for _ in range(n):
            pose = _advance(pose, steer, gear, ds, radius)
            out.append((pose, direction))
    return out


def word_end_pose(word: Word, start: Pose, radius: float) -> Pose:
    pose = start
    for steer, gear, param in word:
        if param > 1e-12:
            pose = _advance(pose, steer, gear, param * radius, radius)
    return pose


def iter_word_gears(word: Word) -> Iterator[int]:
    for _s, g, _p in word:
        yield g
