"""Exact-rational money arithmetic and geographic distances.

All monetary quantities in this package are fractions.Fraction values that
are multiples of the 1e-6 quantum. External decimal strings are quantized on
the way in; fractions are formatted back to 6-place decimal strings on the
way out.
"""

from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from fractions import Fraction

QUANTUM_PLACES = 6
QUANTUM = Fraction(1, 10**QUANTUM_PLACES)

EARTH_RADIUS_KM = 6371.0


def to_rational(value: str | int | float | Fraction | Decimal) -> Fraction:
    """Convert an external numeric value to an exact Fraction.

    Strings and floats are read as decimals and quantized to 1e-6
    (round-half-even). Ints and Fractions pass through unchanged.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, (str, Decimal)):
        try:
            dec = Decimal(value)
        except InvalidOperation as exc:
            raise ValueError(f"not a decimal number: {value!r}") from exc
        quantized = dec.quantize(Decimal(1).scaleb(-QUANTUM_PLACES), rounding=ROUND_HALF_EVEN)
        return Fraction(quantized)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def quantize(value: Fraction | float) -> Fraction:
    """Round to the nearest multiple of 1e-6, ties to even."""
    frac = Fraction(value) * 10**QUANTUM_PLACES
    floor = frac.numerator // frac.denominator
    rem = frac - floor
    half = Fraction(1, 2)
    if rem > half or (rem == half and floor % 2 != 0):
        floor += 1
    return Fraction(floor, 10**QUANTUM_PLACES)


def format_money(value: Fraction, places: int = QUANTUM_PLACES) -> str:
    """Render a rational as a fixed-place decimal string.

    Values are expected to be multiples of 10^-places (all costs in this
    package are); anything finer is quantized first.
    """
    scaled = value * 10**places
    if scaled.denominator != 1:
        scaled = quantize(value) * 10**places
    units = int(scaled)
    sign = "-" if units < 0 else ""
    units = abs(units)
    return f"{sign}{units // 10**places}.{units % 10**places:0{places}d}"


def haversine_gigameters(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance between two points, in gigameters (1e6 km)."""
    phi1, lam1, phi2, lam2 = map(math.radians, (lat1, lon1, lat2, lon2))
    dphi = phi2 - phi1
    dlam = lam2 - lam1
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    km = 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))
    return km / 1e6


def distance_cost(
    lat1: float, lon1: float, lat2: float, lon2: float, rate_per_gigameter: Fraction
) -> Fraction:
    """Distance-proportional transfer cost: haversine gigameters times the rate,
    quantized to 1e-6."""
    dist = haversine_gigameters(lat1, lon1, lat2, lon2)
    return quantize(Fraction(dist) * rate_per_gigameter)
