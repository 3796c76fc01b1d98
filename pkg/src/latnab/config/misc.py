import re

from fractions import Fraction

from latnab.errors import InvalidValueError

COUNT_RE_STR = r'(\d+(?:\.\d+)?)([KMG]?)'
COUNT_RE = re.compile(f'^{COUNT_RE_STR}$', re.IGNORECASE)

RATIONAL_RE = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$')

def parse_count(count_str: str | int) -> int:
    # Parses counts like '100K', '2M', '1.5G', '500'. Suffixes are decimal.
    if isinstance(count_str, int):
        if count_str < 0:
            raise InvalidValueError("Count must be non-negative.")
        return count_str
    match = COUNT_RE.match(count_str.strip())
    if not match:
        raise InvalidValueError(f"Invalid count {count_str!r}. Must be a number optionally followed by K, M or G.")
    value, suffix = match.groups()
    multiplier = {
        '': 1,
        'K': 1_000,
        'M': 1_000_000,
        'G': 1_000_000_000,
    }[suffix.upper()]
    return int(Fraction(value) * multiplier)

def human_count(count: int) -> str:
    # 4320 -> '4.32K', 2000000 -> '2M'
    if count < 0:
        raise InvalidValueError("Count must be non-negative.")
    value = float(count)
    for unit in ['', 'K', 'M']:
        if value < 1000.0:
            text = f"{value:.2f}".rstrip('0').rstrip('.')
            return f"{text}{unit}"
        value /= 1000.0
    text = f"{value:.2f}".rstrip('0').rstrip('.')
    return f"{text}G"

def parse_rational(text: str | int | Fraction) -> Fraction:
    # '3/8', '-2', 4 -> Fraction. Decimal points are refused, every value is exact.
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    match = RATIONAL_RE.match(text)
    if not match:
        raise InvalidValueError(f"Invalid rational {text!r}. Must look like 'p' or 'p/q'.")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise InvalidValueError(f"Invalid rational {text!r}: zero denominator.")
    return Fraction(int(num), int(den) if den is not None else 1)
