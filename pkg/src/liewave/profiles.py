"""Named initial-data profiles.

A profile is a sum of terms ``[coef*]name(args)``, for example
``constant(1) + 0.25*cosine(1)``. Available names:

``constant(a)``
    the constant function ``a``.
``cosine(k1, ..., kj)``
    ``cos(k . x)`` on a torus, missing components of ``k`` taken as 0.
``lowest-nontrivial``
    on SU(2), half the character of the spin-1/2 representation,
    ``Re D^{1/2}_{1/2,1/2} = cos(beta/2) cos((alpha+gamma)/2)``.
``random(seed, decay)``
    real Gaussian field with envelope ``(1+lambda^2)^(-decay/2)``, unit L^2
    norm; identical for identical seed, decay and group spec.
"""

from __future__ import annotations

import re

import numpy as np

from .fourier import SpectralField, random_field
from .groups import SU2, TORUS, GroupSpec, Mode

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)\s*\*\s*)?
        (?P<name>[a-z][a-z-]*)\s*
        (?:\((?P<args>[^()]*)\))?\s*""",
    re.VERBOSE,
)


class ProfileError(ValueError):
    pass


def parse_profile(expr: str) -> list[tuple[float, str, tuple[float, ...]]]:
    """Split a profile expression into ``(coefficient, name, args)`` terms."""
    terms = []
    pos = 0
    expr = expr.strip()
    if not expr:
        raise ProfileError("empty profile")
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos:
            raise ProfileError(f"cannot parse profile {expr!r} at column {pos + 1}")
        if terms and not m.group("sign"):
            raise ProfileError(f"missing '+' or '-' before column {pos + 1} in {expr!r}")
        coef = float(m.group("coef")) if m.group("coef") else 1.0
        if m.group("sign") == "-":
            coef = -coef
        raw = m.group("args")
        try:
            args = tuple(float(a) for a in raw.split(",")) if raw and raw.strip() else ()
        except ValueError:
            raise ProfileError(f"non-numeric argument in {m.group(0).strip()!r}") from None
        terms.append((coef, m.group("name"), args))
        pos = m.end()
    return terms


def _constant(spec, args):
    if len(args) != 1:
        raise ProfileError("constant(a) takes one argument")
    out = SpectralField.zeros(spec)
    out.data[0] = args[0]
    return out


def _cosine(spec, args):
    if spec.kind != TORUS:
        raise ProfileError("cosine(k) is defined on tori only")
    if not args or len(args) > spec.n or any(a != int(a) for a in args):
        raise ProfileError(f"cosine needs 1..{spec.n} integer frequencies")
    k = tuple(int(a) for a in args) + (0,) * (spec.n - len(args))
    lam2 = float(sum(x * x for x in k))
    if not any(k):
        return _constant(spec, (1.0,))
    modes = {Mode(lam2, k, 1): 0.5, Mode(lam2, tuple(-x for x in k), 1): 0.5}
    for m in modes:
        if m not in spec.layout:
            raise ProfileError(f"cosine{args} is above the band limit {spec.band_limit}")
    return SpectralField.from_coeffs(spec, {m: [[c]] for m, c in modes.items()})


def _lowest(spec, args):
    if spec.kind != SU2:
        raise ProfileError("lowest-nontrivial is defined on SU(2) only")
    if args:
        raise ProfileError("lowest-nontrivial takes no arguments")
    mode = Mode(0.75, (1,), 2, SU2)
    if mode not in spec.layout:
        raise ProfileError("lowest-nontrivial needs band_limit >= 3/4")
    # f = sum d tr(D C) with C = I/4 gives tr(D^{1/2}) / 2.
    return SpectralField.from_coeffs(spec, {mode: np.eye(2) / 4})


def _random(spec, args):
    if len(args) not in (1, 2) or args[0] != int(args[0]):
        raise ProfileError("random(seed, decay) needs an integer seed and optional decay")
    decay = args[1] if len(args) == 2 else 1.0
    rng = np.random.default_rng(int(args[0]))
    return random_field(spec, rng, decay=decay, real=True, normalize=True)


_BUILDERS = {
    "constant": _constant,
    "cosine": _cosine,
    "lowest-nontrivial": _lowest,
    "random": _random,
}


def build_profile(expr: str, spec: GroupSpec) -> SpectralField:
    out = SpectralField.zeros(spec)
    for coef, name, args in parse_profile(expr):
        try:
            builder = _BUILDERS[name]
        except KeyError:
            raise ProfileError(f"unknown profile {name!r}; known: {', '.join(_BUILDERS)}") from None
        out = out + builder(spec, args) * coef
    return out
