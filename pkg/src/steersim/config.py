"""Run configuration files.

Format: one ``key = value`` per line, ``#`` starts a comment, sections
``[cavity1]``, ``[cavity2]`` and ``[shared]``. Keys before the first
section configure the run itself (``mode``, ``out``, ``svg``). A
per-cavity key placed in ``[shared]`` applies to both cavities unless a
cavity section sets it again.

Normalized mode (rates in units of the mechanical frequency)::

    mode = normalized
    [shared]
    delta = -1
    kappa = 0.227
    gamma = 1.478e-4
    zeta = 0.05
    nth = 25
    [cavity1]
    g = 0.6
    [cavity2]
    g = 0.3

Physical mode takes SI values; every ``*_hz`` key is an ordinary frequency
``f`` and is converted to an angular rate ``2 pi f``. The laser is given
either by ``omega_l_hz`` or by ``detuning_hz`` (cavity minus laser).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import MissingKey, ParseError, UnknownKey
from .model import CavityParams, NormalizedParams, PhysicalParams, normalize, solve_steady_state

SECTIONS = ("cavity1", "cavity2", "shared")
RUN_KEYS = ("mode", "out", "svg")
MODES = ("normalized", "physical")

NORMALIZED_CAVITY_KEYS = ("delta", "g", "kappa", "gamma", "nth")
NORMALIZED_SHARED_KEYS = ("zeta",)

PHYSICAL_CAVITY_KEYS = (
    "length_m", "kappa_hz", "omega_c_hz", "omega_l_hz", "detuning_hz",
    "power_w", "mass_kg", "omega_m_hz", "gamma_hz", "temperature_k",
)
PHYSICAL_SHARED_KEYS = ("zeta_hz",)

TWO_PI = 2.0 * math.pi


@dataclass
class RunConfig:
    mode: str
    shared: dict = field(default_factory=dict)
    cavity1: dict = field(default_factory=dict)
    cavity2: dict = field(default_factory=dict)
    out: Optional[str] = None
    svg: bool = False

    def value(self, j, key):
        own = self.cavity1 if j == 1 else self.cavity2
        if key in own:
            return own[key]
        if key in self.shared:
            return self.shared[key]
        raise MissingKey(f"missing key {key!r} for cavity{j} (set it in [cavity{j}] or [shared])")

    def has(self, j, key):
        own = self.cavity1 if j == 1 else self.cavity2
        return key in own or key in self.shared

    def normalized_params(self):
        if self.mode == "physical":
            p = self.physical_params()
            return normalize(p, solve_steady_state(p))
        return NormalizedParams(
            delta1=self.value(1, "delta"), delta2=self.value(2, "delta"),
            g1=self.value(1, "g"), g2=self.value(2, "g"),
            kappa1=self.value(1, "kappa"), kappa2=self.value(2, "kappa"),
            gamma1=self.value(1, "gamma"), gamma2=self.value(2, "gamma"),
            zeta=self.shared["zeta"],
            nth1=self.value(1, "nth"), nth2=self.value(2, "nth"),
        )

    def physical_params(self):
        if self.mode != "physical":
            raise ValueError("physical_params() needs mode = physical")
        cavities = []
        for j in (1, 2):
            omega_c = TWO_PI * self.value(j, "omega_c_hz")
            if self.has(j, "omega_l_hz"):
                omega_l = TWO_PI * self.value(j, "omega_l_hz")
            else:
                omega_l = omega_c - TWO_PI * self.value(j, "detuning_hz")
            cavities.append(CavityParams(
                length=self.value(j, "length_m"),
                kappa=TWO_PI * self.value(j, "kappa_hz"),
                omega_c=omega_c,
                omega_l=omega_l,
                power=self.value(j, "power_w"),
                mass=self.value(j, "mass_kg"),
                omega_m=TWO_PI * self.value(j, "omega_m_hz"),
                gamma=TWO_PI * self.value(j, "gamma_hz"),
                temperature=self.value(j, "temperature_k"),
            ))
        return PhysicalParams(cavities[0], cavities[1], TWO_PI * self.shared["zeta_hz"])


def _parse_bool(text, line, col):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ParseError(f"expected a boolean, got {text!r}", line, col)


def parse_config(text):
    """Parse configuration text into a :class:`RunConfig`.

    Raises
    ------
    ParseError
        Malformed line, bad value, unknown section or duplicate key.
    UnknownKey
        Key not valid for its section and the chosen mode.
    MissingKey
        A required key is absent.
    """
    run = {}
    sections = {name: {} for name in SECTIONS}
    # key -> line, to report the unknown-key line once the mode is known
    where = {name: {} for name in SECTIONS}
    current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, col)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno, col)
            current = name
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        value = value_part.strip()
        vcol = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not key:
            raise ParseError("empty key", lineno, col)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, vcol)

        if current is None:
            if key not in RUN_KEYS:
                raise UnknownKey(f"unknown key {key!r} outside any section", lineno, col)
            if key in run:
                raise ParseError(f"duplicate key {key!r}", lineno, col)
            if key == "mode":
                if value not in MODES:
                    raise ParseError(f"mode must be one of {MODES}, got {value!r}", lineno, vcol)
                run[key] = value
            elif key == "svg":
                run[key] = _parse_bool(value, lineno, vcol)
            else:
                run[key] = value
            continue

        if key in sections[current]:
            raise ParseError(
                f"duplicate key {key!r} in [{current}] (first set on line {where[current][key]})",
                lineno, col,
            )
        try:
            number = float(value)
        except ValueError:
            raise ParseError(f"expected a number for {key!r}, got {value!r}", lineno, vcol) from None
        if not math.isfinite(number):
            raise ParseError(f"non-finite value for {key!r}", lineno, vcol)
        sections[current][key] = number
        where[current][key] = lineno

    if "mode" not in run:
        raise MissingKey("missing key 'mode' (normalized or physical)")
    mode = run["mode"]
    if mode == "normalized":
        cavity_keys, shared_only = NORMALIZED_CAVITY_KEYS, NORMALIZED_SHARED_KEYS
    else:
        cavity_keys, shared_only = PHYSICAL_CAVITY_KEYS, PHYSICAL_SHARED_KEYS

    for name in SECTIONS:
        allowed = set(cavity_keys) | (set(shared_only) if name == "shared" else set())
        for key, lineno in where[name].items():
            if key not in allowed:
                raise UnknownKey(f"unknown key {key!r} in [{name}] for mode {mode}", lineno)

    cfg = RunConfig(
        mode=mode,
        shared=sections["shared"],
        cavity1=sections["cavity1"],
        cavity2=sections["cavity2"],
        out=run.get("out"),
        svg=run.get("svg", False),
    )
    for key in shared_only:
        if key not in cfg.shared:
            raise MissingKey(f"missing key {key!r} in [shared]")
    for j in (1, 2):
        for key in cavity_keys:
            if mode == "physical" and key in ("omega_l_hz", "detuning_hz"):
                continue
            cfg.value(j, key)
        if mode == "physical":
            given = [k for k in ("omega_l_hz", "detuning_hz") if cfg.has(j, k)]
            if len(given) != 1:
                raise MissingKey(f"cavity{j} needs exactly one of omega_l_hz or detuning_hz")
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
