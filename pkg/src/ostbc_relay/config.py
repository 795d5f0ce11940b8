"""Campaign specification files.

A spec is an INI file with three sections::

    [scenario]
    n1 = 2              ; antennas at User-1, User-2 and the relay
    n2 = 2
    nr = 2
    m_p = 1             ; relay training blocks
    n_p = 1, 2, 4       ; user training blocks (a list sweeps; n_p1/n_p2 set them separately)
    gain = 1.0          ; fixed relay gain, or give budget = <relay power> instead
    code = alamouti
    constellation = bpsk, qpsk
    pilot_energy = codeword
    user = 1            ; the user whose decoding is evaluated

    [campaign]
    snr_db = 0, 4, 8    ; or start:stop:step (stop inclusive)
    modes = sim-perfect-csi, sim-estimated-csi, analytic
    seed = 1
    max_trials = 1000000
    min_errors = 200
    decoder = exhaustive
    workers = 1

    [output]
    path = results.csv
    format = csv

Lists are comma separated.  ``modes = all`` selects every mode.
"""

import configparser
import math
import re
from dataclasses import dataclass, field, replace

from . import __version__
from .errors import ConfigError
from .ostbc import CODES, constellation
from .protocol import PILOT_ENERGY_MODES, SystemConfig

__all__ = ["MODES", "CampaignSpec", "load_spec", "parse_spec", "dump_spec"]

MODES = (
    "sim-perfect-csi",
    "sim-estimated-csi",
    "analytic",
    "analytic-perfect-csi",
    "analytic-asymptotic",
)
FORMATS = ("csv", "jsonl")
DECODER_NAMES = ("exhaustive", "symbolwise")

_SCENARIO_KEYS = {"n1", "n2", "nr", "m_p", "n_p", "n_p1", "n_p2", "gain", "budget", "code",
                  "constellation", "pilot_energy", "user"}
_CAMPAIGN_KEYS = {"snr_db", "modes", "seed", "max_trials", "min_errors", "decoder", "workers"}
_OUTPUT_KEYS = {"path", "format"}
_SECTIONS = {"scenario": _SCENARIO_KEYS, "campaign": _CAMPAIGN_KEYS, "output": _OUTPUT_KEYS, "manifest": None}


@dataclass(frozen=True)
class CampaignSpec:
    """A validated campaign.

    ``scenarios`` holds one :class:`SystemConfig` per swept
    ``(n_p, constellation)`` combination, in file order.
    """

    scenarios: tuple
    snr_db: tuple
    modes: tuple
    seed: int = 0
    max_trials: int = 10**6
    min_errors: int | None = 200
    decoder: str = "exhaustive"
    workers: int = 1
    user: int = 1
    out_path: str = "results.csv"
    out_format: str = "csv"
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def with_overrides(self, seed=None, workers=None, out=None, fmt=None):
        raw = {s: dict(v) for s, v in self.raw.items()}
        changes = {}
        if seed is not None:
            changes["seed"] = int(seed)
            raw.setdefault("campaign", {})["seed"] = str(int(seed))
        if workers is not None:
            changes["workers"] = int(workers)
        if out is not None:
            changes["out_path"] = str(out)
            raw.setdefault("output", {})["path"] = str(out)
        if fmt is not None:
            if fmt not in FORMATS:
                raise ConfigError(f"format must be one of {FORMATS}", field="format")
            changes["out_format"] = fmt
            raw.setdefault("output", {})["format"] = fmt
        return replace(self, raw=raw, **changes)


def _line_index(text):
    """Map ``(section, key)`` to the 1-based line where it is defined."""
    where = {}
    section = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            where[(section, None)] = no
            continue
        m = re.match(r"([A-Za-z0-9_\-]+)\s*[=:]", s)
        if m and section is not None:
            where[(section, m.group(1).lower())] = no
    return where


class _Reader:
    def __init__(self, parser, lines, path):
        self.parser = parser
        self.lines = lines
        self.path = path

    def error(self, msg, section, key):
        return ConfigError(msg, field=f"{section}.{key}" if key else section,
                           line=self.lines.get((section, key)), path=self.path)

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def text(self, section, key, default=None):
        if not self.has(section, key):
            if default is None:
                raise self.error("missing required key", section, key)
            return default
        return self.parser.get(section, key).strip()

    def items(self, section, key, default=None):
        raw = self.text(section, key, default)
        parts = [p.strip() for p in raw.split(",")]
        if any(p == "" for p in parts):
            raise self.error(f"empty list element in {raw!r}", section, key)
        return parts

    def integer(self, section, key, default=None, minimum=1):
        raw = self.text(section, key, None if default is None else str(default))
        try:
            v = int(raw)
        except ValueError:
            raise self.error(f"expected an integer, got {raw!r}", section, key) from None
        if v < minimum:
            raise self.error(f"must be >= {minimum}, got {v}", section, key)
        return v

    def integers(self, section, key, default=None):
        out = []
        for raw in self.items(section, key, default):
            try:
                v = int(raw)
            except ValueError:
                raise self.error(f"expected an integer, got {raw!r}", section, key) from None
            if v < 1:
                raise self.error(f"must be positive, got {v}", section, key)
            out.append(v)
        return out

    def real(self, section, key):
        raw = self.text(section, key)
        try:
            v = float(raw)
        except ValueError:
            raise self.error(f"expected a number, got {raw!r}", section, key) from None
        if not math.isfinite(v) or v <= 0:
            raise self.error(f"must be a positive finite number, got {raw!r}", section, key)
        return v


def _snr_grid(r):
    raw = r.text("campaign", "snr_db")
    if raw == "":
        raise r.error("SNR grid is empty", "campaign", "snr_db")
    if ":" in raw:
        try:
            start, stop, step = (float(x) for x in raw.split(":"))
        except ValueError:
            raise r.error(f"range must be start:stop:step, got {raw!r}", "campaign", "snr_db") from None
        if step <= 0:
            raise r.error("range step must be positive", "campaign", "snr_db")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [start + i * step for i in range(max(n, 0))]
    else:
        try:
            grid = [float(x) for x in r.items("campaign", "snr_db")]
        except ValueError:
            raise r.error(f"SNR values must be numbers, got {raw!r}", "campaign", "snr_db") from None
    if not grid:
        raise r.error("SNR grid is empty", "campaign", "snr_db")
    if not all(math.isfinite(x) for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise r.error("SNR grid must be finite and strictly increasing", "campaign", "snr_db")
    return tuple(grid)


def _modes(r):
    names = [m.lower() for m in r.items("campaign", "modes")]
    if names == ["all"]:
        return MODES
    for m in names:
        if m not in MODES:
            raise r.error(f"unknown mode {m!r}; choose from {', '.join(MODES)} or all", "campaign", "modes")
    if len(set(names)) != len(names):
        raise r.error("duplicate mode", "campaign", "modes")
    return tuple(names)


def _scenarios(r):
    sec = "scenario"
    if r.has(sec, "n_p") and (r.has(sec, "n_p1") or r.has(sec, "n_p2")):
        raise r.error("give n_p or n_p1/n_p2, not both", sec, "n_p")
    if r.has(sec, "n_p1") or r.has(sec, "n_p2"):
        pairs = [(r.integer(sec, "n_p1", 1), r.integer(sec, "n_p2", 1))]
    else:
        pairs = [(n, n) for n in r.integers(sec, "n_p", "1")]
    has_gain, has_budget = r.has(sec, "gain"), r.has(sec, "budget")
    if has_gain == has_budget:
        raise r.error("give exactly one of gain or budget", sec, "gain")
    gain = r.real(sec, "gain") if has_gain else None
    budget = r.real(sec, "budget") if has_budget else None
    code_name = r.text(sec, "code", "alamouti").lower()
    if code_name not in CODES:
        raise r.error(f"unknown code {code_name!r}; choose from {', '.join(CODES)}", sec, "code")
    consts = []
    for name in r.items(sec, "constellation", "bpsk"):
        try:
            consts.append(constellation(name))
        except ValueError as exc:
            raise r.error(str(exc), sec, "constellation") from None
    pilot_energy = r.text(sec, "pilot_energy", "codeword").lower()
    if pilot_energy not in PILOT_ENERGY_MODES:
        raise r.error(f"pilot_energy must be one of {PILOT_ENERGY_MODES}", sec, "pilot_energy")
    base = dict(
        n1=r.integer(sec, "n1", 2), n2=r.integer(sec, "n2", 2), nr=r.integer(sec, "nr", 2),
        m_p=r.integer(sec, "m_p", 1), gain=gain, budget=budget, pilot_energy=pilot_energy,
    )
    out = []
    for n_p1, n_p2 in pairs:
        for const in consts:
            try:
                out.append(SystemConfig(n_p1=n_p1, n_p2=n_p2, code=CODES[code_name](), constellation=const, **base))
            except ValueError as exc:
                raise r.error(str(exc), sec, None) from None
    return tuple(out)


def parse_spec(text, path=None):
    """Parse and validate spec ``text``; raises :class:`ConfigError`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=path or "<spec>")
    except configparser.Error as exc:
        raise ConfigError(f"malformed spec: {exc}", line=getattr(exc, "lineno", None), path=path) from None
    lines = _line_index(text)
    r = _Reader(parser, lines, path)
    for section in parser.sections():
        known = _SECTIONS.get(section)
        if section not in _SECTIONS:
            raise r.error(f"unknown section [{section}]", section, None)
        if known is None:
            continue
        for key in parser.options(section):
            if key not in known:
                raise r.error(f"unknown key {key!r}", section, key)
    for section in ("scenario", "campaign"):
        if not parser.has_section(section):
            raise ConfigError(f"missing section [{section}]", path=path)
    if not parser.has_section("output"):
        parser.add_section("output")

    scenarios = _scenarios(r)
    user = r.integer("scenario", "user", 1)
    if user not in (1, 2):
        raise r.error("user must be 1 or 2", "scenario", "user")
    min_errors = r.integer("campaign", "min_errors", 200, minimum=0)
    decoder = r.text("campaign", "decoder", "exhaustive").lower()
    if decoder not in DECODER_NAMES:
        raise r.error(f"decoder must be one of {DECODER_NAMES}", "campaign", "decoder")
    fmt = r.text("output", "format", "csv").lower()
    if fmt not in FORMATS:
        raise r.error(f"format must be one of {FORMATS}", "output", "format")
    seed = r.integer("campaign", "seed", 0, minimum=0)
    if seed >= 2**64:
        raise r.error("seed must fit in 64 bits", "campaign", "seed")

    raw = {s: dict(parser.items(s)) for s in parser.sections() if s != "manifest"}
    return CampaignSpec(
        scenarios=scenarios,
        snr_db=_snr_grid(r),
        modes=_modes(r),
        seed=seed,
        max_trials=r.integer("campaign", "max_trials", 10**6),
        min_errors=min_errors or None,
        decoder=decoder,
        workers=r.integer("campaign", "workers", 1),
        user=user,
        out_path=r.text("output", "path", "results.csv"),
        out_format=fmt,
        raw=raw,
    )


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read spec: {exc.strerror}", path=str(path)) from None
    return parse_spec(text, path=str(path))


def dump_spec(spec):
    """Manifest text: the resolved spec plus version information; loads back with :func:`parse_spec`."""
    lines = ["[manifest]", f"artifact_version = {__version__}", f"kernels = {_backend()}", ""]
    resolved = {
        "campaign": {
            "snr_db": ", ".join(repr(x) for x in spec.snr_db),
            "modes": ", ".join(spec.modes),
            "seed": str(spec.seed),
            "max_trials": str(spec.max_trials),
            "min_errors": str(spec.min_errors or 0),
            "decoder": spec.decoder,
        },
        "output": {"path": spec.out_path, "format": spec.out_format},
    }
    for section in ("scenario", "campaign", "output"):
        lines.append(f"[{section}]")
        values = dict(spec.raw.get(section, {}))
        values.update(resolved.get(section, {}))
        values.pop("workers", None)
        for key in sorted(values):
            lines.append(f"{key} = {values[key]}")
        lines.append("")
    return "\n".join(lines)


def _backend():
    from . import kernels

    return kernels.BACKEND

