"""INI-style run configuration.

Example::

    [geometry]
    curve = circle
    radius = 1.2

    [material]
    omega = 2

    [source]
    mode = impedance

    [impedance]
    true = sin(t)**2
    initial = 0.5

    [target]
    g = sin(t)**2

    [cauchy]
    boundary_radius = 7

    [inversion]
    init_radius = 0.6

Every key has a default; ``--set section.key=value`` overrides single entries.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .inversion import InversionConfig
from .synth import ExperimentSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "builtin_examples", "resolve_config_path"]


class ConfigError(ValueError):
    """Malformed configuration file or override."""


SCHEMA = {
    "experiment": {"name": "custom"},
    "geometry": {"curve": "circle", "radius": "1.0", "known_stop": "pi"},
    "material": {"lam": "1", "mu": "1", "rho": "1", "omega": "1"},
    "source": {"mode": "point_source", "position": "4, 9", "scale": "1"},
    "impedance": {"true": "1", "initial": "0.5", "mode": "basis", "degree": "8", "clamp": "false"},
    "target": {"g": "manufactured"},
    "cauchy": {"boundary_radius": "4", "boundary_nodes": "128", "arc_nodes": "32"},
    "inversion": {
        "degree": "8",
        "nodes": "64",
        "init_radius": "0.3",
        "max_iter": "300",
        "tol": "1e-5",
        "damping": "1e-8",
        "normal_mode": "exact",
    },
    "noise": {"delta": "0", "seed": "0"},
}


def _float(text):
    text = text.strip()
    if text in ("pi", "2pi", "2*pi"):
        return np.pi * (2 if "2" in text else 1)
    return float(text)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """Resolved configuration: the experiment, the completion grid and the inversion settings."""

    spec: ExperimentSpec
    inversion: InversionConfig
    boundary_nodes: int = 128
    raw: dict = field(default_factory=dict)

    def to_ini(self):
        cp = configparser.ConfigParser()
        cp.read_dict(self.raw)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _parse(sections):
    s = {sec: dict(vals) for sec, vals in sections.items()}
    try:
        geo, mat, src = s["geometry"], s["material"], s["source"]
        imp, cau, inv, noi = s["impedance"], s["cauchy"], s["inversion"], s["noise"]
        position = tuple(float(v) for v in src["position"].split(","))
        if len(position) != 2:
            raise ConfigError("source.position needs two comma-separated numbers")
        known_stop = _float(geo["known_stop"])
        spec = ExperimentSpec(
            name=s["experiment"]["name"],
            geometry=geo["curve"].strip(),
            geometry_radius=_float(geo["radius"]),
            lam=_float(mat["lam"]),
            mu=_float(mat["mu"]),
            rho=_float(mat["rho"]),
            omega=_float(mat["omega"]),
            field_mode=src["mode"].strip(),
            source=position,
            scale=complex(src["scale"].replace(" ", "")),
            impedance=imp["true"].strip(),
            target=s["target"]["g"].strip(),
            boundary_radius=_float(cau["boundary_radius"]),
            init_radius=_float(inv["init_radius"]),
            chi0=_float(imp["initial"]),
            noise=_float(noi["delta"]),
            seed=int(noi["seed"]),
            arc_nodes=int(cau["arc_nodes"]),
            known_stop=known_stop,
        )
        icfg = InversionConfig(
            degree=int(inv["degree"]),
            impedance_degree=int(imp["degree"]),
            impedance_mode=imp["mode"].strip(),
            nodes=int(inv["nodes"]),
            max_iter=int(inv["max_iter"]),
            tol=_float(inv["tol"]),
            damping=_float(inv["damping"]),
            normal_mode=inv["normal_mode"].strip(),
            clamp_impedance=_bool(imp["clamp"]),
            known_stop=known_stop,
        )
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    if spec.geometry not in ("bean", "peanut", "starfish", "circle"):
        raise ConfigError(f"unknown curve {spec.geometry!r}")
    if spec.field_mode not in ("point_source", "impedance"):
        raise ConfigError(f"unknown source mode {spec.field_mode!r}")
    return RunConfig(spec, icfg, int(cau["boundary_nodes"]), s)


def load_config(text=None, path=None, overrides=()):
    """Parse config text (or a file) on top of the defaults and apply ``section.key=value`` overrides."""
    cp = configparser.ConfigParser()
    cp.read_dict(SCHEMA)
    try:
        if path is not None:
            with open(path) as fh:
                cp.read_file(fh)
        if text is not None:
            cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key in cp[sec]:
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        lhs, value = item.split("=", 1)
        sec, key = lhs.strip().split(".", 1)
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown override target {lhs!r}")
        cp[sec][key] = value.strip()
    return _parse({sec: cp[sec] for sec in cp.sections()})


def builtin_examples():
    """Names of the configuration files shipped with the package."""
    root = resources.files("elasto_coinv") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve_config_path(name_or_path):
    """Return a filesystem path for ``name_or_path``, falling back to the built-in examples."""
    import os

    if os.path.exists(name_or_path):
        return name_or_path
    stem = os.path.basename(name_or_path)
    stem = stem[:-4] if stem.endswith(".cfg") else stem
    candidate = resources.files("elasto_coinv") / "configs" / f"{stem}.cfg"
    if candidate.is_file():
        return str(candidate)
    raise ConfigError(f"no such config file or built-in example: {name_or_path!r}")
