"""Run configuration: flat sectioned text (INI) or JSON, strictly validated.

A config has a ``[common]`` section plus one section per command; unknown
sections or keys are rejected.  Operators come from the catalog
(``operator = zoo:<name>``) or as linear coefficient expressions
(``operator = linear`` with ``a1``, ``a2``, ``b1``, ``b2``, ``c`` and
``dim``), with the expression grammar of :mod:`eigenmp.expressions`.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field

import numpy as np

from . import zoo
from .domains import Domain
from .expressions import parse as parse_expr
from .operators import LinearPart, OperatorSpec, linear_evaluator


class ConfigError(ValueError):
    pass


COMMANDS = (
    "validate",
    "eigen",
    "mu1",
    "lambda-star",
    "mp",
    "certify",
    "fichera",
    "barrier",
    "paper",
)

_COMMON_KEYS = {
    "operator", "domain", "h", "lambda_cap", "tol", "rng_seed", "boundary_clause",
    "backend", "a1", "a2", "b1", "b2", "c", "dim",
}
_SECTION_KEYS = {
    "validate": {"samples"},
    "eigen": {"h", "tol", "lambda_cap", "viscous_eps"},
    "mu1": {"h", "tol", "lambda_cap", "eps_list"},
    "lambda-star": {"h", "tol", "lambda_cap", "eps_list"},
    "mp": {"h", "cap", "mp_tol", "max_sweeps"},
    "certify": {"certificate", "lambda", "samples", "declared_region"},
    "fichera": {"n_samples"},
    "barrier": {"xi", "delta", "band", "n_samples"},
    "paper": {"profile"},
}

_DEFAULTS = {
    "h": 0.0025,
    "lambda_cap": 30.0,
    "tol": 0.02,
    "rng_seed": 0,
    "boundary_clause": "relaxed-min",
    "backend": "auto",
    "samples": 10000,
    "eps_list": [0.2, 0.1, 0.05],
    "viscous_eps": 0.0,
    "cap": 1.0,
    "mp_tol": 1e-3,
    "max_sweeps": 200000,
    "n_samples": 64,
    "band": 0.1,
    "profile": "full",
}


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)

    def resolve(self, command):
        """Merged common + command-section key/value mapping with defaults."""
        if command not in COMMANDS:
            raise ConfigError("unknown command %r" % command)
        merged = dict(_DEFAULTS)
        merged.update(self.sections.get("common", {}))
        merged.update(self.sections.get(command, {}))
        return merged


def _parse_value(key, raw):
    if isinstance(raw, (int, float, bool, list)):
        return raw
    raw = str(raw).strip()
    if key in ("eps_list", "xi"):
        return [float(tok) for tok in raw.replace(",", " ").split()]
    if key in ("rng_seed", "samples", "n_samples", "max_sweeps", "dim"):
        return int(raw)
    if key in ("h", "lambda_cap", "tol", "viscous_eps", "cap", "mp_tol", "lambda",
               "delta", "band"):
        return float(raw)
    return raw


def _validate_section(name, mapping):
    if name == "common":
        allowed = _COMMON_KEYS
    elif name in _SECTION_KEYS:
        allowed = _SECTION_KEYS[name] | _COMMON_KEYS
    else:
        raise ConfigError("unknown config section [%s]" % name)
    bad = set(mapping) - allowed
    if bad:
        raise ConfigError("unknown key(s) %s in section [%s]" % (sorted(bad), name))


def load_config(path):
    """Load a config file (INI layout, or JSON when the file parses as it)."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    sections = {}
    if stripped.startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object of sections")
        for name, mapping in data.items():
            if not isinstance(mapping, dict):
                raise ConfigError("section %r must be an object" % name)
            _validate_section(name, mapping)
            sections[name] = {k: _parse_value(k, v) for k, v in mapping.items()}
    else:
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("cannot parse config: %s" % exc) from exc
        for name in cp.sections():
            mapping = dict(cp.items(name))
            _validate_section(name, mapping)
            sections[name] = {k: _parse_value(k, v) for k, v in mapping.items()}
    cfg = RunConfig(sections)
    _sanity_check(cfg)
    return cfg


def _sanity_check(cfg):
    for name, mapping in cfg.sections.items():
        for key in ("h", "lambda_cap", "tol", "cap", "samples", "n_samples"):
            if key in mapping and not np.all(np.asarray(mapping[key], dtype=float) > 0):
                raise ConfigError("%s must be positive in [%s]" % (key, name))
        if "eps_list" in mapping:
            eps = mapping["eps_list"]
            if not eps or any(e <= 0 for e in eps):
                raise ConfigError("eps_list must be positive in [%s]" % name)


def build_domain(descriptor):
    """'interval a b' | 'rectangle a b c d' | 'disk cx cy r'."""
    if isinstance(descriptor, Domain):
        return descriptor
    toks = str(descriptor).split()
    try:
        shape, params = toks[0], tuple(float(t) for t in toks[1:])
        return Domain(shape, params)
    except Exception as exc:
        raise ConfigError("bad domain descriptor %r: %s" % (descriptor, exc)) from exc


def build_operator(merged):
    """OperatorSpec (and its default domain, if any) from resolved config."""
    name = merged.get("operator")
    if name is None:
        raise ConfigError("config needs an operator")
    if str(name).startswith("zoo:"):
        entry = zoo.get(str(name)[4:])
        domain = build_domain(merged["domain"]) if "domain" in merged else entry.domain_default
        return entry.spec, domain
    if str(name) != "linear":
        raise ConfigError("operator must be 'zoo:<name>' or 'linear', got %r" % name)
    if "domain" not in merged:
        raise ConfigError("linear operators need an explicit domain")
    domain = build_domain(merged["domain"])
    dim = int(merged.get("dim", domain.dim))
    if dim != domain.dim:
        raise ConfigError("operator dim %d does not match domain dim %d" % (dim, domain.dim))
    exprs = {}
    for key, default in (("a1", "0"), ("a2", "0"), ("b1", "0"), ("b2", "0"), ("c", "0")):
        exprs[key] = parse_expr(str(merged.get(key, default)))

    def a_diag(x):
        cols = [exprs["a1"].value(x)]
        if dim == 2:
            cols.append(exprs["a2"].value(x))
        return np.column_stack(cols)

    def bvec(x):
        cols = [exprs["b1"].value(x)]
        if dim == 2:
            cols.append(exprs["b2"].value(x))
        return np.column_stack(cols)

    def cfun(x):
        return exprs["c"].value(x)

    lp = LinearPart(a_diag, bvec, cfun)
    lo, hi = domain.bounding_box
    spec = OperatorSpec(
        name="linear[a=%s,%s b=%s,%s c=%s]"
        % tuple(exprs[k].src for k in ("a1", "a2", "b1", "b2", "c")),
        dim=dim,
        alpha=1.0,
        kind="linear",
        evaluator=linear_evaluator(lp),
        scheme={"family": "linear"},
        linear_part=lp,
        sample_box=tuple((float(lo[k]), float(hi[k])) for k in range(dim)),
    )
    return spec, domain
