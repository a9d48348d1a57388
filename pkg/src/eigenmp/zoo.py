"""Catalog of concrete operators with hand-checked metadata.

Each entry bundles an OperatorSpec, a default domain, per-hypothesis flags
(established by hand, not by sampling: H3-H6 quantify over coupled matrix
pairs and moduli that finite sampling cannot falsify) and a list of known
facts with provenance.  Facts whose ``verified`` flag is False are recorded
but never asserted by the reproduction suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import Domain, disk, interval, rectangle
from .operators import (
    LinearPart,
    OperatorSpec,
    eikonal_evaluator,
    inf_laplacian_evaluator,
    linear_evaluator,
    p_laplacian_evaluator,
    pk_evaluator,
    pucci_max_evaluator,
)


@dataclass(frozen=True)
class Fact:
    quantity: str
    relation: str  # "=", ">=", "<=", ">", "infinite", "fails", "holds"
    value: float | None
    provenance: str  # "PAPER" | "TRIVIAL" | "DERIVED"
    verified: bool = True
    note: str = ""


@dataclass
class ZooEntry:
    name: str
    spec: OperatorSpec
    domain_default: Domain
    coeffs: str  # human-readable coefficient description
    hypotheses: dict = field(default_factory=dict)  # H1..H6 -> bool
    known_facts: list = field(default_factory=list)


def _const(v):
    return lambda x: np.full(x.shape[0], float(v))


def _diag_const(*vals):
    vals = np.array(vals, dtype=float)
    return lambda x: np.broadcast_to(vals, (x.shape[0], vals.size)).copy()


def _linear_spec(name, dim, a_diag, b, c, sample_box, coeffs=None):
    lp = LinearPart(a_diag, b, c)
    return OperatorSpec(
        name=name,
        dim=dim,
        alpha=1.0,
        kind="linear",
        evaluator=linear_evaluator(lp),
        scheme={"family": "linear"},
        linear_part=lp,
        sample_box=sample_box,
    )


def _h(h1=True, h2=True, h3=True, h4=True, h5=True, h6=True):
    return {"H1": h1, "H2": h2, "H3": h3, "H4": h4, "H5": h5, "H6": h6}


def _build_catalog():
    entries = []
    pi2 = float(np.pi**2)

    # --- second order, nondegenerate -------------------------------------
    entries.append(
        ZooEntry(
            "neg_u_xx",
            _linear_spec("neg_u_xx", 1, _diag_const(1.0), _diag_const(0.0), _const(0.0), ((-1.0, 1.0),)),
            interval(0, 1),
            "a=1; b=0; c=0",
            _h(),
            [
                Fact("mu1", "=", pi2, "DERIVED", note="principal Dirichlet eigenvalue of -d2/dx2 on (0,1)"),
                Fact("mp", "holds", None, "DERIVED"),
                Fact("fichera", "holds", None, "DERIVED", note="dAd = 1 > 0 at both endpoints"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "neg_laplace_2d",
            _linear_spec(
                "neg_laplace_2d", 2, _diag_const(1.0, 1.0), _diag_const(0.0, 0.0), _const(0.0), ((-1.0, 1.0),) * 2
            ),
            rectangle(0, 1, 0, 1),
            "a=(1,1); b=0; c=0",
            _h(),
            [Fact("mu1", "=", 2 * pi2, "DERIVED", note="unit square")],
        )
    )
    entries.append(
        ZooEntry(
            "neg_u_xx_plus_u",
            _linear_spec("neg_u_xx_plus_u", 1, _diag_const(1.0), _diag_const(0.0), _const(-1.0), ((-1.0, 1.0),)),
            interval(0, 1),
            "a=1; b=0; c=-1",
            _h(),
            [
                Fact("mu1", "=", pi2 + 1, "DERIVED"),
                Fact("mp", "holds", None, "PAPER", note="min F(x,1,0,0) = 1 > 0 sufficient condition"),
            ],
        )
    )

    # --- first order counterexamples -------------------------------------
    entries.append(
        ZooEntry(
            "half_x_drift_minus_u",
            _linear_spec(
                "half_x_drift_minus_u",
                1,
                _diag_const(0.0),
                lambda x: -0.5 * x[:, :1],
                _const(1.0),
                ((-1.0, 1.0),),
            ),
            interval(0, 1),
            "a=0; b=-x/2; c=1  (F[u] = (x/2)u' - u)",
            _h(),
            [
                Fact("lambda1", "infinite", None, "PAPER", note="supersolutions x^n give lambda = n/2 - 1"),
                Fact("mp", "fails", None, "PAPER", note="witness u = x(1-x)"),
                Fact("mu1", "<=", 0.0, "PAPER"),
                Fact("mu1", "=", -1.0, "DERIVED", note="mu1 of (x/2)u' is 0; the -u term shifts by -1"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "neg_two_x_drift",
            _linear_spec(
                "neg_two_x_drift", 1, _diag_const(0.0), lambda x: 2.0 * x[:, :1], _const(0.0), ((-1.0, 1.0),)
            ),
            interval(0, 1),
            "a=0; b=2x; c=0  (F[u] = -2xu')",
            _h(),
            [
                Fact("lambda_star", ">=", 1.0, "PAPER"),
                Fact("mp", "fails", None, "PAPER", note="witness = indicator of the left endpoint"),
                Fact("mu1", "<=", 0.0, "PAPER"),
                Fact("fichera_left", "fails", None, "DERIVED", note="dAd = 0, drift = 0 at x = 0"),
                Fact("fichera_right", "holds", None, "DERIVED", note="drift = -2 at x = 1"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "neg_x_drift",
            _linear_spec("neg_x_drift", 1, _diag_const(0.0), lambda x: x[:, :1].copy(), _const(0.0), ((-1.0, 1.0),)),
            interval(0, 1),
            "a=0; b=x; c=0  (F[u] = -xu')",
            _h(),
            [
                Fact("lambda1", "=", 0.0, "PAPER"),
                Fact("lambda_bar1", "=", 0.0, "PAPER"),
                Fact("mu1", "=", 0.0, "PAPER", note="knife edge: every notion vanishes"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "x_squared_drift",
            _linear_spec(
                "x_squared_drift", 1, _diag_const(0.0), lambda x: -(x[:, :1] ** 2), _const(0.0), ((-1.0, 1.0),)
            ),
            interval(-1, 1),
            "a=0; b=-x^2; c=0  (F[u] = x^2 u')",
            _h(),
            [
                Fact("mu1", "=", 0.0, "PAPER"),
                Fact("eigenfunction", "fails", None, "PAPER", note="no principal eigenfunction exists"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "neg_sqrt_x_drift",
            _linear_spec(
                "neg_sqrt_x_drift",
                1,
                _diag_const(0.0),
                lambda x: np.sqrt(np.maximum(x[:, :1], 0.0)),
                _const(0.0),
                ((0.0, 1.0),),
            ),
            interval(0, 1),
            "a=0; b=sqrt(x); c=0  (F[u] = -sqrt(x)u')",
            _h(h4=False),
            [
                Fact("lambda_bar1", ">=", 0.25, "PAPER", note="certificate 2 - sqrt(x)"),
                Fact("mp", "fails", None, "PAPER", note="witness = indicator of the left endpoint"),
                Fact("mu1", "=", 0.0, "PAPER"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "neg_x_u_xx",
            _linear_spec(
                "neg_x_u_xx",
                1,
                lambda x: np.maximum(x[:, :1], 0.0),
                _diag_const(0.0),
                _const(0.0),
                ((0.0, 1.0),),
            ),
            interval(0, 1),
            "a=x; b=0; c=0  (F[u] = -xu'')",
            _h(h4=False),
            [
                Fact("lambda_bar1", ">=", 0.125, "PAPER", note="certificate 1 + sqrt(x)"),
                Fact("mp", "fails", None, "PAPER"),
                Fact("mu1", "=", 0.0, "PAPER"),
            ],
        )
    )
    entries.append(
        ZooEntry(
            "x_squared_absorption",
            _linear_spec(
                "x_squared_absorption", 1, _diag_const(0.0), _diag_const(0.0), lambda x: -(x[:, 0] ** 2), ((-1.0, 1.0),)
            ),
            interval(-1, 1),
            "a=0; b=0; c=-x^2  (F[u] = x^2 u)",
            _h(),
            [
                Fact("lambda1", "=", 0.0, "PAPER"),
                Fact("mu1", "=", 0.0, "PAPER"),
                Fact("lambda_star", "=", 0.0, "PAPER"),
            ],
        )
    )

    # --- gradient-norm (eikonal) family ----------------------------------
    for name, cval, facts in [
        ("eikonal", 0.0, [Fact("mu1", "=", 0.0, "DERIVED", note="-|u'| is nonpositive on positives")]),
        (
            "eikonal_coercive",
            -1.0,
            [
                Fact("mu1", "=", 1.0, "DERIVED", note="constants certify 1; no gradient term helps"),
                Fact("mp", "holds", None, "PAPER", note="min F(x,1,0,0) = 1 > 0 sufficient condition"),
            ],
        ),
    ]:
        bfun, cfun = _const(1.0), _const(cval)
        entries.append(
            ZooEntry(
                name,
                OperatorSpec(
                    name=name,
                    dim=1,
                    alpha=1.0,
                    kind="first-order",
                    evaluator=eikonal_evaluator(bfun, cfun),
                    scheme={"family": "eikonal", "b": bfun, "c": cfun},
                    sample_box=((-1.0, 1.0),),
                ),
                interval(0, 1),
                "F[u] = -|u'| - (%g)u" % cval,
                _h(),
                facts,
            )
        )

    # --- subelliptic ------------------------------------------------------
    alpha_g = 2.0
    grushin_a = lambda x: np.column_stack([np.ones(x.shape[0]), np.abs(x[:, 0]) ** alpha_g])
    entries.append(
        ZooEntry(
            "grushin",
            _linear_spec(
                "grushin", 2, grushin_a, _diag_const(0.0, 0.0), _const(0.0), ((-1.0, 1.0), (0.0, 1.0))
            ),
            rectangle(-1, 1, 0, 1),
            "a=(1, |x|^2); b=0; c=0  (Grushin)",
            _h(),
            [
                Fact("mu1", ">", 0.0, "PAPER", note="nondegenerate direction e1 plus F(x,1,0,0) >= 0"),
                Fact("mp", "holds", None, "PAPER"),
            ],
        )
    )

    # --- p- and infinity-Laplacian ----------------------------------------
    p = 3.0
    entries.append(
        ZooEntry(
            "p_laplacian_3",
            OperatorSpec(
                name="p_laplacian_3",
                dim=1,
                alpha=p - 1.0,
                kind="fully-nonlinear",
                evaluator=p_laplacian_evaluator(p),
                scheme={"family": "plap", "p": p},
                sample_box=((-1.0, 1.0),),
            ),
            interval(0, 1),
            "F[u] = -div(|u'|^{p-2}u'), p=3 (expanded form)",
            _h(h5=False),  # alpha = p-1 = 2 > 1
            [Fact("alpha", "=", p - 1.0, "PAPER", note="(p-1)-homogeneous")],
        )
    )
    for dim, dom in [(1, interval(0, 1)), (2, disk(0, 0, 1))]:
        entries.append(
            ZooEntry(
                "inf_laplacian_%dd" % dim,
                OperatorSpec(
                    name="inf_laplacian_%dd" % dim,
                    dim=dim,
                    alpha=1.0,
                    kind="fully-nonlinear",
                    evaluator=inf_laplacian_evaluator(),
                    scheme={"family": "inflap"},
                    sample_box=((-1.0, 1.0),) * dim,
                ),
                dom,
                "F[u] = -(Du/|Du|) D^2u (Du/|Du|)",
                _h(),
                [Fact("mp", "holds", None, "PAPER", note="barriers exist on any boundary")],
            )
        )

    # --- Hessian-eigenvalue operators --------------------------------------
    for k in (1, 2):
        entries.append(
            ZooEntry(
                "neg_pk_%d" % k,
                OperatorSpec(
                    name="neg_pk_%d" % k,
                    dim=2,
                    alpha=1.0,
                    kind="fully-nonlinear",
                    evaluator=pk_evaluator(k),
                    scheme={"family": "pk", "k": k},
                    sample_box=((-1.0, 1.0),) * 2,
                ),
                disk(0, 0, 1),
                "F[u] = -(sum of %d largest Hessian eigenvalues)" % k,
                _h(),
                [
                    Fact(
                        "mu1",
                        ">",
                        0.0,
                        "PAPER",
                        note="paraboloid certificate k - |x|^2 with k above the squared domain radius",
                    ),
                    Fact("mp", "holds", None, "PAPER",
                         note="subsolutions are dominated by affine data on any bounded domain"),
                ],
            )
        )
    entries.append(
        ZooEntry(
            "pucci_max_degenerate",
            OperatorSpec(
                name="pucci_max_degenerate",
                dim=2,
                alpha=1.0,
                kind="fully-nonlinear",
                evaluator=pucci_max_evaluator(),
                scheme={"family": "pucci"},
                sample_box=((-1.0, 1.0),) * 2,
            ),
            disk(0, 0, 1),
            "F[u] = -(sum of positive parts of Hessian eigenvalues)",
            _h(),
            [
                Fact(
                    "mu1",
                    ">",
                    0.0,
                    "PAPER",
                    verified=False,
                    note=(
                        "recorded, not asserted: F[phi] <= 0 for every smooth phi under this "
                        "sign convention, so no smooth certificate can witness positivity and "
                        "the discrete estimator returns mu1 <= 0"
                    ),
                ),
            ],
        )
    )
    return {e.name: e for e in entries}


_CATALOG = None


def catalog():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build_catalog()
    return _CATALOG


def get(name):
    cat = catalog()
    if name not in cat:
        raise KeyError("unknown zoo operator %r (known: %s)" % (name, ", ".join(sorted(cat))))
    return cat[name]


def names():
    return sorted(catalog())


def _domain_repr(dom):
    return "%s %s" % (dom.shape, " ".join("%g" % v for v in dom.params))


def write_catalog(path):
    """Serialize the catalog as a structured text file, one record each."""
    lines = []
    for name in names():
        e = get(name)
        lines.append("operator %s" % name)
        lines.append("  dim %d" % e.spec.dim)
        lines.append("  alpha %g" % e.spec.alpha)
        lines.append("  kind %s" % e.spec.kind)
        lines.append("  coefficients %s" % e.coeffs)
        lines.append("  domain %s" % _domain_repr(e.domain_default))
        lines.append(
            "  hypotheses %s"
            % " ".join("%s=%s" % (k, "yes" if v else "no") for k, v in sorted(e.hypotheses.items()))
        )
        for f in e.known_facts:
            val = "" if f.value is None else " %.12g" % f.value
            flag = "verified" if f.verified else "unverified"
            note = (" # " + f.note) if f.note else ""
            lines.append("  fact %s %s%s [%s, %s]%s" % (f.quantity, f.relation, val, f.provenance, flag, note))
        lines.append("end")
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text


def parse_catalog(text):
    """Parse the textual catalog back into per-operator metadata dicts."""
    records = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("operator "):
            current = {"name": line.split(None, 1)[1], "facts": []}
        elif line == "end":
            records[current["name"]] = current
            current = None
        elif line.startswith("fact "):
            current["facts"].append(line[5:])
        else:
            key, _, val = line.partition(" ")
            current[key] = val
    return records
