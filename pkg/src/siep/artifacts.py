"""On-disk solve and tower artifacts, and their independent re-verification.

A solve directory holds ``solution.json``, ``matrix.coo`` and
``levels/order_NNN.coo`` (one file per intermediate order). A tower
directory holds ``tower.json`` and ``levels/level_NNN.coo``. All floats are
written with ``repr`` so a reload is bit-exact.

``verify`` trusts nothing in the JSON except the inputs (graph, targets,
options). Every recorded claim is re-derived from the matrix files.
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coo
from .errors import FormatError
from .finite import SolveOptions
from .graph import FiniteGraph, LowerAdjacencyStream, induced_prefix, validate_pattern
from .infinite import (
    DenseSequenceSpec,
    SpectralFingerprint,
    TruncationTower,
    certify_spectrum,
    compare_fingerprints,
    fingerprint,
    tail_bound,
    telescoping_gap,
)
from .linalg import direct_sum, eigenvalues, hausdorff_distance, operator_norm
from .oracle import MAX_CHARPOLY_ORDER, charpoly_spectrum_check
from .wsp import has_wsp

FORMAT_VERSION = 1


def _dump_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _options_from_json(d):
    return SolveOptions(
        epsilon=d.get("epsilon"),
        edge_floor=d["edge_floor"],
        tol=d["tol"],
        wsp_tol=d["wsp_tol"],
        spectrum_tol=d["spectrum_tol"],
        method=d["method"],
    )


def save_solution(sol, out_dir, run=None):
    out = Path(out_dir)
    (out / "levels").mkdir(parents=True, exist_ok=True)
    names = []
    for a in sol.levels:
        name = f"levels/order_{a.shape[0]:03d}.coo"
        coo.write(out / name, a)
        names.append(name)
    coo.write(out / "matrix.coo", sol.matrix)
    doc = {"kind": "solve", "format": FORMAT_VERSION, "run": run or {}, "matrix": "matrix.coo", "levels": names}
    doc.update(sol.to_json())
    _dump_json(out / "solution.json", doc)
    return out


def save_tower(tower, out_dir, certificate, fp, run=None):
    out = Path(out_dir)
    (out / "levels").mkdir(parents=True, exist_ok=True)
    names = []
    for a in tower.matrices:
        name = f"levels/level_{a.shape[0]:03d}.coo"
        coo.write(out / name, a)
        names.append(name)
    doc = {
        "kind": "tower",
        "format": FORMAT_VERSION,
        "run": run or {},
        "sequence": tower.sequence.to_json(),
        "graph": tower.stream.describe(),
        "graph_header": tower.stream.header(),
        "levels": names,
        "lambdas": list(tower.lambdas),
        "budgets": tower.budgets,
        "deltas": tower.step_norm_deltas,
        "options": tower.options.to_json(),
        "steps": [r.to_json() for r in tower.records],
        "certificate": certificate.to_json(),
        "tail_sample": len(certificate.tail),
        "fingerprint": fp.to_json(),
    }
    _dump_json(out / "tower.json", doc)
    return out


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    kind: str
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def grouped_lines(self):
        """One line per level or step; failing checks are listed in full."""
        groups = {}
        for c in self.checks:
            groups.setdefault(c.name.split(":")[0], []).append(c)
        out = []
        for key, cs in groups.items():
            bad = [c for c in cs if not c.ok]
            out.append(f"{'FAIL' if bad else 'PASS'}  {key} ({len(cs) - len(bad)}/{len(cs)})")
            out += [f"        {c.name}" + (f": {c.detail}" if c.detail else "") for c in bad]
        out.append(self.lines()[-1])
        return out

    def lines(self):
        out = [f"{'PASS' if c.ok else 'FAIL'}  {c.name}" + (f": {c.detail}" if c.detail else "") for c in self.checks]
        n_bad = len(self.failures())
        out.append(f"{self.kind}: {len(self.checks) - n_bad}/{len(self.checks)} checks passed")
        return out


def _spread(values):
    return float(max(values) - min(values)) if len(values) > 1 else 0.0


def _check_chain(report, levels, lambdas, prefix_graph, steps, opts, default_budget):
    """Checks shared by solve and tower artifacts, one block per level."""
    for k, a in enumerate(levels, start=1):
        tag = f"order {k}"
        if a.shape != (k, k):
            report.add(f"{tag}: shape", False, f"file has order {a.shape[0]}")
            return
        pat = validate_pattern(a, prefix_graph(k), opts.edge_floor)
        report.add(f"{tag}: pattern", pat.ok, "; ".join(pat.violations[:3]))
        lam = lambdas[:k]
        err = hausdorff_distance(eigenvalues(a), lam)
        lim = opts.spectrum_tol * max(1.0, _spread(lam))
        report.add(f"{tag}: spectrum", err <= lim, f"hausdorff {err:.3g} (limit {lim:.3g})")
        if 1 < k <= MAX_CHARPOLY_ORDER:
            r = 0.5 * _spread(lam) or 1.0
            ok = charpoly_spectrum_check(a, lam, tol=opts.spectrum_tol * max(1.0, 2.0 * r) / r)
            report.add(f"{tag}: charpoly oracle", ok)
        cert = has_wsp(a, opts.wsp_tol)
        report.add(f"{tag}: WSP", cert.holds, f"kernel dimension {cert.kernel_dimension}")

    if len(steps) != len(levels) - 1:
        report.add("step records", False, f"{len(steps)} records for {len(levels)} levels")
        return
    for rec in steps:
        k = rec["step_index"]
        tag = f"step {k}->{k + 1}"
        if not 1 <= k < len(levels):
            report.add(f"{tag}: index", False)
            continue
        prev, cur = levels[k - 1], levels[k]
        if rec["appended_eigenvalue"] != lambdas[k]:
            report.add(f"{tag}: appended eigenvalue", False, f"{rec['appended_eigenvalue']!r} != {lambdas[k]!r}")
        budget = rec["budget"]
        if default_budget is not None:
            want = default_budget(k)
            report.add(f"{tag}: budget schedule", budget == want and budget <= 2.0 ** -k, f"{budget!r} vs {want!r}")
        delta = operator_norm(cur - direct_sum(prev, [[lambdas[k]]]))
        report.add(f"{tag}: norm delta < budget", delta < budget, f"{delta:.3g} < {budget:.3g}")
        rel = abs(delta - rec["achieved_norm_delta"]) / max(delta, 1e-300)
        report.add(f"{tag}: recorded delta", rel <= 1e-8 or delta == rec["achieved_norm_delta"], f"recorded {rec['achieved_norm_delta']!r}, recomputed {delta!r}")
        off = ~np.eye(k, dtype=bool)
        same = np.array_equal(prev[off], cur[:k, :k][off])
        report.add(f"{tag}: old edges unchanged", same)
        vals = [float(cur[i, j]) for i, j in rec["new_edges"]]
        report.add(f"{tag}: recorded edge values", vals == rec["edge_values"])
        report.add(f"{tag}: recorded WSP", bool(rec["wsp"]["holds"]))


def _load_levels(base, names):
    return [coo.read(base / name) for name in names]


def verify_solution(path):
    base = Path(path)
    doc = json.loads((base / "solution.json").read_text())
    report = VerifyReport("solve")
    graph = FiniteGraph.from_json(doc["graph"])
    lambdas = [float(v) for v in doc["target_spectrum"]]
    opts = _options_from_json(doc["options"])
    levels = _load_levels(base, doc["levels"])
    matrix = coo.read(base / doc["matrix"])
    report.add("matrix.coo equals last level", np.array_equal(matrix, levels[-1]))
    report.add("target count", len(lambdas) == graph.n == len(levels), f"{len(lambdas)} targets, {graph.n} vertices")

    def prefix(k):
        return FiniteGraph(k, frozenset(e for e in graph.edges if e[1] < k))

    default = opts.budget if doc["options"].get("budget_schedule") != "custom" else None
    _check_chain(report, levels, lambdas, prefix, doc["steps"], opts, default)
    return report


def verify_tower(path):
    base = Path(path)
    doc = json.loads((base / "tower.json").read_text())
    report = VerifyReport("tower")
    seq = DenseSequenceSpec.from_json(doc["sequence"])
    stream = LowerAdjacencyStream.from_description(doc["graph"])
    opts = _options_from_json(doc["options"])
    levels = _load_levels(base, doc["levels"])
    n = len(levels)
    lambdas = seq.terms(0, n)
    report.add("sequence terms", lambdas == doc["lambdas"])
    report.add("graph header", stream.header() == doc["graph_header"])
    _check_chain(report, levels, lambdas, lambda k: induced_prefix(stream, k), doc["steps"], opts, opts.budget)
    for rec, d, b in zip(doc["steps"], doc["deltas"], doc["budgets"]):
        k = rec["step_index"]
        report.add(f"step {k}->{k + 1}: chain bound 2^-{k}", d < 2.0 ** -k and b <= 2.0 ** -k)
    if n == 0:
        return report

    tower = TruncationTower(seq, stream, lambdas, levels, [], opts)
    for m in range(1, n):
        gap, bound = telescoping_gap(tower, m)
        report.add(f"telescoping from level {m}", gap <= bound, f"{gap:.3g} <= {bound:.3g}")

    stored = doc["certificate"]
    cert = certify_spectrum(tower, doc["tail_sample"])
    tb = tail_bound(n)
    report.add("certificate tail bound", stored["tail_bound"] == tb == math.fsum(2.0 ** -k for k in range(n, 1100)), f"{stored['tail_bound']!r}")
    ev_err = float(np.max(np.abs(np.asarray(stored["eigenvalues"]) - cert.eigenvalues)))
    report.add("certificate eigenvalues", ev_err <= 1e-12 * max(1.0, seq.bound), f"max difference {ev_err:.3g}")
    approx = cert.approx_spectrum
    far = max(float(np.min(np.abs(approx - x))) for x in lambdas)
    report.add("spectrum containment", far <= tb, f"max distance {far:.3g} <= {tb:.3g}")

    fp_stored = SpectralFingerprint.from_json(doc["fingerprint"])
    fp = fingerprint(tower, fp_stored.delta, certificate=cert)
    verdict, reasons = compare_fingerprints(fp_stored, fp, tol=1e-12)
    same = not reasons and fp.unresolved == fp_stored.unresolved
    report.add("fingerprint recomputed", same, "; ".join(reasons[:3]))
    report.add("multiplicities positive", all(m >= 1 for _, m in fp.isolated_points))
    return report


def verify(path):
    """Re-derive every certificate stored under ``path``."""
    base = Path(path)
    if (base / "solution.json").is_file():
        return verify_solution(base)
    if (base / "tower.json").is_file():
        return verify_tower(base)
    raise FormatError(f"{base} holds neither solution.json nor tower.json")
