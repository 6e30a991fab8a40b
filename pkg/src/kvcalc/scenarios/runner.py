"""Materialize scenarios and execute their assertions.

Bindings resolve lazily by name with cycle detection, so scenario files can
declare sections in any order (a deformed connection may reference a cochain
that references an earlier connection). All randomness is derived from
(global seed, scenario name), making reports reproducible byte for byte.
"""
from __future__ import annotations

import json
import time
import zlib
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..chart import Chart, ChartError
from ..connection import (
    Connection,
    average,
    conjugate,
    connection_from_tensor,
    flat_connection,
    levi_civita,
)
from ..derham import DerhamError, twisted_form_from_terms
from ..expr import DomainError, ExprError
from ..fields import (
    BilinearVVField,
    FieldError,
    MetricField,
    OneForm,
    ProbeConfig,
    TensorField02,
    VectorField,
    random_affine_vector_field,
    random_polynomial,
    random_tensor12,
    random_vector_field,
)
from ..kv import (
    Cochain,
    ContextError,
    KVContext,
    KVError,
    ad_cochain,
    coboundary_candidate,
    conformal_cochain,
    conn_diff_cochain,
    connection_cochain,
    curvature_cochain,
    d2_probe,
    d_kv,
    dual_projective_cochain,
    identity_cochain,
    projective_cochain,
    scalar_cochain,
    tensor_cochain,
    vector_cochain,
)
from ..parse import ParseError, parse
from .model import Assertion, Scenario, ScenarioFormatError, scenario_from_toml
from .probes import ScenarioEnv, ScenarioSetupError, _scalar_arg, run_probe
from .registry import SCENARIOS

__all__ = [
    "AssertionResult",
    "FuzzReport",
    "ScenarioReport",
    "ScenarioSetupError",
    "build_env",
    "run_scenario",
    "run_all",
    "run_d2_fuzz",
    "obstruction_check_6_2",
    "available_scenarios",
    "report_to_json_dict",
    "combined_json",
]

# expected-fail assertions must be witnessed by at least this residual
# unless the assertion overrides via args.witness
DEFAULT_WITNESS = 1e-3

_SETUP_ERRORS = (ScenarioSetupError, ScenarioFormatError, ParseError,
                 ChartError, FieldError, KVError, DerhamError, ExprError,
                 DomainError, ContextError)


def derived_config(cfg: ProbeConfig, scenario_name: str) -> ProbeConfig:
    """Per-scenario seed: stable mix of the global seed and the name."""
    mixed = np.random.SeedSequence(
        [cfg.seed, zlib.crc32(scenario_name.encode())])
    return replace(cfg, seed=int(mixed.generate_state(1)[0]))


# ---------------------------------------------------------------------------
# binding resolution


class _EnvBuilder:
    """Resolves named bindings on demand, detecting reference cycles."""

    def __init__(self, scn: Scenario, cfg: ProbeConfig):
        self.scn = scn
        self.cfg = cfg
        self.chart = _build_chart(scn.chart)
        self.env = ScenarioEnv(chart=self.chart, cfg=cfg)
        self._ctx_cache = None
        self._building: set = set()

    def _section(self, section: str) -> Mapping:
        return self.scn.bindings.get(section, {})

    def _spec(self, section: str, name: str) -> Mapping:
        table = self._section(section)
        if name not in table:
            raise ScenarioSetupError(
                f"{self.scn.name}: no {section} binding named {name!r}")
        return table[name]

    def _guard(self, key: tuple):
        if key in self._building:
            raise ScenarioSetupError(
                f"{self.scn.name}: circular binding reference at {key}")
        self._building.add(key)

    def scalar(self, name: str):
        if name not in self.env.scalars:
            self.env.scalars[name] = parse(str(self._spec("scalars", name)),
                                           self.chart)
        return self.env.scalars[name]

    def vfield(self, name: str) -> VectorField:
        if name not in self.env.fields:
            comps = self._spec("fields", name)
            self.env.fields[name] = VectorField(
                self.chart, tuple(parse(str(c), self.chart) for c in comps))
        return self.env.fields[name]

    def oneform(self, name: str) -> OneForm:
        if name not in self.env.oneforms:
            comps = self._spec("oneforms", name)
            self.env.oneforms[name] = OneForm(
                self.chart, tuple(parse(str(c), self.chart) for c in comps))
        return self.env.oneforms[name]

    def metric(self, name: str) -> MetricField:
        if name not in self.env.metrics:
            self.env.metrics[name] = self._make_metric(
                self._spec("metrics", name))
        return self.env.metrics[name]

    def _make_metric(self, spec: Mapping) -> MetricField:
        kind = spec.get("kind", "explicit")
        if kind == "euclidean":
            return MetricField.euclidean(self.chart)
        if kind == "diagonal":
            return MetricField.diagonal(self.chart, tuple(
                parse(str(e), self.chart) for e in spec["entries"]))
        if kind == "from_potential":
            return MetricField.from_potential(
                self.chart, parse(str(spec["potential"]), self.chart))
        if kind == "conformal_euclidean":
            return MetricField.conformal_euclidean(
                self.chart, parse(str(spec["factor"]), self.chart))
        if kind == "explicit":
            rows = tuple(tuple(parse(str(e), self.chart) for e in row)
                         for row in spec["rows"])
            return MetricField(self.chart, rows)
        raise ScenarioSetupError(f"unknown metric kind {kind!r}")

    def tensor(self, name: str) -> TensorField02:
        if name not in self.env.tensors:
            spec = self._spec("tensors", name)
            rows = tuple(tuple(parse(str(e), self.chart) for e in row)
                         for row in spec["rows"])
            self.env.tensors[name] = TensorField02(self.chart, rows)
        return self.env.tensors[name]

    def sym2(self, name: str):
        """A metric when declared as one, else a plain 0-2 tensor."""
        if name in self._section("metrics"):
            return self.metric(name)
        return self.tensor(name)

    def connection(self, name: str) -> Connection:
        if name in self.env.connections:
            return self.env.connections[name]
        key = ("connection", name)
        self._guard(key)
        try:
            c = self._make_connection(name, self._spec("connections", name))
        finally:
            self._building.discard(key)
        self.env.connections[name] = c
        return c

    def _make_connection(self, name: str, spec: Mapping) -> Connection:
        kind = spec.get("kind", "explicit")
        if kind == "flat":
            return flat_connection(self.chart, label=name)
        if kind == "levi_civita":
            return levi_civita(self.metric(spec["metric"]), label=name)
        if kind == "conjugate":
            return conjugate(self.connection(spec["of"]),
                             self.metric(spec["metric"]), label=name)
        if kind == "average":
            return average(self.connection(spec["left"]),
                           self.connection(spec["right"]), label=name)
        if kind == "deform":
            from ..kv import cochain_components

            base = self.connection(spec["base"])
            T = cochain_components(self.cochain(spec["cochain"]))
            return connection_from_tensor(base, T, label=name)
        if kind == "explicit":
            n = self.chart.dim
            table = [[[None] * n for _ in range(n)] for _ in range(n)]
            for ent in spec.get("entries", ()):
                k = int(ent["upper"]) - 1
                i, j = (int(v) - 1 for v in ent["lower"])
                if not (0 <= k < n and 0 <= i < n and 0 <= j < n):
                    raise ScenarioSetupError(
                        f"christoffel index out of range in {name!r}")
                table[k][i][j] = parse(str(ent["expr"]), self.chart)
            zero = parse("0", self.chart)
            gamma = tuple(tuple(tuple(e if e is not None else zero
                                      for e in row) for row in layer)
                          for layer in table)
            return Connection(self.chart, gamma, label=name)
        raise ScenarioSetupError(f"unknown connection kind {kind!r}")

    def context(self) -> KVContext:
        if self._ctx_cache is None:
            spec = self.scn.context
            if not spec or "connection" not in spec:
                raise ScenarioSetupError(
                    f"{self.scn.name}: scenario has no [context] connection "
                    "but a binding or probe requires one")
            conn = self.connection(spec["connection"])
            self._ctx_cache = KVContext.admitted(self.chart, conn, self.cfg)
            self.env.context = self._ctx_cache
        return self._ctx_cache

    def cochain(self, name: str) -> Cochain:
        if name in self.env.cochains:
            return self.env.cochains[name]
        key = ("cochain", name)
        self._guard(key)
        try:
            c = self._make_cochain(self._spec("cochains", name))
        finally:
            self._building.discard(key)
        self.env.cochains[name] = c
        return c

    def _make_cochain(self, spec: Mapping) -> Cochain:
        kind = spec.get("kind")
        if kind == "identity":
            return identity_cochain(self.chart)
        if kind == "scalar":
            return scalar_cochain(self.chart,
                                  _scalar_arg(self.env, spec["scalar"]))
        if kind == "ad":
            return ad_cochain(self.vfield(spec["field"]))
        if kind == "vector":
            return vector_cochain(self.context(), self.vfield(spec["field"]))
        if kind == "tensor":
            comps = tuple(
                tuple(tuple(parse(str(e), self.chart) for e in row)
                      for row in layer)
                for layer in spec["components"])
            return tensor_cochain(BilinearVVField(self.chart, comps))
        if kind == "projective":
            return projective_cochain(self.oneform(spec["oneform"]))
        if kind == "dual_projective":
            return dual_projective_cochain(self.sym2(spec["tensor"]),
                                           self.vfield(spec["field"]))
        if kind == "conformal":
            return conformal_cochain(self.metric(spec["metric"]),
                                     _scalar_arg(self.env, spec["scalar"]))
        if kind == "connection":
            return connection_cochain(self.connection(spec["connection"]))
        if kind == "conn_diff":
            return conn_diff_cochain(self.context(),
                                     self.connection(spec["connection"]))
        if kind == "coboundary":
            return coboundary_candidate(self.context(),
                                        self.vfield(spec["field"]))
        if kind == "curvature":
            return curvature_cochain(self.connection(spec["connection"]),
                                     factor=spec.get("factor", 1),
                                     swap=bool(spec.get("swap", False)))
        if kind == "differential":
            return d_kv(self.context(), self.cochain(spec["of"]))
        if kind == "scale":
            return self.cochain(spec["of"]).scaled(spec.get("factor", 1))
        raise ScenarioSetupError(f"unknown cochain kind {kind!r}")

    def form(self, name: str):
        if name not in self.env.forms:
            spec = self._spec("forms", name)
            degree = int(spec["degree"])
            triples = []
            for term in spec.get("terms", ()):
                idx = tuple(int(i) - 1 for i in term["idx"])
                for m, text in enumerate(term["target"]):
                    triples.append((idx, m, parse(str(text), self.chart)))
            self.env.forms[name] = twisted_form_from_terms(
                self.chart, degree, triples)
        return self.env.forms[name]

    def build_all(self) -> ScenarioEnv:
        for name in self._section("scalars"):
            self.scalar(name)
        for name in self._section("fields"):
            self.vfield(name)
        for name in self._section("oneforms"):
            self.oneform(name)
        for name in self._section("metrics"):
            self.metric(name)
        for name in self._section("tensors"):
            self.tensor(name)
        for name in self._section("connections"):
            self.connection(name)
        for name in self._section("cochains"):
            self.cochain(name)
        for name in self._section("forms"):
            self.form(name)
        if self.scn.context:
            self.context()
        return self.env


def _build_chart(spec: Mapping) -> Chart:
    coords = tuple(str(c) for c in spec["coords"])
    box = tuple((float(lo), float(hi)) for lo, hi in spec["box"])
    bare = Chart(coords, box)
    constraints = tuple(parse(str(t), bare)
                        for t in spec.get("constraints", ()))
    if not constraints:
        return bare
    return Chart(coords, box, constraints)


def build_env(scn: Scenario, cfg: ProbeConfig) -> ScenarioEnv:
    try:
        return _EnvBuilder(scn, cfg).build_all()
    except ScenarioSetupError:
        raise
    except _SETUP_ERRORS as e:
        raise ScenarioSetupError(f"{scn.name}: {e}") from e


# ---------------------------------------------------------------------------
# execution and reports


@dataclass(frozen=True)
class AssertionResult:
    name: str
    note: str
    max_residual: float
    tolerance: float
    expected: str
    verdict: str          # what the probe measured: "pass" or "fail"
    ok: bool              # verdict matches expectation

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "paper_ref": self.note,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "expected": self.expected,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    results: tuple
    passed: bool
    seed: int
    elapsed_ms: float

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "assertions": [r.to_json_dict() for r in self.results],
            "verdict": "pass" if self.passed else "fail",
            "seed": self.seed,
            # wall time is excluded from the canonical encoding so reports
            # with equal seed and config are byte-identical
            "elapsed_ms": 0,
        }

    def render_text(self) -> str:
        lines = [f"scenario {self.scenario}: "
                 f"{'pass' if self.passed else 'FAIL'} "
                 f"({self.elapsed_ms:.0f} ms)"]
        for r in self.results:
            mark = "ok " if r.ok else "BAD"
            lines.append(
                f"  [{mark}] {r.name}: {r.verdict} "
                f"(max residual {r.max_residual:.3e}, "
                f"tol {r.tolerance:.1e}, expected {r.expected})")
            if r.note:
                lines.append(f"        {r.note}")
        return "\n".join(lines)


def _registry_table() -> dict:
    return {s.name: s for s in SCENARIOS}


def _dir_table(scenario_dir) -> dict:
    out: dict = {}
    root = Path(scenario_dir)
    if not root.is_dir():
        raise ScenarioSetupError(f"scenario dir {scenario_dir} not found")
    for path in sorted(root.glob("*.toml")):
        try:
            scn = scenario_from_toml(path.read_text())
        except (ScenarioFormatError, OSError, ValueError) as e:
            raise ScenarioSetupError(f"{path.name}: {e}") from e
        if scn.name in out:
            raise ScenarioSetupError(
                f"duplicate scenario {scn.name!r} in {scenario_dir}")
        out[scn.name] = scn
    return out


def available_scenarios(scenario_dir=None) -> tuple:
    table = _registry_table()
    if scenario_dir is not None:
        table.update(_dir_table(scenario_dir))
    return tuple(table)


def _resolve(name: str, scenario_dir) -> Scenario:
    table = _registry_table()
    if scenario_dir is not None:
        table.update(_dir_table(scenario_dir))
    if name not in table:
        known = ", ".join(table)
        raise KeyError(f"unknown scenario {name!r} (known: {known})")
    return table[name]


def run_scenario(name, cfg: ProbeConfig = ProbeConfig(),
                 scenario_dir=None) -> ScenarioReport:
    scn = name if isinstance(name, Scenario) else _resolve(name, scenario_dir)
    started = time.perf_counter()
    scn_cfg = derived_config(cfg, scn.name)
    env = build_env(scn, scn_cfg)

    results = []
    all_ok = True
    for a in scn.assertions:
        eff = scn_cfg
        if a.tolerance is not None:
            eff = replace(eff, tolerance=float(a.tolerance))
        if "samples" in a.args:
            eff = replace(eff, samples=int(a.args["samples"]))
        try:
            rep = run_probe(a.probe, env, a.args, eff)
        except ScenarioSetupError:
            raise
        except _SETUP_ERRORS as e:
            raise ScenarioSetupError(
                f"{scn.name}/{a.name}: {e}") from e
        verdict = "pass" if rep.passed else "fail"
        if a.expect == "pass":
            ok = rep.passed
        else:
            witness = float(a.args.get("witness", DEFAULT_WITNESS))
            ok = rep.max_residual >= witness
        all_ok = all_ok and ok
        results.append(AssertionResult(
            name=a.name, note=a.note, max_residual=float(rep.max_residual),
            tolerance=float(rep.tolerance), expected=a.expect,
            verdict=verdict, ok=ok))
    elapsed = (time.perf_counter() - started) * 1e3
    return ScenarioReport(scenario=scn.name, results=tuple(results),
                          passed=all_ok, seed=cfg.seed, elapsed_ms=elapsed)


def run_all(cfg: ProbeConfig = ProbeConfig(),
            scenario_dir=None) -> tuple:
    return tuple(run_scenario(nm, cfg, scenario_dir)
                 for nm in available_scenarios(scenario_dir))


def obstruction_check_6_2(cfg: ProbeConfig = ProbeConfig()) -> ScenarioReport:
    """The branch-system / jump / verdict bundle as a direct call."""
    return run_scenario("example_6_2_obstruction", cfg)


def report_to_json_dict(reports) -> dict:
    if isinstance(reports, ScenarioReport):
        return reports.to_json_dict()
    reports = tuple(reports)
    return {
        "scenarios": [r.to_json_dict() for r in reports],
        "verdict": "pass" if all(r.passed for r in reports) else "fail",
        "seed": reports[0].seed if reports else None,
    }


def combined_json(reports) -> str:
    return json.dumps(report_to_json_dict(reports), indent=2,
                      sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# randomized d-squared fuzzing


def _fuzz_chart(dim: int, rng: np.random.Generator) -> Chart:
    # random box inside the unit cube; unit scale keeps the float noise of
    # the large cancelling d-squared trees far below the 1e-9 budget
    names = ("x", "y", "z")[:dim]
    box = []
    for _ in range(dim):
        lo = float(rng.uniform(-1.0, 0.25))
        hi = float(lo + rng.uniform(0.5, 1.0))
        box.append((min(lo, 1.0), min(hi, 1.0)))
    return Chart(names, tuple(box))


def _random_cochain(ctx: KVContext, degree: int,
                    rng: np.random.Generator) -> Cochain:
    chart = ctx.chart
    if degree == 0:
        # only Jacobi elements are degree-0 cochains; on a flat chart those
        # are the affine fields
        return vector_cochain(ctx, random_affine_vector_field(chart, rng))
    if degree == 1:
        pick = int(rng.integers(0, 3))
        if pick == 0:
            return ad_cochain(random_vector_field(chart, rng))
        if pick == 1:
            return scalar_cochain(chart, random_polynomial(chart, rng, 2))
        n = chart.dim
        rows = tuple(tuple(random_polynomial(chart, rng, 2, nonzero=False)
                           for _ in range(n)) for _ in range(n))

        def apply_matrix(X, rows=rows, chart=chart, n=n):
            from ..expr import add, mul
            comps = []
            for k in range(n):
                terms = [mul(rows[k][i], X.components[i]) for i in range(n)]
                comps.append(add(*terms))
            return VectorField(chart, tuple(comps))

        return Cochain(1, chart, apply_matrix, "matrix")
    if degree == 2:
        return tensor_cochain(random_tensor12(chart, rng, 2))
    raise KVError(f"no random cochain generator for degree {degree}")


@dataclass(frozen=True)
class FuzzReport:
    degree: int
    trials: int
    max_residual: float
    tolerance: float
    passed: bool
    seed: int
    elapsed_ms: float

    def render_text(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"d2 fuzz degree {self.degree}: {verdict} over "
                f"{self.trials} trials, max residual "
                f"{self.max_residual:.3e} (tol {self.tolerance:.1e}, "
                f"{self.elapsed_ms:.0f} ms)")

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.passed else "fail",
            "seed": self.seed,
            "elapsed_ms": 0,
        }


def run_d2_fuzz(degree: int, trials: int,
                cfg: ProbeConfig = ProbeConfig()) -> FuzzReport:
    """d(d theta) = 0 for random cochains on random flat charts."""
    if degree not in (0, 1, 2):
        raise ValueError("fuzzable degrees are 0, 1, 2")
    started = time.perf_counter()
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, degree, 0xD2]))
    worst = 0.0
    for t in range(trials):
        dim = 2 if t % 2 == 0 else 3
        chart = _fuzz_chart(dim, rng)
        probe_cfg = replace(cfg, seed=int(rng.integers(0, 2**31)))
        ctx = KVContext.admitted(chart, flat_connection(chart), probe_cfg)
        theta = _random_cochain(ctx, degree, rng)
        rep = d2_probe(ctx, theta, probe_cfg)
        worst = max(worst, rep.max_residual)
    elapsed = (time.perf_counter() - started) * 1e3
    return FuzzReport(degree=degree, trials=trials, max_residual=worst,
                      tolerance=cfg.tolerance, passed=worst <= cfg.tolerance,
                      seed=cfg.seed, elapsed_ms=elapsed)
