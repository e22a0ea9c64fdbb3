"""Experiment configs, the pinned verification battery, and report emission."""

from __future__ import annotations

import csv
import io
import json
import math
import shlex
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import density as dens
from .characters import QuadraticCharacter, factorization_check, l_value
from .ffpoly import IntPoly
from .numfield import NumberField, cyclotomic_field, parse_field, quadratic_field, rational_field
from .zetaseries import (
    cumulative_counts,
    ideal_counts,
    log_samples,
    residue_estimate,
    riemann_extended,
    zeta_dirichlet,
    zeta_euler,
)

MAX_BOUND = 10**7


class ConfigError(ValueError):
    """A config file problem, with the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# ---------------------------------------------------------------------------
# number formatting shared by JSON and CSV


def fmt(x: Any) -> Any:
    """Round floats to 15 significant digits, recursively."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.15g}")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, complex):
        return [fmt(x.real), fmt(x.imag)]
    if isinstance(x, dict):
        return {str(k): fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def to_json(obj: Any) -> str:
    return json.dumps(fmt(obj), indent=2) + "\n"


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    return [(prefix, obj)]


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in (fmt(row.get(c)) for c in columns)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class ExperimentResult:
    experiment_id: str
    verdict: str  # "pass" | "fail" | "info"
    metrics: dict
    criterion: int | None = None

    def to_dict(self) -> dict:
        out = {"experiment_id": self.experiment_id}
        if self.criterion is not None:
            out["criterion"] = self.criterion
        out["verdict"] = self.verdict
        out["metrics"] = self.metrics
        return out


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[ExperimentResult, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.verdict != "fail" for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return to_json(self.to_dict())

    def to_csv(self) -> str:
        rows = []
        for r in self.results:
            for key, value in flatten(fmt(r.metrics)):
                rows.append(
                    {"experiment_id": r.experiment_id, "verdict": r.verdict, "metric": key, "value": value}
                )
        return to_csv(rows, ["experiment_id", "verdict", "metric", "value"])


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# config


@dataclass
class FieldDef:
    field: NumberField
    extra: dict[str, str]


@dataclass
class ExperimentSpec:
    kind: str
    params: dict[str, str]
    line: int


@dataclass
class RunConfig:
    fields: dict[str, FieldDef] = field(default_factory=dict)
    experiments: list[ExperimentSpec] = field(default_factory=list)
    X: int = 10**6
    B: int = 10**5
    P: int = 10**5
    s_values: tuple[float, ...] = (2.0,)
    seed: int = 0
    output_format: str = "json"
    cache_dir: str | None = None
    workers: int = 1

    def validate(self) -> None:
        for name in ("X", "B", "P"):
            v = getattr(self, name)
            if not 1 <= v <= MAX_BOUND:
                raise ConfigError(f"{name} = {v} outside [1, {MAX_BOUND}]")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        for ex in self.experiments:
            for key in ("X", "B", "P"):
                if key in ex.params:
                    v = _int(ex.params[key], ex.line, key)
                    if not 1 <= v <= MAX_BOUND:
                        raise ConfigError(f"{key} = {v} outside [1, {MAX_BOUND}]", ex.line)
            ref = ex.params.get("field")
            if ref is not None and ref not in self.fields:
                raise ConfigError(f"unknown field label {ref!r}", ex.line)
            if ex.kind not in RUNNERS:
                raise ConfigError(f"unknown experiment {ex.kind!r}", ex.line)


def _int(text: str, line: int | None, key: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None
    if v != int(v):
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line)
    return int(v)


def parse_config(text: str) -> RunConfig:
    """Parse the line-oriented key=value config.

    ::

        field gauss quadratic d=-1
        field cubic poly f="x^3-2" normal=false closure=6
        set X=1e6 seed=0 format=json
        experiment thm3 field=gauss X=10000
        experiment cor3 m=7 H=6
    """
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
        head = tokens[0].lower()
        if head == "field":
            if len(tokens) < 3:
                raise ConfigError("expected: field LABEL KIND key=value ...", lineno)
            label = tokens[1]
            try:
                fld, extra = parse_field(shlex.join(tokens[2:]))
            except ValueError as exc:
                raise ConfigError(str(exc), lineno) from None
            cfg.fields[label] = FieldDef(fld, extra)
        elif head == "set":
            for key, value in _pairs(tokens[1:], lineno).items():
                _apply_setting(cfg, key, value, lineno)
        elif head == "experiment":
            if len(tokens) < 2:
                raise ConfigError("expected: experiment KIND key=value ...", lineno)
            cfg.experiments.append(ExperimentSpec(tokens[1].lower(), _pairs(tokens[2:], lineno), lineno))
        else:
            raise ConfigError(f"unknown directive {head!r}", lineno)
    cfg.validate()
    return cfg


def _pairs(tokens: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}", lineno)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _apply_setting(cfg: RunConfig, key: str, value: str, lineno: int) -> None:
    if key in ("X", "B", "P", "seed", "workers"):
        v = _int(value, lineno, key)
        if key in ("X", "B", "P") and not 1 <= v <= MAX_BOUND:
            raise ConfigError(f"{key} = {v} outside [1, {MAX_BOUND}]", lineno)
        if key == "workers" and v < 1:
            raise ConfigError("workers must be >= 1", lineno)
        setattr(cfg, key, v)
    elif key == "s":
        try:
            cfg.s_values = tuple(float(v) for v in value.split(","))
        except ValueError:
            raise ConfigError(f"bad s list {value!r}", lineno) from None
    elif key == "format":
        cfg.output_format = value
    elif key == "cache":
        cfg.cache_dir = value
    else:
        raise ConfigError(f"unknown setting {key!r}", lineno)


# ---------------------------------------------------------------------------
# experiment runners (config-driven)


def _density_result(rep: dens.DensityReport) -> ExperimentResult:
    return ExperimentResult(rep.experiment_id, _verdict(rep.verdict), rep.to_dict())


def _field_of(cfg: RunConfig, ex: ExperimentSpec) -> FieldDef:
    if "field" not in ex.params:
        raise ConfigError(f"experiment {ex.kind} needs field=", ex.line)
    return cfg.fields[ex.params["field"]]


def _poly_and_degree(cfg: RunConfig, ex: ExperimentSpec) -> tuple[IntPoly, int]:
    if "poly" in ex.params:
        f = IntPoly.parse(ex.params["poly"])
        extra = {}
    else:
        fd = _field_of(cfg, ex)
        f, extra = fd.field.defining_poly, fd.extra
    deg = ex.params.get("degree") or extra.get("closure") or extra.get("degree")
    if deg is None:
        raise ConfigError("normal closure degree needed (degree= or closure=)", ex.line)
    return f, _int(deg, ex.line, "degree")


def _X(cfg, ex):
    return _int(ex.params.get("X", str(cfg.X)), ex.line, "X")


def _run_thm3(cfg, ex):
    return _density_result(dens.experiment_thm3(_field_of(cfg, ex).field, _X(cfg, ex), chunks=cfg.workers, workers=cfg.workers))


def _run_cor1(cfg, ex):
    f, deg = _poly_and_degree(cfg, ex)
    return _density_result(dens.experiment_cor1(f, deg, _X(cfg, ex), chunks=cfg.workers, workers=cfg.workers))


def _run_cor2(cfg, ex):
    f, deg = _poly_and_degree(cfg, ex)
    return _density_result(dens.experiment_cor2(f, deg, _X(cfg, ex), chunks=cfg.workers, workers=cfg.workers))


def _run_cor3(cfg, ex):
    m = _int(ex.params.get("m", "0"), ex.line, "m")
    gens = [int(g) for g in ex.params.get("H", "").split(",") if g]
    return _density_result(dens.experiment_cor3(m, gens, _X(cfg, ex), chunks=cfg.workers, workers=cfg.workers))


def _run_lemma3(cfg, ex):
    rep = dens.check_lemma3(_X(cfg, ex))
    return ExperimentResult(f"lemma3:X={rep.X}", _verdict(rep.ok), rep.to_dict())


def _run_identity(cfg, ex):
    s = float(ex.params.get("s", cfg.s_values[0]))
    P = _int(ex.params.get("P", str(cfg.P)), ex.line, "P")
    rows = dens.check_thm3_identity(s, P)
    return ExperimentResult(f"thm3-identity:s={s}", _verdict(all(r["ok"] for r in rows)), {"checks": rows})


def _run_cor4(cfg, ex):
    rep = dens.check_cor4(_X(cfg, ex))
    return ExperimentResult(f"cor4:X={rep['X']}", rep["verdict"], rep)


def _run_prop1(cfg, ex):
    fd = _field_of(cfg, ex)
    B = _int(ex.params.get("B", str(cfg.B)), ex.line, "B")
    P = _int(ex.params.get("P", str(cfg.P)), ex.line, "P")
    return prop1_check(fd.field, B, P, cfg.s_values, cfg.seed)


def _run_dirichlet(cfg, ex):
    if "poly" in ex.params:
        pred = dens.distinct_linear_mod_p(IntPoly.parse(ex.params["poly"]))
    else:
        pred = dens.split_completely_in(_field_of(cfg, ex).field)
    P = _int(ex.params.get("P", str(cfg.P)), ex.line, "P")
    est = dens.dirichlet_density(pred, P)
    verdict = "info"
    if "expect" in ex.params:
        lo, hi = (float(v) for v in ex.params["expect"].split(","))
        verdict = _verdict(lo <= est.extrapolated <= hi)
    return ExperimentResult(f"dirichlet:{pred.label}", verdict, est.to_dict())


RUNNERS: dict[str, Callable[[RunConfig, ExperimentSpec], ExperimentResult]] = {
    "thm3": _run_thm3,
    "cor1": _run_cor1,
    "cor2": _run_cor2,
    "cor3": _run_cor3,
    "lemma3": _run_lemma3,
    "thm3-identity": _run_identity,
    "cor4": _run_cor4,
    "prop1": _run_prop1,
    "dirichlet": _run_dirichlet,
}


def run(cfg: RunConfig) -> SuiteResult:
    cfg.validate()
    jobs = [lambda ex=ex: RUNNERS[ex.kind](cfg, ex) for ex in cfg.experiments]
    return SuiteResult(tuple(_execute(jobs, cfg.workers)))


def _execute(jobs: list[Callable[[], ExperimentResult]], workers: int) -> list[ExperimentResult]:
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: job(), jobs))
    return [job() for job in jobs]


# ---------------------------------------------------------------------------
# checks shared by config runs and the verification battery


def prop1_check(K: NumberField, B: int, P: int, s_values, seed: int = 0) -> ExperimentResult:
    """Dirichlet series vs Euler product at each s, against the bound sum."""
    tbl = ideal_counts(K, B, seed)
    rows = []
    for s in s_values:
        zd = zeta_dirichlet(tbl, s)
        ze = zeta_euler(K, s, P, seed)
        diff = abs(zd.value - ze.value)
        bound = zd.truncation_bound + ze.truncation_bound
        rows.append(
            {"s": s, "dirichlet": zd.value.real, "euler": ze.value.real, "diff": diff, "bound": bound, "ok": diff <= bound}
        )
    metrics = {"field": K.label, "B": B, "P": P, "bad_primes": list(tbl.bad_primes), "checks": rows}
    return ExperimentResult(f"prop1:{K.label}", _verdict(all(r["ok"] for r in rows)), metrics)


def multiplicativity_violations(tbl, pairs: int, seed: int) -> tuple[int, int]:
    """Sample coprime (a, b) with a*b <= B and count j[ab] != j[a] j[b]."""
    rng = np.random.default_rng(seed)
    B = tbl.bound
    tested = violations = 0
    while tested < pairs:
        a = int(rng.integers(2, math.isqrt(B) * 4))
        b = int(rng.integers(2, B // a + 1)) if B // a >= 2 else 1
        if b < 2 or math.gcd(a, b) != 1 or a * b > B:
            continue
        tested += 1
        if tbl.j[a * b] != tbl.j[a] * tbl.j[b]:
            violations += 1
    return tested, violations


def gaussian_lattice_count(B: int) -> int:
    """Ideals of Z[i] of norm <= B: points a > 0, b >= 0 with a^2 + b^2 <= B."""
    a = np.arange(1, math.isqrt(B) + 1, dtype=np.int64)
    rest = B - a * a
    return int(np.sum(np.floor(np.sqrt(rest.astype(np.float64))).astype(np.int64) + 1))


def zeta2_series_oracle(N: int = 1000) -> float:
    """sum 1/n^2 with the Euler-Maclaurin tail 1/N - 1/(2N^2) + 1/(6N^3) - 1/(30N^5)."""
    head = math.fsum(1.0 / (n * n) for n in range(1, N))
    return head + 1 / N - 1 / (2 * N * N) + 1 / (6 * N**3) - 1 / (30 * N**5) + 1 / (N * N)


def catalan_series_oracle(N: int = 200000) -> float:
    """sum (-1)^k/(2k+1)^2 as the mean of two consecutive partial sums."""
    k = np.arange(N + 1, dtype=np.float64)
    terms = (-1.0) ** k / (2 * k + 1) ** 2
    partial = np.cumsum(terms)
    return float((partial[-1] + partial[-2]) / 2)


# ---------------------------------------------------------------------------
# the pinned verification battery


SUITE_X = 10**6
SUITE_B_KAPPA = 10**6
SUITE_B = 10**5
SUITE_P = 10**5


def suite_fields() -> dict[str, NumberField]:
    from .numfield import field_from_poly

    return {
        "Q": rational_field(),
        "Q(i)": quadratic_field(-1),
        "Q(sqrt2)": quadratic_field(2),
        "Q(sqrt5)": quadratic_field(5),
        "Q(zeta5)": cyclotomic_field(5),
        "Q(zeta7)": cyclotomic_field(7),
        "x^3-2": field_from_poly(IntPoly((-2, 0, 0, 1))),
        "x^4-2": field_from_poly(IntPoly((-2, 0, 0, 0, 1))),
    }


def _battery(workers: int, seed: int) -> list[Callable[[], ExperimentResult]]:
    kw = {"chunks": workers, "workers": workers}
    jobs: list[Callable[[], ExperimentResult]] = []

    def c1():
        reps = [
            dens.experiment_thm3(L, SUITE_X, **kw)
            for L in (quadratic_field(-1), quadratic_field(2), cyclotomic_field(5), cyclotomic_field(7))
        ]
        return ExperimentResult("normal-split-density", _verdict(all(r.verdict and r.stable for r in reps)), {"reports": [r.to_dict() for r in reps]}, 1)

    def c2():
        reps = [
            dens.experiment_cor1(IntPoly((-2, 0, 0, 1)), 6, SUITE_X, **kw),
            dens.experiment_cor2(IntPoly((-2, 0, 0, 1)), 6, SUITE_X, **kw),
            dens.experiment_cor1(IntPoly((-2, 0, 0, 0, 1)), 8, SUITE_X, **kw),
            dens.experiment_cor2(IntPoly((-2, 0, 0, 0, 1)), 8, SUITE_X, **kw),
        ]
        return ExperimentResult("poly-split-density", _verdict(all(r.verdict and r.stable for r in reps)), {"reports": [r.to_dict() for r in reps]}, 2)

    def c3():
        reps = [dens.experiment_cor3(7, [6], SUITE_X, **kw), dens.experiment_cor3(8, [], SUITE_X, **kw)]
        return ExperimentResult("residue-class-density", _verdict(all(r.verdict and r.stable for r in reps)), {"reports": [r.to_dict() for r in reps]}, 3)

    def c4():
        rep = dens.check_lemma3(SUITE_X)
        return ExperimentResult("closure-equivalence", _verdict(rep.ok), rep.to_dict(), 4)

    def c5():
        rows = dens.check_thm3_identity(1.5, SUITE_P) + dens.check_thm3_identity(2.0, SUITE_P)
        return ExperimentResult("partial-zeta-identity", _verdict(all(r["ok"] for r in rows)), {"checks": rows}, 5)

    def c6():
        K = quadratic_field(-1)
        tbl = ideal_counts(K, SUITE_B_KAPPA, seed)
        cc = cumulative_counts(tbl, log_samples(10, SUITE_B_KAPPA, 60))
        lattice = gaussian_lattice_count(SUITE_B_KAPPA)
        ok = (
            abs(cc.kappa_hat - math.pi / 4) <= 0.01
            and cc.error_exponent_hat <= 0.65
            and lattice == tbl.i(SUITE_B_KAPPA)
        )
        metrics = {
            "B": SUITE_B_KAPPA,
            "i_B": tbl.i(SUITE_B_KAPPA),
            "lattice_count": lattice,
            "kappa_hat": cc.kappa_hat,
            "pi_over_4": math.pi / 4,
            "error_exponent_hat": cc.error_exponent_hat,
        }
        return ExperimentResult("ideal-count-growth", _verdict(ok), metrics, 6)

    def c7():
        checks = [prop1_check(K, SUITE_B, SUITE_P, (1.5, 2.0, 3.0), seed) for K in suite_fields().values()]
        tested, bad = multiplicativity_violations(ideal_counts(quadratic_field(-1), SUITE_B, seed), 500, seed)
        ok = all(c.verdict == "pass" for c in checks) and bad == 0
        metrics = {"fields": [c.metrics for c in checks], "multiplicativity_pairs": tested, "multiplicativity_violations": bad}
        return ExperimentResult("series-product-agreement", _verdict(ok), metrics, 7)

    def c8():
        z2 = riemann_extended(2.0)
        oracle = zeta2_series_oracle()
        s1 = complex(1, 2 * math.pi / math.log(2))
        rows = []
        for s in (0.5, s1):
            f = riemann_extended(s, "f")
            g = riemann_extended(s, "g")
            rows.append(
                {
                    "s": [complex(s).real, complex(s).imag],
                    "f_route": [f.value.real, f.value.imag],
                    "g_route": [g.value.real, g.value.imag],
                    "diff": abs(f.value - g.value),
                    "bound": f.truncation_bound + g.truncation_bound,
                }
            )
        ok = abs(z2.value.real - oracle) <= 1e-9 and all(r["diff"] <= 1e-6 for r in rows)
        metrics = {"zeta2": z2.value.real, "zeta2_oracle": oracle, "zeta2_error": abs(z2.value.real - oracle), "routes": rows}
        return ExperimentResult("riemann-continuation", _verdict(ok), metrics, 8)

    def c9():
        rep = factorization_check(quadratic_field(-1), 2.0, SUITE_B_KAPPA)
        oracle = zeta2_series_oracle() * catalan_series_oracle()
        product = riemann_extended(2.0).value.real * l_value(QuadraticCharacter(-4), 2.0).value
        ok = rep["ok"] and abs(product - oracle) <= 1e-6
        rep = dict(rep, series_oracle_product=oracle, oracle_diff=abs(product - oracle))
        return ExperimentResult("quadratic-factorization", _verdict(ok), rep, 9)

    def c10():
        K = quadratic_field(-1)
        tbl = ideal_counts(K, SUITE_B_KAPPA, seed)
        res = residue_estimate(K, tbl)
        Q = rational_field()
        resq = residue_estimate(Q, ideal_counts(Q, SUITE_B))
        ok = abs(res.value - res.kappa_hat) <= 0.02 and abs(resq.value - 1) <= 0.01
        metrics = {"residue_Qi": res.value, "kappa_hat": res.kappa_hat, "residue_Q": resq.value}
        return ExperimentResult("residue-at-one", _verdict(ok), metrics, 10)

    def c11():
        rep = dens.check_cor4(100)
        return ExperimentResult("quadratic-witnesses", rep["verdict"], rep, 11)

    jobs.extend([c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11])
    return jobs


def verify_suite(workers: int = 1, seed: int = 0) -> SuiteResult:
    """Run the acceptance battery with pinned bounds; failures are collected."""
    results = []
    for res in _execute([_guard(job) for job in _battery(workers, seed)], workers):
        results.append(res)
    return SuiteResult(tuple(results))


def _guard(job: Callable[[], ExperimentResult]) -> Callable[[], ExperimentResult]:
    def wrapped():
        try:
            return job()
        except Exception as exc:  # one broken experiment must not abort the battery
            return ExperimentResult(job.__name__, "fail", {"error": f"{type(exc).__name__}: {exc}"})

    return wrapped
