"""JSON scenarios in, JSON reports out.

Scenario file::

    {
      "kind": "trs" | "duality" | "spinchain" | "qq" | "elliptic" | "adhm" | "dwork",
      "parameters": {...},                  # per-kind schema in PARAMETER_SCHEMAS
      "tolerances": {"tolerance": 1e-12, "max_iterations": 100, "step_count": 64},
      "seed": 0,
      "name": "optional label"
    }

Complex numbers are ``[re, im]`` pairs (plain JSON numbers are accepted
for real values); exact integers in coefficient lists are decimal
strings. File references are resolved relative to the scenario file.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from . import dwork, elliptic, qq, spin_chain, trs
from .algebra import SolverConfig, binomial, elementary_symmetric_all
from .errors import DomainError

__all__ = [
    "Scenario",
    "CheckRecord",
    "Report",
    "ScenarioError",
    "PARAMETER_SCHEMAS",
    "parse_scenario",
    "scenario_from_dict",
    "run_scenario",
    "emit_report",
    "load_report",
]

KINDS = ("trs", "duality", "spinchain", "qq", "elliptic", "adhm", "dwork")
TOP_LEVEL_KEYS = {"kind", "parameters", "tolerances", "seed", "name"}
TOLERANCE_KEYS = {"tolerance", "max_iterations", "step_count"}

# name -> (type, required, default)
PARAMETER_SCHEMAS: dict[str, dict[str, tuple]] = {
    "trs": {
        "chi": ("complex_vector", True, None),
        "hbar": ("complex", True, None),
        "p": ("complex_vector", True, None),
    },
    "duality": {
        "chi": ("complex_vector", True, None),
        "hbar": ("complex", True, None),
        "xi": ("complex_vector", True, None),
        "permutation": ("int_vector", False, None),
    },
    "spinchain": {
        "site_params": ("complex_vector", True, None),
        "twist": ("complex", True, None),
        "q": ("complex", True, None),
        "hbar": ("complex", True, None),
        "samples": ("int", False, 20),
    },
    "qq": {
        "lambda_roots": ("complex_vector", True, None),
        "hbar": ("complex", True, None),
        "k": ("int", True, None),
        "xi": ("complex", True, None),
        "xi_tilde": ("complex", True, None),
        "n_starts": ("int", False, 200),
    },
    "elliptic": {
        "x": ("complex_vector", True, None),
        "hbar": ("complex", True, None),
        "p_ell": ("complex", True, None),
        "truncation": ("int", False, 16),
    },
    "adhm": {
        "a_params": ("complex_vector", True, None),
        "k": ("int", True, None),
        "q": ("complex", True, None),
        "coupling": ("complex", True, None),
        "partition": ("int_vector", True, None),
        "hbar_large": ("real", False, 1e6),
    },
    "dwork": {
        "series": ("str", False, None),
        "coefficients": ("exact_int_vector", False, None),
        "coefficients_file": ("file", False, None),
        "primes": ("int_vector", True, None),
        "levels": ("int_vector", True, None),
        "expect_congruence": ("bool", False, True),
    },
}

BUILTIN_SERIES = {
    "central_binomial": dwork.central_binomial,
    "factorial_control": dwork.factorial_control,
}


class ScenarioError(DomainError):
    """Malformed or invalid scenario; ``problems`` lists every issue found."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class Scenario:
    kind: str
    parameters: dict
    config: SolverConfig
    seed: int
    raw: dict
    name: str = ""
    source: Path | None = None


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------


def _decode_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ValueError(f"{where}: expected a number or [re, im], got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ValueError(f"{where}: expected a number or [re, im], got {value!r}")


def _decode_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where}: expected an integer, got {value!r}")
    return value


def _decode(kind: str, value, where: str, base: Path | None):
    if kind == "complex":
        return _decode_complex(value, where)
    if kind == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{where}: expected a real number, got {value!r}")
        return float(value)
    if kind == "int":
        return _decode_int(value, where)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ValueError(f"{where}: expected true/false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ValueError(f"{where}: expected a string, got {value!r}")
        return value
    if kind == "file":
        if not isinstance(value, str):
            raise ValueError(f"{where}: expected a file path string, got {value!r}")
        path = Path(value)
        if not path.is_absolute() and base is not None:
            path = base / path
        if not path.is_file():
            raise ValueError(f"{where}: file not found: {path}")
        return path
    if not isinstance(value, list) or not value:
        raise ValueError(f"{where}: expected a nonempty list, got {value!r}")
    if kind == "complex_vector":
        return tuple(_decode_complex(v, f"{where}[{i}]") for i, v in enumerate(value))
    if kind == "int_vector":
        return tuple(_decode_int(v, f"{where}[{i}]") for i, v in enumerate(value))
    if kind == "exact_int_vector":
        out = []
        for i, v in enumerate(value):
            if isinstance(v, str):
                try:
                    out.append(int(v))
                except ValueError:
                    raise ValueError(f"{where}[{i}]: not a decimal integer: {v!r}") from None
            elif isinstance(v, int) and not isinstance(v, bool):
                out.append(v)
            else:
                raise ValueError(f"{where}[{i}]: expected a decimal string, got {v!r}")
        return tuple(out)
    raise AssertionError(kind)


def scenario_from_dict(data: Any, base: Path | None = None, source: Path | None = None) -> Scenario:
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioError(["scenario must be a JSON object"])
    for key in sorted(set(data) - TOP_LEVEL_KEYS):
        problems.append(f"unknown top-level key {key!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        problems.append(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
        raise ScenarioError(problems)
    schema = PARAMETER_SCHEMAS[kind]
    raw_params = data.get("parameters", {})
    if not isinstance(raw_params, dict):
        raise ScenarioError(problems + ["parameters must be an object"])
    params: dict = {}
    for key in sorted(set(raw_params) - set(schema)):
        problems.append(f"parameters.{key}: unknown key for kind {kind!r}")
    missing = [k for k, (_, req, _) in schema.items() if req and k not in raw_params]
    if missing:
        problems.append(f"missing required parameters for {kind!r}: {', '.join(missing)}")
    for key, (typ, _, default) in schema.items():
        if key in raw_params:
            try:
                params[key] = _decode(typ, raw_params[key], f"parameters.{key}", base)
            except ValueError as exc:
                problems.append(str(exc))
        else:
            params[key] = default
    if kind == "dwork":
        sources = [k for k in ("series", "coefficients", "coefficients_file") if raw_params.get(k) is not None]
        if len(sources) != 1:
            problems.append("dwork needs exactly one of series, coefficients, coefficients_file")
        if params.get("series") is not None and params["series"] not in BUILTIN_SERIES:
            problems.append(f"parameters.series: unknown series {params['series']!r}")

    tol_raw = data.get("tolerances", {})
    config = SolverConfig()
    if not isinstance(tol_raw, dict):
        problems.append("tolerances must be an object")
    else:
        for key in sorted(set(tol_raw) - TOLERANCE_KEYS):
            problems.append(f"tolerances.{key}: unknown key")
        try:
            config = SolverConfig(
                tolerance=float(tol_raw.get("tolerance", config.tolerance)),
                max_iterations=int(tol_raw.get("max_iterations", config.max_iterations)),
                step_count=int(tol_raw.get("step_count", config.step_count)),
            )
        except (DomainError, TypeError, ValueError) as exc:
            problems.append(f"tolerances: {exc}")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        problems.append(f"seed must be an integer, got {seed!r}")
        seed = 0
    name = data.get("name", "")
    if not isinstance(name, str):
        problems.append("name must be a string")
    if problems:
        raise ScenarioError(problems)
    return Scenario(kind, params, config, seed, data, name, source)


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError([f"{path}: {exc.strerror or exc}"]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from exc
    return scenario_from_dict(data, base=path.parent, source=path)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def to_jsonable(value):
    """Complex -> [re, im]; exact ints -> decimal strings; non-finite floats -> strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return f if math.isfinite(f) else repr(f)
    if isinstance(value, (complex, np.complexfloating)):
        c = complex(value)
        return [to_jsonable(c.real), to_jsonable(c.imag)]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return repr(value)


def _digest(obj) -> str:
    blob = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class CheckRecord:
    name: str
    inputs_digest: str
    values: dict
    residual: float | None
    tolerance: float | None
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs_digest": self.inputs_digest,
            "values": to_jsonable(self.values),
            "residual": to_jsonable(self.residual),
            "tolerance": to_jsonable(self.tolerance),
            "passed": self.passed,
            "error": self.error,
        }


@dataclass
class Report:
    scenario: dict
    checks: list = field(default_factory=list)
    seed: int = 0
    duration: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "toolkit_version": self.version,
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if include_timing:
            out["duration_seconds"] = self.duration
        return out


def emit_report(r: Report, path, include_timing: bool = False) -> None:
    """Write the report as sorted, indented JSON.

    Wall-clock time is left out unless asked for, so identical runs give
    identical bytes.
    """
    text = json.dumps(r.to_dict(include_timing), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


# --------------------------------------------------------------------------
# check batteries
# --------------------------------------------------------------------------


class _Battery:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.records: list[CheckRecord] = []

    def check(self, name: str, inputs: dict, fn: Callable[[], dict]) -> None:
        """Run one check; exceptions become a failed record."""
        digest = _digest(inputs)
        try:
            out = fn()
        except Exception as exc:  # noqa: BLE001 - isolation: one check never aborts the rest
            self.records.append(
                CheckRecord(name, digest, {}, None, None, False, f"{type(exc).__name__}: {exc}")
            )
            return
        residual = out.get("residual")
        tol = out.get("tolerance")
        if "passed" in out:
            passed = bool(out["passed"])
        elif residual is not None and tol is not None:
            passed = bool(math.isfinite(residual) and residual <= tol)
        else:
            passed = True
        self.records.append(CheckRecord(name, digest, out.get("values", {}), residual, tol, passed))


def _rand_complex(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def _spectrum_distance(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        return math.inf
    d1 = max(np.min(np.abs(b - x)) for x in a)
    d2 = max(np.min(np.abs(a - x)) for x in b)
    return float(max(d1, d2))


def _run_trs(b: _Battery, P: dict, rng, config):
    chi, hbar, p = P["chi"], P["hbar"], P["p"]
    inputs = {"chi": chi, "hbar": hbar, "p": p}
    sys_ = trs.TRSSystem(chi, hbar, p)

    b.check("lax_matrix", inputs, lambda: {"values": {"lax": trs.lax_matrix(sys_)}})

    def hamiltonians():
        return {"values": {"charpoly": trs.hamiltonians_charpoly(sys_), "subset": trs.hamiltonians_subset(sys_)}}

    b.check("hamiltonians", inputs, hamiltonians)

    def trace_identity():
        h1 = trs.hamiltonians_charpoly(sys_)[0]
        tf = trs.trace_formula(sys_)
        return {"values": {"H1": h1, "trace_formula": tf},
                "residual": abs(h1 - tf) / max(1.0, abs(tf)), "tolerance": 1e-12}

    b.check("trace_identity", inputs, trace_identity)

    def rank_one():
        pt = trs.lax_from_cm_point(sys_)
        scale = float(np.max(np.abs(np.outer(pt.u, pt.v))))
        sv = np.linalg.svd(pt.moment_matrix(), compute_uv=False)
        return {"values": {"singular_values": sv},
                "residual": pt.moment_residual() / scale, "tolerance": 1e-12}

    b.check("cm_rank_one", inputs, rank_one)

    def spectrum():
        pt = trs.lax_from_cm_point(sys_)
        d = _spectrum_distance(np.linalg.eigvals(pt.T), np.linalg.eigvals(trs.lax_matrix(sys_)))
        return {"residual": d, "tolerance": 1e-10}

    b.check("cm_lax_spectrum", inputs, spectrum)

    def collapse():
        s1 = trs.TRSSystem(chi, 1.0, p)
        e = elementary_symmetric_all(list(p))[1:]
        r = max(
            max(abs(x - y) for x, y in zip(trs.hamiltonians_charpoly(s1), e)),
            max(abs(x - y) for x, y in zip(trs.hamiltonians_subset(s1), e)),
        )
        return {"residual": r, "tolerance": 1e-12}

    b.check("hbar_one_collapse", {"chi": chi, "p": p}, collapse)


def _run_duality(b: _Battery, P: dict, rng, config):
    chi, hbar, xi = P["chi"], P["hbar"], P["xi"]
    inputs = {"chi": chi, "hbar": hbar, "xi": xi, "permutation": P["permutation"]}
    state = {}

    def solve():
        p = trs.solve_momenta(chi, hbar, xi, config, permutation=P["permutation"])
        state["p"] = p
        res = trs.qk_ring_residual(chi, xi, hbar, p)
        return {"values": {"momenta": p, "ring_residual": res},
                "residual": float(np.max(np.abs(res))), "tolerance": 1e-10}

    b.check("solve_momenta_residual", inputs, solve)

    def spectrum():
        eig = np.linalg.eigvals(trs.lax_matrix(trs.TRSSystem(chi, hbar, state["p"])))
        return {"values": {"lax_spectrum": eig}, "residual": _spectrum_distance(eig, xi), "tolerance": 1e-8}

    b.check("spectrum_match", inputs, spectrum)


def _run_spinchain(b: _Battery, P: dict, rng, config):
    conv = spin_chain.RMatrixConvention(P["hbar"])
    inputs = {k: P[k] for k in ("site_params", "twist", "q", "hbar")}
    samples = P["samples"]

    def normalization():
        r = float(np.max(np.abs(spin_chain.r_matrix(1.0, conv) - spin_chain.permutation_matrix())))
        return {"residual": r, "tolerance": 0.0}

    b.check("r_matrix_normalization", {"hbar": P["hbar"]}, normalization)

    triples = [_rand_complex(rng, 3) for _ in range(samples)]
    b.check("yang_baxter", {"hbar": P["hbar"], "triples": triples},
            lambda: {"residual": max(spin_chain.yang_baxter_residual(*t, conv) for t in triples),
                     "tolerance": 1e-12})
    us = [_rand_complex(rng) for _ in range(samples)]
    b.check("unitarity", {"hbar": P["hbar"], "u": us},
            lambda: {"residual": max(spin_chain.unitarity_residual(u, conv) for u in us), "tolerance": 1e-12})

    spec = spin_chain.SpinChainSpec(P["site_params"], P["twist"], P["q"], P["hbar"])
    pairs = [tuple(_rand_complex(rng, 2)) for _ in range(samples)]

    def commutativity():
        worst = 0.0
        for u, v in pairs:
            A = spin_chain.transfer_matrix(u, spec).matrix
            B = spin_chain.transfer_matrix(v, spec).matrix
            worst = max(worst, float(np.max(np.abs(A @ B - B @ A))))
        return {"residual": worst, "tolerance": 1e-10}

    b.check("transfer_commutativity", dict(inputs, pairs=pairs), commutativity)

    def flatness():
        n = spec.n
        vals = {f"{i},{j}": spin_chain.qkz_flatness_residual(spec, i, j)
                for i in range(1, n + 1) for j in range(1, n + 1) if i < j}
        return {"values": vals, "residual": max(vals.values(), default=0.0), "tolerance": 1e-10}

    b.check("qkz_flatness", inputs, flatness)

    def ice_rule():
        ops = [spin_chain.transfer_matrix(u, spec) for u, _ in pairs[:3]]
        ops += [spin_chain.qkz_operator(k, spec) for k in range(1, spec.n + 1)]
        return {"residual": max(spin_chain.magnon_leakage(o) for o in ops), "tolerance": 0.0}

    b.check("magnon_number_blocks", inputs, ice_rule)


def _run_qq(b: _Battery, P: dict, rng, config):
    data_in = {k: P[k] for k in ("lambda_roots", "hbar", "k", "xi", "xi_tilde")}
    twist = (P["xi"], P["xi_tilde"])
    state: dict = {}

    def count():
        data = qq.DrinfeldData(P["lambda_roots"], P["hbar"], P["k"])
        sols = qq.qq_solutions(data, twist, P["n_starts"], rng, config)
        state["data"], state["sols"] = data, sols
        expected = binomial(data.N, data.magnon_count)
        return {"values": {"found": len(sols), "expected": expected,
                           "bethe_roots": [s.bethe_roots() for s in sols]},
                "passed": len(sols) == expected}

    b.check("solution_count", dict(data_in, n_starts=P["n_starts"]), count)

    def residuals():
        r = max(qq.qq_residual(s, state["data"]).max_abs() for s in state["sols"])
        return {"residual": float(r), "tolerance": 1e-10}

    b.check("qq_residual", data_in, residuals)

    def bethe():
        if state["data"].magnon_count == 0:
            return {"residual": 0.0, "tolerance": 1e-10}
        r = max(float(np.max(np.abs(qq.bethe_residual(s.bethe_roots(), state["data"], twist))))
                for s in state["sols"])
        return {"residual": r, "tolerance": 1e-10}

    b.check("bethe_residual", data_in, bethe)

    def backlund():
        worst_id, worst_res = 0.0, 0.0
        for s in state["sols"]:
            sw = qq.backlund_swap(s)
            back = qq.backlund_swap(sw)
            worst_id = max(worst_id, (back.q_plus - s.q_plus).max_abs(), (back.q_minus - s.q_minus).max_abs())
            worst_res = max(worst_res, qq.qq_residual(sw, state["data"]).max_abs())
        return {"values": {"double_swap": worst_id, "swapped_residual": worst_res},
                "passed": worst_id <= 1e-12 and worst_res <= 1e-10}

    b.check("backlund_swap", data_in, backlund)

    if len(P["lambda_roots"]) == 1 and P["k"] == 1:
        def closed_form():
            s = qq.closed_form_n1(P["lambda_roots"][0], P["hbar"], *twist)
            got = state["sols"][0].bethe_roots()[0]
            return {"values": {"closed_form": s, "solved": got},
                    "residual": abs(got - s) / max(1.0, abs(s)), "tolerance": 1e-12}

        b.check("closed_form_n1", data_in, closed_form)


def _run_elliptic(b: _Battery, P: dict, rng, config):
    x, hbar = P["x"], P["hbar"]
    theta = elliptic.ThetaParams(P["p_ell"], P["truncation"])
    zero = elliptic.ThetaParams(0.0, P["truncation"])
    inputs = {"x": x, "hbar": hbar, "p_ell": P["p_ell"], "truncation": P["truncation"]}
    n = len(x)
    subsets = [s for r in range(1, n + 1) for s in combinations(range(n), r)]

    def trig_limit():
        worst = 0.0
        for s in subsets:
            ell = elliptic.ers_hamiltonian_coefficient(elliptic.ERSCoefficientRequest(s, x, hbar, zero))
            trig = trs.subset_coefficient(x, hbar, s)
            worst = max(worst, abs(ell - trig) / max(1.0, abs(trig)))
        return {"residual": worst, "tolerance": 1e-12}

    b.check("trigonometric_limit", inputs, trig_limit)

    def quasi_periodicity():
        p = theta.p_ell
        worst = max(abs(elliptic.theta_trunc(p * xi, theta) + elliptic.theta_trunc(xi, theta) / xi)
                    for xi in x)
        return {"residual": worst, "tolerance": 1e-12}

    b.check("theta_quasi_periodicity", inputs, quasi_periodicity)

    def convergence():
        doubled = elliptic.ThetaParams(theta.p_ell, 2 * theta.truncation)
        worst = max(abs(elliptic.theta_trunc(v, theta) - elliptic.theta_trunc(v, doubled)) for v in x)
        return {"residual": worst, "tolerance": 1e-12}

    b.check("theta_truncation_convergence", inputs, convergence)

    def derivative():
        h = 1e-6
        worst = 0.0
        for s in subsets[:-1] or subsets:
            req = elliptic.ERSCoefficientRequest(s, x, hbar, theta)
            plus = elliptic.ERSCoefficientRequest(s, x, hbar, elliptic.ThetaParams(theta.p_ell + h, theta.truncation))
            minus = elliptic.ERSCoefficientRequest(s, x, hbar, elliptic.ThetaParams(theta.p_ell - h, theta.truncation))
            fd = (elliptic.ers_hamiltonian_coefficient(plus) - elliptic.ers_hamiltonian_coefficient(minus)) / (2 * h)
            an = elliptic.ers_coefficient_derivative(req)
            worst = max(worst, abs(fd - an) / max(1.0, abs(an)))
        return {"residual": worst, "tolerance": 1e-6}

    b.check("p_derivative", inputs, derivative)

    b.check("coefficients", inputs, lambda: {"values": {
        ",".join(map(str, s)): elliptic.ers_hamiltonian_coefficient(
            elliptic.ERSCoefficientRequest(s, x, hbar, theta)) for s in subsets}})


def _run_adhm(b: _Battery, P: dict, rng, config):
    inputs = {k: P[k] for k in ("a_params", "k", "q", "coupling", "partition")}
    state = {}

    def solve():
        prob = elliptic.ADHMBetheProblem(P["a_params"], P["k"], P["q"], P["coupling"])
        roots = elliptic.adhm_bethe_solve(prob, P["partition"], config)
        state["roots"] = roots
        res = elliptic.adhm_uncleared_residual(roots, prob.a_params, prob.q, prob.coupling)
        return {"values": {"roots": roots, "residual_vector": res},
                "residual": float(np.max(np.abs(res))), "tolerance": 1e-10}

    b.check("bethe_solve", inputs, solve)

    def string_at_zero():
        prob = elliptic.ADHMBetheProblem(P["a_params"], P["k"], P["q"], 0.0)
        seed = elliptic.string_seed(prob, P["partition"])
        res = elliptic.adhm_residual(seed, prob.a_params, prob.q, 0.0)
        return {"residual": float(np.max(np.abs(res))), "tolerance": 1e-12}

    b.check("string_seed_exact", inputs, string_at_zero)

    def eigenvalue():
        roots = state["roots"]
        compact = elliptic.universal_bundle_eigenvalue(roots, P["q"])
        full = elliptic.universal_bundle_eigenvalue(roots, P["q"], P["hbar_large"])
        return {"values": {"compact": compact, "large_hbar": full},
                "residual": abs(full - compact) / max(abs(compact), 1e-300), "tolerance": 1e-5}

    b.check("universal_bundle_limit", dict(inputs, hbar_large=P["hbar_large"]), eigenvalue)

    if len(P["a_params"]) == 1 and P["k"] == 1:
        def closed():
            expect = P["a_params"][0] + P["coupling"]
            return {"residual": abs(state["roots"][0] - expect), "tolerance": 1e-12}

        b.check("closed_form_k1", inputs, closed)


def _run_dwork(b: _Battery, P: dict, rng, config):
    if P["series"] is not None:
        series = BUILTIN_SERIES[P["series"]]()
        inputs = {"series": P["series"]}
    elif P["coefficients"] is not None:
        series = dwork.series_from_list(P["coefficients"], "inline")
        inputs = {"coefficients": P["coefficients"]}
    else:
        path = Path(P["coefficients_file"])
        series = dwork.series_from_file(path)
        inputs = {"coefficients_sha256": hashlib.sha256(path.read_bytes()).hexdigest()}
    expect = P["expect_congruence"]
    for p in P["primes"]:
        for s in P["levels"]:
            def congruence(p=p, s=s):
                res = dwork.dwork_congruence_residual(series, p, s)
                holds = res.is_zero()
                return {"values": {"holds": holds, "expected": expect, "residual": list(res.coefficients),
                                   "modulus": p ** s},
                        "passed": holds == expect}

            b.check(f"dwork_p{p}_s{s}", dict(inputs, prime=p, level=s), congruence)

            def prefix(p=p, s=s):
                lo = dwork.truncation_poly(series, p, s).poly.coefficients
                hi = dwork.truncation_poly(series, p, s + 1).poly.coefficients
                return {"passed": hi[: len(lo)] == lo}

            b.check(f"prefix_p{p}_s{s}", dict(inputs, prime=p, level=s), prefix)


RUNNERS = {
    "trs": _run_trs,
    "duality": _run_duality,
    "spinchain": _run_spinchain,
    "qq": _run_qq,
    "elliptic": _run_elliptic,
    "adhm": _run_adhm,
    "dwork": _run_dwork,
}


def run_scenario(s: Scenario) -> Report:
    start = time.perf_counter()
    rng = np.random.default_rng(s.seed)
    battery = _Battery(s)
    RUNNERS[s.kind](battery, s.parameters, rng, s.config)
    return Report(
        scenario=s.raw,
        checks=battery.records,
        seed=s.seed,
        duration=time.perf_counter() - start,
    )
