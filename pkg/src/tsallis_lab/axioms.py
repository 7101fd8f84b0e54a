"""Check the entropy axioms of a candidate functional on exhaustive grids plus seeded samples."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .functionals import EntropyFunctional
from .simplex import (
    NestedVector,
    StochasticVector,
    append_zero,
    block_conditional,
    conditional_pair,
    delta2_vectors,
    format_vector,
    grid_up_to,
    merge_adjacent,
    nest_by_lengths,
    pair_mass,
    random_vector,
    swap,
    uniform,
)
from .values import EntropyValue, as_alpha, pow_alpha

FLOAT_TOLERANCE = 1e-10
CONTINUITY_CONSTANT = 4
CONTINUITY_FAIL_FACTOR = 10

PASS = "pass"
FAIL = "fail"
HEURISTIC_PASS = "heuristic-pass"


@dataclass(frozen=True)
class SampleSpec:
    max_denominator: int = 6
    max_length: int = 4
    samples: int = 200
    seed: int = 0

    def grid(self) -> list[StochasticVector]:
        return grid_up_to(self.max_denominator, self.max_length)

    def random_vectors(self) -> list[StochasticVector]:
        rng = random.Random(self.seed)
        return [random_vector(rng, self.max_denominator, self.max_length)
                for _ in range(self.samples)]

    def vectors(self) -> list[StochasticVector]:
        """Grid first, then random samples not already seen, in draw order."""
        out = self.grid()
        seen = set(out)
        for v in self.random_vectors():
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out

    def delta2(self) -> list[StochasticVector]:
        return delta2_vectors(self.max_denominator)

    def to_json(self) -> dict:
        return {"max_denominator": self.max_denominator, "max_length": self.max_length,
                "samples": self.samples, "seed": self.seed}


@dataclass
class Witness:
    vectors: dict
    index: object
    lhs: EntropyValue
    rhs: EntropyValue

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, StochasticVector):
                return format_vector(x)
            if isinstance(x, (list, tuple)):
                return [enc(y) for y in x]
            return x
        return {"vectors": {k: enc(v) for k, v in self.vectors.items()},
                "index": self.index, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}


@dataclass
class AxiomReport:
    axiom: str
    verdict: str
    instances: int
    max_residual: EntropyValue
    witness: Witness | None = None
    mode: str = "exact"
    tolerance: float = 0.0
    heuristic: bool = False
    details: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "instances": self.instances,
            "max_residual": self.max_residual.to_json(),
            "witness": self.witness.to_json() if self.witness else None,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "heuristic": self.heuristic,
            "details": self.details,
        }


class _Memo:
    """Per-check evaluation cache; the functional itself stays stateless."""

    def __init__(self, F: EntropyFunctional):
        self.F = F
        self.cache: dict[StochasticVector, EntropyValue] = {}

    def __call__(self, v):
        val = self.cache.get(v)
        if val is None:
            val = self.cache[v] = self.F(v)
        return val


class _Tracker:
    """Ordered reduction over residuals: max magnitude, lexicographically smallest tie."""

    def __init__(self, tolerance: float = FLOAT_TOLERANCE):
        self.tolerance = tolerance
        self.count = 0
        self.best = None
        self.best_key = None
        self.witness = None
        self.violated = False
        self.all_exact = True

    def add(self, residual: EntropyValue, key, make_witness) -> None:
        self.count += 1
        mag = abs(residual)
        if residual.is_exact:
            bad = residual.exact != 0
        else:
            self.all_exact = False
            bad = float(mag.approx) > self.tolerance
        self.violated |= bad
        if self.best is None or mag > self.best or (mag == self.best and key < self.best_key):
            self.best, self.best_key, self.witness = mag, key, make_witness

    def report(self, axiom: str, heuristic: bool = False, **details) -> AxiomReport:
        best = self.best if self.best is not None else EntropyValue.of(0)
        if self.violated:
            verdict = FAIL
        else:
            verdict = HEURISTIC_PASS if heuristic else PASS
        witness = self.witness() if self.witness is not None and self.count else None
        return AxiomReport(
            axiom=axiom, verdict=verdict, instances=self.count, max_residual=best,
            witness=witness if (verdict == FAIL or witness is not None) else None,
            mode="exact" if self.all_exact else "float",
            tolerance=0.0 if self.all_exact else self.tolerance,
            heuristic=heuristic, details=details,
        )


def _vkey(v: StochasticVector):
    return v.components


def pairwise_sides(F, alpha, v: StochasticVector, j: int, H=None):
    """Both sides of the merge identity at (v, j); a zero-mass pair drops the conditional term."""
    alpha = as_alpha(alpha)
    H = H or F
    s = pair_mass(v, j)
    merged = merge_adjacent(v, j)
    if s == 0:
        return H(v), H(merged), merged, None
    cond = conditional_pair(v, j)
    return H(v), H(merged) + pow_alpha(s, alpha, F.prec) * H(cond), merged, cond


def pairwise_residual(F, alpha, v: StochasticVector, j: int) -> EntropyValue:
    lhs, rhs, _, _ = pairwise_sides(F, alpha, v, j)
    return lhs - rhs


def check_pairwise_additivity(F: EntropyFunctional, alpha, spec: SampleSpec) -> AxiomReport:
    """F(v) = F(merge_j v) + s**alpha F(conditional pair) for every adjacent pair j."""
    alpha = as_alpha(alpha)
    H = _Memo(F)
    t = _Tracker()
    for v in spec.vectors():
        for j in range(1, len(v)):
            lhs, rhs, merged, cond = pairwise_sides(F, alpha, v, j, H)

            def witness(v=v, j=j, merged=merged, cond=cond, lhs=lhs, rhs=rhs):
                return Witness({"v": v, "merged": merged, "conditional": cond}, j, lhs, rhs)

            t.add(lhs - rhs, (_vkey(v), j), witness)
    return t.report("pairwise_additivity", alpha=str(alpha), **spec.to_json())


def _block_partitions(n: int):
    """All compositions of n into ordered positive parts."""
    for cuts in product((False, True), repeat=n - 1):
        lengths, run = [], 1
        for cut in cuts:
            if cut:
                lengths.append(run)
                run = 1
            else:
                run += 1
        lengths.append(run)
        yield tuple(lengths)


def generalized_sides(F, alpha, nested: NestedVector, H=None):
    """F(flattened) and F(outer) + sum_i p_i**alpha F(conditional_i); zero blocks add nothing."""
    alpha = as_alpha(alpha)
    H = H or F
    rhs = H(nested.outer)
    conds = []
    for i, p in enumerate(nested.outer):
        cond = block_conditional(nested, i)
        conds.append(cond)
        if cond is not None:
            rhs = rhs + pow_alpha(p, alpha, F.prec) * H(cond)
    return H(nested.flatten()), rhs, conds


def generalized_residual(F, alpha, nested: NestedVector) -> EntropyValue:
    lhs, rhs, _ = generalized_sides(F, alpha, nested)
    return lhs - rhs


def check_generalized_additivity(F: EntropyFunctional, alpha, spec: SampleSpec) -> AxiomReport:
    """Grouped additivity over every contiguous grouping of each sampled vector.

    The all-singletons grouping forces F((1)) = 0.
    """
    alpha = as_alpha(alpha)
    H = _Memo(F)
    t = _Tracker()
    for w in spec.vectors():
        for lengths in _block_partitions(len(w)):
            try:
                nested = nest_by_lengths(w, lengths)
            except ValueError:
                continue  # zero-mass block longer than one entry
            lhs, rhs, conds = generalized_sides(F, alpha, nested, H)

            def witness(w=w, nested=nested, conds=conds, lengths=lengths, lhs=lhs, rhs=rhs):
                return Witness({"flattened": w, "outer": nested.outer, "conditionals": conds},
                               list(lengths), lhs, rhs)

            t.add(lhs - rhs, (_vkey(w), lengths), witness)
    return t.report("generalized_additivity", alpha=str(alpha), **spec.to_json())


def check_expansibility(F: EntropyFunctional, spec: SampleSpec) -> AxiomReport:
    H = _Memo(F)
    t = _Tracker()
    for v in spec.vectors():
        w = append_zero(v)
        lhs, rhs = H(w), H(v)
        t.add(lhs - rhs, _vkey(v),
              lambda v=v, w=w, lhs=lhs, rhs=rhs: Witness({"v": v, "expanded": w}, None, lhs, rhs))
    return t.report("expansibility", **spec.to_json())


def check_maximality(F: EntropyFunctional, spec: SampleSpec) -> AxiomReport:
    """Residual is the excess F(v) - F(uniform(n)) when positive, else 0."""
    H = _Memo(F)
    t = _Tracker()
    for v in spec.vectors():
        u = uniform(len(v))
        lhs, rhs = H(v), H(u)
        excess = lhs - rhs
        residual = excess if excess.sign() > 0 else excess * 0
        t.add(residual, _vkey(v),
              lambda v=v, u=u, lhs=lhs, rhs=rhs: Witness({"v": v, "uniform": u}, None, lhs, rhs))
    return t.report("maximality", **spec.to_json())


def _adjacent_pairs(v: StochasticVector, b: int):
    """Grid neighbours obtained by moving 1/b from component i to a later component k."""
    step = Fraction(1, b)
    comps = v.components
    for i in range(len(comps)):
        if comps[i] < step:
            continue
        for k in range(i + 1, len(comps)):
            moved = list(comps)
            moved[i] -= step
            moved[k] += step
            yield StochasticVector._trusted(tuple(moved))


def check_continuity_sampled(F: EntropyFunctional, spec: SampleSpec, alpha=None,
                             constant=CONTINUITY_CONSTANT) -> AxiomReport:
    """Heuristic modulus-of-continuity estimate on the denominator-b grid.

    The expected jump scale is constant / b**min(alpha, 1). Jumps beyond
    ten times that scale are reported as a failure; anything else is only a
    heuristic pass, since no finite sample certifies continuity.
    """
    if alpha is None:
        alpha = F.alpha if F.alpha is not None else 1
    alpha = as_alpha(alpha)
    b = spec.max_denominator
    exponent = min(float(alpha.value), 1.0)
    threshold = constant / b ** exponent
    H = _Memo(F)
    t = _Tracker(tolerance=CONTINUITY_FAIL_FACTOR * threshold)
    for v in spec.grid():
        for w in _adjacent_pairs(v, b):
            lhs, rhs = H(v), H(w)
            jump = lhs - rhs
            # force float-mode comparison: exact jumps are expected to be nonzero
            jump = EntropyValue.approximate(jump.approx, jump.prec)
            t.add(jump, (_vkey(v), _vkey(w)),
                  lambda v=v, w=w, lhs=lhs, rhs=rhs: Witness({"v": v, "neighbour": w}, None, lhs, rhs))
    within = t.best is None or float(t.best.approx) <= threshold
    return t.report("continuity", heuristic=True, threshold=threshold,
                    fail_threshold=CONTINUITY_FAIL_FACTOR * threshold,
                    within_threshold=within, **spec.to_json())


def _upper_half_pairs(spec: SampleSpec) -> list[StochasticVector]:
    return [v for v in spec.delta2() if v[0] >= Fraction(1, 2)]


def check_symmetry_delta2(F: EntropyFunctional, spec: SampleSpec) -> AxiomReport:
    """F(p, 1-p) - F(1-p, p) for p in [1/2, 1] on the two-point grid."""
    H = _Memo(F)
    t = _Tracker()
    for v in _upper_half_pairs(spec):
        w = swap(v)
        lhs, rhs = H(v), H(w)
        t.add(lhs - rhs, _vkey(v),
              lambda v=v, w=w, lhs=lhs, rhs=rhs: Witness({"v": v, "swapped": w}, None, lhs, rhs))
    return t.report("symmetry_delta2", **spec.to_json())


def check_sign_constancy(F: EntropyFunctional, spec: SampleSpec) -> AxiomReport:
    """Pass iff F is >= 0 on all of the two-point grid or <= 0 on all of it.

    The residual is min(max F, -min F) when both signs occur, so it measures
    how far the values straddle zero.
    """
    H = _Memo(F)
    vectors = spec.delta2()
    hi = lo = None
    for v in vectors:
        val = H(v)
        if hi is None or val > H(hi):
            hi = v
        if lo is None or val < H(lo):
            lo = v
    t = _Tracker()
    if vectors:
        top, bottom = H(hi), H(lo)
        straddle = min(top, -bottom) if top.sign() > 0 and bottom.sign() < 0 else top * 0
        t.add(straddle, (),
              lambda: Witness({"max_at": hi, "min_at": lo}, None, top, bottom))
        t.count = len(vectors)
    return t.report("sign_constancy", **spec.to_json())


def check_boundedness_estimate(F: EntropyFunctional, spec: SampleSpec) -> AxiomReport:
    """Largest |F| on the two-point grid; fails only if some evaluation is undefined."""
    H = _Memo(F)
    best, arg, bad = None, None, None
    n = 0
    for v in spec.delta2():
        n += 1
        try:
            val = H(v)
            if not _finite(val):
                raise ArithmeticError("non-finite value")
        except (ArithmeticError, ValueError) as exc:
            bad = (v, str(exc))
            break
        if best is None or abs(val) > best:
            best, arg = abs(val), v
    best = best if best is not None else EntropyValue.of(0)
    if bad is not None:
        return AxiomReport("boundedness", FAIL, n, best,
                           Witness({"v": bad[0]}, None, best, best),
                           mode="float", heuristic=True, details={"error": bad[1]})
    return AxiomReport("boundedness", HEURISTIC_PASS, n, best,
                       Witness({"argmax": arg}, None, best, best) if arg is not None else None,
                       mode="exact" if best.is_exact else "float", heuristic=True,
                       details={"max_abs": best.to_json(), **spec.to_json()})


def _finite(val: EntropyValue) -> bool:
    if val.is_exact:
        return True
    x = val.approx
    return not (x != x or x in (float("inf"), float("-inf")))


def full_report(F: EntropyFunctional, alpha, spec: SampleSpec) -> list[AxiomReport]:
    alpha = as_alpha(alpha)
    return [
        check_pairwise_additivity(F, alpha, spec),
        check_generalized_additivity(F, alpha, spec),
        check_expansibility(F, spec),
        check_maximality(F, spec),
        check_continuity_sampled(F, spec, alpha),
        check_symmetry_delta2(F, spec),
        check_sign_constancy(F, spec),
        check_boundedness_estimate(F, spec),
    ]


def exit_status(reports) -> int:
    return 1 if any(r.failed for r in reports) else 0


def reports_to_json(reports, **header) -> str:
    doc = dict(header)
    doc["reports"] = [r.to_json() for r in reports]
    doc["status"] = exit_status(reports)
    return json.dumps(doc, indent=2)
