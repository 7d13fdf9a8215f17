"""Instance generation and verification campaigns.

Every instance draws from its own counter-based stream keyed by
``(seed, index)``, so a campaign gives the same report whatever order or
process the instances run in.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import fraction_str, rank_exact, rational_roots
from .finite import (
    BudgetExceeded,
    enumerate_r_planes,
    finite_field,
    reduce_form,
    reduction_is_smooth,
    verify_ff_propositions,
)
from .localglobal import Place, as_place, global_witt_index, local_witt_index
from .pencil import (
    MemberParameter,
    Pencil,
    build_pencil,
    discriminant_curve,
    is_smooth,
    member_with_global_witt,
    member_with_local_witt,
    odd_degree_point_detector,
    padic_nonsquare_det_member,
    real_half_hyperbolic_member,
)
from .qform import QuadraticForm
from .search import isotropic_plane, isotropic_subspace, point_search, quadratic_point_from_line

SCHEMA = "pencil-quadrics/1"
MAX_REJECTIONS = 10**4

WITNESSED = "witnessed"
NOT_FOUND = "not-found-within-bound"
SKIPPED = "skipped"
REFUTED = "refuted"


class GeneratorError(RuntimeError):
    pass


class CampaignError(ValueError):
    pass


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _random_form(rng: np.random.Generator, dim: int, bound: int, skip=()) -> QuadraticForm:
    coeffs = {}
    for i in range(dim):
        for j in range(i, dim):
            c = 0 if (i, j) in skip else int(rng.integers(-bound, bound + 1))
            coeffs[(i, j)] = c
    return QuadraticForm.from_monomials(dim, coeffs)


def generate_smooth_pencil(n: int, coeff_bound: int, seed: int, constraints: Sequence[str] = (), index: int = 0) -> Pencil:
    """Rejection-sample integral forms in ``n+1`` variables until the pencil is smooth.

    Constraints:
      ``has-rational-point``: no ``x0^2`` term in either form and independent
      ``x0``-linear parts, so ``(1:0:...:0)`` is a smooth point of X.
      ``rank3-member``: ``g`` does not involve ``x0`` (``n = 3`` only).
    """
    if not 3 <= n <= 7:
        raise ValueError("n must lie in [3, 7]")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be positive")
    unknown = set(constraints) - {"has-rational-point", "rank3-member"}
    if unknown:
        raise ValueError(f"unknown constraints {sorted(unknown)}")
    if "rank3-member" in constraints and n != 3:
        raise ValueError("rank3-member applies to n = 3")
    rng = instance_rng(seed, index)
    dim = n + 1
    skip_f: set = set()
    skip_g: set = set()
    if "has-rational-point" in constraints:
        skip_f.add((0, 0))
        skip_g.add((0, 0))
    if "rank3-member" in constraints:
        skip_g.update((0, j) for j in range(dim))
    for _ in range(MAX_REJECTIONS):
        f = _random_form(rng, dim, coeff_bound, skip_f)
        g = _random_form(rng, dim, coeff_bound, skip_g)
        if "has-rational-point" in constraints:
            if rank_exact([f.gram[0][1:], g.gram[0][1:]]) < 2:
                continue
        p = build_pencil(f, g)
        if is_smooth(p):
            return p
    raise GeneratorError(f"{MAX_REJECTIONS} consecutive rejections (n={n}, bound={coeff_bound})")


# ---------------------------------------------------------------------------
# campaign specification


@dataclass(frozen=True)
class TheoremEntry:
    runner: Callable
    n: int | None
    places: tuple
    must_witness: bool
    coeff_bound: int = 5
    height_bound: int = 30
    description: str = ""


@dataclass(frozen=True)
class CampaignSpec:
    theorem_id: str
    n: int | None = None
    samples: int = 10
    coeff_bound: int | None = None
    height_bound: int | None = None
    places: tuple | None = None
    seed: int = 0

    def resolved(self) -> "CampaignSpec":
        if self.theorem_id not in REGISTRY:
            raise CampaignError(f"unknown theorem id {self.theorem_id!r}; known: {sorted(REGISTRY)}")
        entry = REGISTRY[self.theorem_id]
        if not 0 <= self.seed < 2**64:
            raise CampaignError("seed must be a 64-bit unsigned integer")
        if self.samples < 0:
            raise CampaignError("samples must be nonnegative")
        if self.n is not None and not 3 <= self.n <= 7:
            raise CampaignError("n must lie in [3, 7]")
        places = tuple(str(as_place(v)) for v in (self.places if self.places is not None else entry.places))
        return CampaignSpec(
            self.theorem_id,
            self.n if self.n is not None else entry.n,
            self.samples,
            self.coeff_bound if self.coeff_bound is not None else entry.coeff_bound,
            self.height_bound if self.height_bound is not None else entry.height_bound,
            places,
            self.seed,
        )

    def to_json(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "n": self.n,
            "samples": self.samples,
            "coeff_bound": self.coeff_bound,
            "height_bound": self.height_bound,
            "places": list(self.places) if self.places is not None else None,
            "seed": self.seed,
        }


@dataclass
class InstanceOutcome:
    index: int
    outcome: str
    reason: str | None = None
    witness: dict | None = None
    instance: dict | None = None

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "outcome": self.outcome}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness
        if self.instance is not None:
            out["instance"] = self.instance
        return out


@dataclass
class VerificationReport:
    spec: CampaignSpec
    instances: list[InstanceOutcome]
    must_witness: bool
    timings: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        counts = {WITNESSED: 0, NOT_FOUND: 0, SKIPPED: 0, REFUTED: 0}
        for inst in self.instances:
            counts[inst.outcome] += 1
        assert sum(counts.values()) == len(self.instances)
        return counts

    @property
    def failed(self) -> bool:
        s = self.summary
        if s[REFUTED]:
            return True
        return self.must_witness and s[NOT_FOUND] > 0

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "campaign": self.spec.to_json(),
            "must_witness": self.must_witness,
            "summary": self.summary,
            "status": "failed" if self.failed else "ok",
            "instances": [i.to_json() for i in self.instances],
        }
        if timings:
            out["timings"] = self.timings
        return out


# ---------------------------------------------------------------------------
# theorem runners: (spec, index) -> InstanceOutcome


def _n_for(spec: CampaignSpec, index: int) -> int:
    # mordell-real without a fixed n cycles through all dimensions
    return spec.n if spec.n is not None else 3 + index % 5


def _finite_places(spec: CampaignSpec) -> list[Place]:
    return [as_place(v) for v in spec.places if not as_place(v).is_real]


def _run_mordell(spec, index):
    n = _n_for(spec, index)
    p = generate_smooth_pencil(n, spec.coeff_bound, spec.seed, index=index)
    par, sig = real_half_hyperbolic_member(p)
    # independent recheck of the witness
    again = p.member(par).signature()
    ok = again == sig and again.zeros == 0 and abs(again.positives - again.negatives) <= 1
    w = {"n": n, "parameter": par.to_json(), "signature": list(sig.as_tuple())}
    return InstanceOutcome(index, WITNESSED if ok else REFUTED, None if ok else "signature recheck failed", w, p.to_json())


def _local_member_campaign(spec, index, n, r, constraints=()):
    p = generate_smooth_pencil(n, spec.coeff_bound, spec.seed, constraints, index=index)
    wit = {}
    missing = []
    for v in _finite_places(spec):
        res = member_with_local_witt(p, v, r, spec.height_bound)
        if res is None:
            missing.append(str(v))
            continue
        par, w = res
        again = local_witt_index(p.member(par), v).index
        if again < r:
            return InstanceOutcome(index, REFUTED, f"recheck at {v} gave {again}", None, p.to_json())
        wit[str(v)] = {"parameter": par.to_json(), "witt": w.index}
    if missing:
        return InstanceOutcome(index, NOT_FOUND, f"no member within height {spec.height_bound} at {missing}", wit, p.to_json())
    return InstanceOutcome(index, WITNESSED, None, wit, p.to_json())


def _run_p3(spec, index):
    return _local_member_campaign(spec, index, 3, 2, ("rank3-member",))


def _run_p4(spec, index):
    return _local_member_campaign(spec, index, 4, 2)


def _run_p6(spec, index):
    p = generate_smooth_pencil(6, spec.coeff_bound, spec.seed, index=index)
    wit = {}
    missing = []
    bad = []
    for v in _finite_places(spec):
        if v.prime < 9 or not reduction_is_smooth(p, v.prime):
            bad.append(str(v))
            continue
        res = member_with_local_witt(p, v, 3, spec.height_bound)
        if res is None:
            missing.append(str(v))
        else:
            wit[str(v)] = {"parameter": res[0].to_json(), "witt": res[1].index}
    if not wit and not missing:
        return InstanceOutcome(index, SKIPPED, f"no good reduction with residue field >= 9 among {bad}", None, p.to_json())
    if missing:
        return InstanceOutcome(index, NOT_FOUND, f"no member within height {spec.height_bound} at {missing}", wit, p.to_json())
    if bad:
        wit["skipped_places"] = bad
    return InstanceOutcome(index, WITNESSED, None, wit, p.to_json())


def _quadratic_point_for(p: Pencil, par: MemberParameter, bound: int):
    plane = isotropic_plane(p.member(par), bound, strategy="auto")
    if plane is None:
        return None
    u, v = plane
    return quadratic_point_from_line(p.f, p.g, u.coords, v.coords, par)


def _run_p5_global(spec, index):
    p = generate_smooth_pencil(5, spec.coeff_bound, spec.seed, index=index)
    res = member_with_global_witt(p, 2, spec.height_bound)
    if res is None:
        return InstanceOutcome(index, NOT_FOUND, f"no member with global Witt index >= 2 within height {spec.height_bound}", None, p.to_json())
    par, g = res
    pt = _quadratic_point_for(p, par, spec.height_bound)
    w = {"parameter": par.to_json(), "member_witt": g.to_json()}
    if pt is None:
        return InstanceOutcome(index, NOT_FOUND, "isotropic plane of the member not found within bound", w, p.to_json())
    w["point"] = pt.to_json()
    return InstanceOutcome(index, WITNESSED, None, w, p.to_json())


def _run_iyer_parimala(spec, index):
    p = generate_smooth_pencil(5, spec.coeff_bound, spec.seed, index=index)
    curve = discriminant_curve(p, -1)
    odd = odd_degree_point_detector(curve)
    if odd.status != "yes":
        return InstanceOutcome(index, SKIPPED, "no odd-degree point detected on y^2 = -det", None, p.to_json())
    # necessary condition for a line over each completion: sampled members contain 2H there
    places = [as_place(v) for v in spec.places]
    for v in places:
        for par in (MemberParameter(1, 0), MemberParameter(0, 1), MemberParameter(1, 1), MemberParameter(1, -1)):
            if p.det_at(par) != 0 and local_witt_index(p.member(par), v).index < 2:
                return InstanceOutcome(index, SKIPPED, f"local line test fails at {v}", {"odd_degree": odd.to_json()}, p.to_json())
    pts = point_search(p.f, p.g, spec.height_bound)
    w = {"odd_degree": odd.to_json(), "local_line_test": "necessary condition at " + ",".join(map(str, places))}
    if not pts:
        return InstanceOutcome(index, NOT_FOUND, "no rational point within height bound", w, p.to_json())
    w["point"] = pts[0].to_json()
    return InstanceOutcome(index, WITNESSED, None, w, p.to_json())


def _run_p7_local(spec, index):
    p = generate_smooth_pencil(7, spec.coeff_bound, spec.seed, ("has-rational-point",), index=index)
    P = p.det_polynomial()
    has_root = bool(rational_roots(P)) or P.degree < p.n + 1
    wit = {}
    missing = []
    for v in _finite_places(spec):
        if has_root:
            par = padic_nonsquare_det_member(p, v)
            path = "nonsquare-determinant"
        else:
            res = member_with_local_witt(p, v, 3, spec.height_bound)
            if res is None:
                missing.append(str(v))
                continue
            par = res[0]
            path = "scan"
        m = p.member(par)
        w = local_witt_index(m, v)
        if m.rank() != 8 or w.index < 3:
            return InstanceOutcome(index, REFUTED, f"member {par} at {v} has rank {m.rank()} and Witt index {w.index}", None, p.to_json())
        wit[str(v)] = {"parameter": par.to_json(), "witt": w.index, "path": path}
    if missing:
        return InstanceOutcome(index, NOT_FOUND, f"no member within height {spec.height_bound} at {missing}", wit, p.to_json())
    return InstanceOutcome(index, WITNESSED, None, wit, p.to_json())


def _run_p7_global(spec, index):
    p = generate_smooth_pencil(7, spec.coeff_bound, spec.seed, ("has-rational-point",), index=index)
    P = p.det_polynomial()
    if not rational_roots(P) and P.degree == p.n + 1:
        return InstanceOutcome(index, SKIPPED, "no rank-7 member (determinant has no rational root)", None, p.to_json())
    res = member_with_global_witt(p, 3, spec.height_bound)
    if res is None:
        return InstanceOutcome(index, NOT_FOUND, f"no member with global Witt index >= 3 within height {spec.height_bound}", None, p.to_json())
    par, g = res
    return InstanceOutcome(index, WITNESSED, None, {"parameter": par.to_json(), "member_witt": g.to_json()}, p.to_json())


def _run_hasse(spec, index):
    rng = instance_rng(spec.seed, index)
    dim = spec.n + 1 if spec.n is not None else int(rng.integers(2, 9))
    while True:
        q = _random_form(rng, dim, spec.coeff_bound)
        if q.is_nondegenerate():
            break
    g = global_witt_index(q)
    local_min = min(r.index for r in g.per_place.values())
    inst = {"form": q.to_json()}
    if g.index != min(local_min, g.good_place_index):
        return InstanceOutcome(index, REFUTED, "global index differs from the minimum of local indices", None, inst)
    w = {"witt": g.to_json()}
    if g.index == 0:
        return InstanceOutcome(index, WITNESSED, None, w, inst)
    sub = isotropic_subspace(q, g.index, spec.height_bound, strategy="auto")
    if sub is None:
        return InstanceOutcome(index, NOT_FOUND, "explicit isotropic subspace not found within bound", w, inst)
    w["subspace"] = [[str(x) for x in v.coords] for v in sub]
    return InstanceOutcome(index, WITNESSED, None, w, inst)


_FF_FIELDS = {3: (5, 7), 4: (5, 7), 5: (37,), 6: (3,), 7: (3,)}


def _run_ff(spec, index):
    n = _n_for(spec, index)
    p = generate_smooth_pencil(n, spec.coeff_bound, spec.seed, index=index)
    primes = [v.prime for v in _finite_places(spec)] or list(_FF_FIELDS[n])
    checks = {}
    for q in primes:
        F = finite_field(q)
        rep = verify_ff_propositions(p, F)
        if rep.skipped:
            checks[str(q)] = {"skipped": rep.skipped}
            continue
        item = rep.to_json()
        f, g = reduce_form(p.f, F), reduce_form(p.g, F)
        try:
            if n == 4:
                lines = enumerate_r_planes([f, g], 1).count
                item["checks"]["lines"] = {"count": lines, "holds": lines <= 16}
            elif n == 6:
                planes = enumerate_r_planes([f, g], 2).count
                item["checks"]["planes"] = {"count": planes, "holds": planes <= 64}
        except BudgetExceeded as e:
            item["budget"] = str(e)
        checks[str(q)] = item
    done = [c for c in checks.values() if c.get("skipped") is None]
    if not done:
        return InstanceOutcome(index, SKIPPED, "no smooth reduction at the chosen primes", {"fields": checks}, p.to_json())
    if not all(c["holds"] for d in done for c in d["checks"].values()):
        return InstanceOutcome(index, REFUTED, "a finite-field check failed", {"fields": checks}, p.to_json())
    return InstanceOutcome(index, WITNESSED, None, {"fields": checks}, p.to_json())


REGISTRY: dict[str, TheoremEntry] = {
    "mordell-real": TheoremEntry(_run_mordell, None, ("real",), True, 5, 0, "member of signature 0 or +-1"),
    "p3-quad-point": TheoremEntry(_run_p3, 3, (2, 3, 5, 7), True, 9, 50, "member with local Witt >= 2, g free of x0"),
    "p4-quad-point": TheoremEntry(_run_p4, 4, (2, 3, 5, 7), True, 9, 50, "member with local Witt >= 2"),
    "p5-global-quad": TheoremEntry(_run_p5_global, 5, (), False, 5, 100, "member with global Witt >= 2 and explicit quadratic point"),
    "p5-iyer-parimala": TheoremEntry(_run_iyer_parimala, 5, ("real", 2, 3, 5), False, 3, 3, "odd-degree point on the discriminant curve, then rational point search"),
    "p6-conic-local": TheoremEntry(_run_p6, 6, (11, 13), True, 5, 50, "member with local Witt >= 3 at good primes"),
    "p7-local-3h": TheoremEntry(_run_p7_local, 7, (2, 3, 5), True, 5, 50, "rank-8 member with local Witt >= 3"),
    "p7-global-3h": TheoremEntry(_run_p7_global, 7, (), False, 5, 50, "member with global Witt >= 3"),
    "hasse-subform": TheoremEntry(_run_hasse, None, (), False, 5, 12, "global Witt index = min of local ones, explicit subspace"),
    "ff-census": TheoremEntry(_run_ff, 4, (), True, 5, 0, "finite-field point, member and subspace checks"),
}


def run_instance(spec: CampaignSpec, index: int) -> InstanceOutcome:
    return REGISTRY[spec.theorem_id].runner(spec, index)


def _run_indexed(args):
    spec, index = args
    t0 = time.perf_counter()
    out = run_instance(spec, index)
    return out, time.perf_counter() - t0


def verify(spec: CampaignSpec, jobs: int = 1) -> VerificationReport:
    spec = spec.resolved()
    entry = REGISTRY[spec.theorem_id]
    t0 = time.perf_counter()
    tasks = [(spec, i) for i in range(spec.samples)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_indexed, tasks))
    else:
        results = [_run_indexed(t) for t in tasks]
    instances = [r[0] for r in results]
    timings = {"total_seconds": round(time.perf_counter() - t0, 3), "per_instance_seconds": [round(r[1], 4) for r in results]}
    return VerificationReport(spec, instances, entry.must_witness, timings)
