"""Randomized and constructed-instance checks of the measure's structural properties.

Each suite draws trial ``t`` from ``numpy.random.default_rng([seed, t])``, so
outcomes depend only on ``(trials, seed)`` and trials can be evaluated in any
order. A trial fails when any of its checks exceeds that check's tolerance;
``worst_violation`` is the largest raw violation seen (negative values are
margins, i.e. every check held with room to spare).
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import formats, linalg
from .channels import (
    GaussianChannel,
    SymplecticTransform,
    apply_channel,
    apply_symplectic,
    channel_for_gain,
    make_random_channel,
)
from .errors import ConstructionFailed
from .gaussian import (
    PureFactors,
    SstsParams,
    is_physical,
    make_pure,
    make_random_physical,
    make_ssts,
    merge_parties,
    permute_parties,
    random_symplectic,
    reduce,
    standard_form,
    standard_form_state,
    tensor,
)
from .measure import (
    closed_form_channelled,
    closed_form_pure,
    closed_form_two_mode,
    ssts_measure,
    ssts_nf,
    value,
)

INEQ_TOL = 1e-9
EQ_TOL = 1e-10
ZERO_TOL = 1e-8
STRICT_GAP = 1e-6
MAX_REPAIR_STEPS = 80


@dataclass
class VerificationOutcome:
    suite_name: str
    trials: int
    seed: int
    failures: int = 0
    worst_violation: float = float("-inf")
    details: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failures == 0

    def to_dict(self):
        return {
            "suite": self.suite_name,
            "trials": self.trials,
            "seed": self.seed,
            "failures": self.failures,
            "worst_violation": None if self.trials == 0 else self.worst_violation,
            "passed": self.passed,
            "counters": dict(sorted(self.counters.items())),
            "details": self.details,
        }


class _Trial:
    """Collects check results for one trial and folds them into the outcome."""

    max_details = 20

    def __init__(self, outcome, index):
        self.outcome = outcome
        self.index = index
        self.failed = False

    def check(self, name, violation, tol, state=None, **context):
        violation = float(violation)
        out = self.outcome
        if violation > out.worst_violation:
            out.worst_violation = violation
        if violation > tol:
            self.failed = True
            if len(out.details) < self.max_details:
                rec = {"trial": self.index, "check": name, "violation": violation, "tolerance": tol}
                rec.update({k: _jsonable(v) for k, v in context.items()})
                if state is not None:
                    rec["state"] = formats.state_to_dict(state)
                out.details.append(rec)

    def count(self, key, n=1):
        self.outcome.counters[key] = self.outcome.counters.get(key, 0) + n

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if exc[0] is None and self.failed:
            self.outcome.failures += 1
        return False


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _run(name, body, trials, seed):
    outcome = VerificationOutcome(name, trials, seed)
    for t in range(trials):
        with _Trial(outcome, t) as trial:
            body(trial, np.random.default_rng([seed, t]))
    return outcome


def equality_violation(x, y):
    """``|x - y| / (1 + |x|)``: equal within ``tol`` means ``|x - y| <= tol * (1 + |x|)``."""
    return abs(x - y) / (1.0 + abs(x))


def random_state(rng, parties, max_party_modes=2, mix_scale=0.3):
    sizes = [int(s) for s in rng.integers(1, max_party_modes + 1, size=parties)]
    return make_random_physical(sum(sizes), sizes, rng=rng, mix_scale=mix_scale)


def set_partitions(items):
    """All set partitions of ``items`` as lists of lists, in a fixed order."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield [[first]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1:]


def group_measure(state, group):
    """Measure of the reduced state on ``group`` with its own party structure."""
    if len(group) < 2:
        return 0.0
    return value(reduce(state, group))


def partitioned_measure(state, blocks):
    """Measure of the reduced state on ``union(blocks)`` partitioned by ``blocks``."""
    parties = sorted(p for b in blocks for p in b)
    sub = reduce(state, parties)
    pos = {p: i for i, p in enumerate(parties)}
    return value(merge_parties(sub, [[pos[p] for p in b] for b in blocks]))


def repair_physicality(cm, indices=None, start=1e-6):
    """Add ``t`` to the diagonal at ``indices`` (all by default), doubling ``t`` until physical.

    Returns the repaired matrix and the final ``t`` (0 when no repair was needed).
    """
    cm = np.array(cm, dtype=float)
    n = cm.shape[0] // 2
    omega = linalg.symplectic_form(n)
    idx = np.arange(cm.shape[0]) if indices is None else np.asarray(indices)
    if linalg.hermitian_min_eigenvalue(cm, omega) >= 0:
        return cm, 0.0
    t = start
    for _ in range(MAX_REPAIR_STEPS):
        trial = cm.copy()
        trial[idx, idx] += t
        if linalg.hermitian_min_eigenvalue(trial, omega) >= 0:
            return trial, t
        t *= 2
    raise ConstructionFailed("physicality repair exceeded its iteration cap")


def _local_symplectics(state, rng, mix_scale=0.3):
    for j in range(state.n_parties):
        s = random_symplectic(len(state.partition[j]), rng, mix_scale)
        state = apply_symplectic(state, SymplecticTransform(s), j)
    return state


def _random_local_channel(modes, rng):
    kind = rng.integers(3)
    if kind == 0:
        return make_random_channel(modes, rng=rng, noise_floor=float(rng.uniform(0, 0.5)))
    s = random_symplectic(modes, rng, 0.5)
    if kind == 1:
        return GaussianChannel(s, np.zeros_like(s))
    eta = float(rng.uniform(0.05, 1.0))
    return GaussianChannel(np.sqrt(eta) * s, (1 - eta) * np.eye(2 * modes))


def suite_monotonicity(trials, seed):
    """Local channels applied party by party never increase the measure."""

    def body(trial, rng):
        k = int(rng.integers(2, 5))
        state = random_state(rng, k)
        before = value(state)
        for party in range(k):
            ch = _random_local_channel(len(state.partition[party]), rng)
            after_state = apply_channel(state, ch, party)
            after = value(after_state)
            trial.check("nonincreasing", after - before, INEQ_TOL, state, party=party,
                        K=ch.K, M=ch.M, before=before, after=after)
            lam = is_physical(after_state).min_eigenvalue
            trial.check("physical_output", -lam, 1e-8, after_state)
            state, before = after_state, after

    return _run("monotonicity", body, trials, seed)


def suite_hierarchy(trials, seed):
    """Coarse-graining, reduction and party-dropping never increase the measure."""

    def body(trial, rng):
        state = random_state(rng, 4)
        total = value(state)
        parties = range(4)
        for blocks in set_partitions(parties):
            if not 2 <= len(blocks) < 4:
                continue
            coarse = value(merge_parties(state, blocks))
            trial.check("coarse_graining", coarse - total, INEQ_TOL, state, blocks=blocks)
            for subsets in itertools.product(*(_nonempty_subsets(b) for b in blocks)):
                subsets = [list(s) for s in subsets]
                if subsets == [sorted(b) for b in blocks]:
                    continue
                restricted = partitioned_measure(state, subsets)
                trial.check("party_dropping", restricted - coarse, INEQ_TOL, state,
                            blocks=blocks, kept=subsets)
                trial.count("party_dropping_checks")
        for size in (2, 3):
            for group in itertools.combinations(parties, size):
                trial.check("reduction", group_measure(state, group) - total, INEQ_TOL,
                            state, group=group)

    return _run("hierarchy", body, trials, seed)


def _nonempty_subsets(block):
    block = sorted(block)
    return [c for r in range(1, len(block) + 1) for c in itertools.combinations(block, r)]


def _random_grouping(rng, k):
    perm = [int(p) for p in rng.permutation(k)]
    l = int(rng.integers(2, k))
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, k), size=l - 1, replace=False))
    bounds = [0] + cuts + [k]
    return [perm[bounds[i]:bounds[i + 1]] for i in range(l)]


def suite_corollary3(trials, seed):
    """The total measure dominates the average subgroup measure, strictly unless zero."""

    def body(trial, rng):
        k = int(rng.integers(3, 5))
        if trial.index % 10 == 9:
            state = random_state(rng, 1)
            for _ in range(k - 1):
                state = tensor(state, random_state(rng, 1))
        else:
            state = random_state(rng, k)
        groups = _random_grouping(rng, k)
        total = value(state)
        mean = float(np.mean([group_measure(state, g) for g in groups]))
        trial.check("average_bound", mean - total, INEQ_TOL, state, groups=groups)
        if abs(total - mean) <= INEQ_TOL:
            trial.count("equality_cases")
            trial.check("equality_only_at_zero", total, INEQ_TOL, state, groups=groups)

    return _run("corollary3", body, trials, seed)


def _three_party_blocks(state):
    return [state.party_indices(j) for j in range(3)]


def suite_monogamy(trials, seed):
    """Complete and tight complete monogamy on three-party states."""

    def body(trial, rng):
        # total equals the AB correlation when C is uncorrelated
        ab = random_state(rng, 2)
        state = tensor(ab, random_state(rng, 1))
        m3, m_ab = value(state), group_measure(state, (0, 1))
        trial.check("complete_constructed", abs(m3 - m_ab), EQ_TOL, state)

        # a strict gap above the AB correlation forces C to be correlated
        state = random_state(rng, 3)
        m3, m_ab = value(state), group_measure(state, (0, 1))
        m_ac, m_bc = group_measure(state, (0, 2)), group_measure(state, (1, 2))
        if m3 - m_ab > STRICT_GAP:
            trial.count("complete_random_strict")
            trial.check("complete_random", ZERO_TOL - max(m_ac, m_bc), 0.0, state)
        m_a_bc = partitioned_measure(state, [[0], [1, 2]])
        if abs(m3 - m_a_bc) <= EQ_TOL:
            trial.check("tight_random", m_bc, ZERO_TOL, state)
        else:
            trial.count("tight_random_strict")

        # B and C uncorrelated: total equals the A|BC correlation
        base = random_state(rng, 3)
        ib, ic = base.party_indices(1), base.party_indices(2)
        cm = np.array(base.cm)
        cm[np.ix_(ib, ic)] = 0.0
        cm[np.ix_(ic, ib)] = 0.0
        cm, t = repair_physicality(cm)
        state = base.with_cm(cm)
        if t:
            trial.count("repaired")
        m3 = value(state)
        m_a_bc = partitioned_measure(state, [[0], [1, 2]])
        trial.check("tight_constructed", abs(m3 - m_a_bc), EQ_TOL, state)
        trial.check("tight_constructed_bc_zero", group_measure(state, (1, 2)), ZERO_TOL, state)

    return _run("monogamy", body, trials, seed)


def _set_z_on_manifold(state):
    """Replace the A-C block by ``X B^{-1} Y``; repair by inflating only A and C."""
    ia, ib, ic = _three_party_blocks(state)
    cm = np.array(state.cm)
    X, B, Y = cm[np.ix_(ia, ib)], cm[np.ix_(ib, ib)], cm[np.ix_(ib, ic)]
    Z = X @ np.linalg.solve(B, Y)
    cm[np.ix_(ia, ic)] = Z
    cm[np.ix_(ic, ia)] = Z.T
    cm, t = repair_physicality(cm, ia + ic)
    return state.with_cm(cm), t


def theorem11_residual(state):
    """``||Z - X B^{-1} Y||_F`` for a three-party state."""
    ia, ib, ic = _three_party_blocks(state)
    cm = state.cm
    X, B, Y, Z = (cm[np.ix_(r, c)] for r, c in ((ia, ib), (ib, ib), (ib, ic), (ia, ic)))
    return float(np.linalg.norm(Z - X @ np.linalg.solve(B, Y)))


def suite_theorem11(trials, seed):
    """``M(A|BC) >= M(AB)`` with equality exactly on ``Z = X B^{-1} Y``."""

    def body(trial, rng):
        state = random_state(rng, 3)
        m_a_bc = partitioned_measure(state, [[0], [1, 2]])
        m_ab = group_measure(state, (0, 1))
        trial.check("inequality", m_ab - m_a_bc, INEQ_TOL, state)

        on, t = _set_z_on_manifold(state)
        if t:
            trial.count("repaired")
        m_a_bc = partitioned_measure(on, [[0], [1, 2]])
        m_ab = group_measure(on, (0, 1))
        trial.check("equality_on_manifold", equality_violation(m_a_bc, m_ab), INEQ_TOL, on)
        if group_measure(on, (0, 2)) > ZERO_TOL and group_measure(on, (1, 2)) > ZERO_TOL:
            trial.count("nonmonogamy_exhibits")

        ia, _, ic = _three_party_blocks(on)
        delta = rng.standard_normal((len(ia), len(ic)))
        delta *= rng.uniform(0.1, 0.5) / np.linalg.norm(delta)
        cm = np.array(on.cm)
        cm[np.ix_(ia, ic)] += delta
        cm[np.ix_(ic, ia)] += delta.T
        cm, _ = repair_physicality(cm, ia + ic)
        off = on.with_cm(cm)
        gap = partitioned_measure(off, [[0], [1, 2]]) - group_measure(off, (0, 1))
        trial.check("strict_off_manifold", STRICT_GAP - gap, 0.0, off,
                    delta_norm=float(np.linalg.norm(delta)))

    return _run("theorem11", body, trials, seed)


def _random_single_mode_channel(rng):
    K = rng.uniform(-1.5, 1.5, size=(2, 2))
    base = channel_for_gain(K, float(rng.uniform(0, 0.5)))
    w = rng.standard_normal((2, 2)) * rng.uniform(0, 1)
    return GaussianChannel(K, base.M + w @ w.T)


def suite_closed_forms(trials, seed):
    """Closed-form evaluators agree with the general determinant path."""

    def body(trial, rng):
        two = random_state(rng, 2, max_party_modes=1)
        p = standard_form(two)
        cf = closed_form_two_mode(p)
        trial.check("two_mode_rebuilt", abs(cf - value(standard_form_state(p))), EQ_TOL, two)
        trial.check("two_mode_original", abs(cf - value(two)), EQ_TOL, two)

        n = int(rng.integers(1, 5))
        f = PureFactors(tuple(1.0 + rng.exponential(0.4, n)), int(rng.integers(0, 3)))
        pure = _local_symplectics(make_pure(f), rng)
        trial.check("pure", abs(closed_form_pure(f) - value(pure)), EQ_TOL, pure,
                    gammas=f.gammas, extra_modes=f.extra_modes)

        ch = _random_single_mode_channel(rng)
        out = apply_channel(standard_form_state(p), ch, 1)
        trial.check("channelled", abs(closed_form_channelled(p, ch.K, ch.M) - value(out)),
                    INEQ_TOL, standard_form_state(p), K=ch.K, M=ch.M)

        sp = SstsParams(float(rng.uniform(0, 10)), float(rng.uniform(0, 1)))
        ssts = make_ssts(sp)
        m = ssts_measure(sp)
        trial.check("ssts_general", abs(m - value(ssts)), EQ_TOL, ssts)
        trial.check("ssts_two_mode", abs(m - closed_form_two_mode(standard_form(ssts))), EQ_TOL, ssts)
        trial.check("ssts_nf_below", ssts_nf(sp) - m, 1e-12, ssts)

    return _run("closed_forms", body, trials, seed)


def _offdiag_norm(state):
    total = 0.0
    for i in range(state.n_parties):
        for j in range(i + 1, state.n_parties):
            total += float(np.sum(state.block(i, j) ** 2))
    return np.sqrt(total)


def suite_axioms(trials, seed):
    """Range, zero-iff-product, permutation, ancilla and local-unitary invariance."""

    def body(trial, rng):
        k = int(rng.integers(2, 5))
        state = random_state(rng, k)
        v = value(state)
        trial.check("range_lower", -v, INEQ_TOL, state)
        trial.check("range_upper", v - np.nextafter(1.0, 0.0), 0.0, state)

        product = reduce(state, [0])
        for j in range(1, k):
            product = tensor(product, reduce(state, [j]))
        trial.check("zero_on_product", value(product), EQ_TOL, product)
        scale = float(np.max(np.abs(np.diag(state.cm))))
        if _offdiag_norm(state) > 1e-8 * scale:
            trial.check("nonzero_off_product", EQ_TOL - v, 0.0, state)

        perm = [int(p) for p in rng.permutation(k)]
        trial.check("permutation", abs(value(permute_parties(state, perm)) - v), INEQ_TOL,
                    state, perm=perm)

        ancilla = random_state(rng, 1)
        joined = tensor(state, ancilla)
        merged = merge_parties(joined, [[j] for j in range(k - 1)] + [[k - 1, k]])
        trial.check("ancilla", abs(value(merged) - v), INEQ_TOL, state)

        local = _local_symplectics(state, rng)
        trial.check("local_symplectic", abs(value(local) - v), INEQ_TOL, state)

    return _run("axioms", body, trials, seed)


SUITES = {
    "closed_forms": suite_closed_forms,
    "axioms": suite_axioms,
    "monotonicity": suite_monotonicity,
    "hierarchy": suite_hierarchy,
    "corollary3": suite_corollary3,
    "monogamy": suite_monogamy,
    "theorem11": suite_theorem11,
}


def suite_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def run_suite(name, trials, seed):
    return SUITES[name](trials, seed)


def run_all(trials_per_suite, seed):
    """Run every suite with a seed derived from ``(seed, suite index)``."""
    if trials_per_suite <= 0:
        return []
    return [suite(trials_per_suite, suite_seed(seed, i)) for i, suite in enumerate(SUITES.values())]


def report(outcomes):
    return {
        "passed": all(o.passed for o in outcomes),
        "suites": [o.to_dict() for o in outcomes],
    }
