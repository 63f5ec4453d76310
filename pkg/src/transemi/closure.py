"""Closure engine over an abstract system.

A subset H of G is closed when the implication

    u ~xi~ v  and  (u meet v)x |- y  and  (u meet v)xy <= z.t
    and  u, vx in H   implies   z in H

holds for all z,u,v in G and x,y,t in G* (e allowed). `closure_step` maps H
to the set of all admitted z; `closure_fixpoint` iterates it and returns the
least closed superset together with the round count and, per added element,
the first admitting 5-tuple in lexicographic order (u,v,x,y,t) with e
ordered last. `least_closed_oracle` recomputes the same set by brute-force
subset enumeration and is kept independent of the step kernel on purpose.

Subsets are int bitsets over {0..m-1}. In witness tuples the value m stands
for the adjoined identity e.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .bitsets import bits_of, bits_to_bool, bool_to_bits, full_mask, iter_bits, members
from .errors import OracleBudgetError
from .reports import Report

DEFAULT_ORACLE_BUDGET = 12
_ORACLE_BUDGET_ENV = "TRANSEMI_ORACLE_BUDGET"

# Direct witness-tree search is exponential in the tree size; beyond these
# bounds the iterated-step route is authoritative.
DIRECT_TREE_MAX_ROUNDS = 2
DIRECT_TREE_MAX_SIZE = 6


class _StepKernel:
    """Vectorized one-step operator, built once per system."""

    def __init__(self, sys):
        m = sys.size
        self.m = m
        self.mg = sys.mul_star[:m, :]          # (m, m+1), products g.x for x in G*
        self.meet = sys.meet
        self.xi = sys.xi
        self.delta_star = sys.delta_star       # (m, m+1), column e is all True
        # reach[z, w] says: w <= z.t for some t in G*.
        reach = np.zeros((m, m), dtype=bool)
        for lo in range(0, m, 64):
            hi = min(m, lo + 64)
            reach[lo:hi] = sys.zeta[:, self.mg[lo:hi]].any(axis=2).T
        # float64 carries these counts exactly and keeps matmuls on BLAS
        self.reach_f = reach.astype(np.float64)

    def step(self, h: np.ndarray) -> np.ndarray:
        m = self.m
        in_h = h[self.mg]                       # v.x in H
        pair = h[:, None] & self.xi             # u in H and u ~xi~ v
        meets = np.zeros((m, m), dtype=np.float64)
        uu, vv = np.nonzero(pair)
        meets[vv, self.meet[uu, vv]] = 1.0      # per v: reachable meets u^v
        feas = (meets.T @ in_h.astype(np.float64)) > 0.5  # (w, x) pairs via shared v
        w1 = np.zeros(m, dtype=bool)
        w1[self.mg[feas]] = True                # products (u^v).x
        ext = w1[:, None] & self.delta_star
        w2 = np.zeros(m, dtype=np.float64)
        w2[self.mg[ext]] = 1.0                  # products (u^v).x.y with (u^v)x |- y
        return (self.reach_f @ w2) > 0.5


def _kernel(sys) -> _StepKernel:
    kern = getattr(sys, "_step_kernel", None)
    if kern is None:
        kern = _StepKernel(sys)
        sys._step_kernel = kern
    return kern


def closure_step(sys, h_bits: int) -> int:
    """One application of the step operator to a nonempty subset."""
    if h_bits == 0:
        raise ValueError("closure of empty set undefined")
    h = bits_to_bool(h_bits, sys.size)
    return bool_to_bits(_kernel(sys).step(h))


@dataclass
class ClosureResult:
    """Fixpoint of the step operator started from a given seed.

    `witness[z] = (round, (u, v, x, y, t))` records, for each element that
    entered at a round > 0, the first admitting tuple in lexicographic
    order; x, y, t use index m for e.
    """

    seed_bits: int
    closed_bits: int
    rounds: int
    witness: dict[int, tuple[int, tuple[int, int, int, int, int]]] = field(
        default_factory=dict
    )

    def members(self) -> tuple[int, ...]:
        return members(self.closed_bits)

    def __contains__(self, z: int) -> bool:
        return bool((self.closed_bits >> z) & 1)


def _star_range(m: int) -> list[int]:
    return list(range(m)) + [m]


def _first_witness(sys, prev_bits: int, z: int):
    """First admitting (u,v,x,y,t) in lex order, memberships against prev_bits."""
    m = sys.size
    star = sys.mul_star
    meet = sys.meet
    xi = sys.xi
    dstar = sys.delta_star
    zeta = sys.zeta
    srange = _star_range(m)
    for u in range(m):
        if not (prev_bits >> u) & 1:
            continue
        for v in range(m):
            if not xi[u, v]:
                continue
            w0 = meet[u, v]
            for x in srange:
                if not (prev_bits >> star[v, x]) & 1:
                    continue
                w1 = star[w0, x]
                for y in srange:
                    if not dstar[w1, y]:
                        continue
                    w2 = star[w1, y]
                    for t in srange:
                        if zeta[w2, star[z, t]]:
                            return (u, int(v), int(x), int(y), int(t))
    return None


def closure_fixpoint(sys, h_bits: int, witnesses: bool = True) -> ClosureResult:
    """Iterate the step operator to its fixpoint.

    Under the validated hypotheses the chain is increasing and stabilizes
    within |G| rounds; `rounds` counts the step applications performed,
    including the one that confirms stability.
    """
    if h_bits == 0:
        raise ValueError("closure of empty set undefined")
    kern = _kernel(sys)
    cur = bits_to_bool(h_bits, sys.size)
    cur_bits = h_bits
    acc_bits = h_bits
    seen = {cur_bits}
    rounds = 0
    witness: dict[int, tuple[int, tuple[int, int, int, int, int]]] = {}
    while True:
        nxt = kern.step(cur)
        nxt_bits = bool_to_bits(nxt)
        rounds += 1
        if nxt_bits == cur_bits:
            break
        if witnesses:
            for z in iter_bits(nxt_bits & ~acc_bits):
                tup = _first_witness(sys, cur_bits, z)
                if tup is not None:
                    witness[z] = (rounds, tup)
        acc_bits |= nxt_bits
        if nxt_bits in seen:
            # Non-monotone chain on an input violating the hypotheses; the
            # union over the cycle is still the full iterated union.
            break
        seen.add(nxt_bits)
        cur, cur_bits = nxt, nxt_bits
    return ClosureResult(h_bits, acc_bits, rounds, witness)


class ClosureCache:
    """Per-system memo of closures keyed by seed bitset.

    Stores the closed set and round count only; witness extraction is
    redone on demand. Fills are lock-guarded so concurrent callers see
    consistent entries.
    """

    def __init__(self, sys):
        self.sys = sys
        self._memo: dict[int, tuple[int, int]] = {}
        self._lock = threading.Lock()

    def closed_bits(self, h_bits: int) -> int:
        return self.result(h_bits)[0]

    def result(self, h_bits: int) -> tuple[int, int]:
        with self._lock:
            hit = self._memo.get(h_bits)
        if hit is not None:
            return hit
        res = closure_fixpoint(self.sys, h_bits, witnesses=False)
        entry = (res.closed_bits, res.rounds)
        with self._lock:
            self._memo.setdefault(h_bits, entry)
        return entry

    def of_singleton(self, x: int) -> int:
        return self.closed_bits(1 << x)

    def of_pair(self, x: int, y: int) -> int:
        return self.closed_bits((1 << x) | (1 << y))


def is_closed(sys, h_bits: int, method: str = "implication") -> bool:
    """Decide closedness of H.

    The "implication" method evaluates the defining implication by direct
    enumeration; the "four-conditions" method checks the equivalent rule
    set (left factors, adjacency products, upward order closure, and
    restricted meets) and requires a nonempty H.
    """
    m = sys.size
    if method == "implication":
        star = sys.mul_star
        meet = sys.meet
        xi = sys.xi
        dstar = sys.delta_star
        zeta = sys.zeta
        srange = _star_range(m)
        outside = [z for z in range(m) if not (h_bits >> z) & 1]
        for u in iter_bits(h_bits):
            for v in range(m):
                if not xi[u, v]:
                    continue
                w0 = meet[u, v]
                for x in srange:
                    if not (h_bits >> star[v, x]) & 1:
                        continue
                    w1 = star[w0, x]
                    for y in srange:
                        if not dstar[w1, y]:
                            continue
                        w2 = star[w1, y]
                        for z in outside:
                            for t in srange:
                                if zeta[w2, star[z, t]]:
                                    return False
        return True
    if method == "four-conditions":
        if h_bits == 0:
            raise ValueError("four-conditions method needs a nonempty subset")
        mul = sys.mul
        meet = sys.meet
        xi = sys.xi
        delta = sys.delta
        zeta = sys.zeta
        star = sys.mul_star
        inside = list(iter_bits(h_bits))
        # products: xy in H forces x in H
        for x in range(m):
            if (h_bits >> x) & 1:
                continue
            for y in range(m):
                if (h_bits >> mul[x, y]) & 1:
                    return False
        for g1 in inside:
            # adjacency: g1 |- g2 forces g1.g2 in H
            for g2 in range(m):
                if delta[g1, g2] and not (h_bits >> mul[g1, g2]) & 1:
                    return False
                # order: g1 <= g2 forces g2 in H
                if zeta[g1, g2] and not (h_bits >> g2) & 1:
                    return False
            # meets: g1 ~xi~ g2 and g2.x in H force (g1 meet g2).x in H,
            # x ranging over G*; x = e covers the bare meet.
            for g2 in range(m):
                if not xi[g1, g2]:
                    continue
                w = meet[g1, g2]
                for x in _star_range(m):
                    if (h_bits >> star[g2, x]) & 1 and not (h_bits >> star[w, x]) & 1:
                        return False
        return True
    raise ValueError(f"unknown method {method!r}")


def oracle_budget() -> int:
    raw = os.environ.get(_ORACLE_BUDGET_ENV)
    if raw is None:
        return DEFAULT_ORACLE_BUDGET
    return int(raw)


def least_closed_oracle(sys, h_bits: int) -> int:
    """Least closed superset of H by enumerating every superset.

    Intersects all closed supersets; kept independent of the step kernel so
    the two routes can be compared. Refuses carriers above the budget.
    """
    m = sys.size
    budget = oracle_budget()
    if m > budget:
        raise OracleBudgetError(f"budget exceeded: carrier {m} > {budget}")
    if h_bits == 0:
        raise ValueError("closure of empty set undefined")
    rest = [i for i in range(m) if not (h_bits >> i) & 1]
    acc = full_mask(m)
    for pick in range(1 << len(rest)):
        s = h_bits | bits_of(rest[i] for i in range(len(rest)) if (pick >> i) & 1)
        if is_closed(sys, s, "implication"):
            acc &= s
    return acc


@dataclass(frozen=True)
class WitnessNode:
    """One node of a membership witness tree.

    The tuple certifies its target z via (u meet v)xy <= z.t; children, when
    present, certify u and v.x one round earlier. Leaves assert u and v.x
    are seed members.
    """

    u: int
    v: int
    x: int
    y: int
    t: int
    children: tuple["WitnessNode", ...] = ()


def verify_witness_tree(sys, z: int, h_bits: int, n: int, node: WitnessNode) -> bool:
    """Check every guard and leaf condition of a depth-n witness tree."""
    m = sys.size
    star = sys.mul_star
    sv = sys.star

    def ok(target: int, nd: WitnessNode, level: int) -> bool:
        if not (0 <= nd.u < m and 0 <= nd.v < m):
            return False
        if not sys.xi[nd.u, nd.v]:
            return False
        w1 = star[sys.meet[nd.u, nd.v], nd.x]
        if not sv.delta(int(w1), nd.y):
            return False
        w2 = star[w1, nd.y]
        if not sys.zeta[w2, star[target, nd.t]]:
            return False
        vx = int(star[nd.v, nd.x])
        if level == n:
            return bool((h_bits >> nd.u) & 1) and bool((h_bits >> vx) & 1) and not nd.children
        if len(nd.children) != 2:
            return False
        return ok(nd.u, nd.children[0], level + 1) and ok(vx, nd.children[1], level + 1)

    return 0 <= z < m and ok(z, node, 1)


def _direct_tree_search(sys, z: int, h_bits: int, n: int):
    """Exhaustive search over the witness-tree variables, root to leaves."""
    m = sys.size
    star = sys.mul_star
    meet = sys.meet
    xi = sys.xi
    dstar = sys.delta_star
    zeta = sys.zeta
    srange = _star_range(m)
    memo: dict[tuple[int, int], WitnessNode | None] = {}

    def search(target: int, level: int) -> WitnessNode | None:
        key = (target, level)
        if key in memo:
            return memo[key]
        found = None
        for u in range(m):
            if level == n and not (h_bits >> u) & 1:
                continue
            for v in range(m):
                if not xi[u, v]:
                    continue
                w0 = meet[u, v]
                for x in srange:
                    vx = int(star[v, x])
                    if level == n and not (h_bits >> vx) & 1:
                        continue
                    w1 = star[w0, x]
                    for y in srange:
                        if not dstar[w1, y]:
                            continue
                        w2 = star[w1, y]
                        hit_t = None
                        for t in srange:
                            if zeta[w2, star[target, t]]:
                                hit_t = t
                                break
                        if hit_t is None:
                            continue
                        if level == n:
                            found = WitnessNode(u, v, x, y, hit_t)
                        else:
                            left = search(u, level + 1)
                            if left is None:
                                continue
                            right = search(vx, level + 1)
                            if right is None:
                                continue
                            found = WitnessNode(u, v, x, y, hit_t, (left, right))
                        if found is not None:
                            memo[key] = found
                            return found
        memo[key] = found
        return found

    return search(z, 1)


def _witnessed_chain(sys, h_bits: int, n: int):
    """Fn chain up to n with first-round and first-tuple bookkeeping."""
    kern = _kernel(sys)
    chain = [h_bits]
    first_round = {z: 0 for z in iter_bits(h_bits)}
    tuples: dict[int, tuple[int, int, int, int, int]] = {}
    cur = bits_to_bool(h_bits, sys.size)
    cur_bits = h_bits
    for r in range(1, n + 1):
        nxt = kern.step(cur)
        nxt_bits = bool_to_bits(nxt)
        for z in iter_bits(nxt_bits):
            if z not in first_round:
                first_round[z] = r
                tup = _first_witness(sys, cur_bits, z)
                if tup is not None:
                    tuples[z] = tup
        chain.append(nxt_bits)
        if nxt_bits == cur_bits:
            chain.extend([nxt_bits] * (n - r))
            break
        cur, cur_bits = nxt, nxt_bits
    return chain, first_round, tuples


def _tree_from_chain(sys, z: int, n: int, first_round, tuples) -> WitnessNode | None:
    e = sys.size
    star = sys.mul_star

    def build(w: int, j: int) -> WitnessNode | None:
        r = first_round.get(w)
        if r is None or r > j:
            return None
        if r == j and j > 0:
            u, v, x, y, t = tuples[w]
            if j == 1:
                return WitnessNode(u, v, x, y, t)
            left = build(u, j - 1)
            right = build(int(star[v, x]), j - 1)
            if left is None or right is None:
                return None
            return WitnessNode(u, v, x, y, t, (left, right))
        # w already present earlier: pad with the reflexive tuple (w,w,e,e,e)
        if j == 1:
            return WitnessNode(w, w, e, e, e)
        sub = build(w, j - 1)
        if sub is None:
            return None
        return WitnessNode(w, w, e, e, e, (sub, sub))

    return build(z, n)


def member_at_round(sys, z: int, h_bits: int, n: int, method: str = "auto"):
    """Decide z in Fn(H) and produce a depth-n witness tree when it holds.

    method "direct" searches the tree variables exhaustively (bounded to
    small carriers and n <= 2); "iterate" applies the step operator n times
    and rebuilds the tree from round witnesses; "auto" picks direct inside
    the bounds and iterate otherwise.
    """
    if n < 1:
        raise ValueError("round count must be at least 1")
    if h_bits == 0:
        raise ValueError("closure of empty set undefined")
    m = sys.size
    if method == "auto":
        method = (
            "direct"
            if n <= DIRECT_TREE_MAX_ROUNDS and m <= DIRECT_TREE_MAX_SIZE
            else "iterate"
        )
    if method == "direct":
        if n > DIRECT_TREE_MAX_ROUNDS or m > DIRECT_TREE_MAX_SIZE:
            raise ValueError(
                f"direct search bounded to n <= {DIRECT_TREE_MAX_ROUNDS} "
                f"and carrier <= {DIRECT_TREE_MAX_SIZE}"
            )
        node = _direct_tree_search(sys, z, h_bits, n)
        return (node is not None), node
    if method != "iterate":
        raise ValueError(f"unknown method {method!r}")
    chain, first_round, tuples = _witnessed_chain(sys, h_bits, n)
    if not (chain[n] >> z) & 1:
        return False, None
    return True, _tree_from_chain(sys, z, n, first_round, tuples)


def derivation_chain(sys, result: ClosureResult, element: int) -> list[dict]:
    """Flatten the witness ancestry of one closure member, seed upward."""
    star = sys.mul_star
    steps: dict[int, dict] = {}

    def need(w: int) -> None:
        if w in steps or (result.seed_bits >> w) & 1:
            return
        entry = result.witness.get(w)
        if entry is None:
            return
        rnd, (u, v, x, y, t) = entry
        vx = int(star[v, x])
        steps[w] = {
            "element": w,
            "round": rnd,
            "tuple": [u, v, x, y, t],
            "from": [u, vx],
        }
        need(u)
        need(vx)

    need(element)
    return sorted(steps.values(), key=lambda s: (s["round"], s["element"]))


def check_representability(sys) -> Report:
    """The three closure axioms every represented system satisfies.

    Finite carriers make the per-round axiom families collapse to one check
    per pair against the full closure.
    """
    m = sys.size
    cache = sys.closures
    mul, meet, xi, delta, zeta = sys.mul, sys.meet, sys.xi, sys.delta, sys.zeta
    fails: dict[str, list[tuple[int, int, int]]] = {
        "closure-forces-order": [],
        "closure-forces-semicompat": [],
        "closure-forces-adjacency": [],
    }
    t0 = time.perf_counter()
    for x in range(m):
        cx = cache.of_singleton(x)
        for y in range(m):
            w = int(meet[x, y])
            if (cx >> w) & 1 and not zeta[x, y]:
                fails["closure-forces-order"].append((x, y, w))
            p = int(mul[x, y])
            if (cx >> p) & 1 and not delta[x, y]:
                fails["closure-forces-adjacency"].append((x, y, p))
            cxy = cache.of_pair(x, y)
            if (cxy >> w) & 1 and not xi[x, y]:
                fails["closure-forces-semicompat"].append((x, y, w))
    elapsed = time.perf_counter() - t0

    report = Report("representability axioms")
    for check_id, bad in fails.items():
        witnesses = []
        for x, y, target in bad[:5]:
            seed = (1 << x) if check_id != "closure-forces-semicompat" else (1 << x) | (1 << y)
            res = closure_fixpoint(sys, seed, witnesses=True)
            witnesses.append(
                {
                    "x": x,
                    "y": y,
                    "closure-member": target,
                    "chain": derivation_chain(sys, res, target),
                }
            )
        detail = "" if not bad else f"{len(bad)} failing pairs"
        report.add(check_id, not bad, witnesses, detail, elapsed)
    return report
