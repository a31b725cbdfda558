"""Weil numbers with prescribed embedding degree.

Sample residues of xi at the primes above r in the reflex field, lift them
to a small xi, and take pi = N_Psi(xi) once N(xi) is prime.  Also: full
validation of a candidate, exhaustive search for small r, rho statistics,
and the g = 1 (Cocks-Pinch) specialisation.
"""

from __future__ import annotations

import concurrent.futures
import math
import random
from collections import Counter
from dataclasses import dataclass, field as dc_field

import mpmath
import numpy as np

from . import arith
from . import polynomial as P
from .cm import CMField, CMType, ReflexData, is_primitive, make_imaginary_quadratic, reflex, type_norm
from .numfield import (
    FieldElement,
    RamifiedPrimeError,
    _iv_prec,
    complex_embeddings,
    minimal_polynomial,
    norm,
    norm_form,
    reduce_mod_root,
    roots_mod_r,
)

HISTOGRAM_BIN = 0.05


class PreconditionError(ValueError):
    pass


class NotSplitError(PreconditionError):
    """r does not split completely in the field."""


class MaxItersExceeded(RuntimeError):
    def __init__(self, iterations: int):
        super().__init__(f"no Weil number found in {iterations} iterations")
        self.iterations = iterations


class BudgetExceeded(RuntimeError):
    pass


# -- data ---------------------------------------------------------------------

@dataclass(frozen=True)
class SplitData:
    """Roots of the reflex polynomial mod r, labelled by Psi, plus a CRT basis.

    ``labeled_pairs[i] = (t_i, tbar_i)`` are the roots at which xi takes the
    residues alpha_i and beta_i.  ``k_root`` is the root of K's polynomial
    for the prime below the fixed prime of the compositum; pi reduces to 1
    there.  ``crt_basis[j]`` holds the coordinates of the element that is 1
    at ``points[j]`` and 0 at the other points.
    """

    r: int
    reflex: ReflexData
    k_root: int
    labeled_pairs: tuple[tuple[int, int], ...]
    crt_basis: tuple[tuple[int, ...], ...]

    @property
    def points(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.labeled_pairs) + tuple(p[1] for p in self.labeled_pairs)


@dataclass(frozen=True)
class ResidueAssignment:
    alphas: tuple[int, ...]
    betas: tuple[int, ...]
    zeta: int

    def values(self) -> tuple[int, ...]:
        return self.alphas + self.betas


@dataclass
class WeilNumber:
    pi: FieldElement
    q: int
    r: int
    k: int
    group_order: int
    rho: float
    flags: dict
    xi: FieldElement
    cm_type: CMType
    zeta: int | None = None
    iterations: int = 0


@dataclass
class ValidationReport:
    checks: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


@dataclass
class SearchReport:
    prime_count: int
    min_q: int | None
    rho_histogram: list[tuple[float, int]]
    winners: list[WeilNumber]
    final_check_failures: int
    candidates: int
    zetas: tuple[int, ...]
    reference_root: int


# -- linear algebra mod r -------------------------------------------------------

def _inverse_mod(mat: list[list[int]], r: int) -> list[list[int]]:
    n = len(mat)
    a = [[x % r for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise ArithmeticError("singular matrix mod r")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, r)
        a[col] = [x * inv % r for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % r for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


# -- algorithm steps --------------------------------------------------------------

def split_completely(rx: ReflexData, r: int, reference_root: int | None = None) -> SplitData:
    """Label the roots of the reflex polynomial mod r by Psi.

    The fixed prime of the compositum is pinned by a root of K's polynomial
    mod r (``reference_root``, default the smallest).
    """
    K, H = rx.source, rx.reflex_field
    if not arith.is_prime(r):
        raise PreconditionError(f"r={r} is not prime")
    for fld in (K.field, H.field):
        if fld.disc % r == 0:
            raise RamifiedPrimeError(f"r={r} divides the discriminant {fld.disc}")
    roots = roots_mod_r(K.field, r)
    if len(roots) < K.degree:
        raise NotSplitError(f"r={r} does not split completely in {K.spec_string()}")
    t0 = roots[0] if reference_root is None else reference_root % r
    if t0 not in roots:
        raise PreconditionError(f"{reference_root} is not a root of the defining polynomial mod {r}")
    if rx.kind == "galois":
        pairs = []
        for lab in rx.psi_labels:
            t = reduce_mod_root(K.automorphism(lab).image, t0, r)
            pairs.append((t, reduce_mod_root(K.conjugation, t, r)))
    else:
        c_inv = pow(rx.scale, -1, r)
        e2 = next(e for e in roots if e not in (t0, (-t0) % r))
        t1, t2 = (t0 + e2) * c_inv % r, (t0 - e2) * c_inv % r
        pairs = [(t1, (-t1) % r), (t2, (-t2) % r)]
        for t in (t1, t2):
            assert P.evaluate(H.field.poly, t) % r == 0, "reflex residue is not a root"
    pts = [p[0] for p in pairs] + [p[1] for p in pairs]
    assert len(set(pts)) == len(pts)
    n = H.degree
    vinv = _inverse_mod([[pow(p, i, r) for i in range(n)] for p in pts], r)
    basis = tuple(tuple(vinv[i][j] for i in range(n)) for j in range(n))
    return SplitData(r, rx, t0, tuple(pairs), basis)


def sample_residues(rng: random.Random, r: int, k: int, zeta: int, g_hat: int) -> ResidueAssignment:
    """alpha_1..alpha_{g-1}, beta_1..beta_{g-1} uniform; the last ones forced."""
    alphas = [rng.randrange(1, r) for _ in range(g_hat - 1)]
    betas = [rng.randrange(1, r) for _ in range(g_hat - 1)]
    pa = math.prod(alphas) % r
    pb = math.prod(betas) % r
    alphas.append(pow(pa, -1, r))
    betas.append(zeta * pow(pb, -1, r) % r)
    return ResidueAssignment(tuple(alphas), tuple(betas), zeta)


def _center(c: int, r: int) -> int:
    return c - r if c > r // 2 else c


def lift_crt(split: SplitData, assign: ResidueAssignment) -> FieldElement:
    """The xi with the prescribed residues and coordinates in (-r/2, r/2]."""
    r = split.r
    vals = assign.values()
    n = len(vals)
    coords = [_center(sum(v * b[i] for v, b in zip(vals, split.crt_basis)) % r, r) for i in range(n)]
    return split.reflex.reflex_field.field.element(coords)


def group_order(pi: FieldElement) -> int:
    """#A(F_q) = N(pi - 1)."""
    n = norm(pi - 1)
    if n.denominator != 1:
        raise ValueError("pi is not an algebraic integer")
    return abs(n.numerator)


def rho(g: int, q: int, r: int) -> float:
    return g * math.log(q) / math.log(r)


def rho_bound(rx: ReflexData, r: int) -> float:
    """2 g g^ (1 + log M / log r), M the largest embedding modulus on the +-1/2 box."""
    H = rx.reflex_field
    emb = complex_embeddings(H.field, 64)
    n = H.degree
    z = np.array([complex(c) for c in emb.centers])
    powers = np.array([z**i for i in range(n)])  # n x n, row i: z_j^i
    signs = np.array(list(np.ndindex(*(2,) * n)), dtype=float) - 0.5
    M = float(np.abs(signs @ powers).max())
    g = rx.source.g
    return 2 * g * rx.g_hat * (1 + math.log(M) / math.log(r))


def _generates(spec: CMField, pi: FieldElement) -> bool:
    """pi generates K (not in any proper subfield)."""
    if spec.is_galois:
        n = spec.degree
        for p in arith.factorize(n):
            if spec.automorphism(spec.label_of_exponent(n // p))(pi) == pi:
                return False
        return True
    # the only proper subfields are Q and Q(sqrt d) = Q(theta^2)
    return bool(pi.num[1] or pi.num[3])


def _final_checks(spec: CMField, pi: FieldElement, q: int) -> dict:
    return {"q_unramified": spec.field.disc % q != 0, "generates_K": _generates(spec, pi)}


def _ordinary(spec: CMField, pi: FieldElement, q: int) -> bool:
    tr = norm(pi + spec.conj(pi))
    return tr.denominator == 1 and math.gcd(tr.numerator, q) == 1


def default_max_iters(rx: ReflexData, r: int) -> int:
    return 64 * rx.g_hat * r.bit_length()


def _make_weil(t: CMType, xi, pi, q, r, k, zeta, iterations) -> WeilNumber:
    spec = t.spec
    flags = _final_checks(spec, pi, q)
    flags["ordinary"] = _ordinary(spec, pi, q)
    return WeilNumber(pi, q, r, k, group_order(pi), rho(spec.g, q, r), flags, xi, t, zeta, iterations)


def _check_inputs(t: CMType, k: int, r: int):
    if not is_primitive(t):
        raise PreconditionError(f"{t} is not primitive")
    if k < 1:
        raise PreconditionError("k must be positive")
    if r < 3 or not arith.is_prime(r):
        raise PreconditionError(f"r={r} is not an odd prime")
    if (r - 1) % k:
        raise PreconditionError(f"k={k} does not divide r-1")


def _search(t: CMType, k: int, r: int, rng: random.Random, max_iters: int,
            factors: dict | None, split: SplitData | None = None) -> WeilNumber:
    rx = reflex(t)
    if split is None:
        split = split_completely(rx, r)
    spec = t.spec
    for it in range(1, max_iters + 1):
        zeta = arith.primitive_kth_root(r, k, rng, factors)
        assign = sample_residues(rng, r, k, zeta, rx.g_hat)
        xi = lift_crt(split, assign)
        nq = norm(xi)
        q = abs(nq.numerator) if nq.denominator == 1 else 0
        if not arith.is_prime(q):
            continue
        pi = type_norm(rx, xi)
        if spec.field.disc % q == 0 or not _generates(spec, pi):
            continue
        return _make_weil(t, xi, pi, q, r, k, zeta, it)
    raise MaxItersExceeded(max_iters)


def _worker(args):
    field_spec, labels, k, r, seed, idx, max_iters, factors = args
    from .cm import parse_field_spec
    spec = parse_field_spec(field_spec)
    t = CMType(spec, frozenset(labels))
    rng = random.Random(f"{seed}:{idx}")
    try:
        w = _search(t, k, r, rng, max_iters, factors)
    except MaxItersExceeded:
        return None
    return idx, w.xi.num, w.zeta, w.iterations


def construct_pi(t: CMType, k: int, r: int, rng: random.Random | int | None = None,
                 max_iters: int | None = None, *, threads: int = 1,
                 r_minus_one_factors: dict | None = None) -> WeilNumber:
    """Run the randomized construction until a Weil number passes all checks.

    ``rng`` may be a Random instance or a seed.  With ``threads > 1`` each
    worker uses the stream ``Random(f"{seed}:{i}")`` and the lowest-indexed
    success wins, so the result depends only on the seed.
    """
    _check_inputs(t, k, r)
    if t.spec.degree < 4:
        raise PreconditionError("construct_pi needs 2g >= 4; use cocks_pinch_g1 for g = 1")
    rx = reflex(t)
    split = split_completely(rx, r)
    if max_iters is None:
        max_iters = default_max_iters(rx, r)
    factors = r_minus_one_factors or arith.factorize(r - 1)
    if threads <= 1:
        if not isinstance(rng, random.Random):
            rng = random.Random(rng)
        w = _search(t, k, r, rng, max_iters, factors, split)
        return w
    seed = rng if not isinstance(rng, random.Random) else rng.getrandbits(64)
    per = max(1, max_iters // threads)
    jobs = [(t.spec.spec_string(), sorted(t.selected), k, r, seed, i, per, factors) for i in range(threads)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as ex:
        results = [res for res in ex.map(_worker, jobs) if res is not None]
    if not results:
        raise MaxItersExceeded(per * threads)
    idx, num, zeta, its = min(results)
    xi = FieldElement(rx.reflex_field.field, num, 1)
    q = abs(norm(xi).numerator)
    return _make_weil(t, xi, type_norm(rx, xi), q, r, k, zeta, its)


def validate_weil(w: WeilNumber, precision: int | None = None) -> ValidationReport:
    """The seven independent checks on a candidate Weil number."""
    spec = w.cm_type.spec
    pi, q, r, k = w.pi, w.q, w.r, w.k
    rep = ValidationReport()
    pibar = spec.conj(pi)
    rep.checks["norm_equals_q"] = pi * pibar == spec.field.from_int(q)

    bits = max([abs(c).bit_length() for c in pi.num] + [q.bit_length(), 1]) + pi.den.bit_length()
    prec = precision or 2 * bits + 128
    emb = complex_embeddings(spec.field, prec)
    ok = True
    with _iv_prec(prec + 20), mpmath.workprec(prec + 20):
        for j in range(len(emb)):
            v = emb.evaluate(pi, j)
            mod2 = v.real**2 + v.imag**2
            lo, hi = mpmath.mpf(mod2.a), mpmath.mpf(mod2.b)
            # the enclosure must contain q and be tight enough to exclude q +- 1
            if not (lo <= q <= hi) or hi - lo >= 1:
                ok = False
    rep.checks["weil_absolute_values"] = ok

    try:
        n1 = group_order(pi)
        rep.checks["r_divides_group_order"] = n1 % r == 0
    except ValueError:
        rep.checks["r_divides_group_order"] = False

    emb_ok = r > 1 and q % r != 0 and k % r != 0 and k >= 1
    if emb_ok:
        emb_ok = P.evaluate(arith.cyclotomic_polynomial(k), q % r) % r == 0 and arith.multiplicative_order(q, r) == k
    rep.checks["embedding_degree"] = emb_ok

    rep.checks["pi_generates_K"] = len(minimal_polynomial(pi)) - 1 == spec.degree
    rep.checks["q_unramified"] = q > 1 and spec.field.disc % q != 0
    rep.checks["ordinary"] = q > 1 and _ordinary(spec, pi, q)
    return rep


# -- exhaustive search --------------------------------------------------------------

_SIEVE_PRIMES = np.array(arith.small_primes(1 << 12), dtype=np.int64)


def _eval_norm_form(terms, coords: np.ndarray) -> np.ndarray:
    n = coords.shape[1]
    pw = [[np.ones(len(coords), dtype=np.int64)] for _ in range(n)]
    maxe = max(max(e) for e, _ in terms)
    for i in range(n):
        for _ in range(maxe):
            pw[i].append(pw[i][-1] * coords[:, i])
    out = np.zeros(len(coords), dtype=np.int64)
    for e, c in terms:
        term = np.full(len(coords), c, dtype=np.int64)
        for i, ei in enumerate(e):
            if ei:
                term *= pw[i][ei]
        out += term
    return out


def _prime_mask(q: np.ndarray) -> np.ndarray:
    mask = q > 1
    for p in _SIEVE_PRIMES:
        mask &= (q % p != 0) | (q == p)
    idx = np.nonzero(mask & (q >= int(_SIEVE_PRIMES[-1]) ** 2))[0]
    for i in idx:
        if not arith.is_prime(int(q[i])):
            mask[i] = False
    return mask


def exhaustive_search(t: CMType, k: int, r: int, *, reference_root: int | None = None,
                      all_zetas: bool = False, budget: int = 5 * 10**7,
                      chunk: int = 1 << 16) -> SearchReport:
    """Enumerate every residue assignment and test N(xi) for primality.

    By default one primitive k-th root zeta (the smallest) is used, as the
    algorithm fixes zeta once; ``all_zetas`` enumerates all phi(k) of them.
    prime_count counts candidates with N(xi) prime (one per assignment);
    min_q is the least such q whose pi also generates K with q unramified.
    """
    _check_inputs(t, k, r)
    rx = reflex(t)
    split = split_completely(rx, r, reference_root)
    g_hat = rx.g_hat
    H = rx.reflex_field
    n = H.degree
    zetas = arith.primitive_kth_roots(r, k)
    if not all_zetas:
        zetas = zetas[:1]
    dims = 2 * g_hat - 2
    domain = (r - 1) ** dims
    if domain * len(zetas) > budget:
        raise BudgetExceeded(f"{domain * len(zetas)} candidates exceed the budget of {budget}")

    terms = norm_form(H.field)
    half = r // 2
    coeff_sum = sum(abs(c) for _, c in terms)
    if coeff_sum * half**n >= 1 << 62:
        raise BudgetExceeded("norms overflow 64-bit arithmetic; r too large for exhaustive search")

    inv = np.zeros(r, dtype=np.int64)
    inv[1:] = [pow(x, -1, r) for x in range(1, r)]
    basis = np.array(split.crt_basis, dtype=np.int64)  # n x n, row j = element for point j
    g = t.spec.g
    logr = math.log(r)

    prime_count = 0
    hist: Counter = Counter()
    found_q: list[np.ndarray] = []
    found_xi: list[np.ndarray] = []
    found_z: list[np.ndarray] = []
    for zeta in zetas:
        for start in range(0, domain, chunk):
            idx = np.arange(start, min(start + chunk, domain), dtype=np.int64)
            digits = []
            rem = idx
            for _ in range(dims):
                digits.append(rem % (r - 1) + 1)
                rem = rem // (r - 1)
            alphas = digits[: g_hat - 1]
            betas = digits[g_hat - 1 :]
            pa = np.ones_like(idx)
            for a in alphas:
                pa = pa * a % r
            pb = np.ones_like(idx)
            for b in betas:
                pb = pb * b % r
            vals = alphas + [inv[pa]] + betas + [zeta * inv[pb] % r]
            coords = np.zeros((len(idx), n), dtype=np.int64)
            for j, v in enumerate(vals):
                coords = (coords + np.outer(v, basis[j])) % r
            coords = np.where(coords > half, coords - r, coords)
            q = np.abs(_eval_norm_form(terms, coords))
            mask = _prime_mask(q)
            qs = q[mask]
            prime_count += len(qs)
            bins = np.floor(g * np.log(qs.astype(float)) / logr / HISTOGRAM_BIN + 1e-9).astype(np.int64)
            hist.update(bins.tolist())
            found_q.append(qs)
            found_xi.append(coords[mask])
            found_z.append(np.full(len(qs), zeta, dtype=np.int64))

    allq = np.concatenate(found_q) if found_q else np.zeros(0, dtype=np.int64)
    allxi = np.concatenate(found_xi) if found_xi else np.zeros((0, n), dtype=np.int64)
    allz = np.concatenate(found_z) if found_z else np.zeros(0, dtype=np.int64)
    order = np.argsort(allq, kind="stable")
    spec = t.spec
    final_check_failures = 0
    min_q = None
    winners: list[WeilNumber] = []
    for i in order:
        q = int(allq[i])
        if spec.field.disc % q == 0:
            final_check_failures += 1
            continue
        xi = H.field.element([int(c) for c in allxi[i]])
        pi = type_norm(rx, xi)
        if not _generates(spec, pi):
            final_check_failures += 1
        elif min_q is None or q == min_q:
            min_q = q
            if any(w.pi == pi for w in winners):
                continue
            winners.append(_make_weil(t, xi, pi, q, r, k, int(allz[i]), 0))
    histogram = [(round(b * HISTOGRAM_BIN, 2), c) for b, c in sorted(hist.items())]
    return SearchReport(prime_count, min_q, histogram, winners, final_check_failures, domain * len(zetas),
                        tuple(zetas), split.k_root)


# -- g = 1 ------------------------------------------------------------------------

def cocks_pinch_g1(d: int, k: int, r: int, rng: random.Random | int | None = None,
                   max_iters: int = 10**4, translate_radius: int = 4) -> tuple[int, FieldElement]:
    """Cocks-Pinch: pi in Z[sqrt(-d)] with pi = 1 at one prime above r and q = N(pi) prime of order k."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    K = make_imaginary_quadratic(d)
    if r < 3 or not arith.is_prime(r) or (r - 1) % k:
        raise PreconditionError("need an odd prime r with k | r - 1")
    s = arith.sqrt_mod(-d, r)
    if s is None or s == 0:
        raise NotSplitError(f"r={r} does not split in Q(sqrt(-{d}))")
    t0, t1 = s, (-s) % r
    inv2s = pow(2 * s, -1, r)
    its = 0
    offsets = sorted(((i, j) for i in range(-translate_radius, translate_radius + 1)
                      for j in range(-translate_radius, translate_radius + 1)), key=lambda p: (abs(p[0]) + abs(p[1]), p))
    while its < max_iters:
        zeta = arith.primitive_kth_root(r, k, rng)
        # a + b t0 = 1, a + b t1 = zeta
        b = (1 - zeta) * inv2s % r
        a = (1 - b * t0) % r
        a, b = _center(a, r), _center(b, r)
        for i, j in offsets:
            its += 1
            if its > max_iters:
                break
            x, y = a + i * r, b + j * r
            q = x * x + d * y * y
            if arith.is_prime(q) and (4 * d) % q and arith.multiplicative_order(q, r) == k:
                return q, K.field.element([x, y])
    raise MaxItersExceeded(max_iters)
