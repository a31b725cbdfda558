"""End-to-end acceptance criteria, each reported as one line in the terminal summary."""

import json
import math
import random
import statistics

import pytest

from cmweil import arith, cli
from cmweil.cm import (
    CMType,
    first_primitive_type,
    make_cyclotomic_cm,
    make_imaginary_quadratic,
    make_quartic_cm,
    reflex,
    type_norm,
)
from cmweil.jacobian import divisor_add, identity, negate, probable_order_check, random_divisor, twist_curve, twist_search
from cmweil.numfield import norm
from cmweil.weilgen import construct_pi, rho_bound, validate_weil

from conftest import ACCEPTANCE_LINES


def report(name: str, ok, detail: str) -> None:
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    ACCEPTANCE_LINES.append((name, status, detail))
    if status == "FAIL":
        pytest.fail(f"{name}: {detail}")


def exhaust(capsys, field, cm_type, r, k, *extra):
    code = cli.main(["exhaust", "--field", field, "--cm-type", cm_type, "--r", str(r), "--k", str(k), *extra])
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


def within(x, target, rel):
    return abs(x - target) <= rel * target


def test_c1_exhaustive_genus2(capsys):
    doc = exhaust(capsys, "cyclotomic:5", "1,2", 1021, 2)
    orders = sorted({int(w["group_order"]) for w in doc["winners"]})
    ok = within(doc["prime_count"], 125578, 0.01) and doc["min_q"] == "2023621"
    report("C1 exhaustive Q(zeta5) r=1021 k=2", ok,
           f"prime_count={doc['prime_count']} (125578 +-1%), min_q={doc['min_q']} (2023621), "
           f"winner group orders {orders}")
    # reference root matching the published enumeration reproduces the count exactly
    alt = exhaust(capsys, "cyclotomic:5", "1,2", 1021, 2, "--reference-root", "676")
    report("C1 info: reference root 676", "INFO", f"prime_count={alt['prime_count']} min_q={alt['min_q']}")


def test_c2_exhaustive_genus3(capsys):
    doc = exhaust(capsys, "cyclotomic:7", "1,2,3", 29, 4)
    winners = doc["winners"]
    match = [w for w in winners if w["group_order"] == "778417333"]
    ok = (within(doc["prime_count"], 162643, 0.01) and doc["min_q"] == "911" and bool(match)
          and abs(match[0]["rho"] - 6.07) <= 0.01)
    report("C2 exhaustive Q(zeta7) r=29 k=4", ok,
           f"prime_count={doc['prime_count']} (162643 +-1%), min_q={doc['min_q']} (911), "
           f"winner group orders {sorted({int(w['group_order']) for w in winners})}, "
           f"rho={match[0]['rho'] if match else None} (6.07 +-0.01)")
    alt = exhaust(capsys, "cyclotomic:7", "1,2,3", 29, 4, "--reference-root", "16")
    report("C2 info: reference root 16", "INFO", f"prime_count={alt['prime_count']} min_q={alt['min_q']}")
    both = exhaust(capsys, "cyclotomic:7", "1,2,3", 29, 4, "--all-zetas")
    report("C2 info: both primitive 4th roots", "INFO",
           f"zetas={both['zetas']} prime_count={both['prime_count']} min_q={both['min_q']}")


@pytest.mark.parametrize("p,a,q,N", [(7, 34, 911, 778417333), (5, 18, 2023621, 4092747290896)])
def test_c3_curve_linkage(p, a, q, N):
    ok_check = probable_order_check(twist_curve(p, a, q), N, 10, random.Random(0))
    found = twist_search(p, N, q, 100, random.Random(1), trials=10)
    report(f"C3 curve y^2=x^{p}+{a} over F_{q}", ok_check and found == a,
           f"order check {'passed' if ok_check else 'failed'} for N={N}; twist_search found a={found} ({a})")


def test_c4_rho_distribution_and_c7_iterations():
    t = CMType(make_cyclotomic_cm(5), {1, 2})
    r, k = 2**160 + 685, 10
    factors = arith.factorize(r - 1)
    bound = rho_bound(reflex(t), r)
    rhos, iters, valid = [], [], 0
    for seed in range(200):
        w = construct_pi(t, k, r, seed, r_minus_one_factors=factors)
        rhos.append(w.rho)
        iters.append(w.iterations)
        valid += validate_weil(w).passed
    band = sum(7.8 <= x <= 8.0 for x in rhos) / len(rhos)
    over = sum(x > bound for x in rhos)
    expected = 2 * reflex(t).g_hat * math.log(r)
    mean_iters = statistics.mean(iters[:50])
    flag = "within" if expected / 4 <= mean_iters <= expected * 4 else "OUTSIDE"
    report("C7 iteration count (report only)", "REPORT",
           f"mean over 50 runs = {mean_iters:.1f}, 2*g_hat*ln r = {expected:.1f}, {flag} a factor of 4")
    report("C4 rho distribution Q(zeta5) r=2^160+685 k=10", band >= 0.9 and over == 0 and valid == 200,
           f"{band:.1%} of 200 in [7.8, 8.0] (>= 90%), {over} above rho_bound={bound:.4f}, "
           f"{valid}/200 validated, min/max rho {min(rhos):.3f}/{max(rhos):.3f}")


def test_c5_nongalois_quartic():
    spec = make_quartic_cm(30, 2, 5)
    t = first_primitive_type(spec)
    rx = reflex(t)
    H = rx.reflex_field
    same_reflex = H == make_quartic_cm(15, 2, 55) and list(H.field.poly) == [5, 0, 30, 0, 1]
    w = construct_pi(t, 13, 2**160 - 1445, 0)
    rep = validate_weil(w)
    bits = w.q.bit_length()
    report("C5 quartic:30,2,5 r=2^160-1445 k=13", 630 <= bits <= 660 and rep.passed and same_reflex,
           f"q has {bits} bits (630..660), checks passed={rep.passed}, reflex {H.spec_string()} "
           f"defining polynomial {list(H.field.poly)}")


def _random_integral(spec, rng, bound=50):
    return spec.field.element([rng.randint(-bound, bound) for _ in range(spec.degree)])


PROPERTY_FIELDS = [make_cyclotomic_cm(5), make_cyclotomic_cm(7), make_cyclotomic_cm(9),
                   make_quartic_cm(30, 2, 5), make_quartic_cm(2, -1, 2), make_imaginary_quadratic(3)]


@pytest.mark.parametrize("spec", PROPERTY_FIELDS, ids=lambda s: s.spec_string())
def test_c6_type_norm_identity(spec):
    rx = reflex(first_primitive_type(spec))
    K, H = rx.source, rx.reflex_field
    rng = random.Random(6)
    bad = 0
    for _ in range(1000):
        xi = _random_integral(H, rng)
        pi = type_norm(rx, xi)
        bad += pi * K.conj(pi) != K.field.element([norm(xi)])
    report(f"C6 type-norm identity on {spec.spec_string()}", bad == 0, f"{bad} failures in 1000 random xi")


CANTOR_CURVES = [twist_curve(5, 18, 2023621), twist_curve(7, 34, 911), twist_curve(5, 18, 1021)]


@pytest.mark.parametrize("curve", CANTOR_CURVES, ids=str)
def test_c6_cantor_group_laws(curve):
    rng = random.Random(7)
    bad = 0
    for _ in range(1000):
        a, b, c = (random_divisor(curve, rng) for _ in range(3))
        ab = divisor_add(a, b, curve)
        bad += not (ab == divisor_add(b, a, curve)
                    and divisor_add(ab, c, curve) == divisor_add(a, divisor_add(b, c, curve), curve)
                    and divisor_add(a, identity(), curve) == a
                    and divisor_add(a, negate(a, curve), curve).is_identity())
    report(f"C6 Cantor group laws on {curve}", bad == 0, f"{bad} failures in 1000 triples")


def test_c6_order_cyclotomic_consistency():
    checked = bad = 0
    for r in arith.small_primes(500):
        for k in range(1, r):
            if (r - 1) % k:
                continue
            phi = arith.cyclotomic_polynomial(k)
            for q in range(1, r):
                root = sum(c * pow(q, i, r) for i, c in enumerate(phi)) % r == 0
                bad += root != (arith.multiplicative_order(q, r) == k)
                checked += 1
    report("C6 ord_r(q) = k iff Phi_k(q) = 0 mod r, all r < 500", bad == 0, f"{bad} mismatches in {checked} cases")


def test_c6_generated_outputs_validate():
    cases = [(CMType(make_cyclotomic_cm(5), {1, 2}), 10, 2**160 + 685),
             (first_primitive_type(make_quartic_cm(2, -1, 2)), 4, 17),
             (first_primitive_type(make_cyclotomic_cm(9)), 3, 19)]
    bad = total = 0
    for t, k, r in cases:
        for seed in range(10):
            total += 1
            bad += not validate_weil(construct_pi(t, k, r, seed)).passed
    report("C6 validate_weil on generated outputs", bad == 0, f"{bad} failures in {total} outputs")


def test_demo_genus3_1077_bits():
    t = CMType(make_cyclotomic_cm(7), {1, 2, 3})
    w = construct_pi(t, 17, 2**180 - 7427, 0)
    bits = w.q.bit_length()
    ok = validate_weil(w).passed and within(bits, 1077, 0.05)
    report("Demo Q(zeta7) r=2^180-7427 k=17", ok, f"q has {bits} bits (1077 +-5%), rho={w.rho:.3f}")


def test_demo_q17_dimension8():
    spec = make_cyclotomic_cm(17)
    t = CMType(spec, {1, 3, 5, 6, 8, 10, 13, 15})
    bits, valid = [], 0
    for seed in range(20):
        w = construct_pi(t, 10, 1021, seed)
        bits.append(w.q.bit_length())
        valid += validate_weil(w).passed
    med = statistics.median(bits)
    report("Demo Q(zeta17) r=1021 k=10", valid == 20 and within(med, 152, 0.05),
           f"median q size {med} bits over 20 seeds (152 +-5%), range {min(bits)}..{max(bits)}, {valid}/20 validated")
