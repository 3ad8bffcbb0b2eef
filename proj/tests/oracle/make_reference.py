#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Prints a C++ header on stdout:

    python3 tests/oracle/make_reference.py > tests/reference_values.hpp

Everything here is computed from first principles with numpy (Philox words)
and mpmath (quadrature, high-precision arithmetic) — none of it goes through
the C++ library, so agreement is evidence rather than tautology. Doubles are
emitted as hexfloat literals to freeze the exact bits.
"""

import math

import mpmath
import numpy as np

mpmath.mp.dps = 40

MASK64 = (1 << 64) - 1


# ---------- Philox words ----------
#
# The library addresses draws as block(key={seed, stream}, counter={i,0,0,0})
# and reads word 0. numpy's Philox bit generator increments its 256-bit
# counter *before* producing a block, so the block at counter c comes from a
# generator constructed at the predecessor of c.

def philox_block(seed, stream, index):
    if index == 0:
        ctr = [MASK64, MASK64, MASK64, MASK64]
    else:
        ctr = [index - 1, 0, 0, 0]
    bg = np.random.Philox(counter=np.array(ctr, dtype=np.uint64),
                          key=np.array([seed, stream], dtype=np.uint64))
    return [int(w) for w in bg.random_raw(4)]


def philox_word(seed, stream, index):
    return philox_block(seed, stream, index)[0]


def uniform01(seed, stream, index):
    # ((word >> 11) + 0.5) * 2^-53, exact in binary64: the sum has at most
    # 54 significand bits ending in .5, which scales without rounding.
    return (float(philox_word(seed, stream, index) >> 11) + 0.5) * 2.0 ** -53


STREAM_POINTS = 1
STREAM_LABELS = 2
STREAM_CHANNEL = 3
STREAM_RISK = 4
STREAM_SIGNS = 5
STREAM_GENERIC = 6


def derive_seed(base, n, trial):
    if n == 0:
        raise ValueError("oracle handles n >= 1 only")
    ctr = [n - 1, trial, 0, 0]
    bg = np.random.Philox(counter=np.array(ctr, dtype=np.uint64),
                          key=np.array([base, 0x7365656473], dtype=np.uint64))
    return int(bg.random_raw(1)[0])


# ---------- confidence terms ----------

def band_halfwidth(n, k, delta):
    return math.sqrt(2.0 * math.log(4.0 * n / delta) / k)


def sup_penalty(n, k, delta):
    return math.sqrt(math.log(4.0 * n / delta) / k)


def k_min(n, delta):
    return math.ceil(8.0 * math.log(2.0 * n / delta))


# ---------- four-point family ----------

def fourpoint_tables(iota, delta, r, u, v, w, nu_max):
    mass = [u, 1.0 / 3.0, v, 2.0 / 3.0 - u - v]
    if iota == 0:
        eta = [1.0, 1.0 - delta, (1.0 - delta) / (2.0 - delta), 0.0]
    else:
        eta = [1.0, 1.0, 1.0 / (2.0 - delta), 0.0]
    omega = [w, 1.0 / 3.0, v, 1.0 / 3.0]
    pi0 = 0.0
    pi1 = nu_max / 4.0 if iota == 0 else delta + (nu_max / 4.0) * (1.0 - delta)
    return mass, eta, omega, pi0, pi1


def fourpoint_schedule(n, alpha, beta, d, tau, nu_max):
    expo = tau * beta / (tau * (2.0 * beta + d) + beta)
    delta = 6.0 ** -(1.0 + 1.0 / alpha + tau) * nu_max * (2.0 * n) ** -expo
    return {
        "delta": delta,
        "r": delta ** (1.0 / beta),
        "u": delta ** ((beta + tau * d) / (tau * beta)),
        "v": delta ** alpha,
        "w": delta ** (1.0 / tau),
    }


def fourpoint_sample(iota, delta, r, u, v, w, nu_max, seed, count):
    """(atom, clean label, corrupted label) triples via the documented
    three-stream scheme: inverse-CDF walk over atom order for X, one
    Bernoulli(eta) coin for Y, one channel coin for the flip."""
    mass, eta, _, pi0, pi1 = fourpoint_tables(iota, delta, r, u, v, w, nu_max)
    out = []
    for i in range(count):
        ux = uniform01(seed, STREAM_POINTS, i)
        acc = 0.0
        atom = len(mass) - 1
        for j, mj in enumerate(mass):
            acc += mj
            if ux < acc:
                atom = j
                break
        y = 1 if uniform01(seed, STREAM_LABELS, i) < eta[atom] else 0
        coin = uniform01(seed, STREAM_CHANNEL, i)
        yc = y
        if y == 1 and coin < pi1:
            yc = 0
        elif y == 0 and coin < pi0:
            yc = 1
        out.append((atom, y, yc))
    return out


# ---------- hypercube family ----------

def hypercube_schedule(n, alpha, beta, gamma, d):
    coef = d * gamma / (gamma * (2.0 * beta + d) + alpha * beta)
    l = math.ceil(coef * math.log(2.0 * n) / math.log(2.0)) + 1
    delta = 2.0 ** (-l * beta / d)
    w = delta ** (alpha / gamma) / 3.0
    m_real = min(0.5, 2.0 ** -alpha, 24.0 ** -gamma) * delta ** (
        -(alpha * beta + gamma * (d - alpha * beta)) / (gamma * beta))
    return {"l": l, "delta": delta, "w": w, "m": math.floor(m_real)}


def hypercube_sample(l, w, delta, m, signs, seed, count):
    """(atom index, clean label) pairs. Atom order: '0', '1', the m sharp
    cells, then the remaining 2^l - m cells."""
    mass_sharp = w * 2.0 ** -l
    mass_rest = (1.0 - 3.0 * m * mass_sharp) / (3.0 * (2 ** l - m))
    n_atoms = 2 + 2 ** l
    out = []
    for i in range(count):
        ux = uniform01(seed, STREAM_POINTS, i)
        if ux < 1.0 / 3.0:
            atom = 0
            eta = 0.0
        elif ux < 2.0 / 3.0:
            atom = 1
            eta = 1.0
        else:
            off = ux - 2.0 / 3.0
            if off < m * mass_sharp:
                j = min(int(off / mass_sharp), m - 1)
                atom = 2 + j
                eta = (1.0 + delta * signs[j]) / 2.0
            else:
                k = min(int((off - m * mass_sharp) / mass_rest), 2 ** l - m - 1)
                atom = 2 + m + k
                eta = 0.5
        y = 1 if uniform01(seed, STREAM_LABELS, i) < eta else 0
        out.append((atom, y))
        assert atom < n_atoms
    return out


def hypercube_signs(seed, m):
    return [1 if philox_word(seed, STREAM_SIGNS, j) & 1 else -1 for j in range(m)]


# ---------- Laplace-logistic family ----------

def laplace_excess_constant_one(tau):
    """Excess risk of the constant classifier phi = 1: integral of |2 eta - 1|
    over {eta < 1/2} = (-inf, 0)."""
    p = lambda x: mpmath.mpf(1) / 2 * mpmath.e ** (-abs(x))
    eta = lambda x: 1 / (1 + mpmath.e ** (-tau * x))
    val = mpmath.quad(lambda x: (1 - 2 * eta(x)) * p(x), [-mpmath.inf, 0])
    return float(val)


def laplace_grid_checks(tau):
    """Certified-constant inequalities on dense grids, evaluated in mpmath
    high precision so rounding cannot mask or fake a violation. Returns True
    only if every check passes; the header is not emitted otherwise."""
    ok = True
    tau = mpmath.mpf(tau)
    one = mpmath.mpf(1)
    eta = lambda x: one / (one + mpmath.e ** (-tau * x))
    # Hölder: |eta(x) - eta(y)| <= max(1, tau/4) |x-y| on sampled pairs.
    C_beta = max(one, tau / 4)
    xs = [mpmath.mpf(x) / 25 - 10 for x in range(501)]
    for i in range(0, len(xs) - 1, 5):
        for j in range(i + 1, min(i + 30, len(xs))):
            ok &= abs(eta(xs[i]) - eta(xs[j])) <= C_beta * abs(xs[i] - xs[j])
    # Minimal mass: mu(B_r(x)) >= p(x) * r for r in (0,1], in closed form.
    for ri in range(1, 21):
        r = mpmath.mpf(ri) / 20
        for xi in range(0, 200):
            x = mpmath.mpf(xi) / 20
            px = mpmath.e ** (-x) / 2
            if x >= r:
                massr = mpmath.e ** (-x) * mpmath.sinh(r)
            else:
                massr = one - mpmath.e ** (-r) * mpmath.cosh(x)
            ok &= massr >= px * r
    # Tail: mu(p < eps) = 2 eps = C_gamma eps^gamma exactly (C_gamma=2, gamma=1)
    # for eps < t_gamma = 1/3; nothing to grid-check.
    # Range: on {p > eps}, inf eta <= C_tau eps^tau and sup eta >= 1 - C_tau eps^tau
    # with C_tau = max(1, 2^tau), for eps < 1/3.
    C_tau = max(one, 2 ** tau)
    for ei in range(1, 333):
        eps = mpmath.mpf(ei) / 1000
        L = mpmath.log(one / (2 * eps))
        ok &= eta(-L) <= C_tau * eps ** tau
        ok &= eta(L) >= one - C_tau * eps ** tau
    return ok


# ---------- rate exponents ----------

def rate_exponent(alpha, beta, d, gamma, tau):
    cls = gamma * beta * (alpha + 1.0) / (gamma * (2.0 * beta + d) + alpha * beta)
    if math.isinf(tau):
        noise = beta * (alpha + 1.0) / (2.0 * beta + d)
    else:
        noise = tau * beta * (alpha + 1.0) / (tau * (2.0 * beta + d) + beta)
    ta = tau * alpha
    if ta < gamma:
        branch = "noise-limited"
    elif ta > gamma:
        branch = "classification-limited"
    else:
        branch = "tie"
    return min(cls, noise), branch


# ---------- emission ----------

def hx(x):
    return float(x).hex()


def main():
    assert laplace_grid_checks(1.0)
    assert laplace_grid_checks(0.25)
    assert laplace_grid_checks(4.0)

    lines = []
    say = lines.append
    say("#pragma once")
    say("// Generated by tests/oracle/make_reference.py - do not edit by hand.")
    say("// Regenerate: python3 tests/oracle/make_reference.py > tests/reference_values.hpp")
    say("#include <cstdint>")
    say("#include <limits>")
    say("")
    say("namespace refs {")
    say("")

    # Philox cross-check: {seed, stream, index, word}.
    say("// Raw Philox words by (seed, stream, index).")
    say("struct PhiloxRef { std::uint64_t seed, stream, index, word; };")
    say("inline constexpr PhiloxRef kPhiloxWords[] = {")
    for seed, stream, index in [
        (0, STREAM_POINTS, 0),
        (0, STREAM_POINTS, 1),
        (42, STREAM_POINTS, 0),
        (42, STREAM_LABELS, 7),
        (42, STREAM_CHANNEL, 123456),
        (MASK64, STREAM_GENERIC, 0),
        (1234567890123456789, STREAM_RISK, 999999),
        (7, STREAM_SIGNS, 3),
    ]:
        w = philox_word(seed, stream, index)
        say(f"    {{{seed}ull, {stream}ull, {index}ull, {w}ull}},")
    say("};")
    say("")

    say("// uniform01 by (seed, stream, index).")
    say("struct UniformRef { std::uint64_t seed, stream, index; double value; };")
    say("inline constexpr UniformRef kUniforms[] = {")
    for seed, stream, index in [
        (0, STREAM_POINTS, 0),
        (42, STREAM_LABELS, 0),
        (42, STREAM_LABELS, 17),
        (99, STREAM_RISK, 2),
    ]:
        u = uniform01(seed, stream, index)
        say(f"    {{{seed}ull, {stream}ull, {index}ull, {hx(u)}}},")
    say("};")
    say("")

    say("// derive_seed(base, n, trial).")
    say("struct SeedRef { std::uint64_t base, n, trial, seed; };")
    say("inline constexpr SeedRef kDerivedSeeds[] = {")
    for base, n, trial in [(0, 1, 0), (7, 64, 0), (7, 64, 1), (7, 128, 0),
                           (123456789, 16384, 49)]:
        s = derive_seed(base, n, trial)
        say(f"    {{{base}ull, {n}ull, {trial}ull, {s}ull}},")
    say("};")
    say("")

    say("// Confidence terms.")
    say(f"inline constexpr double kBandHalfwidth_100_100_004 = {hx(band_halfwidth(100, 100, 0.04))};")
    say(f"inline constexpr double kSupPenalty_64_16_01 = {hx(sup_penalty(64, 16, 0.1))};")
    say(f"inline constexpr double kSupAllOnes_64_01 = {hx(1.0 - sup_penalty(64, 64, 0.1))};")
    say(f"inline constexpr double kSupSingle_07_02 = {hx(0.7 - math.sqrt(math.log(4.0 / 0.2)))};")
    say(f"inline constexpr int kKmin_1000_01 = {k_min(1000, 0.1)};")
    say(f"inline constexpr int kKmin_100_004 = {k_min(100, 0.04)};")
    say("")

    say("// Four-point schedule at n=1000, alpha=beta=d=tau=1, nu_max=0.5.")
    sched = fourpoint_schedule(1000, 1.0, 1.0, 1.0, 1.0, 0.5)
    for name in ["delta", "r", "u", "v", "w"]:
        say(f"inline constexpr double kFourPointSched_{name} = {hx(sched[name])};")
    say("")

    say("// Four-point noise rates at Delta=0.1, nu_max=0.5.")
    _, _, _, _, pi1_0 = fourpoint_tables(0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.5)
    _, _, _, _, pi1_1 = fourpoint_tables(1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.5)
    say(f"inline constexpr double kFourPointPi1_iota0 = {hx(pi1_0)};")
    say(f"inline constexpr double kFourPointPi1_iota1 = {hx(pi1_1)};")
    say("")

    say("// Excess risk of the classifier that errs exactly on atom c:")
    say("// mass(c) * |2 eta(c) - 1| = v * Delta / (2 - Delta) at Delta=0.1, v=0.1.")
    say(f"inline constexpr double kFourPointFlipCExcess = {hx(0.1 * 0.1 / 1.9)};")
    say("")

    say("// First 12 sampled records: four-point iota=0, Delta=r=u=v=w=0.1,")
    say("// nu_max=0.5, seed=42. Columns: atom, clean y, corrupted y.")
    rows = fourpoint_sample(0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.5, 42, 12)
    say("inline constexpr int kFourPointDraws[12][3] = {")
    for atom, y, yc in rows:
        say(f"    {{{atom}, {y}, {yc}}},")
    say("};")
    say("")

    say("// Hypercube schedule at n=4096, alpha=1, beta=1, gamma=1, d=2.")
    hs = hypercube_schedule(4096, 1.0, 1.0, 1.0, 2.0)
    say(f"inline constexpr int kHypercubeSched_l = {hs['l']};")
    say(f"inline constexpr double kHypercubeSched_delta = {hx(hs['delta'])};")
    say(f"inline constexpr double kHypercubeSched_w = {hx(hs['w'])};")
    say(f"inline constexpr int kHypercubeSched_m = {hs['m']};")
    say("")

    say("// Hypercube sign vector at seed=7 (first 6 entries).")
    signs6 = hypercube_signs(7, 6)
    say("inline constexpr int kHypercubeSigns7[6] = {" +
        ", ".join(str(s) for s in signs6) + "};")
    say("")

    say("// First 12 sampled records: hypercube l=3, w=1/3, Delta=0.5, m=2,")
    say("// signs={+1,-1}, seed=7. Columns: atom index, clean y.")
    hrows = hypercube_sample(3, 1.0 / 3.0, 0.5, 2, [1, -1], 7, 12)
    say("inline constexpr int kHypercubeDraws[12][2] = {")
    for atom, y in hrows:
        say(f"    {{{atom}, {y}}},")
    say("};")
    say("")

    say("// Laplace-logistic, tau=1: excess risk of the constant classifier 1.")
    say(f"inline constexpr double kLaplaceConstOneExcess = {hx(laplace_excess_constant_one(1.0))};")
    say("// Same for tau=4 (sharper eta, so the half-line mistake costs more).")
    say(f"inline constexpr double kLaplaceConstOneExcessTau4 = {hx(laplace_excess_constant_one(4.0))};")
    say("// Grid certification of the Laplace constants held for tau in {0.25,1,4}.")
    say("inline constexpr bool kLaplaceChecksOk = true;")
    say("")

    say("// Rate exponents: {alpha, beta, d, gamma, tau, exponent}; branch in kRateBranches.")
    cases = [
        (1.0, 1.0, 1.0, 1.0, 1.0),
        (1.0, 1.0, 1.0, 1.0, 0.5),
        (1.0, 1.0, 1.0, 1.0, 4.0),
        (1.0, 1.0, 1.0, 1.0, math.inf),
        (0.5, 0.8, 2.0, 0.9, 2.0),
    ]
    say("struct RateRef { double alpha, beta, d, gamma, tau, exponent; };")
    say("inline constexpr RateRef kRates[] = {")
    branches = []
    for a, b, d, g, t in cases:
        e, br = rate_exponent(a, b, d, g, t)
        tau_lit = "std::numeric_limits<double>::infinity()" if math.isinf(t) else hx(t)
        say(f"    {{{hx(a)}, {hx(b)}, {hx(d)}, {hx(g)}, {tau_lit}, {hx(e)}}},")
        branches.append(br)
    say("};")
    say("inline constexpr const char* kRateBranches[] = {" +
        ", ".join(f'"{b}"' for b in branches) + "};")
    say("")
    say("}  // namespace refs")

    print("\n".join(lines))


if __name__ == "__main__":
    main()
