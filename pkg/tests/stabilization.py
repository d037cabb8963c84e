"""Independent checks of stable-cycle tables computed from naive powers."""

from __future__ import annotations

import random

from oracles import as_lists, naive_mul, naive_pow, omin, random_stable_cycle
from tropdet.cactus import Calculus, Rejection


def certified_cycles(seed: int, count: int, max_block: int = 4):
    """``count`` certified stable cycles on random automata, as (calc, cert)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(1, max_block)
        a, block, word = random_stable_cycle(rng, k, n_letters=rng.randint(1, 2), word_len=rng.randint(1, 3))
        calc = Calculus(a)
        cert = calc.check_stable_cycle(block, word)
        if isinstance(cert, Rejection):
            continue
        out.append((calc, cert))
    return out


def tables_at(power):
    """Ref, Min, Tth, Plt read off a power matrix straight from the definitions."""
    n = len(power)
    ref = {i for i in range(n) if power[i][i] is not None}
    low = omin(*(power[i][i] for i in ref))
    mins = {i for i in ref if power[i][i] == low}
    tth = {(s, r) for s in mins for r in range(n) if power[s][r] is not None}
    plt = {(s, r) for r in mins for s in range(n) if power[s][r] is not None}
    return ref, mins, tth, plt


def grounded_at(power_m):
    """Grounded pairs and their minimal grounded weights at exponent m."""
    _, mins, _, _ = tables_at(power_m)
    n = len(power_m)
    out = {}
    for s in range(n):
        for r in range(n):
            best = omin(*(power_m[s][g] + power_m[g][r] for g in mins if power_m[s][g] is not None and power_m[g][r] is not None))
            if best is not None:
                out[(s, r)] = best
    return out


def check_stabilization(calc: Calculus, cert) -> list[str]:
    """Containments and weight relations at exponents n, 2n, m, 2m, 3m; returns failures."""
    base = as_lists(cert.matrix)
    nf = calc.constants.n_frak
    p_n = naive_pow(base, nf)
    p_2n = naive_mul(p_n, p_n)
    p_m = naive_pow(p_n, calc.size_s)
    p_2m = naive_mul(p_m, p_m)
    p_3m = naive_mul(p_2m, p_m)
    powers = {"n": p_n, "2n": p_2n, "m": p_m, "2m": p_2m, "3m": p_3m}
    t = {k: tables_at(v) for k, v in powers.items()}
    fails = []
    small = [naive_pow(base, e) for e in range(1, 7)]
    for e, p in enumerate(small, start=1):
        ref, mins, _, _ = tables_at(p)
        if not ref <= t["n"][0]:
            fails.append(f"Ref(w^{e}) not within Ref(w^n)")
        if not mins <= t["n"][1]:
            fails.append(f"Min(w^{e}) not within Min(w^n)")
    for k in ("2n", "m", "2m", "3m"):
        if t[k][0] != t["n"][0]:
            fails.append(f"Ref changes at {k}")
        if t[k][1] != t["n"][1]:
            fails.append(f"Min changes at {k}")
    for idx, name in ((2, "Tth"), (3, "Plt")):
        for lower in ("n", "2n"):
            if not t[lower][idx] <= t["m"][idx]:
                fails.append(f"{name}({lower}) not within {name}(m)")
            for s, r in t[lower][idx]:
                if powers[lower][s][r] < p_m[s][r]:
                    fails.append(f"{name} weight drops below m-value at {lower}")
        for upper in ("2m", "3m"):
            if t[upper][idx] != t["m"][idx]:
                fails.append(f"{name} changes at {upper}")
            for s, r in t["m"][idx]:
                if powers[upper][s][r] != p_m[s][r]:
                    fails.append(f"{name} weight changes at {upper}")
    # library tables agree with the oracle at m
    names = cert.block.reach
    ref, mins, tth, plt = t["m"]
    tb = cert.tables
    if {names[i] for i in ref} != tb.ref_states or {names[i] for i in mins} != tb.min_states:
        fails.append("library Ref/Min differ from oracle")
    if {(names[s], names[r]) for s, r in tth} != tb.tethered or {(names[s], names[r]) for s, r in plt} != tb.plateau:
        fails.append("library Tth/Plt differ from oracle")
    grn = grounded_at(p_m)
    if {(names[s], names[r]) for s, r in grn} != tb.grounded:
        fails.append("library Grn differs from oracle")
    return fails


def check_cactus_pumping(calc: Calculus, cert, n: int) -> list[str]:
    """Cactus entries against w^(2 m_frak m) for m in {M0, M0+1, 2 M0}."""
    base = as_lists(cert.matrix)
    m0 = calc.pumping_threshold(cert, n)
    stride = naive_pow(base, 2 * calc.constants.m_frak)
    p_m0 = naive_pow(stride, m0)
    p_m0_1 = naive_mul(p_m0, stride)
    p_2m0 = naive_mul(p_m0, p_m0)
    cactus = as_lists(cert.cactus)
    fails = []
    size = len(base)
    for label, p in (("M0", p_m0), ("M0+1", p_m0_1), ("2M0", p_2m0)):
        for s in range(size):
            for r in range(size):
                if cactus[s][r] is not None:
                    if p[s][r] != cactus[s][r]:
                        fails.append(f"grounded entry differs at {label}")
                elif p[s][r] is not None and p[s][r] <= n:
                    fails.append(f"non-grounded entry {p[s][r]} <= {n} at {label}")
    return fails
