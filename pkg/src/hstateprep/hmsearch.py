"""Randomized search for H_m designs, pre-screened combinatorially.

The pre-screen works on X patterns of the GHZ register. A fault in the
preparation tree leaves X on the "future subtree" of a node; an X on a
GHZ qubit becomes Z on every data qubit it owns. The flag checks miss a
pattern exactly when it is a union of check components. A design passes
when every undetected pattern reachable with v <= t faults costs at most
v data errors, up to multiplication by Z on all data. Survivors must still
pass the exhaustive verifier.
"""

from __future__ import annotations

import itertools
import random

from .catalog import HmDesign, build_register, hm_checks


def _components(d: int, reduced: bool) -> tuple[list[int], dict[int, int]]:
    reg = build_register(d)
    index = {f: i for i, f in enumerate(reg.flag_qubits)}
    parent = list(range(len(index)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for _, (fa, fb) in hm_checks(reg, reduced):
        parent[find(index[fa])] = find(index[fb])
    groups: dict[int, int] = {}
    for i in range(len(index)):
        groups[find(i)] = groups.get(find(i), 0) | (1 << i)
    return list(groups.values()), index


def _random_design(d: int, rnd: random.Random) -> HmDesign:
    reg = build_register(d)
    ghz = reg.flag_qubits
    cand: dict[int, list[int]] = {q: [] for q in reg.data}
    for g in reg.gadgets:
        for f, pair in zip(g.flags, g.pairs):
            for q in pair:
                cand[q].append(f)
    load = {f: 0 for f in ghz}
    owners = [0] * reg.n
    for q in rnd.sample(reg.data, reg.n):
        opts = sorted((f for f in cand[q] if load[f] < 2), key=lambda f: (load[f], rnd.random()))
        owners[q] = opts[0]
        load[opts[0]] += 1
    order = rnd.sample(ghz, len(ghz))
    entangled, rest, edges = [order[0]], order[1:], []
    while rest:  # doubling: every entangled qubit recruits one new qubit per round
        new = []
        for p in rnd.sample(entangled, len(entangled)):
            if not rest:
                break
            c = rest.pop()
            edges.append((p, c))
            new.append(c)
        entangled += new
    return HmDesign(d, order[0], tuple(edges), tuple(owners))


def _patterns(design: HmDesign, index: dict[int, int]) -> list[int]:
    children: dict[int, list[int]] = {f: [] for f in index}
    for p, c in design.edges:
        children[p].append(c)
    sub: dict[int, int] = {}

    def subtree(v: int) -> int:
        if v not in sub:
            s = 1 << index[v]
            for c in children[v]:
                s |= subtree(c)
            sub[v] = s
        return sub[v]

    def future(v: int, i: int) -> int:
        s = 1 << index[v]
        for c in children[v][i:]:
            s |= subtree(c)
        return s

    pats = set()
    for v in index:
        for i in range(len(children[v]) + 1):
            pats.add(future(v, i))
    for p, c in design.edges:
        i = children[p].index(c)
        pats.add(future(p, i + 1) | subtree(c))
        pats.add(subtree(c))
    return sorted(pats)


def prescreen(design: HmDesign, t: int, reduced: bool = False) -> bool:
    comps, index = _components(design.d, reduced)
    n = len(design.owners)
    own = [0] * len(index)
    for f in design.owners:
        own[index[f]] += 1

    def undetected(p: int) -> bool:
        return all((p & c) in (0, c) for c in comps)

    def eff(p: int) -> int:
        w = sum(own[i] for i in range(len(own)) if (p >> i) & 1)
        return min(w, n - w)

    pats = _patterns(design, index)
    for p in pats:
        if undetected(p) and eff(p) > 1:
            return False
    if t >= 2:
        for p, q in itertools.combinations(pats, 2):
            r = p ^ q
            if r and undetected(r) and eff(r) > 2:
                return False
    if t >= 3:
        for p, q, r in itertools.combinations(pats, 3):
            s = p ^ q ^ r
            if s and undetected(s) and eff(s) > 3:
                return False
    return True


def search_hm_design(d: int, t: int, seed: int = 0, max_tries: int = 100000, reduced: bool = False) -> HmDesign | None:
    rnd = random.Random(seed)
    for _ in range(max_tries):
        design = _random_design(d, rnd)
        if prescreen(design, t, reduced):
            return design
    return None
