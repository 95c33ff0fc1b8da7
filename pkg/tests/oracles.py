"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's code paths: regions come from a
sequential union-find sweep over descending density values, densities from
naive double loops, and label matching from explicit permutation
enumeration.
"""

from itertools import permutations, product

import numpy as np


def moore_neighbors(cell, shape):
    d = len(shape)
    for off in product((-1, 0, 1), repeat=d):
        if all(o == 0 for o in off):
            continue
        nb = tuple(c + o for c, o in zip(cell, off))
        if all(0 <= v < s for v, s in zip(nb, shape)):
            yield nb


def sweep_regions(values: np.ndarray, mode_cells):
    """Threshold-sweep reference for upper-level-set regions.

    Cells enter in descending value order (whole equal-value batches at
    once); components merge over Moore adjacency; when a merge would join
    two mode-bearing components, every still-active mode freezes with its
    own component's cells, excluding the current batch. Returns a list of
    frozensets of cell tuples, aligned with ``mode_cells``.
    """
    shape = values.shape
    mode_ids = {tuple(c): i for i, c in enumerate(mode_cells)}
    order = {}
    for cell in product(*map(range, shape)):
        order.setdefault(values[cell], []).append(cell)
    comp_of = {}
    comps = {}
    next_id = 0
    frozen = {}

    def merge(roots, batch_set):
        roots = list(dict.fromkeys(roots))
        moded = [r for r in roots if comps[r]["modes"]]
        if len(moded) >= 2:
            for r in moded:
                a = comps[r]["active"]
                if a is not None:
                    frozen[a] = frozenset(comps[r]["cells"] - batch_set)
                    comps[r]["active"] = None
        target = max(roots, key=lambda r: len(comps[r]["cells"]))
        for r in roots:
            if r == target:
                continue
            for cell in comps[r]["cells"]:
                comp_of[cell] = target
            comps[target]["cells"] |= comps[r]["cells"]
            comps[target]["modes"] |= comps[r]["modes"]
            if comps[r]["active"] is not None:
                comps[target]["active"] = comps[r]["active"]
            del comps[r]
        return target

    for value in sorted(order, reverse=True):
        batch = sorted(order[value])
        batch_set = set(batch)
        for cell in batch:
            mid = mode_ids.get(cell)
            comps[next_id] = {
                "cells": {cell},
                "modes": {mid} if mid is not None else set(),
                "active": mid,
            }
            comp_of[cell] = next_id
            next_id += 1
        for cell in batch:
            roots = [comp_of[cell]]
            for nb in moore_neighbors(cell, shape):
                if nb in comp_of:
                    roots.append(comp_of[nb])
            if len(set(roots)) > 1:
                merge(roots, batch_set)
    for comp in comps.values():
        if comp["active"] is not None:
            frozen[comp["active"]] = frozenset(comp["cells"])
    return [frozen[i] for i in range(len(mode_cells))]


def flood_component(values: np.ndarray, threshold: float, start):
    """Moore-connected component of {values >= threshold} containing start."""
    if values[start] < threshold:
        return frozenset()
    seen = {start}
    stack = [start]
    while stack:
        cell = stack.pop()
        for nb in moore_neighbors(cell, values.shape):
            if nb not in seen and values[nb] >= threshold:
                seen.add(nb)
                stack.append(nb)
    return frozenset(seen)


def naive_kde(scores, h, delta, profile, x):
    """Double-loop kernel density estimate at a single point."""
    scores = np.atleast_2d(scores)
    n, d = scores.shape
    hh = [delta * h[j] for j in range(d)]
    total = 0.0
    for i in range(n):
        u2 = 0.0
        for j in range(d):
            z = (scores[i, j] - x[j]) / hh[j]
            u2 += z * z
        if profile == "gaussian":
            total += (2.0 * np.pi) ** (-d / 2.0) * np.exp(-0.5 * u2)
        else:
            from math import gamma

            const = gamma(d / 2.0 + 2.0) / np.pi ** (d / 2.0)
            total += const * max(1.0 - u2, 0.0)
    vol = 1.0
    for j in range(d):
        vol *= hh[j]
    return total / (n * vol)


def brute_force_matching_error(cluster_labels, class_labels):
    """Minimal error over injective cluster-to-class assignments."""
    cl = np.asarray(cluster_labels)
    cs = np.asarray(class_labels)
    cl_ids = sorted(set(cl.tolist()))
    cs_ids = sorted(set(cs.tolist()))
    n = cl.size
    best = n + 1
    if len(cl_ids) <= len(cs_ids):
        for perm in permutations(cs_ids, len(cl_ids)):
            wrong = sum(
                1
                for i in range(n)
                if perm[cl_ids.index(cl[i])] != cs[i]
            )
            best = min(best, wrong)
    else:
        for perm in permutations(cl_ids, len(cs_ids)):
            matched = set(perm)
            mapping = {c: cs_ids[k] for k, c in enumerate(perm)}
            wrong = sum(
                1
                for i in range(n)
                if cl[i] not in matched or mapping[cl[i]] != cs[i]
            )
            best = min(best, wrong)
    return best / n


def brute_force_majority_error(cluster_labels, class_labels):
    cl = np.asarray(cluster_labels)
    cs = np.asarray(class_labels)
    wrong = 0
    for g in set(cl.tolist()):
        members = cs[cl == g]
        counts = {}
        for v in members.tolist():
            counts[v] = counts.get(v, 0) + 1
        wrong += len(members) - max(counts.values())
    return wrong / cl.size


def window_modes(values: np.ndarray, r: int):
    """Brute-force scan for strict window maxima with lex tie-breaking."""
    shape = values.shape
    kept = []
    for cell in product(*map(range, shape)):
        v = values[cell]
        best = True
        for off in product(range(-r, r + 1), repeat=len(shape)):
            nb = tuple(c + o for c, o in zip(cell, off))
            if nb == cell or not all(0 <= x < s for x, s in zip(nb, shape)):
                continue
            if values[nb] > v or (values[nb] == v and nb < cell):
                best = False
                break
        if best:
            kept.append(cell)
    return sorted(kept, key=lambda c: (-values[c], c))
