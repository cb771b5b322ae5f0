"""Exhaustive bound checks over small maps and grids of entry laws.

Column probabilities depend on F only through the multiset of its images, so
each check walks multisets rather than all |G|^n maps.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .groups import GroupType, group_order
from .structure import (AGREEMENT_TOL, HomVG, census_depth, characteristic_table, code_distance,
                        column_prob_dft, column_prob_enumerate, depth, grid_epsilon, probability_grid)


def _multisets(G: GroupType, n: int):
    for ms in itertools.combinations_with_replacement(range(group_order(G)), n):
        yield HomVG(G, ms)


def _subsample(laws, eps, k: int):
    if len(laws) <= k:
        return laws, eps
    idx = np.linspace(0, len(laws) - 1, k).round().astype(int)
    return laws[idx], eps[idx]


def check_character_grid(a: int, step: float = 0.05) -> dict:
    """|E zeta^(m y)| <= exp(-eps/a^2) for every balanced grid law and 1 <= m < a."""
    laws, eps = probability_grid(a, step)
    phi = np.abs(characteristic_table(laws, a)[:, 1:])
    bound = np.exp(-eps / a**2)
    slack = bound[:, None] - phi
    worst = int(np.argmin(slack.min(axis=1)))
    return {"lemma": "character-sum", "a": a, "step": step, "laws": len(laws),
            "checks": int(phi.size), "violations": int(np.count_nonzero(slack < -1e-15)),
            "min_slack": float(slack.min()), "worst_law": laws[worst].round(6).tolist(),
            "passed": bool(np.all(slack >= -1e-15))}


def check_code_lemma(G: GroupType, a: int, n_max: int, step: float = 0.05,
                     enum_laws: int = 24) -> dict:
    """|P(FX = A) - 1/|G|| <= exp(-eps w / a^2) for every surjective F with n <= n_max,
    where w is the code distance of F (so F is a code of distance delta n with
    delta = w / n), every A in G and every balanced grid law.

    Enumeration is compared against the Fourier route on ``enum_laws`` laws
    spread over the grid."""
    laws, eps = probability_grid(a, step)
    sub_laws, _ = _subsample(laws, eps, enum_laws)
    size = group_order(G)
    checks = violations = maps = 0
    max_gap = 0.0
    min_slack = math.inf
    for n in range(1, n_max + 1):
        for F in _multisets(G, n):
            w = code_distance(F).value
            if w == 0:
                continue
            maps += 1
            bound = np.exp(-eps * min(w, n) / a**2)
            for A in range(size):
                p = column_prob_dft(F, A, laws, a)
                slack = bound - np.abs(p - 1 / size)
                min_slack = min(min_slack, float(slack.min()))
                violations += int(np.count_nonzero(slack < -1e-15))
                checks += len(laws)
                q = column_prob_enumerate(F, A, sub_laws, a)
                max_gap = max(max_gap, float(np.max(np.abs(q - column_prob_dft(F, A, sub_laws, a)))))
    return {"lemma": "code-column", "G": G.label, "a": a, "n_max": n_max, "step": step,
            "codes": maps, "checks": checks, "violations": violations, "min_slack": min_slack,
            "max_dft_enum_gap": max_gap,
            "passed": violations == 0 and max_gap <= AGREEMENT_TOL}


def check_depth_bound(G: GroupType, a: int, n_max: int, deltas=(0.1, 0.2, 0.3, 0.5),
                      step: float = 0.05, enum_laws: int = 24) -> dict:
    """P(FX = 0) <= (1 - eps)(D/|G| + exp(-eps delta n / a^2)) whenever F has depth
    D > 1 and [G : F(V)] < D."""
    laws, eps = probability_grid(a, step)
    sub_laws, _ = _subsample(laws, eps, enum_laws)
    size = group_order(G)
    checks = violations = maps = 0
    max_gap = 0.0
    min_slack = math.inf
    by_depth: dict[int, int] = {}
    for n in range(1, n_max + 1):
        for F in _multisets(G, n):
            idx = F.image_index()
            for delta in deltas:
                D = depth(F, delta)
                if not (D > 1 and idx < D):
                    continue
                maps += 1
                by_depth[D] = by_depth.get(D, 0) + 1
                p = column_prob_dft(F, 0, laws, a)
                bound = (1 - eps) * (D / size + np.exp(-eps * delta * n / a**2))
                slack = bound - p
                min_slack = min(min_slack, float(slack.min()))
                violations += int(np.count_nonzero(slack < -1e-15))
                checks += len(laws)
                q = column_prob_enumerate(F, 0, sub_laws, a)
                max_gap = max(max_gap, float(np.max(np.abs(q - column_prob_dft(F, 0, sub_laws, a)))))
    return {"lemma": "depth-column", "G": G.label, "a": a, "n_max": n_max, "deltas": list(deltas),
            "step": step, "maps": maps, "by_depth": {str(k): v for k, v in sorted(by_depth.items())},
            "checks": checks, "violations": violations,
            "min_slack": min_slack if maps else None, "max_dft_enum_gap": max_gap,
            "passed": violations == 0 and max_gap <= AGREEMENT_TOL}


def check_column_sums(G: GroupType, a: int, n_max: int, step: float = 0.1) -> dict:
    """sum_A P(FX = A) = 1 for every F and grid law."""
    laws, _ = probability_grid(a, step, balanced_only=False)
    worst = 0.0
    for n in range(1, n_max + 1):
        for F in _multisets(G, n):
            tot = sum(column_prob_dft(F, A, laws, a) for A in range(group_order(G)))
            worst = max(worst, float(np.max(np.abs(tot - 1))))
    return {"check": "column-sums", "G": G.label, "a": a, "n_max": n_max,
            "max_error": worst, "passed": worst <= AGREEMENT_TOL}


def check_census(G: GroupType, delta: float, ns) -> dict:
    rows = [census_depth(n, G, delta) for n in ns]
    return {"check": "depth-census", "G": G.label, "delta": delta, "census": rows,
            "passed": all(r["depth_one_implies_code"] for r in rows)}


__all__ = ["check_character_grid", "check_code_lemma", "check_depth_bound", "check_column_sums",
           "check_census", "grid_epsilon"]
