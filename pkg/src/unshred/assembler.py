"""Global reconstruction: pairwise score table, greedy chain merging, and
an exhaustive oracle for small instances.

The score table evaluates ordered strip pairs in deterministic id order.
With early stopping enabled, a perfect (score 1) seam finalizes the two
physical edges it joins, and any later pair/orientation whose evaluation
would read a finalized edge is skipped. Locks are tracked per *physical*
edge of the unflipped raster (a flipped orientation case reads the
opposite edge), which is what keeps the skipping sound when upside-down
strips are in play.

Greedy assembly is a best-first merge over the scored seams: lowest score
wins, each physical edge is used at most once, chains never exceed m
members and never form cycles. Chains are emitted in a canonical
presentation (a chain and its 180-degree rotation are the same physical
object) so results serialize identically however they were built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import GeometryError, SearchSizeError
from .preprocess import OrientedStrip, edge_profile
from .shredder import Strip
from .similarity import (
    ALL_ORIENTATIONS,
    EdgeCodes,
    Orientation,
    ProfiledStrip,
    UNMATCHABLE,
    coded_seam_detail,
    match_pair_coded,
    template_codes,
)

ORACLE_MAX_STRIPS = 8
UNMATCHABLE_PENALTY = 10**6


@dataclass
class SeamScoreTable:
    """Scores for ordered strip pairs plus early-stop bookkeeping.

    ``locked_right``/``locked_left`` hold ids whose physical right/left
    edge has been finalized by a perfect seam; ``evaluations`` counts
    individual seam scorings (pair-orientation combinations).
    """

    entries: dict = field(default_factory=dict)
    locked_right: set = field(default_factory=set)
    locked_left: set = field(default_factory=set)
    evaluations: int = 0
    early_stop: bool = True
    hints: bool = True
    strip_ids: tuple = ()


@dataclass(frozen=True)
class Chain:
    """Ordered oriented strips forming one reconstructed page."""

    members: tuple  # ((strip_id, flipped), ...)
    seam_scores: tuple

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Reconstruction:
    chains: tuple
    unplaced: tuple

    def strip_ids(self) -> set:
        ids = {sid for chain in self.chains for sid, _ in chain.members}
        ids.update(self.unplaced)
        return ids

    def adjacency_pairs(self) -> set:
        pairs = set()
        for chain in self.chains:
            for (a, _), (b, _) in zip(chain.members, chain.members[1:]):
                pairs.add(frozenset((a, b)))
        return pairs


def _as_profiled(strips) -> list[ProfiledStrip]:
    out = []
    for s in strips:
        if isinstance(s, ProfiledStrip):
            out.append(s)
        elif isinstance(s, OrientedStrip):
            out.append(ProfiledStrip(s.strip.id, edge_profile(s.strip.raster), s.confident))
        elif isinstance(s, Strip):
            out.append(ProfiledStrip(s.id, edge_profile(s.raster), False))
        else:
            raise TypeError(f"cannot profile {type(s).__name__}")
    heights = {p.profile.height for p in out}
    if len(heights) > 1:
        raise GeometryError(f"strips must share one height, saw {sorted(heights)}")
    ids = [p.id for p in out]
    if len(set(ids)) != len(ids):
        raise GeometryError("duplicate strip ids")
    return out


def _facing_edges(case: Orientation) -> tuple[str, str]:
    """Physical edges read by this orientation case: (left strip, right strip)."""
    return ("L" if case.left_flipped else "R", "R" if case.right_flipped else "L")


def build_score_table(
    strips,
    bank,
    early_stop: bool = True,
    use_orientation_hints: bool = True,
    trace=None,
) -> SeamScoreTable:
    """Score every ordered pair of strips, honoring hints and early stops.

    When both strips carry a confident orientation (and hints are on) only
    the upright-upright case is scored; otherwise all four cases are. The
    ``trace`` callback, when given, receives a dict per evaluated case.
    """
    profiled = _as_profiled(strips)
    if len(profiled) < 2:
        raise GeometryError("need at least 2 strips to build a score table")
    by_id = {p.id: p for p in profiled}
    ids = sorted(by_id)
    codes = template_codes(bank)
    edge_codes = {p.id: EdgeCodes.from_profile(p.profile) for p in profiled}

    table = SeamScoreTable(
        early_stop=early_stop, hints=use_orientation_hints, strip_ids=tuple(ids)
    )
    for p_id in ids:
        for q_id in ids:
            if p_id == q_id:
                continue
            p, q = by_id[p_id], by_id[q_id]
            if use_orientation_hints and p.confident and q.confident:
                cases = (Orientation.UPRIGHT_UPRIGHT,)
            else:
                cases = ALL_ORIENTATIONS
            if early_stop:
                cases = tuple(
                    c
                    for c in cases
                    if not _case_blocked(table, p_id, q_id, c)
                )
            if not cases:
                continue

            if trace is not None:
                def _emit(case, score, informative, hits, _p=p_id, _q=q_id):
                    trace(
                        {
                            "p": _p,
                            "q": _q,
                            "orientation": case.name.lower(),
                            "score": None if score == UNMATCHABLE else int(score),
                            "informative_windows": informative,
                            "hits": hits,
                        }
                    )
            else:
                _emit = None

            score, case = match_pair_coded(
                edge_codes[p_id], edge_codes[q_id], codes, cases, trace=_emit
            )
            table.evaluations += len(cases)
            table.entries[(p_id, q_id)] = (score, case)

            if early_stop and score == 1:
                left_edge, right_edge = _facing_edges(case)
                (table.locked_left if left_edge == "L" else table.locked_right).add(p_id)
                (table.locked_right if right_edge == "R" else table.locked_left).add(q_id)
    return table


def _case_blocked(table: SeamScoreTable, p_id: int, q_id: int, case: Orientation) -> bool:
    left_edge, right_edge = _facing_edges(case)
    p_locked = table.locked_left if left_edge == "L" else table.locked_right
    q_locked = table.locked_right if right_edge == "R" else table.locked_left
    return p_id in p_locked or q_id in q_locked


def _right_face(member) -> str:
    _, flipped = member
    return "L" if flipped else "R"


def _left_face(member) -> str:
    _, flipped = member
    return "R" if flipped else "L"


def _reversed_chain(members, scores):
    return [(sid, not f) for sid, f in reversed(members)], list(reversed(scores))


def _canonical_chain(members, scores) -> Chain:
    forward = tuple((sid, bool(f)) for sid, f in members)
    backward = tuple((sid, not f) for sid, f in reversed(members))
    if backward < forward:
        return Chain(backward, tuple(reversed(scores)))
    return Chain(forward, tuple(scores))


def greedy_assemble(table: SeamScoreTable, m: int) -> Reconstruction:
    """Merge strips into chains, best seam first.

    A seam (p left of q at some orientation) is accepted iff the two
    physical edges it joins are still unused, p and q sit in different
    chains, and the merged chain stays within m members. Ties between
    equal scores fall to lower p id, then lower q id, then orientation
    order.
    """
    if m < 1:
        raise GeometryError(f"m must be >= 1, got {m}")
    candidates = sorted(
        (
            (score, p_id, q_id, case)
            for (p_id, q_id), (score, case) in table.entries.items()
            if score != UNMATCHABLE
        ),
        key=lambda item: (item[0], item[1], item[2], item[3]),
    )

    chain_of = {sid: sid for sid in table.strip_ids}
    members = {sid: [(sid, False)] for sid in table.strip_ids}
    scores = {sid: [] for sid in table.strip_ids}
    used_edges: set = set()

    for score, p_id, q_id, case in candidates:
        p_edge, q_edge = _facing_edges(case)
        if (p_id, p_edge) in used_edges or (q_id, q_edge) in used_edges:
            continue
        ca, cb = chain_of[p_id], chain_of[q_id]
        if ca == cb:
            continue
        a_members, a_scores = members[ca], scores[ca]
        b_members, b_scores = members[cb], scores[cb]
        if len(a_members) + len(b_members) > m:
            continue

        if a_members[-1][0] == p_id and _right_face(a_members[-1]) == p_edge:
            pass
        elif a_members[0][0] == p_id and _left_face(a_members[0]) == p_edge:
            a_members, a_scores = _reversed_chain(a_members, a_scores)
        else:
            continue
        if b_members[0][0] == q_id and _left_face(b_members[0]) == q_edge:
            pass
        elif b_members[-1][0] == q_id and _right_face(b_members[-1]) == q_edge:
            b_members, b_scores = _reversed_chain(b_members, b_scores)
        else:
            continue

        members[ca] = a_members + b_members
        scores[ca] = a_scores + [score] + b_scores
        for sid, _ in b_members:
            chain_of[sid] = ca
        del members[cb], scores[cb]
        used_edges.add((p_id, p_edge))
        used_edges.add((q_id, q_edge))

    chains = []
    unplaced = []
    for cid, mem in members.items():
        if len(mem) == 1 and m > 1:
            unplaced.append(mem[0][0])
        else:
            chains.append(_canonical_chain(mem, scores[cid]))
    chains.sort(key=lambda c: c.members)
    return Reconstruction(tuple(chains), tuple(sorted(unplaced)))


def brute_force_assemble(strips, bank, m: int) -> Reconstruction:
    """Exhaustive optimal assembly for up to 8 strips.

    Enumerates every split of the strips into chains of length <= m, every
    within-chain order, and every per-strip flip; minimizes the summed
    seam scores, charging the UNMATCHABLE penalty for an unmatchable seam
    and the same penalty for every chain beyond the minimal feasible
    count (declining a feasible junction is the same claim as calling it
    unmatchable). Among equal-cost arrangements the lexicographically
    smallest canonical encoding wins, so the result is deterministic.
    Branch-and-bound pruning never discards a potentially optimal branch.
    """
    profiled = _as_profiled(strips)
    n = len(profiled)
    if n == 0:
        return Reconstruction((), ())
    if n > ORACLE_MAX_STRIPS:
        raise SearchSizeError(
            f"exhaustive assembly refused for {n} strips (limit {ORACLE_MAX_STRIPS})"
        )
    if m < 1:
        raise GeometryError(f"m must be >= 1, got {m}")

    codes = template_codes(bank)
    by_id = {p.id: p for p in profiled}
    ids = sorted(by_id)
    ideal_chains = math.ceil(n / m)
    edge_codes = {p.id: EdgeCodes.from_profile(p.profile) for p in profiled}

    raw: dict = {}
    cost: dict = {}
    for a in ids:
        for b in ids:
            if a == b:
                continue
            for case in ALL_ORIENTATIONS:
                s, _, _ = coded_seam_detail(edge_codes[a], edge_codes[b], case, codes)
                key = (a, b, case.left_flipped, case.right_flipped)
                raw[key] = s
                cost[key] = UNMATCHABLE_PENALTY if s == UNMATCHABLE else int(s)

    best: dict = {"cost": None, "enc": None, "chains": None}

    def consider(closed_chains, total):
        canon = sorted(
            (_canonical_chain(mem, sc) for mem, sc in closed_chains),
            key=lambda c: c.members,
        )
        enc = tuple(c.members for c in canon)
        if (
            best["cost"] is None
            or total < best["cost"]
            or (total == best["cost"] and enc < best["enc"])
        ):
            best.update(cost=total, enc=enc, chains=canon)

    def bound_ok(total, remaining_count, closed_count):
        if best["cost"] is None:
            return True
        free_starts = max(0, ideal_chains - closed_count - 1)
        lb = max(0, remaining_count - free_starts)
        return total + lb <= best["cost"]

    def start_chain(remaining, closed, total):
        if not remaining:
            consider(closed, total)
            return
        extra = UNMATCHABLE_PENALTY if len(closed) >= ideal_chains else 0
        s = min(remaining)
        grow_left([(s, False)], [], remaining - {s}, closed, total + extra)

    def grow_left(mem, sc, remaining, closed, total):
        if not bound_ok(total, len(remaining), len(closed)):
            return
        if len(mem) < m:
            head = mem[0]
            options = []
            for t in remaining:
                for ft in (False, True):
                    key = (t, head[0], ft, head[1])
                    options.append((cost[key], t, ft, raw[key]))
            for c, t, ft, r in sorted(options):
                grow_left(
                    [(t, ft)] + mem, [r] + sc, remaining - {t}, closed, total + c
                )
        grow_right(mem, sc, remaining, closed, total)

    def grow_right(mem, sc, remaining, closed, total):
        if not bound_ok(total, len(remaining), len(closed)):
            return
        if len(mem) < m:
            tail = mem[-1]
            options = []
            for t in remaining:
                for ft in (False, True):
                    key = (tail[0], t, tail[1], ft)
                    options.append((cost[key], t, ft, raw[key]))
            for c, t, ft, r in sorted(options):
                grow_right(mem + [(t, ft)], sc + [r], remaining - {t}, closed, total + c)
        start_chain(remaining, closed + [(mem, sc)], total)

    start_chain(frozenset(ids), [], 0)

    chains = []
    unplaced = []
    for chain in best["chains"]:
        if len(chain) == 1 and m > 1:
            unplaced.append(chain.members[0][0])
        else:
            chains.append(chain)
    return Reconstruction(tuple(chains), tuple(sorted(unplaced)))


def serialize_reconstruction(
    rec: Reconstruction, evaluations=None, early_stop=None, hints=None
) -> dict:
    """Reconstruction as the JSON wire format; UNMATCHABLE scores become null."""
    return {
        "chains": [
            [{"id": sid, "flipped": flipped} for sid, flipped in chain.members]
            for chain in rec.chains
        ],
        "seam_scores": [
            [None if s == UNMATCHABLE else int(s) for s in chain.seam_scores]
            for chain in rec.chains
        ],
        "unplaced": list(rec.unplaced),
        "evaluations": evaluations,
        "early_stop": early_stop,
        "hints": hints,
    }


def deserialize_reconstruction(doc: dict) -> Reconstruction:
    chains = []
    score_rows = doc.get("seam_scores") or [
        [0] * max(0, len(row) - 1) for row in doc["chains"]
    ]
    for row, srow in zip(doc["chains"], score_rows):
        members = tuple((int(e["id"]), bool(e["flipped"])) for e in row)
        scores = tuple(UNMATCHABLE if s is None else int(s) for s in srow)
        chains.append(Chain(members, scores))
    return Reconstruction(tuple(chains), tuple(int(i) for i in doc["unplaced"]))
