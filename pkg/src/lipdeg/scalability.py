"""Ring-embedding verdicts for closed-manifold cohomology presentations.

The decision problem: does a presented graded ring admit an injective,
degree-preserving ring homomorphism into an exterior algebra (or a direct
sum of them) sending the top class to a nonzero volume multiple?

Three layers of evidence, kept strictly apart:

* exact middle-degree signature tests — the only source of a
  ``not_scalable`` verdict;
* numerical embedding search (projected gradient over assignments of
  constant-coefficient forms) — produces witnesses and defect floors,
  never impossibility claims;
* quantitative obstruction estimates: the four-tuple wedge inequality
  constant and the top-class-versus-defect exponent.

Defects and norms use the maximum absolute basis coefficient throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateForm,
    DimensionMismatch,
    EmptyData,
    ParameterError,
    ShapeError,
)
from .exterior import (
    dense_vector,
    from_dense,
    multi_indices,
    selfdual_triple,
    signature,
    wedge_pairing_matrix,
    wedge_table,
)
from .errors import LipdegError
from .rings import Assignment, RingPresentation, Relation, intersection_form

__all__ = [
    "ScalabilityVerdict",
    "SearchConfig",
    "EmbeddingSearch",
    "Kge4Report",
    "TopclassFit",
    "check_middle_form",
    "presentation_from_intersection_form",
    "search_embedding",
    "kge4_certificate",
    "estimate_topclass_exponent",
]


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 16
    max_iters: int = 300
    step_size: float = 0.5
    tolerance: float = 1e-8
    seed: int = 0
    # coefficient ball for the search domain; None lifts the cap (used when
    # attaching witnesses to exact verdicts, where scale carries no meaning)
    ball_cap: Optional[float] = 1.0

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if self.ball_cap is not None and self.ball_cap <= 0:
            raise ParameterError("ball_cap must be positive or None")


@dataclass(frozen=True)
class ScalabilityVerdict:
    status: str  # "scalable" | "not_scalable" | "evidence_only"
    certificate: Optional[Assignment] = None
    obstruction: Optional[dict] = None
    defect: Optional[float] = None
    notes: str = ""

    def __post_init__(self):
        if self.status not in ("scalable", "not_scalable", "evidence_only"):
            raise ParameterError(f"unknown status {self.status!r}")
        if self.status == "scalable" and self.certificate is None:
            raise ParameterError("scalable verdict requires a witness assignment")

    def to_json_dict(self) -> dict:
        out = {"status": self.status, "notes": self.notes}
        if self.defect is not None:
            out["defect"] = self.defect
        if self.certificate is not None:
            out["certificate"] = {
                "ambient_dim": self.certificate.ambient_dim,
                "forms": {
                    name: el.to_json_dict()
                    for name, el in self.certificate.forms.items()
                },
            }
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        return out


# -- exact middle-degree criterion --------------------------------------------


def presentation_from_intersection_form(Q, half_dim: int = 2) -> RingPresentation:
    """Presentation of a (half_dim-1)-connected manifold with pairing Q.

    Generators in degree half_dim, one relation per unordered generator
    pair pinning the product to the right multiple of a reference pair
    with nonzero pairing; that reference pair is the top word.
    """
    Q = np.asarray(Q)
    r = Q.shape[0]
    names = tuple(f"x{i + 1}" for i in range(r))
    ref = None
    for i in range(r):
        for j in range(i, r):
            if Q[i, j] != 0:
                ref = (i, j)
                break
        if ref:
            break
    if ref is None:
        raise DegenerateForm("intersection form is identically zero")
    a, b = ref
    qref = Fraction(Q[a, b]) if not isinstance(Q[a, b], float) else Q[a, b]
    rels = []
    for i in range(r):
        for j in range(i, r):
            if (i, j) == ref:
                continue
            ratio = (Fraction(Q[i, j]) if not isinstance(Q[i, j], float) else Q[i, j]) / qref
            mons = [(1, (names[i], names[j]))]
            if ratio != 0:
                mons.append((-ratio, (names[a], names[b])))
            rels.append(Relation(f"pair_{i + 1}_{j + 1}", tuple(mons)))
    return RingPresentation(
        manifold_dim=2 * half_dim,
        generators=tuple((nm, half_dim) for nm in names),
        relations=tuple(rels),
        top_class=(names[a], names[b]),
    )


def check_middle_form(Q, n: int, cfg: Optional[SearchConfig] = None) -> ScalabilityVerdict:
    """Exact verdict for the middle-degree pairing of a 2n-manifold.

    The positive and negative inertia indices must each fit inside the
    corresponding inertia index of the wedge pairing on middle-degree
    constant forms in 2n ambient dimensions — each equal to half of
    (2n choose n).  A decision this way is exact; only the attached
    witness (when scalable) comes from numerical search.
    """
    Q = np.asarray(Q)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ShapeError(f"intersection form must be square, got {Q.shape}")
    if n % 2 != 0:
        raise ParameterError("middle degree must be even for a symmetric pairing")
    pos, neg, zero = signature(Q)
    if zero > 0:
        raise DegenerateForm(
            f"intersection form degenerate: {zero} null directions"
        )
    cap = comb(2 * n, n) // 2
    sig = {"positive": pos, "negative": neg, "cap_each_sign": cap}
    if pos <= cap and neg <= cap:
        pres = presentation_from_intersection_form(Q, half_dim=n)
        cfg = cfg or SearchConfig()
        # witnesses certify exact relations; their scale carries no meaning,
        # so the coefficient ball is lifted for this search only
        wcfg = replace(cfg, ball_cap=None)
        search = search_embedding(pres, [2 * n], wcfg)
        witness_ok = search.defect < max(cfg.tolerance, 1e-6)
        if witness_ok:
            return ScalabilityVerdict(
                status="scalable",
                certificate=search.assignment,
                defect=search.defect,
                obstruction=None,
                notes=f"signature ({pos},{neg}) fits cap {cap}; witness defect {search.defect:.3e}",
            )
        return ScalabilityVerdict(
            status="evidence_only",
            certificate=search.assignment,
            defect=search.defect,
            notes=(
                f"signature ({pos},{neg}) fits cap {cap} but search defect "
                f"{search.defect:.3e} exceeded tolerance"
            ),
        )
    return ScalabilityVerdict(
        status="not_scalable",
        obstruction={
            **sig,
            "excess": max(pos - cap, neg - cap),
        },
        notes=f"inertia index exceeds {cap}: signature ({pos},{neg})",
    )


# -- dense workspace for the search -------------------------------------------


def _left_matrix(P: np.ndarray, m: int, p_left: int, p_x: int) -> np.ndarray:
    """Matrix of X -> P ^ X on dense coefficient vectors."""
    tgt, sgn = wedge_table(m, p_left, p_x)
    out = np.zeros((comb(m, p_left + p_x), comb(m, p_x)))
    ii, jj = np.nonzero(tgt >= 0)
    np.add.at(out, (tgt[ii, jj], jj), sgn[ii, jj] * P[ii])
    return out


def _right_matrix(S: np.ndarray, m: int, p_x: int, p_right: int) -> np.ndarray:
    """Matrix of X -> X ^ S on dense coefficient vectors."""
    tgt, sgn = wedge_table(m, p_x, p_right)
    out = np.zeros((comb(m, p_x + p_right), comb(m, p_x)))
    ii, jj = np.nonzero(tgt >= 0)
    np.add.at(out, (tgt[ii, jj], ii), sgn[ii, jj] * S[jj])
    return out


def _wedge_vec(a: np.ndarray, pa: int, b: np.ndarray, pb: int, m: int) -> np.ndarray:
    tgt, sgn = wedge_table(m, pa, pb)
    out = np.zeros(comb(m, pa + pb))
    ii, jj = np.nonzero(tgt >= 0)
    np.add.at(out, tgt[ii, jj], sgn[ii, jj] * a[ii] * b[jj])
    return out


class _Workspace:
    """Dense-vector evaluation of one presentation inside Lambda(R^m)."""

    def __init__(self, pres: RingPresentation, m: int, ball_cap: Optional[float] = 1.0):
        self.pres = pres
        self.m = m
        self.ball_cap = ball_cap
        self.deg = dict(pres.generators)
        self.names = [nm for nm, _ in pres.generators]
        self.dims = {nm: comb(m, d) for nm, d in pres.generators}
        n = pres.manifold_dim
        # normalization slot: the volume element when m == n, else the
        # first lexicographic degree-n basis index
        self.top_dim = comb(m, n)
        self.top_slot = multi_indices(m, n).index(tuple(range(1, n + 1)))
        # per-degree masks of basis indices containing axis 1 (for the
        # orientation flip by the reflection of the first coordinate)
        self._flip = {
            d: np.array([1 in I for I in multi_indices(m, d)])
            for d in sorted({dg for _, dg in pres.generators})
        }
        counts = {}
        for g in pres.top_class:
            counts[g] = counts.get(g, 0) + 1
        self.top_counts = counts
        self.top_len = len(pres.top_class)

    # -- evaluation ------------------------------------------------------

    def _word_value(self, word, vecs) -> tuple:
        val = vecs[word[0]]
        deg = self.deg[word[0]]
        for g in word[1:]:
            val = _wedge_vec(val, deg, vecs[g], self.deg[g], self.m)
            deg += self.deg[g]
        return val, deg

    def relation_values(self, vecs) -> list:
        out = []
        for rel in self.pres.relations:
            acc = None
            for coeff, word in rel.monomials:
                val, _ = self._word_value(word, vecs)
                term = float(coeff) * val
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def defect(self, vecs) -> float:
        vals = self.relation_values(vecs)
        return max(
            (float(np.max(np.abs(v))) for v in vals if v.size), default=0.0
        )

    def top_value(self, vecs) -> float:
        val, _ = self._word_value(self.pres.top_class, vecs)
        return float(val[self.top_slot])

    # -- gradients ---------------------------------------------------------

    def _word_occurrence_matrices(self, word, vecs):
        """For each factor slot: the matrix of the word value as a linear
        function of that slot's generator vector."""
        mats = []
        for pos, g in enumerate(word):
            left = word[:pos]
            right = word[pos + 1 :]
            M = np.eye(self.dims[g])
            deg_x = self.deg[g]
            if left:
                P, degP = self._word_value(left, vecs)
                M = _left_matrix(P, self.m, degP, deg_x) @ M
                deg_x += degP
            if right:
                S, degS = self._word_value(right, vecs)
                M = _right_matrix(S, self.m, deg_x, degS) @ M
            mats.append((g, M))
        return mats

    def value_and_grad(self, vecs):
        """Sum of squared relation coefficients and its gradient."""
        F = 0.0
        grads = {g: np.zeros(self.dims[g]) for g in self.names}
        for rel in self.pres.relations:
            acc = None
            per_word = []
            for coeff, word in rel.monomials:
                val, _ = self._word_value(word, vecs)
                per_word.append((float(coeff), word))
                term = float(coeff) * val
                acc = term if acc is None else acc + term
            F += float(acc @ acc)
            for coeff, word in per_word:
                for g, M in self._word_occurrence_matrices(word, vecs):
                    grads[g] += 2.0 * coeff * (M.T @ acc)
        return F, grads

    def top_grad(self, vecs):
        grads = {g: np.zeros(self.dims[g]) for g in self.names}
        for g, M in self._word_occurrence_matrices(self.pres.top_class, vecs):
            grads[g] += M[self.top_slot, :]
        return grads

    # -- normalization ------------------------------------------------------

    def _pin_top(self, vecs) -> Optional[dict]:
        c = self.top_value(vecs)
        if abs(c) < 1e-12:
            return None
        out = dict(vecs)
        if c < 0:
            out = {
                g: np.where(self._flip[self.deg[g]], -v, v) for g, v in out.items()
            }
            c = -c
        for g in self.top_counts:
            out[g] = out[g] * c ** (-1.0 / self.top_len)
        return out

    def project_top(self, vecs) -> Optional[dict]:
        """Project onto the search domain: unit-ball coefficients with the
        top word landing on the reference slot with value +1.

        Negative top values are cured by pulling back through the
        reflection of the first axis (an algebra map, so relation defects
        transform consistently); the generators in the top word are then
        rescaled, alternating with a clip to the coefficient ball.  The
        ball matters: without it the defect infimum is approached by
        letting coefficients blow up, and the reported floors for
        non-embeddable presentations would be meaningless.  Returns None
        when the top value is numerically zero or the two constraints
        cannot be reconciled.
        """
        out = self._pin_top(vecs)
        if out is None or self.ball_cap is None:
            return out
        cap = self.ball_cap
        for _ in range(60):
            worst = max(float(np.max(np.abs(v))) for v in out.values())
            if worst <= cap + 1e-12:
                return out
            out = {g: np.clip(v, -cap, cap) for g, v in out.items()}
            out = self._pin_top(out)
            if out is None:
                return None
        return None


@dataclass(frozen=True)
class EmbeddingSearch:
    assignment: Assignment
    defect: float
    restart_defects: tuple
    best_restart: int
    summand_dim: int
    converged: bool
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "defect": self.defect,
            "restart_defects": list(self.restart_defects),
            "best_restart": self.best_restart,
            "summand_dim": self.summand_dim,
            "converged": self.converged,
            "seed": self.seed,
            "assignment": {
                "ambient_dim": self.assignment.ambient_dim,
                "forms": {
                    name: el.to_json_dict()
                    for name, el in self.assignment.forms.items()
                },
            },
        }


def _flatten(ws: _Workspace, vecs: dict) -> np.ndarray:
    return np.concatenate([vecs[g] for g in ws.names])


def _unflatten(ws: _Workspace, x: np.ndarray) -> dict:
    out, at = {}, 0
    for g in ws.names:
        out[g] = x[at : at + ws.dims[g]]
        at += ws.dims[g]
    return out


def _residual_jacobian(ws: _Workspace, vecs: dict):
    """Stacked relation coefficients and their Jacobian in the generators.

    The max absolute entry of the residual vector is exactly the defect.
    """
    col = {}
    at = 0
    for g in ws.names:
        col[g] = at
        at += ws.dims[g]
    blocks, jacs = [], []
    for rel in ws.pres.relations:
        acc = None
        grads = {}
        for coeff, word in rel.monomials:
            val, _ = ws._word_value(word, vecs)
            if val.size == 0:  # relation degree exceeds the ambient top
                continue
            term = float(coeff) * val
            acc = term if acc is None else acc + term
            for g, M in ws._word_occurrence_matrices(word, vecs):
                grads[g] = grads.get(g, 0.0) + float(coeff) * M
        if acc is None:
            continue
        blocks.append(acc)
        J = np.zeros((acc.shape[0], at))
        for g, M in grads.items():
            J[:, col[g] : col[g] + ws.dims[g]] += M
        jacs.append(J)
    if not blocks:
        return np.zeros(0), np.zeros((0, at))
    return np.concatenate(blocks), np.vstack(jacs)


def _descend(ws: _Workspace, vecs: dict, cfg: SearchConfig):
    """Damped least-squares descent; returns the best-defect incumbent."""
    r, J = _residual_jacobian(ws, vecs)
    if r.size == 0:
        return 0.0, vecs
    F = float(r @ r)
    lam = 1e-3
    n_params = J.shape[1]
    best_defect = float(np.max(np.abs(r)))
    best_vecs = vecs
    for _ in range(cfg.max_iters):
        stepped = False
        for _ in range(12):
            A = J.T @ J + lam * np.eye(n_params)
            try:
                delta = np.linalg.solve(A, J.T @ r)
            except np.linalg.LinAlgError:
                lam *= 4.0
                continue
            cand = ws.project_top(_unflatten(ws, _flatten(ws, vecs) - delta))
            if cand is None:
                lam *= 4.0
                continue
            r2, J2 = _residual_jacobian(ws, cand)
            F2 = float(r2 @ r2)
            if F2 < F:
                vecs, r, J, F = cand, r2, J2, F2
                lam = max(lam / 3.0, 1e-12)
                stepped = True
                break
            lam *= 4.0
        defect = float(np.max(np.abs(r)))
        if defect < best_defect:
            best_defect, best_vecs = defect, vecs
        if best_defect < cfg.tolerance or not stepped:
            break
    return best_defect, best_vecs


def _structured_start(pres: RingPresentation, m: int) -> Optional[dict]:
    """Spectral initialization for middle-degree presentations.

    When the presentation pins all pairwise products (so it has a genuine
    pair-product matrix G), diagonalize both G and the ambient wedge
    pairing, rescale the pairing eigenbasis to squares of +-1, and match
    inertia directions.  The resulting assignment realizes G exactly
    whenever the signature fits, giving the descent an exact witness to
    polish; otherwise return None and let random restarts run.
    """
    if m != pres.manifold_dim:
        return None
    degs = {d for _, d in pres.generators}
    if len(degs) != 1:
        return None
    p0 = degs.pop()
    if 2 * p0 != m or p0 % 2 != 0:
        return None
    try:
        G = np.array(intersection_form(pres), dtype=float)
    except (LipdegError, TypeError, ValueError):
        return None
    P = wedge_pairing_matrix(m, p0).astype(float)
    mu, U = np.linalg.eigh(P)
    basis = U / np.sqrt(np.abs(mu))[None, :]
    basis_sign = np.sign(mu)
    lam, V = np.linalg.eigh(G)
    if np.any(np.abs(lam) < 1e-12):
        return None
    pos_cols = [i for i in range(len(mu)) if basis_sign[i] > 0]
    neg_cols = [i for i in range(len(mu)) if basis_sign[i] < 0]
    sel = []
    for lv in lam:
        pool = pos_cols if lv > 0 else neg_cols
        if not pool:
            return None
        sel.append(pool.pop())
    M = V * np.sqrt(np.abs(lam))[None, :]
    rows = M @ basis[:, sel].T
    return {nm: rows[i].copy() for i, (nm, _) in enumerate(pres.generators)}


def _search_single(pres: RingPresentation, m: int, cfg: SearchConfig):
    ws = _Workspace(pres, m, ball_cap=cfg.ball_cap)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    structured = _structured_start(pres, m)
    best = None
    defects = []
    for ridx in range(cfg.restarts):
        rng = np.random.default_rng(seeds[ridx])
        vecs = None
        if ridx == 0 and structured is not None:
            vecs = ws.project_top(structured)
        if vecs is None:
            for _ in range(32):
                cand = {g: rng.standard_normal(ws.dims[g]) for g in ws.names}
                cand = ws.project_top(cand)
                if cand is not None:
                    vecs = cand
                    break
        if vecs is None:
            defects.append(float("inf"))
            continue
        defect, vecs = _descend(ws, vecs, cfg)
        defects.append(defect)
        if best is None or defect < best[0]:
            best = (defect, ridx, vecs)
    if best is None:
        raise DegenerateForm("every restart produced a vanishing top class")
    defect, ridx, vecs = best
    forms = {
        g: from_dense(m, ws.deg[g], vecs[g]) for g in ws.names
    }
    return defect, ridx, Assignment(ambient_dim=m, forms=forms), tuple(defects)


def search_embedding(pres: RingPresentation, ambient, cfg: SearchConfig = SearchConfig()) -> EmbeddingSearch:
    """Best-effort injective-image search over a sum of exterior algebras.

    Top-class normalization pins the image of the top word to +1 on the
    reference volume slot, so the zero assignment is never a minimizer.
    A direct sum is handled one summand at a time: the top class must
    land injectively in a single summand (its pairing with everything
    else is what forces injectivity), so per-summand search with the
    best defect kept is exact for duality-respecting presentations.
    """
    if not pres.generators:
        raise EmptyData("presentation has no generators")
    dims = [ambient] if isinstance(ambient, int) else list(ambient)
    if not dims:
        raise EmptyData("ambient list is empty")
    usable = [
        m
        for m in dims
        if m >= pres.manifold_dim and all(d <= m for _, d in pres.generators)
    ]
    if not usable:
        raise DimensionMismatch(
            f"no ambient summand can carry a degree-{pres.manifold_dim} top class"
        )
    best = None
    for m in usable:
        defect, ridx, assignment, defects = _search_single(pres, m, cfg)
        if best is None or defect < best.defect:
            best = EmbeddingSearch(
                assignment=assignment,
                defect=defect,
                restart_defects=defects,
                best_restart=ridx,
                summand_dim=m,
                converged=defect < cfg.tolerance,
                seed=cfg.seed,
            )
    return best


# -- four-tuple wedge inequality ----------------------------------------------


@dataclass(frozen=True)
class Kge4Report:
    status: str  # "estimated" | "counterexample"
    c_est: Optional[float]
    worst_case: Assignment
    lhs: float
    rhs: float
    tuples: int
    seed: int
    k: int

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "c_est": self.c_est,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tuples": self.tuples,
            "seed": self.seed,
            "k": self.k,
            "worst_case": {
                name: el.to_json_dict()
                for name, el in self.worst_case.forms.items()
            },
        }


def _pair_stats(B: np.ndarray, W: np.ndarray):
    """Volume coefficients of all pairwise wedges for tuples B (t, k, 6)."""
    S = np.einsum("tki,ij,tlj->tkl", B, W.astype(float), B)
    k = B.shape[1]
    diag = S[:, np.arange(k), np.arange(k)]
    lhs = np.max(np.abs(diag), axis=1)
    rhs = np.zeros(B.shape[0])
    for i in range(k):
        for j in range(k):
            if i != j:
                rhs += np.abs(diag[:, i] - diag[:, j]) + np.abs(S[:, i, j])
    return lhs, rhs


def _forms_assignment(B_row: np.ndarray) -> Assignment:
    forms = {
        f"b{i + 1}": from_dense(4, 2, B_row[i]) for i in range(B_row.shape[0])
    }
    return Assignment(ambient_dim=4, forms=forms)


def kge4_certificate(
    samples: int = 100_000, seed: int = 0, k: int = 4, ascent_iters: int = 150
) -> Kge4Report:
    """Estimate the best constant in the four-tuple wedge inequality.

    For k >= 4, any k two-forms on R^4 with sup-norm coefficients at most
    one satisfy max_i |b_i ^ b_i| <= C * sum over ordered pairs i != j of
    (|b_i^b_i - b_j^b_j| + |b_i^b_j|): when the right side vanishes, all
    squares are equal and pairwise products vanish, which the (3,3)
    pairing signature rules out unless every square is zero.  The
    constant is estimated by random sampling plus hill-climb ascent on
    the ratio, and the returned estimate is re-verified against every
    sampled tuple.

    With k < 4 the inequality is false: the normalized self-dual triple
    has pairwise products and square differences all zero while each
    square is the volume form, so the report carries counterexample
    status instead of a constant.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    W = wedge_pairing_matrix(4, 2)
    if k < 4:
        triple = selfdual_triple(normalized=True)
        rows = np.array([dense_vector(el, 2) for el in triple[:k]])
        lhs, rhs = _pair_stats(rows[None, :, :], W)
        return Kge4Report(
            status="counterexample",
            c_est=None,
            worst_case=_forms_assignment(rows),
            lhs=float(lhs[0]),
            rhs=float(rhs[0]),
            tuples=1,
            seed=seed,
            k=k,
        )
    rng = np.random.default_rng(seed)
    B = rng.uniform(-1.0, 1.0, size=(samples, k, 6))
    lhs, rhs = _pair_stats(B, W)
    ratio = np.where(rhs > 1e-12, lhs / np.maximum(rhs, 1e-300), 0.0)
    order = np.argsort(ratio)[::-1]
    climbers = B[order[:8]].copy()
    best_ratio = float(ratio[order[0]])
    best_tuple = climbers[0].copy()

    def tuple_ratio(tup):
        l, r = _pair_stats(tup[None], W)
        return float(l[0]) / max(float(r[0]), 1e-12)

    for c in range(climbers.shape[0]):
        cur = climbers[c]
        val = tuple_ratio(cur)
        step = 0.05
        for _ in range(ascent_iters):
            probe = np.clip(
                cur + step * rng.standard_normal(cur.shape), -1.0, 1.0
            )
            pval = tuple_ratio(probe)
            if pval > val:
                cur, val = probe, pval
            else:
                step *= 0.97
        if val > best_ratio:
            best_ratio, best_tuple = val, cur.copy()
    c_est = best_ratio
    # re-verify: no sampled tuple may violate the inequality at c_est
    bad = lhs > c_est * rhs + 1e-12
    if np.any(bad):
        worst = int(np.argmax(lhs - c_est * rhs))
        c_est = float(np.max(ratio))
        best_tuple = B[worst]
    return Kge4Report(
        status="estimated",
        c_est=float(c_est),
        worst_case=_forms_assignment(best_tuple),
        lhs=float(_pair_stats(best_tuple[None], W)[0][0]),
        rhs=float(_pair_stats(best_tuple[None], W)[1][0]),
        tuples=samples,
        seed=seed,
        k=k,
    )


# -- top class versus defect --------------------------------------------------


@dataclass(frozen=True)
class TopclassFit:
    theta: float
    eps: tuple
    best_top: tuple
    flagged_scalable: bool
    witness_defect: Optional[float]
    intercept: float

    def to_json_dict(self) -> dict:
        return {
            "theta": self.theta,
            "eps": list(self.eps),
            "best_top": list(self.best_top),
            "flagged_scalable": self.flagged_scalable,
            "witness_defect": self.witness_defect,
            "intercept": self.intercept,
        }


def _feasible_rescale(ws: _Workspace, vecs: dict, eps: float) -> dict:
    """Scale the whole assignment down until the defect is <= eps (exact)."""
    if ws.defect(vecs) <= eps:
        return vecs
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ws.defect({g: mid * v for g, v in vecs.items()}) <= eps:
            lo = mid
        else:
            hi = mid
    return {g: lo * v for g, v in vecs.items()}


def estimate_topclass_exponent(
    pres: RingPresentation,
    ambient: int,
    eps_grid: Sequence[float],
    cfg: SearchConfig = SearchConfig(restarts=6, max_iters=250, seed=0),
) -> TopclassFit:
    """Fit how large the top-class image can be at relation defect eps.

    For each eps the top coefficient is pushed up by penalized gradient
    ascent over unit-ball assignments, then the iterate is rescaled so
    the defect constraint holds exactly before the value is recorded; a
    warm start from the previous (larger) eps keeps solution quality
    consistent across the grid.  Output is the log-log slope.  If the
    presentation embeds outright (search defect below tolerance), the
    exponent is 0 by definition and the fit is flagged rather than run.
    """
    eps_list = [float(e) for e in eps_grid]
    if len(eps_list) < 2:
        raise ParameterError("need at least two defect levels to fit a slope")
    if any(e <= 0 for e in eps_list):
        raise ParameterError("defect levels must be positive")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ParameterError("defect levels must be strictly decreasing")
    probe = search_embedding(pres, ambient, cfg)
    if probe.defect < max(cfg.tolerance, 1e-6):
        return TopclassFit(
            theta=0.0,
            eps=tuple(eps_list),
            best_top=tuple(1.0 for _ in eps_list),
            flagged_scalable=True,
            witness_defect=probe.defect,
            intercept=0.0,
        )
    ws = _Workspace(pres, ambient)
    seeds = np.random.SeedSequence(cfg.seed + 7).spawn(cfg.restarts)
    tops = []
    warm = None
    for eps in eps_list:
        best_val = 0.0
        starts = []
        for ridx in range(cfg.restarts):
            rng = np.random.default_rng(seeds[ridx])
            starts.append(
                {g: 0.3 * rng.standard_normal(ws.dims[g]) for g in ws.names}
            )
        if warm is not None:
            starts.append(dict(warm))
        best_vecs = None
        for vecs in starts:
            mu = 4.0 / eps
            for t in range(cfg.max_iters):
                frac = t / max(cfg.max_iters - 1, 1)
                step = 0.08 * (0.5 * (1.0 + math.cos(math.pi * frac)) + 0.05)
                F, gF = ws.value_and_grad(vecs)
                gT = ws.top_grad(vecs)
                vecs = {
                    g: np.clip(
                        vecs[g] + step * (gT[g] - mu * gF[g]), -1.0, 1.0
                    )
                    for g in ws.names
                }
            vecs = _feasible_rescale(ws, vecs, eps)
            val = abs(ws.top_value(vecs))
            if val > best_val:
                best_val, best_vecs = val, vecs
        tops.append(max(best_val, 1e-300))
        warm = best_vecs
    x = np.log(np.array(eps_list))
    y = np.log(np.array(tops))
    slope, intercept = np.polyfit(x, y, 1)
    return TopclassFit(
        theta=float(slope),
        eps=tuple(eps_list),
        best_top=tuple(float(t) for t in tops),
        flagged_scalable=False,
        witness_defect=probe.defect,
        intercept=float(intercept),
    )
