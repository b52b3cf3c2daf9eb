"""Block constructions of quasi-balanced weighing matrices.

Every construction here starts from a BGW ``H`` over a cyclic group, expands
it into signed (or omega-) permutation blocks and decorates the blocks with a
small core matrix.  Results are returned unverified; certification is the job
of :mod:`qbw.verify`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .bgw import (
    BgwMatrix,
    bgw_check,
    conference_core,
    expand_bgw,
    format_bgw,
    gh_source,
    negashift,
    omegashift,
    paley_bgw,
    skew_check,
    symmetric_check,
)
from .exactring import K, cyc_root
from .galois import prime_power
from .matrixcore import GridMatrix, back_identity, format_qbw, kron, nega_shift
from .paths import fixture_path

FAMILIES = ("cons1", "cons2", "pp", "gdd1", "gdd2", "gdd3", "gh_example")
GH_FIXTURE = "gh_c4_16.bgw"


class IngredientError(ValueError):
    pass


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class ConstructionRecipe:
    family: str
    params: dict[str, Any]
    ingredients: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"format": "qbw-recipe/1", "family": self.family, "params": self.params, "ingredients": self.ingredients},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ConstructionRecipe":
        d = json.loads(text)
        return cls(d["family"], d["params"], d.get("ingredients", {}))


def _require_bgw(H: BgwMatrix, v: int, k: int, lam: int, g: int) -> None:
    rep = bgw_check(H)
    if not rep.passed or rep.params != (v, k, lam) or H.group_order != g:
        raise IngredientError(f"expected a BGW({v},{k},{lam}) over C_{g}, got {rep.summary()}")


def _require_weighing(C: GridMatrix, weight: int) -> None:
    ok, c = (C @ C.H).is_scalar_identity()
    if not ok or c != weight:
        raise IngredientError(f"core is not a W({C.rows},{weight})")


def _block_diag(block: GridMatrix, count: int) -> GridMatrix:
    return kron(GridMatrix.identity(count), block)


def _check_q(q: int, residue: int | None, allowed: tuple[int, ...] | None = None) -> None:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    if residue is not None and q % 4 != residue:
        raise ValueError(f"q = {q} is not congruent to {residue} mod 4")
    if allowed is not None and q not in allowed:
        raise ValueError(f"q = {q} is outside the supported set {allowed}")


# -- signed strongly regular graphs -------------------------------------------------


def cons1_parts(q: int) -> tuple[BgwMatrix, GridMatrix]:
    _check_q(q, 3)
    H = paley_bgw(q * q, 2 * (q + 1))
    _require_bgw(H, q * q + 1, q * q, q * q - 1, 2 * (q + 1))
    if not skew_check(H):
        raise IngredientError("cons1 needs a skew BGW")
    C = conference_core(q)
    _require_weighing(C, q)
    return H, C


def cons1(q: int, siamese: bool = True) -> tuple[GridMatrix, list[GridMatrix]]:
    """W(1+q+q^2+q^3, q+q^2) for q = 3 mod 4, plus the Siamese family W_0..W_q."""
    H, C = cons1_parts(q)
    E = expand_bgw(H, negashift(q + 1))
    blocks = H.v
    diag = _block_diag(C, blocks)
    R = back_identity(q + 1)
    N = nega_shift(q + 1)
    family = []
    for ell in range(q + 1 if siamese else 1):
        family.append(E @ _block_diag(N**ell @ R, blocks) + diag)
    return family[0], family


def cons2(q: int) -> GridMatrix:
    """Butson W(1+q+q^2+q^3, q+q^2) over R_4 for q = 1 mod 4."""
    _check_q(q, 1)
    H = paley_bgw(q * q, 2 * (q + 1))
    _require_bgw(H, q * q + 1, q * q, q * q - 1, 2 * (q + 1))
    if not symmetric_check(H):
        raise IngredientError("cons2 needs a symmetric BGW")
    C = conference_core(q)
    _require_weighing(C, q)
    E = expand_bgw(H, negashift(q + 1))
    iC = cyc_root(4, 1) * C
    return E @ _block_diag(back_identity(q + 1), H.v) + _block_diag(iC, H.v)


def cons2_siamese(q: int) -> list[GridMatrix]:
    _check_q(q, 1)
    H = paley_bgw(q * q, 2 * (q + 1))
    C = conference_core(q)
    E = expand_bgw(H, negashift(q + 1))
    diag = _block_diag(cyc_root(4, 1) * C, H.v)
    R, N = back_identity(q + 1), nega_shift(q + 1)
    return [E @ _block_diag(N**ell @ R, H.v) + diag for ell in range(q + 1)]


def cons_pp(q: int, core: GridMatrix | None = None) -> GridMatrix:
    """Quaternion W(1+q+q^2+q^3, 1+q^3) for even q: diagonal blocks k*I, others C H_ij R."""
    _check_q(q, None, (4, 8))
    H = paley_bgw(q * q, q * q - 1)
    _require_bgw(H, q * q + 1, q * q, q * q - 1, q * q - 1)
    if not symmetric_check(H):
        raise IngredientError("the even case needs a symmetric BGW")
    C = conference_core(q, "omega") if core is None else core
    _require_weighing(C, q)
    E = expand_bgw(H, omegashift(q + 1, cyc_root(q - 1, 1)))
    blocks = H.v
    off = _block_diag(C, blocks) @ E @ _block_diag(back_identity(q + 1), blocks)
    return off + GridMatrix.scalar(blocks * (q + 1), K)


def remark_graph(W: GridMatrix) -> GridMatrix:
    """0/1 matrix of the nonzero off-diagonal entries."""
    mask = W.nonzero_mask().astype(int)
    for i in range(W.rows):
        mask[i, i] = 0
    return GridMatrix.from_ints(mask)


# -- signed group divisible designs ------------------------------------------------------


def _negashift_expand(H: BgwMatrix, C2: GridMatrix) -> GridMatrix:
    n = C2.rows
    if H.group_order != 2 * n:
        raise IngredientError(f"BGW group has order {H.group_order}, the core needs {2 * n}")
    return expand_bgw(H, negashift(n))


def gdd1(H: BgwMatrix, C2: GridMatrix) -> GridMatrix:
    """Blocks N^{c_ij} C2 from a generalized Hadamard H over C_{2n}."""
    m = H.v
    rep = bgw_check(H)
    if not rep.passed or rep.params != (m, m, m):
        raise IngredientError("gdd1 needs a BGW(m, m, m)")
    E = _negashift_expand(H, C2)
    return E @ _block_diag(C2, m)


def gdd2(H: BgwMatrix, C2: GridMatrix) -> GridMatrix:
    """Blocks (1 - delta_ij) N^{c_ij} C2 from a BGW(m+1, m, m-1) with empty diagonal."""
    v = H.v
    rep = bgw_check(H)
    if not rep.passed or rep.params != (v, v - 1, v - 2) or H.support.diagonal().any():
        raise IngredientError("gdd2 needs a BGW(m+1, m, m-1) with empty diagonal")
    E = _negashift_expand(H, C2)
    return E @ _block_diag(C2, v)


def gdd3(H: BgwMatrix, C2: GridMatrix) -> GridMatrix:
    """Blocks (1 - delta_ij) N^{c_ij} C2 R; symmetric |W| when H is skew."""
    n = C2.rows
    if C2 != _as_negacirculant(C2):
        raise IngredientError("gdd3 needs a negacirculant core")
    return gdd2(H, C2 @ back_identity(n))


def _as_negacirculant(C: GridMatrix) -> GridMatrix:
    from .matrixcore import negacirculant

    return negacirculant([C[0, j] for j in range(C.cols)])


def gh_example_params(n: int, t: int) -> tuple[int, int, int, int, int, int]:
    """GDD parameters of the GH example for group C_{2^n}."""
    a = 2 * n * t
    return (
        2 ** (a + n - 1),
        2**a * (2 ** (n - 1) - 1),
        2**a,
        2 ** (n - 1),
        2**a * (2 ** (n - 1) - 2),
        2 ** (a - n + 1) * (2 ** (2 * n - 2) - 2**n + 1),
    )


def load_gh_fixture() -> BgwMatrix:
    return gh_source(4, 16, "import", path=fixture_path(GH_FIXTURE))


def gh_example(n: int = 2, t: int = 1, H: BgwMatrix | None = None, budget: int = 10**7) -> GridMatrix:
    """[H_ij W] with H a GH over C_{2^n} of order 2^{2nt} and W a W(2^{n-1}, 2^{n-1}-1)."""
    g, m = 2**n, 2 ** (2 * n * t)
    if H is None:
        if (g, m) == (4, 16):
            H = load_gh_fixture()
        else:
            H = gh_source(g, m, "search", budget=budget, strategy="developed")
            if H is None:
                raise IngredientError(f"no developed GH of order {m} over C_{g}")
    half = 2 ** (n - 1)
    C2 = conference_core(half - 1) if half > 1 else GridMatrix.from_ints([[0]])
    return gdd1(H, C2)


# -- acceptance-size defaults -------------------------------------------------------------------


def default_gdd1() -> tuple[GridMatrix, ConstructionRecipe]:
    H = load_gh_fixture()
    C2 = conference_core(1)
    W = gdd1(H, C2)
    return W, ConstructionRecipe("gdd1", {"m": 16, "n": 2}, {"bgw": _digest(format_bgw(H)), "core": _digest(format_qbw(C2))})


def default_gdd2(Q: int = 9) -> tuple[GridMatrix, ConstructionRecipe]:
    H = paley_bgw(Q, Q - 1)
    n = (Q - 1) // 2
    C2 = conference_core(n - 1)
    W = gdd2(H, C2)
    return W, ConstructionRecipe("gdd2", {"m": Q + 1, "n": n, "Q": Q}, {"bgw": _digest(format_bgw(H)), "core": _digest(format_qbw(C2))})


def default_gdd3(Q: int = 9) -> tuple[GridMatrix, ConstructionRecipe]:
    H = paley_bgw(Q, Q - 1)
    n = (Q - 1) // 2
    C2 = conference_core(n - 1)
    W = gdd3(H, C2)
    return W, ConstructionRecipe("gdd3", {"m": Q + 1, "n": n, "Q": Q}, {"bgw": _digest(format_bgw(H)), "core": _digest(format_qbw(C2))})


def build(family: str, q: int | None = None, H: BgwMatrix | None = None, core: GridMatrix | None = None,
          ) -> tuple[GridMatrix, ConstructionRecipe, list[GridMatrix]]:
    """Dispatch used by the command line; returns (W, recipe, siamese family)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    siamese: list[GridMatrix] = []
    if family in ("cons1", "cons2", "pp"):
        if q is None:
            raise ValueError(f"{family} needs --q")
        if family == "cons1":
            W, siamese = cons1(q)
        elif family == "cons2":
            W = cons2(q)
            siamese = cons2_siamese(q)
        else:
            W = cons_pp(q, core)
        return W, ConstructionRecipe(family, {"q": q}), siamese
    if family == "gh_example":
        W = gh_example(H=H)
        return W, ConstructionRecipe(family, {"n": 2, "t": 1}), siamese
    if H is None and core is None:
        W, recipe = {"gdd1": default_gdd1, "gdd2": default_gdd2, "gdd3": default_gdd3}[family]()
        return W, recipe, siamese
    if H is None or core is None:
        raise ValueError(f"{family} needs both a BGW and a core")
    fn = {"gdd1": gdd1, "gdd2": gdd2, "gdd3": gdd3}[family]
    W = fn(H, core)
    recipe = ConstructionRecipe(family, {"m": H.v, "n": core.rows},
                                {"bgw": _digest(format_bgw(H)), "core": _digest(format_qbw(core))})
    return W, recipe, siamese
