"""Dense exact matrices over the entry rings of :mod:`qbw.exactring`.

A :class:`GridMatrix` keeps integer coordinates in a numpy array: shape
``(rows, cols, phi)`` for integer and cyclotomic kinds and
``(rows, cols, 2, phi)`` for quaternionic kinds (the ``a`` and ``b`` parts of
``a + k*b``).  Products go through :func:`exact_matmul`, which uses float BLAS
only when every partial sum provably fits in 53 bits and falls back to int64
or Python integers otherwise.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exactring import (
    INT,
    CycEntry,
    Entry,
    EntryKind,
    QuatEntry,
    as_cyc,
    format_token,
    kind_of,
    parse_token,
    quaternionic,
    ring,
)

_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**62


class ShapeError(ValueError):
    pass


class NonUnitEntryError(ValueError):
    pass


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.abs(a).max())


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product, bit-exact regardless of magnitude."""
    inner = a.shape[-1]
    bound = _maxabs(a) * _maxabs(b) * max(inner, 1)
    if a.dtype != object and b.dtype != object:
        if bound < _FLOAT_EXACT:
            out = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
            return np.rint(out).astype(np.int64)
        if bound < _INT64_SAFE:
            return np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)
    return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)


def _fit(arr: np.ndarray) -> np.ndarray:
    """Downcast object arrays to int64 when every value fits."""
    if arr.dtype == object and _maxabs(arr) < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


def _lin(arr: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Apply a linear map on the last (coefficient) axis."""
    if arr.dtype == object:
        return arr @ mat.astype(object)
    bound = _maxabs(arr) * _maxabs(mat) * mat.shape[0]
    if bound >= _INT64_SAFE:
        return _fit(arr.astype(object) @ mat.astype(object))
    return arr @ mat


def _cyc_entrywise(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Broadcasted entrywise product of cyclotomic coordinate arrays."""
    r = ring(n)
    if r.phi == 1:
        out = x * y if x.dtype == object or y.dtype == object else None
        if out is None:
            if _maxabs(x) * _maxabs(y) >= _INT64_SAFE:
                out = _fit(x.astype(object) * y.astype(object))
            else:
                out = x * y
        return out
    outer = x[..., :, None] * y[..., None, :]
    shape = outer.shape[:-2] + (r.phi * r.phi,)
    return _lin(outer.reshape(shape), r.mul_tensor.reshape(r.phi * r.phi, r.phi))


def _cyc_matmul(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """(r, s, phi) @ (s, t, phi) over Z[zeta_n]."""
    r = ring(n)
    phi = r.phi
    rows, cols = x.shape[0], y.shape[1]
    raw = None
    for a in range(phi):
        xa = x[:, :, a]
        if not xa.any():
            continue
        for b in range(phi):
            yb = y[:, :, b]
            if not yb.any():
                continue
            prod = exact_matmul(xa, yb)
            if raw is None:
                dtype = object if prod.dtype == object else np.int64
                raw = np.zeros((rows, cols, 2 * phi - 1), dtype=dtype)
            if prod.dtype == object and raw.dtype != object:
                raw = raw.astype(object)
            raw[:, :, a + b] += prod
    if raw is None:
        return np.zeros((rows, cols, phi), dtype=np.int64)
    return _fit(_lin(raw, r.red[: 2 * phi - 1]))


def _cyc_conj(x: np.ndarray, n: int) -> np.ndarray:
    if n <= 2:
        return x
    return _lin(x, ring(n).conj_map)


class GridMatrix:
    """Immutable dense matrix with exact entries of a fixed :class:`EntryKind`."""

    __slots__ = ("kind", "data")

    def __init__(self, kind: EntryKind, data: np.ndarray):
        phi = kind.phi
        want = 4 if kind.is_quat else 3
        if data.ndim != want or data.shape[-1] != phi:
            raise ShapeError(f"coordinate array of shape {data.shape} does not fit {kind}")
        if kind.is_quat and data.shape[2] != 2:
            raise ShapeError("quaternionic data needs an axis of length 2")
        data = _fit(data) if data.dtype == object else data.astype(np.int64, copy=False)
        data.flags.writeable = False
        self.kind = kind
        self.data = data

    # -- construction -------------------------------------------------------

    @classmethod
    def from_ints(cls, array) -> "GridMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ShapeError("expected a 2-d integer array")
        if arr.dtype == object:
            arr = _fit(arr)
        return cls(INT, np.array(arr, dtype=arr.dtype if arr.dtype == object else np.int64)[:, :, None])

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[Entry]], kind: EntryKind | None = None) -> "GridMatrix":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("rows must be non-empty and of equal length")
        if kind is None:
            kind = INT
            for r in rows:
                for x in r:
                    kind = kind.join(kind_of(x))
        n, phi = kind.order, kind.phi
        shape = (len(rows), len(rows[0])) + ((2, phi) if kind.is_quat else (phi,))
        data = np.zeros(shape, dtype=object)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if kind.is_quat:
                    q = QuatEntry.lift(x)
                    data[i, j, 0] = q.a.embed(n).coeffs
                    data[i, j, 1] = q.b.embed(n).coeffs
                else:
                    if isinstance(x, QuatEntry):
                        raise TypeError("quaternionic entry in a commutative kind")
                    data[i, j] = as_cyc(x, n).embed(n).coeffs if n > 1 else (int(x) if not isinstance(x, CycEntry) else x.embed(1).coeffs[0],)
        return cls(kind, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, kind: EntryKind = INT) -> "GridMatrix":
        shape = (rows, cols) + ((2, kind.phi) if kind.is_quat else (kind.phi,))
        return cls(kind, np.zeros(shape, dtype=np.int64))

    @classmethod
    def identity(cls, n: int, kind: EntryKind = INT) -> "GridMatrix":
        return cls.scalar(n, 1, kind)

    @classmethod
    def scalar(cls, n: int, value: Entry, kind: EntryKind | None = None) -> "GridMatrix":
        kind = kind_of(value) if kind is None else kind.join(kind_of(value))
        out = cls.zeros(n, n, kind).data.copy()
        coords = _entry_coords(value, kind)
        for i in range(n):
            out[i, i] = coords
        return cls(kind, out)

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "GridMatrix":
        return cls.from_ints(np.ones((rows, rows if cols is None else cols), dtype=np.int64))

    # -- basic protocol -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, idx) -> Entry:
        i, j = idx
        c = self.data[i, j]
        n = self.kind.order
        if self.kind.tag == "int":
            return int(c[0])
        if self.kind.is_quat:
            return QuatEntry(CycEntry(n, tuple(int(v) for v in c[0])), CycEntry(n, tuple(int(v) for v in c[1])))
        return CycEntry(n, tuple(int(v) for v in c))

    def entries(self) -> list[list[Entry]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        kind = self.kind.join(other.kind)
        return np.array_equal(self.astype(kind).data, other.astype(kind).data)

    def __hash__(self):
        return hash((str(self.kind), self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"GridMatrix({self.rows}x{self.cols}, kind={self.kind})"

    # -- kind handling ------------------------------------------------------

    def astype(self, kind: EntryKind) -> "GridMatrix":
        if kind == self.kind:
            return self
        if self.kind.join(kind) != kind:
            raise TypeError(f"cannot convert {self.kind} to {kind}")
        n0, n = self.kind.order, kind.order
        src = self.data
        if n != n0:
            emb = ring(n0).embed_matrix(n)
            src = _lin(src, emb)
        if kind.is_quat and not self.kind.is_quat:
            out = np.zeros(src.shape[:2] + (2, kind.phi), dtype=src.dtype)
            out[:, :, 0] = src
            src = out
        return GridMatrix(kind, src)

    def _promote(self, other: "GridMatrix") -> tuple["GridMatrix", "GridMatrix"]:
        kind = self.kind.join(other.kind)
        return self.astype(kind), other.astype(kind)

    def to_int_array(self) -> np.ndarray:
        """Plain 2-d integer array; only valid for entries that are rational integers."""
        if self.kind.is_quat:
            if self.data[:, :, 1].any() or self.data[:, :, 0, 1:].any():
                raise TypeError("matrix has non-integer entries")
            return np.array(self.data[:, :, 0, 0])
        if self.data[:, :, 1:].any():
            raise TypeError("matrix has non-integer entries")
        return np.array(self.data[:, :, 0])

    def is_integer(self) -> bool:
        try:
            self.to_int_array()
        except TypeError:
            return False
        return True

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "GridMatrix") -> "GridMatrix":
        a, b = self._promote(other)
        if a.shape != b.shape:
            raise ShapeError(f"cannot add {a.shape} and {b.shape}")
        return GridMatrix(a.kind, _fit(a.data.astype(object) + b.data) if _overflow_risk(a.data, b.data) else a.data + b.data)

    def __neg__(self) -> "GridMatrix":
        return GridMatrix(self.kind, -self.data)

    def __sub__(self, other: "GridMatrix") -> "GridMatrix":
        return self + (-other)

    def __matmul__(self, other: "GridMatrix") -> "GridMatrix":
        return mat_mul(self, other)

    def __mul__(self, scalar) -> "GridMatrix":
        """Right multiplication by a scalar: ``M * x``."""
        return _scale(self, scalar, left=False)

    def __rmul__(self, scalar) -> "GridMatrix":
        """Left multiplication by a scalar: ``x * M``."""
        return _scale(self, scalar, left=True)

    def __pow__(self, e: int) -> "GridMatrix":
        if self.rows != self.cols:
            raise ShapeError("only square matrices have powers")
        out = GridMatrix.identity(self.rows, self.kind)
        base = self
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def conj(self) -> "GridMatrix":
        n = self.kind.order
        if self.kind.is_quat:
            out = np.empty_like(self.data)
            out[:, :, 0] = _cyc_conj(self.data[:, :, 0], n)
            out[:, :, 1] = -self.data[:, :, 1]
            return GridMatrix(self.kind, out)
        return GridMatrix(self.kind, _cyc_conj(self.data, n))

    @property
    def T(self) -> "GridMatrix":
        return mat_transpose(self)

    @property
    def H(self) -> "GridMatrix":
        return mat_adjoint(self)

    def nonzero_mask(self) -> np.ndarray:
        axes = (2, 3) if self.kind.is_quat else (2,)
        return np.any(self.data != 0, axis=axes)

    def is_zero(self) -> bool:
        return not self.data.any()

    def is_scalar_identity(self) -> tuple[bool, Entry | None]:
        """Whether the matrix equals c*I; returns (flag, c)."""
        if self.rows != self.cols:
            return False, None
        c = self[0, 0]
        return self == GridMatrix.scalar(self.rows, c, self.kind), c


def _overflow_risk(a: np.ndarray, b: np.ndarray) -> bool:
    if a.dtype == object or b.dtype == object:
        return True
    return _maxabs(a) + _maxabs(b) >= _INT64_SAFE


def _entry_coords(value: Entry, kind: EntryKind) -> np.ndarray:
    n = kind.order
    if kind.is_quat:
        q = QuatEntry.lift(value)
        return np.array([q.a.embed(n).coeffs, q.b.embed(n).coeffs], dtype=object)
    return np.array(as_cyc(value, n).embed(n).coeffs, dtype=object)


def _scale(m: GridMatrix, scalar: Entry, left: bool) -> GridMatrix:
    kind = m.kind.join(kind_of(scalar))
    m = m.astype(kind)
    n = kind.order
    s = _entry_coords(scalar, kind)
    if not kind.is_quat:
        out = _cyc_entrywise(m.data, s.astype(np.int64) if _maxabs(s) < _INT64_SAFE else s, n)
        return GridMatrix(kind, out)
    ones = np.broadcast_to(s, m.data.shape)
    x, y = (ones, m.data) if left else (m.data, ones)
    return GridMatrix(kind, _quat_entrywise(x, y, n))


def _quat_entrywise(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    xa, xb, ya, yb = x[..., 0, :], x[..., 1, :], y[..., 0, :], y[..., 1, :]
    if x.dtype != object and _maxabs(x) < _INT64_SAFE:
        xa, xb = xa.astype(np.int64), xb.astype(np.int64)
    if y.dtype != object and _maxabs(y) < _INT64_SAFE:
        ya, yb = ya.astype(np.int64), yb.astype(np.int64)
    a = _cyc_entrywise(xa, ya, n) - _cyc_entrywise(_cyc_conj(xb, n), yb, n)
    b = _cyc_entrywise(_cyc_conj(xa, n), yb, n) + _cyc_entrywise(xb, ya, n)
    return np.stack([a, b], axis=-2)


def mat_mul(a: GridMatrix, b: GridMatrix) -> GridMatrix:
    """Exact product; quaternionic entries multiply row entry times column entry."""
    a, b = a._promote(b)
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    n = a.kind.order
    if not a.kind.is_quat:
        return GridMatrix(a.kind, _cyc_matmul(a.data, b.data, n))
    aa, ab = a.data[:, :, 0], a.data[:, :, 1]
    bc, bd = b.data[:, :, 0], b.data[:, :, 1]
    # (a + k b)(c + k d) = (ac - conj(b) d) + k (conj(a) d + b c)
    re = _cyc_matmul(aa, bc, n) - _cyc_matmul(_cyc_conj(ab, n), bd, n)
    im = _cyc_matmul(_cyc_conj(aa, n), bd, n) + _cyc_matmul(ab, bc, n)
    return GridMatrix(a.kind, np.stack([re, im], axis=2))


def mat_transpose(m: GridMatrix) -> GridMatrix:
    axes = (1, 0, 2, 3) if m.kind.is_quat else (1, 0, 2)
    return GridMatrix(m.kind, np.ascontiguousarray(m.data.transpose(axes)))


def mat_adjoint(m: GridMatrix) -> GridMatrix:
    return mat_transpose(m.conj())


def kron(a: GridMatrix, b: GridMatrix) -> GridMatrix:
    """Kronecker product with entries ``a[i, j] * b[k, l]`` in that order."""
    a, b = a._promote(b)
    n = a.kind.order
    (r1, c1), (r2, c2) = a.shape, b.shape
    tail = a.data.shape[2:]
    x = a.data[:, None, :, None]
    y = b.data[None, :, None, :]
    if a.kind.is_quat:
        out = _quat_entrywise(np.broadcast_to(x, (r1, r2, c1, c2) + tail), np.broadcast_to(y, (r1, r2, c1, c2) + tail), n)
    else:
        out = _cyc_entrywise(x, y, n)
    return GridMatrix(a.kind, np.ascontiguousarray(out).reshape((r1 * r2, c1 * c2) + tail))


def block_compose(blocks: Sequence[Sequence[GridMatrix]]) -> GridMatrix:
    """Assemble a matrix of equally sized blocks."""
    if not blocks or not blocks[0]:
        raise ShapeError("empty block layout")
    width = len(blocks[0])
    if any(len(row) != width for row in blocks):
        raise ShapeError("ragged block layout")
    shape = blocks[0][0].shape
    kind = blocks[0][0].kind
    for row in blocks:
        for blk in row:
            if blk.shape != shape:
                raise ShapeError("blocks must share one size")
            kind = kind.join(blk.kind)
    data = np.concatenate(
        [np.concatenate([blk.astype(kind).data for blk in row], axis=1) for row in blocks],
        axis=0,
    )
    return GridMatrix(kind, data)


def abs_matrix(m: GridMatrix) -> GridMatrix:
    """Entrywise absolute value as a 0/1 integer matrix; entries must be units or zero."""
    mask = m.nonzero_mask()
    n = m.kind.order
    if m.kind.is_quat:
        a, b = m.data[:, :, 0], m.data[:, :, 1]
        norm = _cyc_entrywise(a, _cyc_conj(a, n), n) + _cyc_entrywise(b, _cyc_conj(b, n), n)
    else:
        norm = _cyc_entrywise(m.data, _cyc_conj(m.data, n), n)
    expected = np.zeros_like(norm)
    expected[..., 0] = mask
    bad = np.argwhere(np.any(norm != expected, axis=-1))
    if len(bad):
        i, j = bad[0]
        raise NonUnitEntryError(f"entry ({i}, {j}) is neither zero nor a unit")
    return GridMatrix.from_ints(mask.astype(np.int64))


def back_identity(n: int) -> GridMatrix:
    return GridMatrix.from_ints(np.fliplr(np.eye(n, dtype=np.int64)))


def omega_circulant(first_row: Sequence[Entry], omega: Entry = 1) -> GridMatrix:
    """Polynomial in the omega-shift: each row is the previous one shifted right,
    with the wrapped entry multiplied by ``omega``."""
    first = GridMatrix.from_entries([list(first_row)])
    kind = first.kind.join(kind_of(omega))
    if kind.is_quat:
        raise TypeError("omega-circulants are built over commutative rings")
    from .exactring import is_unit_or_zero

    w = as_cyc(omega)
    if w.is_zero() or not is_unit_or_zero(w):
        raise NonUnitEntryError("omega must be a unit")
    wc = _entry_coords(w, kind).astype(np.int64)
    row = first.astype(kind).data[0]
    size = row.shape[0]
    out = np.zeros((size, size, kind.phi), dtype=np.int64)
    out[0] = row
    for i in range(1, size):
        prev = out[i - 1]
        out[i, 1:] = prev[:-1]
        out[i, 0] = _cyc_entrywise(prev[-1], wc, kind.order)
    return GridMatrix(kind, out)


def negacirculant(first_row: Sequence[Entry]) -> GridMatrix:
    return omega_circulant(first_row, -1)


def circulant(first_row: Sequence[Entry]) -> GridMatrix:
    return omega_circulant(first_row, 1)


def nega_shift(n: int) -> GridMatrix:
    return negacirculant([0, 1] + [0] * (n - 2)) if n > 1 else GridMatrix.from_ints([[-1]])


def omega_shift(n: int, omega: Entry) -> GridMatrix:
    if n == 1:
        return GridMatrix.from_entries([[omega]])
    return omega_circulant([0, 1] + [0] * (n - 2), omega)


def group_J(m: int, n: int) -> GridMatrix:
    """I_m (x) J_n, the group-partition matrix."""
    return GridMatrix.from_ints(np.kron(np.eye(m, dtype=np.int64), np.ones((n, n), dtype=np.int64)))


# -- QBW text format -----------------------------------------------------------


def format_qbw(m: GridMatrix) -> str:
    out = io.StringIO()
    out.write(f"qbw {m.rows} {m.cols} kind={m.kind}\n")
    for i in range(m.rows):
        out.write(" ".join(format_token(m[i, j]) for j in range(m.cols)))
        out.write("\n")
    return out.getvalue()


def parse_qbw(text: str | Iterable[str]) -> GridMatrix:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    lines = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty QBW input")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "qbw" or not head[3].startswith("kind="):
        raise ValueError(f"bad QBW header: {lines[0]!r}")
    rows, cols = int(head[1]), int(head[2])
    kind = EntryKind.parse(head[3][len("kind="):])
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    entries = []
    for ln in body:
        toks = ln.split()
        if len(toks) != cols:
            raise ValueError(f"expected {cols} entries per row, found {len(toks)}")
        entries.append([parse_token(t) for t in toks])
    return GridMatrix.from_entries(entries, kind)


def read_qbw(path: str | Path) -> GridMatrix:
    return parse_qbw(Path(path).read_text())


def write_qbw(m: GridMatrix, path: str | Path) -> None:
    Path(path).write_text(format_qbw(m))
