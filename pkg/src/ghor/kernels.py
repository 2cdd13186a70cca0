"""Inner loops for exact-cover search and cycle-label closure.

Each kernel has a numba-compiled version and a plain numpy/Python version
with identical output.  The compiled path is used when numba imports and the
environment variable ``GHOR_NUMBA`` is not set to 0/false/off; tests and the
benchmark can switch explicitly with :func:`use_numba`.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None

numba_available = nb is not None

_ENV_OFF = ("0", "false", "no", "off")
_enabled = numba_available and os.environ.get("GHOR_NUMBA", "1").strip().lower() not in _ENV_OFF


def use_numba(flag: bool | None = None) -> bool:
    """Query or set whether compiled kernels are used."""
    global _enabled
    if flag is not None:
        _enabled = bool(flag) and numba_available
    return _enabled


if numba_available:
    njit = nb.njit(cache=True, nogil=True)
else:  # pragma: no cover
    def njit(f):
        return f


# ---------------------------------------------------------------------------
# exact cover: faces are the columns, arrows the rows; every face must be hit
# by exactly one chosen arrow.  Solutions come back as arrow bitmasks.


def _exact_cover_py(face_ptr, face_idx, cover, n_faces):
    full = (1 << n_faces) - 1
    cover = [int(c) for c in cover]
    faces = [list(map(int, face_idx[face_ptr[f]:face_ptr[f + 1]])) for f in range(n_faces)]
    out = []

    def choose(rem):
        best, best_count = -1, 1 << 30
        for f in range(n_faces):
            if rem >> f & 1:
                count = sum(1 for a in faces[f] if cover[a] & ~rem == 0)
                if count < best_count:
                    best, best_count = f, count
                    if count == 0:
                        return -1
        return best

    def search(rem, chosen):
        if rem == 0:
            out.append(chosen)
            return
        f = choose(rem)
        if f < 0:
            return
        for a in faces[f]:
            if cover[a] & ~rem == 0:
                search(rem & ~cover[a], chosen | (1 << a))

    search(full, 0)
    return out


@njit
def _choose_face(rem, face_ptr, face_idx, cover, n_faces):
    best = -1
    best_count = 1 << 30
    one = np.uint64(1)
    for f in range(n_faces):
        if rem & (one << np.uint64(f)):
            count = 0
            for p in range(face_ptr[f], face_ptr[f + 1]):
                if cover[face_idx[p]] & ~rem == 0:
                    count += 1
            if count < best_count:
                best = f
                best_count = count
                if count == 0:
                    return -1
    return best


@njit
def _exact_cover_nb(face_ptr, face_idx, cover, n_faces):
    one = np.uint64(1)
    full = np.uint64(0)
    for f in range(n_faces):
        full |= one << np.uint64(f)
    out = np.empty(16, dtype=np.uint64)
    n_out = 0
    rem = np.zeros(n_faces + 1, dtype=np.uint64)
    chosen = np.zeros(n_faces + 1, dtype=np.uint64)
    face_at = np.zeros(n_faces + 1, dtype=np.int64)
    pos = np.zeros(n_faces + 1, dtype=np.int64)
    rem[0] = full
    first = _choose_face(full, face_ptr, face_idx, cover, n_faces)
    if first < 0:
        return out[:0]
    face_at[0] = first
    depth = 0
    while depth >= 0:
        f = face_at[depth]
        advanced = False
        while face_ptr[f] + pos[depth] < face_ptr[f + 1]:
            a = face_idx[face_ptr[f] + pos[depth]]
            pos[depth] += 1
            if cover[a] & ~rem[depth] != 0:
                continue
            new_rem = rem[depth] & ~cover[a]
            new_chosen = chosen[depth] | (one << np.uint64(a))
            if new_rem == 0:
                if n_out == out.shape[0]:
                    grown = np.empty(2 * n_out, dtype=np.uint64)
                    grown[:n_out] = out
                    out = grown
                out[n_out] = new_chosen
                n_out += 1
                continue
            g = _choose_face(new_rem, face_ptr, face_idx, cover, n_faces)
            if g < 0:
                continue
            depth += 1
            rem[depth] = new_rem
            chosen[depth] = new_chosen
            face_at[depth] = g
            pos[depth] = 0
            advanced = True
            break
        if not advanced:
            depth -= 1
    return out[:n_out]


def exact_cover(faces: list[list[int]], n_arrows: int) -> list[int]:
    """All arrow sets meeting every face exactly once, as bitmasks.

    ``faces[f]`` lists the distinct arrow indices on face f.  Search order is
    deterministic: the face with fewest admissible arrows is branched on
    first (lowest index on ties) and its arrows are tried in index order.
    """
    n_faces = len(faces)
    face_ptr = np.zeros(n_faces + 1, dtype=np.int64)
    for f, arrows in enumerate(faces):
        face_ptr[f + 1] = face_ptr[f] + len(arrows)
    face_idx = np.array([a for arrows in faces for a in arrows], dtype=np.int64)
    cover = [0] * n_arrows
    for f, arrows in enumerate(faces):
        for a in arrows:
            cover[a] |= 1 << f
    if n_faces == 0:
        return [0]
    if _enabled and n_faces <= 63 and n_arrows <= 63:
        sols = _exact_cover_nb(face_ptr, face_idx, np.array(cover, dtype=np.uint64), n_faces)
        return [int(s) for s in sols]
    return _exact_cover_py(face_ptr, face_idx, cover, n_faces)


# ---------------------------------------------------------------------------
# label closure: all (vertex, exponent vector) states reachable from a start
# vertex by paths whose label degree stays within a bound.  Exponent vectors
# are packed into integers in base (bound + 1) so states hash as int pairs.


def _closure_np(start, tails, heads, codes, degrees, bound):
    verts = np.array([start], dtype=np.int64)
    keys = np.array([0], dtype=np.int64)
    degs = np.array([0], dtype=np.int64)
    seen = {(start, 0)}
    out_v, out_k = [verts], [keys]
    while verts.size:
        new_v, new_k, new_d = [], [], []
        for a in range(tails.size):
            mask = (verts == tails[a]) & (degs + degrees[a] <= bound)
            if not mask.any():
                continue
            new_v.append(np.full(int(mask.sum()), heads[a], dtype=np.int64))
            new_k.append(keys[mask] + codes[a])
            new_d.append(degs[mask] + degrees[a])
        if not new_v:
            break
        v = np.concatenate(new_v)
        k = np.concatenate(new_k)
        d = np.concatenate(new_d)
        stacked = np.unique(np.stack([v, k, d], axis=1), axis=0)
        fresh = [i for i, (x, y, _) in enumerate(stacked) if (int(x), int(y)) not in seen]
        stacked = stacked[fresh]
        for x, y, _ in stacked:
            seen.add((int(x), int(y)))
        verts, keys, degs = stacked[:, 0], stacked[:, 1], stacked[:, 2]
        out_v.append(verts)
        out_k.append(keys)
    return np.concatenate(out_v), np.concatenate(out_k)


@njit
def _closure_nb(start, tails, heads, codes, degrees, bound):
    seen = dict()
    seen[(start, np.int64(0))] = np.int64(0)
    q_v = [start]
    q_k = [np.int64(0)]
    q_d = [np.int64(0)]
    i = 0
    while i < len(q_v):
        v, k, d = q_v[i], q_k[i], q_d[i]
        i += 1
        for a in range(tails.shape[0]):
            if tails[a] != v or d + degrees[a] > bound:
                continue
            nv = heads[a]
            nk = k + codes[a]
            if (nv, nk) in seen:
                continue
            seen[(nv, nk)] = d + degrees[a]
            q_v.append(nv)
            q_k.append(nk)
            q_d.append(d + degrees[a])
    out_v = np.empty(len(q_v), dtype=np.int64)
    out_k = np.empty(len(q_v), dtype=np.int64)
    for j in range(len(q_v)):
        out_v[j] = q_v[j]
        out_k[j] = q_k[j]
    return out_v, out_k


def label_closure(start: int, tails, heads, labels: np.ndarray, bound: int):
    """Reachable (vertex, label) pairs from ``start`` with label degree <= bound.

    ``labels`` is the (arrows x basis) matrix of nonnegative arrow labels;
    every row must have positive degree.  Returns a set of
    (vertex index, label tuple) pairs.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n_arrows, dim = labels.shape if labels.ndim == 2 else (0, 0)
    degrees = labels.sum(axis=1) if n_arrows else np.zeros(0, dtype=np.int64)
    if n_arrows and degrees.min() <= 0:
        raise ValueError("every arrow label needs positive degree")
    base = bound + 1
    if dim and base ** dim >= 2 ** 62:
        return _closure_generic(start, tails, heads, labels, bound)
    weights = np.array([base ** i for i in range(dim)], dtype=np.int64)
    codes = labels @ weights if n_arrows else np.zeros(0, dtype=np.int64)
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    fn = _closure_nb if _enabled else _closure_np
    verts, keys = fn(np.int64(start), tails, heads, codes.astype(np.int64), degrees.astype(np.int64),
                     np.int64(bound))
    out = set()
    for v, k in zip(verts.tolist(), keys.tolist()):
        vec = []
        for _ in range(dim):
            k, r = divmod(k, base)
            vec.append(r)
        out.add((v, tuple(vec)))
    return out


def _closure_generic(start, tails, heads, labels, bound):
    rows = [tuple(int(x) for x in r) for r in labels]
    degrees = [sum(r) for r in rows]
    zero = (0,) * labels.shape[1]
    seen = {(start, zero)}
    frontier = [(start, zero, 0)]
    while frontier:
        nxt = []
        for v, vec, d in frontier:
            for a in range(len(rows)):
                if tails[a] == v and d + degrees[a] <= bound:
                    state = (int(heads[a]), tuple(x + y for x, y in zip(vec, rows[a])))
                    if state not in seen:
                        seen.add(state)
                        nxt.append(state + (d + degrees[a],))
        frontier = nxt
    return seen
