"""Compiled event loops.

Every kernel consumes pre-generated event arrays (bond offsets in array
coordinates, optional marks/aux uniforms, optional times) and mutates a label
array in place.  Array-coordinate convention: an event at offset ``b`` couples
array slots ``(b - 1, b)``; offsets ``0`` and ``L`` are the phantom boundary
bonds that only drive the contamination fronts.

Front bookkeeping (identical in all kernels): ``fl`` starts at ``-1`` and
``fr`` at ``L``.  An event at ``b == fl + 1`` (with ``b < fr``) advances the
left front to ``b``; an event at ``b == fr`` (with ``b - 1 > fl``) advances
the right front to ``b - 1``.  Slots strictly inside ``(fl, fr)`` provably
agree with the infinite-lattice process driven by the same noise.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "tasep_final",
    "asep_final",
    "pi_final",
    "small_window_batch",
    "pair_ledger",
]


@njit(cache=True, nogil=True)
def tasep_final(labels, bonds):
    """Sort-decreasing dynamics; returns the (fl, fr) front offsets."""
    L = labels.shape[0]
    fl = -1
    fr = L
    for k in range(bonds.shape[0]):
        b = bonds[k]
        if b == fl + 1 and b < fr:
            fl = b
        if b == fr and b - 1 > fl:
            fr = b - 1
        if 1 <= b <= L - 1:
            a = labels[b - 1]
            c = labels[b]
            if a < c:
                labels[b - 1] = c
                labels[b] = a
    return fl, fr


@njit(cache=True, nogil=True)
def asep_final(labels, bonds, marks):
    """Marked dynamics: mark -> sort decreasing, no mark -> sort increasing."""
    L = labels.shape[0]
    fl = -1
    fr = L
    for k in range(bonds.shape[0]):
        b = bonds[k]
        if b == fl + 1 and b < fr:
            fl = b
        if b == fr and b - 1 > fl:
            fr = b - 1
        if 1 <= b <= L - 1:
            a = labels[b - 1]
            c = labels[b]
            if marks[k]:
                if a < c:
                    labels[b - 1] = c
                    labels[b] = a
            else:
                if a > c:
                    labels[b - 1] = c
                    labels[b] = a
    return fl, fr


@njit(cache=True, nogil=True)
def pi_final(labels, bonds, aux, q):
    """Randomized-sort dynamics: increasing pairs always swap, decreasing
    pairs swap when the event's aux uniform falls below ``q``."""
    L = labels.shape[0]
    fl = -1
    fr = L
    for k in range(bonds.shape[0]):
        b = bonds[k]
        if b == fl + 1 and b < fr:
            fl = b
        if b == fr and b - 1 > fl:
            fr = b - 1
        if 1 <= b <= L - 1:
            a = labels[b - 1]
            c = labels[b]
            if a < c:
                labels[b - 1] = c
                labels[b] = a
            elif aux[k] < q:
                labels[b - 1] = c
                labels[b] = a
    return fl, fr


@njit(cache=True, nogil=True)
def small_window_batch(template, counts, bonds_flat, marks_flat, out_labels, out_fronts):
    """Run many short independent replicas over one flat event stream.

    Replica ``r`` consumes ``counts[r]`` consecutive events, starts from
    ``template`` and writes its final labels to ``out_labels[r]`` and its
    front offsets to ``out_fronts[r]``.
    """
    L = template.shape[0]
    pos = 0
    for r in range(counts.shape[0]):
        labels = out_labels[r]
        for i in range(L):
            labels[i] = template[i]
        fl = -1
        fr = L
        for k in range(pos, pos + counts[r]):
            b = bonds_flat[k]
            if b == fl + 1 and b < fr:
                fl = b
            if b == fr and b - 1 > fl:
                fr = b - 1
            if 1 <= b <= L - 1:
                a = labels[b - 1]
                c = labels[b]
                if marks_flat[k]:
                    if a < c:
                        labels[b - 1] = c
                        labels[b] = a
                else:
                    if a > c:
                        labels[b - 1] = c
                        labels[b] = a
        pos += counts[r]
        out_fronts[r, 0] = fl
        out_fronts[r, 1] = fr
    return pos


@njit(cache=True, nogil=True)
def pair_ledger(
    labels,
    bonds,
    times,
    marks,
    horizon,
    checkpoints,
    label_a,
    label_b,
):
    """Time-resolved run with a running ledger for one tracked label pair.

    Ledger contents, for labels ``a`` and ``b`` at array positions
    ``pa(t), pb(t)``:

    * at each checkpoint ``c``: the overtake count ``R`` (labels greater than
      ``a`` strictly left of ``pa``), the unswapped indicator ``pa < pb``, and
      the running integral ``intq = ∫ 1{pa < pb} dt``;
    * at the horizon: the total adjacency time ``J = ∫ 1{|pa-pb| = 1} dt``
      and the count of events landing on the bond joining the adjacent pair.

    Dynamics are the marked ones of :func:`asep_final` (run with all-True
    marks for pure sort-decreasing dynamics).  Piecewise-constant state makes
    every integral exact.  Returns
    ``(r_ck, u_ck, intq_ck, j_total, interactions, pa, pb, fl, fr)``.
    """
    L = labels.shape[0]
    nck = checkpoints.shape[0]
    r_ck = np.zeros(nck, dtype=np.int64)
    u_ck = np.zeros(nck, dtype=np.int64)
    intq_ck = np.zeros(nck, dtype=np.float64)

    pa = -1
    pb = -1
    for i in range(L):
        if labels[i] == label_a:
            pa = i
        if labels[i] == label_b:
            pb = i

    fl = -1
    fr = L
    prev = 0.0
    intq = 0.0
    jtot = 0.0
    inter = 0
    ci = 0

    for k in range(bonds.shape[0]):
        tt = times[k]
        while ci < nck and checkpoints[ci] <= tt:
            dt = checkpoints[ci] - prev
            if pa < pb:
                intq += dt
            if pa - pb == 1 or pb - pa == 1:
                jtot += dt
            prev = checkpoints[ci]
            r = 0
            for i in range(pa):
                if labels[i] > label_a:
                    r += 1
            r_ck[ci] = r
            u_ck[ci] = 1 if pa < pb else 0
            intq_ck[ci] = intq
            ci += 1
        dt = tt - prev
        if pa < pb:
            intq += dt
        if pa - pb == 1 or pb - pa == 1:
            jtot += dt
        prev = tt

        b = bonds[k]
        if b == fl + 1 and b < fr:
            fl = b
        if b == fr and b - 1 > fl:
            fr = b - 1
        if 1 <= b <= L - 1:
            if (pa == b - 1 and pb == b) or (pb == b - 1 and pa == b):
                inter += 1
            a = labels[b - 1]
            c = labels[b]
            swap = False
            if marks[k]:
                if a < c:
                    swap = True
            else:
                if a > c:
                    swap = True
            if swap:
                labels[b - 1] = c
                labels[b] = a
                if pa == b - 1:
                    pa = b
                elif pa == b:
                    pa = b - 1
                if pb == b - 1:
                    pb = b
                elif pb == b:
                    pb = b - 1

    while ci < nck:
        dt = checkpoints[ci] - prev
        if pa < pb:
            intq += dt
        if pa - pb == 1 or pb - pa == 1:
            jtot += dt
        prev = checkpoints[ci]
        r = 0
        for i in range(pa):
            if labels[i] > label_a:
                r += 1
        r_ck[ci] = r
        u_ck[ci] = 1 if pa < pb else 0
        intq_ck[ci] = intq
        ci += 1

    dt = horizon - prev
    if dt > 0.0:
        if pa < pb:
            intq += dt
        if pa - pb == 1 or pb - pa == 1:
            jtot += dt

    return r_ck, u_ck, intq_ck, jtot, inter, pa, pb, fl, fr
