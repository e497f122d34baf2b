# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled decode+objective kernel. Mirrors decoder.decode statement for
statement (same arithmetic order, same tie-breaks) so both paths return
bit-identical objective values."""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

import numpy as np


def evaluate(int[::1] chrom, int[::1] app,
             signed char[::1] kind, int[::1] sub1, int[::1] sub2,
             double[::1] effdur, double[::1] speed,
             double[:, ::1] dist, int nsub):
    """Objective J for one genotype; -1.0 when no admissible slot exists."""
    cdef int nt = chrom.shape[0]
    cdef int nr = app.shape[0] + 1
    cdef int maxlen = nt + nsub  # loose upper bound on a robot sequence
    cdef int *seq = <int *> malloc(nr * maxlen * sizeof(int))
    cdef int *seqlen = <int *> malloc(nr * sizeof(int))
    cdef double *arr = <double *> malloc(nsub * sizeof(double))
    cdef double *stt = <double *> malloc(nsub * sizeof(double))
    cdef double *dep = <double *> malloc(nsub * sizeof(double))
    cdef double *cstart = <double *> malloc(nsub * sizeof(double))
    cdef signed char *committed = <signed char *> malloc(nsub)
    cdef signed char *ispend = <signed char *> malloc(nsub)
    cdef int *partner = <int *> malloc(nsub * sizeof(int))
    cdef int *pend_task = <int *> malloc(nt * sizeof(int))
    cdef int *pend_carrier = <int *> malloc(nt * sizeof(int))
    cdef int *pend_robot = <int *> malloc(nt * sizeof(int))

    cdef int k, i, j, t, tid, s, c, p, prev, lo, hi, slot, pos
    cdef int npend = 0, b0, b1
    cdef int best_r, best_slot, sel, k_car, r_best
    cdef double d1, d2, a, tt, w, arr_p, base, best_w, best_arr, pair_start, J
    cdef bint have_best

    for s in range(nsub):
        committed[s] = 0
        ispend[s] = 0
        partner[s] = -1

    # split + carrier choice (S1)
    for k in range(nr):
        b0 = 0 if k == 0 else app[k - 1]
        b1 = nt if k == nr - 1 else app[k]
        seqlen[k] = 0
        prev = nsub + k
        for i in range(b0, b1):
            tid = chrom[i] - 1
            if kind[tid] == 0:
                s = sub1[tid]
            else:
                d1 = dist[prev, sub1[tid]] / speed[k]
                d2 = dist[prev, sub2[tid]] / speed[k]
                if d2 < d1:
                    s = sub2[tid]
                    partner[s] = sub1[tid]
                else:
                    s = sub1[tid]
                    partner[s] = sub2[tid]
                ispend[s] = 1
                pend_task[npend] = tid
                pend_carrier[npend] = s
                pend_robot[npend] = k
                npend += 1
            seq[k * maxlen + seqlen[k]] = s
            seqlen[k] += 1
            prev = s

    # forward propagation of one robot's times under committed starts
    cdef double comp
    for k in range(nr):
        _forward(k, seq, seqlen, maxlen, nsub, dist, speed,
                 effdur, arr, stt, dep, cstart, committed)

    while npend > 0:
        # next pair: smallest carrier arrival, then lowest task id
        sel = 0
        for i in range(1, npend):
            if (arr[pend_carrier[i]] < arr[pend_carrier[sel]]
                    or (arr[pend_carrier[i]] == arr[pend_carrier[sel]]
                        and pend_task[i] < pend_task[sel])):
                sel = i
        tid = pend_task[sel]
        k_car = pend_robot[sel]
        c = pend_carrier[sel]
        p = partner[c]

        have_best = False
        best_w = 0.0
        best_r = 0
        best_slot = 0
        best_arr = 0.0
        for k in range(nr):
            if k == k_car:
                continue
            lo = 0
            hi = seqlen[k]
            for pos in range(seqlen[k]):
                s = seq[k * maxlen + pos]
                if committed[s]:
                    if pos + 1 > lo:
                        lo = pos + 1
                elif ispend[s]:
                    if pos < hi:
                        hi = pos
            for slot in range(lo, hi + 1):
                if slot == 0:
                    base = 0.0
                    prev = nsub + k
                else:
                    s = seq[k * maxlen + slot - 1]
                    base = dep[s]
                    prev = s
                arr_p = base + dist[prev, p] / speed[k]
                w = fabs(arr_p - arr[c])
                if (not have_best) or w < best_w:
                    have_best = True
                    best_w = w
                    best_r = k
                    best_slot = slot
                    best_arr = arr_p
        if not have_best:
            J = -1.0
            break

        r_best = best_r
        for i in range(seqlen[r_best], best_slot, -1):
            seq[r_best * maxlen + i] = seq[r_best * maxlen + i - 1]
        seq[r_best * maxlen + best_slot] = p
        seqlen[r_best] += 1
        pair_start = best_arr if best_arr > arr[c] else arr[c]
        committed[c] = 1
        committed[p] = 1
        cstart[c] = pair_start
        cstart[p] = pair_start
        ispend[c] = 0
        npend -= 1
        pend_task[sel] = pend_task[npend]
        pend_carrier[sel] = pend_carrier[npend]
        pend_robot[sel] = pend_robot[npend]
        _forward(k_car, seq, seqlen, maxlen, nsub, dist, speed,
                 effdur, arr, stt, dep, cstart, committed)
        _forward(r_best, seq, seqlen, maxlen, nsub, dist, speed,
                 effdur, arr, stt, dep, cstart, committed)
    else:
        J = 0.0
        for k in range(nr):
            comp = _forward(k, seq, seqlen, maxlen, nsub, dist, speed,
                            effdur, arr, stt, dep, cstart, committed)
            if comp > J:
                J = comp

    free(seq); free(seqlen); free(arr); free(stt); free(dep)
    free(cstart); free(committed); free(ispend); free(partner)
    free(pend_task); free(pend_carrier); free(pend_robot)
    return J


cdef double _forward(int k, int *seq, int *seqlen, int maxlen, int nsub,
                     double[:, ::1] dist, double[::1] speed,
                     double[::1] effdur, double *arr, double *stt,
                     double *dep, double *cstart,
                     signed char *committed) nogil:
    cdef double t = 0.0
    cdef int prev = nsub + k
    cdef int i, s
    cdef double a
    for i in range(seqlen[k]):
        s = seq[k * maxlen + i]
        a = t + dist[prev, s] / speed[k]
        arr[s] = a
        stt[s] = cstart[s] if committed[s] else a
        t = stt[s] + effdur[s]
        dep[s] = t
        prev = s
    if seqlen[k] > 0:
        t = t + dist[prev, nsub + k] / speed[k]
    return t
