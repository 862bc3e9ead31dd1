# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled GMAB engine.

Same algorithm, same random-variate arithmetic and same stream consumption as
``_pyengine.PythonEngine``; given equal seeds both produce identical runs.
Records live in flat arrays indexed by position code. Both trees are stored
in parallel index arrays where node id ``p + 1`` belongs to position ``p`` and
id 0 is the null link (the red-black sentinel).
"""
from libc.math cimport sqrt, log, cos, sin, exp, pow, round
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import time

import numpy as np

from .core import evaluate

cdef enum:
    K_PYTHON = 0
    K_INVENTORY = 1
    K_MULTIMODAL = 2
    K_TP4 = 3
    K_QUADRATIC = 4
    K_NOISE = 5
    MAX_LEAD = 64
    MAX_RESAMPLES = 100

cdef double TWO_PI = 6.283185307179586
cdef double PI = 3.141592653589793
cdef double INV_2_53 = 1.0 / 9007199254740992.0

BACKEND = "native"


# random variates ------------------------------------------------------------

cdef bitgen_t* _bitgen(object stream) except NULL:
    return <bitgen_t*> PyCapsule_GetPointer(stream.bit_generator.capsule, "BitGenerator")


cdef inline uint64_t _raw(bitgen_t* g) noexcept nogil:
    return g.next_uint64(g.state)


cdef inline double _uniform(bitgen_t* g) noexcept nogil:
    return <double> (_raw(g) >> 11) * INV_2_53


cdef inline uint64_t _integers(bitgen_t* g, uint64_t n) noexcept nogil:
    cdef uint64_t threshold = (<uint64_t> 0 - n) % n
    cdef uint64_t r
    while True:
        r = _raw(g)
        if r >= threshold:
            return r % n


cdef inline double _normal(bitgen_t* g) noexcept nogil:
    cdef double u1 = 1.0 - _uniform(g)
    cdef double u2 = _uniform(g)
    return sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)


cdef inline int64_t _poisson(bitgen_t* g, double lam) noexcept nogil:
    cdef double u = _uniform(g)
    cdef int64_t k = 0
    cdef double p = exp(-lam)
    cdef double cdf = p
    while u > cdf:
        k += 1
        p = p * lam / <double> k
        if p <= 0.0:
            break
        cdf = cdf + p
    return k


# built-in problems -----------------------------------------------------------

cdef double _inventory(const double* prm, const int64_t* x, bitgen_t* g) noexcept nogil:
    cdef int64_t horizon = <int64_t> prm[0]
    cdef double lam = prm[1]
    cdef double fixed = prm[2]
    cdef double unit = prm[3]
    cdef double hold = prm[4]
    cdef double short = prm[5]
    cdef int lead = <int> prm[6]
    cdef int64_t s = x[0]
    cdef int64_t big_s = x[0] + x[1]
    cdef int64_t on_hand = big_s if prm[7] < 0 else <int64_t> prm[7]
    cdef int64_t pipeline[MAX_LEAD]
    cdef int64_t position, q, t
    cdef int i
    cdef double cost = 0.0
    for i in range(lead):
        pipeline[i] = 0
    for t in range(horizon):
        if lead:
            on_hand += pipeline[0]
            for i in range(lead - 1):
                pipeline[i] = pipeline[i + 1]
            pipeline[lead - 1] = 0
        position = on_hand
        for i in range(lead):
            position += pipeline[i]
        if position < s:
            q = big_s - position
            cost += fixed + unit * <double> q
            if lead:
                pipeline[lead - 1] += q
            else:
                on_hand += q
        on_hand -= _poisson(g, lam)
        if on_hand >= 0:
            cost += hold * <double> on_hand
        else:
            cost += short * <double> (-on_hand)
    return cost / <double> horizon


cdef inline double _multimodal_term(int64_t v) noexcept nogil:
    cdef double t = <double> v / 100.0
    cdef double s = sin(0.05 * PI * t)
    cdef double s2 = s * s
    cdef double u = (t - 90.0) / 50.0
    return (s2 * s2 * s2) / pow(2.0, 2.0 * (u * u))


cdef double _native_eval(int kind, const double* prm, const int64_t* x, int D, bitgen_t* g) noexcept nogil:
    cdef double total = 0.0
    cdef double a, b, noise
    cdef int d
    if kind == K_INVENTORY:
        return _inventory(prm, x, g)
    if kind == K_MULTIMODAL:
        total = -10.0 * (_multimodal_term(x[0]) + _multimodal_term(x[1]))
        noise = prm[0]
    elif kind == K_TP4:
        for d in range(D):
            a = <double> x[d] - prm[4]
            b = <double> x[d] - prm[5]
            total -= prm[0] * exp(-prm[2] * (a * a)) + prm[1] * exp(-prm[3] * (b * b))
        noise = prm[6]
    elif kind == K_QUADRATIC:
        for d in range(D):
            a = <double> x[d] - prm[2 + d]
            total += a * a
        total = prm[0] * total
        noise = prm[1]
    else:  # K_NOISE
        return prm[0] * _normal(g)
    if noise > 0.0:
        total = total + noise * _normal(g)
    return total


cdef class _Params:
    cdef double* data
    cdef int n

    def __cinit__(self, params):
        self.n = len(params)
        self.data = <double*> malloc(max(self.n, 1) * sizeof(double))
        if self.data == NULL:
            raise MemoryError()
        for i, v in enumerate(params):
            self.data[i] = float(v)

    def __dealloc__(self):
        free(self.data)


def native_simulate(int kind, params, x, stream):
    """One observation of a built-in problem (for cross-checking the Python code)."""
    cdef _Params prm = _Params(params)
    cdef int64_t buf[256]
    cdef int D = len(x)
    if kind == K_PYTHON or D > 256:
        raise ValueError("not a native problem")
    for i in range(D):
        buf[i] = x[i]
    return _native_eval(kind, prm.data, buf, D, _bitgen(stream))


def native_simulate_mean(int kind, params, x, Py_ssize_t reps, stream):
    """Mean of ``reps`` observations of a built-in problem, summed in order."""
    cdef _Params prm = _Params(params)
    cdef int64_t buf[256]
    cdef int D = len(x)
    cdef bitgen_t* g = _bitgen(stream)
    cdef double total = 0.0
    cdef Py_ssize_t i
    if kind == K_PYTHON or D > 256:
        raise ValueError("not a native problem")
    if reps < 1:
        raise ValueError("reps must be positive")
    for i in range(D):
        buf[i] = x[i]
    with nogil:
        for i in range(reps):
            total += _native_eval(kind, prm.data, buf, D, g)
    return total / <double> reps


# engine ---------------------------------------------------------------------

cdef class NativeEngine:
    cdef readonly int D
    cdef readonly int m
    cdef double p_cr
    cdef double p_mu
    cdef readonly double sign
    cdef int64_t* lo
    cdef int64_t* hi
    cdef double* sigma
    cdef readonly object problem
    cdef readonly object space
    cdef readonly object streams
    cdef bitgen_t* g_init
    cdef bitgen_t* g_pair
    cdef bitgen_t* g_cross
    cdef bitgen_t* g_mut
    cdef bitgen_t* g_tie
    cdef bitgen_t* g_noise
    cdef int kind
    cdef _Params prm
    # records
    cdef Py_ssize_t n_rec
    cdef Py_ssize_t cap
    cdef int64_t* X
    cdef int64_t* N
    cdef double* R
    cdef double* key
    cdef char* in_sat
    # lookup tree (AVL)
    cdef Py_ssize_t lroot
    cdef Py_ssize_t* lleft
    cdef Py_ssize_t* lright
    cdef int* lheight
    # sample-average tree (red-black); color 1 = red
    cdef Py_ssize_t sroot
    cdef Py_ssize_t ssize
    cdef Py_ssize_t* sleft
    cdef Py_ssize_t* sright
    cdef Py_ssize_t* sparent
    cdef char* scolor
    # per-iteration scratch
    cdef Py_ssize_t* elites
    cdef Py_ssize_t* order
    cdef Py_ssize_t* visit
    cdef Py_ssize_t n_visit
    cdef int64_t* kids
    cdef int64_t* xbuf
    cdef Py_ssize_t* pool
    cdef Py_ssize_t pool_cap
    cdef readonly Py_ssize_t k
    cdef readonly Py_ssize_t total_replications
    cdef public object log

    backend = "native"

    def __cinit__(self):
        self.lo = self.hi = NULL
        self.sigma = NULL
        self.X = self.N = NULL
        self.R = self.key = NULL
        self.in_sat = self.scolor = NULL
        self.lleft = self.lright = NULL
        self.lheight = NULL
        self.sleft = self.sright = self.sparent = NULL
        self.elites = self.order = self.visit = self.pool = NULL
        self.kids = self.xbuf = NULL

    def __init__(self, problem, params, streams, memory="tree", log=False):
        if memory != "tree":
            raise ValueError("the native engine only implements the tree memory")
        space = problem.space
        params.check_space(space)
        self.problem = problem
        self.space = space
        self.streams = streams
        self.D = space.dims
        self.m = params.m
        self.p_cr = params.p_cr
        self.p_mu = params.p_mu
        self.sign = params.direction.sign
        native = getattr(problem, "native", None)
        if native is None:
            self.kind = K_PYTHON
            self.prm = _Params(())
        else:
            self.kind = native[0]
            self.prm = _Params(native[1])
        self.g_init = _bitgen(streams.init)
        self.g_pair = _bitgen(streams.pairing)
        self.g_cross = _bitgen(streams.crossover)
        self.g_mut = _bitgen(streams.mutation)
        self.g_tie = _bitgen(streams.tie)
        self.g_noise = _bitgen(streams.noise)

        self.lo = <int64_t*> malloc(self.D * sizeof(int64_t))
        self.hi = <int64_t*> malloc(self.D * sizeof(int64_t))
        self.sigma = <double*> malloc(self.D * sizeof(double))
        self.elites = <Py_ssize_t*> malloc(self.m * sizeof(Py_ssize_t))
        self.order = <Py_ssize_t*> malloc(self.m * sizeof(Py_ssize_t))
        self.visit = <Py_ssize_t*> malloc(2 * self.m * sizeof(Py_ssize_t))
        self.kids = <int64_t*> malloc(self.m * self.D * sizeof(int64_t))
        self.xbuf = <int64_t*> malloc(self.D * sizeof(int64_t))
        self.pool_cap = 2 * self.m
        self.pool = <Py_ssize_t*> malloc(self.pool_cap * sizeof(Py_ssize_t))
        if (self.lo == NULL or self.hi == NULL or self.sigma == NULL or self.elites == NULL
                or self.order == NULL or self.visit == NULL or self.kids == NULL
                or self.xbuf == NULL or self.pool == NULL):
            raise MemoryError()
        for d in range(self.D):
            self.lo[d] = space.lower[d]
            self.hi[d] = space.upper[d]
            self.sigma[d] = 0.1 * <double> (space.upper[d] - space.lower[d])
        self.n_rec = 0
        self.cap = 0
        self.lroot = 0
        self.sroot = 0
        self.ssize = 0
        self.k = 0
        self.total_replications = 0
        self.log = [] if log else None
        self._reserve(1024)
        self.scolor[0] = 0
        self.sleft[0] = self.sright[0] = self.sparent[0] = 0

    def __dealloc__(self):
        free(self.lo)
        free(self.hi)
        free(self.sigma)
        free(self.X)
        free(self.N)
        free(self.R)
        free(self.key)
        free(self.in_sat)
        free(self.lleft)
        free(self.lright)
        free(self.lheight)
        free(self.sleft)
        free(self.sright)
        free(self.sparent)
        free(self.scolor)
        free(self.elites)
        free(self.order)
        free(self.visit)
        free(self.kids)
        free(self.xbuf)
        free(self.pool)

    cdef int _reserve(self, Py_ssize_t need) except -1:
        cdef Py_ssize_t cap
        if need <= self.cap:
            return 0
        cap = max(need, 2 * self.cap)
        self.X = <int64_t*> _grow(self.X, cap * self.D * sizeof(int64_t))
        self.N = <int64_t*> _grow(self.N, cap * sizeof(int64_t))
        self.R = <double*> _grow(self.R, cap * sizeof(double))
        self.key = <double*> _grow(self.key, cap * sizeof(double))
        self.in_sat = <char*> _grow(self.in_sat, cap * sizeof(char))
        self.lleft = <Py_ssize_t*> _grow(self.lleft, (cap + 1) * sizeof(Py_ssize_t))
        self.lright = <Py_ssize_t*> _grow(self.lright, (cap + 1) * sizeof(Py_ssize_t))
        self.lheight = <int*> _grow(self.lheight, (cap + 1) * sizeof(int))
        self.sleft = <Py_ssize_t*> _grow(self.sleft, (cap + 1) * sizeof(Py_ssize_t))
        self.sright = <Py_ssize_t*> _grow(self.sright, (cap + 1) * sizeof(Py_ssize_t))
        self.sparent = <Py_ssize_t*> _grow(self.sparent, (cap + 1) * sizeof(Py_ssize_t))
        self.scolor = <char*> _grow(self.scolor, (cap + 1) * sizeof(char))
        self.cap = cap
        return 0

    # lookup tree -------------------------------------------------------------

    cdef inline int _cmp(self, const int64_t* a, const int64_t* b) noexcept nogil:
        cdef int d
        for d in range(self.D):
            if a[d] < b[d]:
                return -1
            if a[d] > b[d]:
                return 1
        return 0

    cdef inline int _lh(self, Py_ssize_t node) noexcept nogil:
        return self.lheight[node] if node else 0

    cdef inline void _lupdate(self, Py_ssize_t node) noexcept nogil:
        cdef int a = self._lh(self.lleft[node])
        cdef int b = self._lh(self.lright[node])
        self.lheight[node] = 1 + (a if a > b else b)

    cdef Py_ssize_t _lrot_right(self, Py_ssize_t y) noexcept nogil:
        cdef Py_ssize_t x = self.lleft[y]
        self.lleft[y] = self.lright[x]
        self.lright[x] = y
        self._lupdate(y)
        self._lupdate(x)
        return x

    cdef Py_ssize_t _lrot_left(self, Py_ssize_t x) noexcept nogil:
        cdef Py_ssize_t y = self.lright[x]
        self.lright[x] = self.lleft[y]
        self.lleft[y] = x
        self._lupdate(x)
        self._lupdate(y)
        return y

    cdef Py_ssize_t _lrebalance(self, Py_ssize_t node) noexcept nogil:
        cdef int balance
        self._lupdate(node)
        balance = self._lh(self.lleft[node]) - self._lh(self.lright[node])
        if balance > 1:
            if self._lh(self.lleft[self.lleft[node]]) < self._lh(self.lright[self.lleft[node]]):
                self.lleft[node] = self._lrot_left(self.lleft[node])
            return self._lrot_right(node)
        if balance < -1:
            if self._lh(self.lright[self.lright[node]]) < self._lh(self.lleft[self.lright[node]]):
                self.lright[node] = self._lrot_right(self.lright[node])
            return self._lrot_left(node)
        return node

    cdef Py_ssize_t _linsert(self, Py_ssize_t node, Py_ssize_t nid) noexcept nogil:
        if node == 0:
            return nid
        if self._cmp(self.X + (nid - 1) * self.D, self.X + (node - 1) * self.D) < 0:
            self.lleft[node] = self._linsert(self.lleft[node], nid)
        else:
            self.lright[node] = self._linsert(self.lright[node], nid)
        return self._lrebalance(node)

    cdef Py_ssize_t _lookup_or_insert(self, const int64_t* x, bint* is_new) except -1:
        cdef Py_ssize_t node = self.lroot
        cdef Py_ssize_t p, nid
        cdef int c
        while node:
            c = self._cmp(x, self.X + (node - 1) * self.D)
            if c < 0:
                node = self.lleft[node]
            elif c > 0:
                node = self.lright[node]
            else:
                is_new[0] = False
                return node - 1
        self._reserve(self.n_rec + 1)
        p = self.n_rec
        memcpy(self.X + p * self.D, x, self.D * sizeof(int64_t))
        self.N[p] = 0
        self.R[p] = 0.0
        self.in_sat[p] = 0
        self.n_rec += 1
        nid = p + 1
        self.lleft[nid] = 0
        self.lright[nid] = 0
        self.lheight[nid] = 1
        self.lroot = self._linsert(self.lroot, nid)
        is_new[0] = True
        return p

    # sample-average tree -----------------------------------------------------

    cdef inline bint _less(self, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
        cdef double ka = self.key[a - 1]
        cdef double kb = self.key[b - 1]
        return ka < kb or (ka == kb and a < b)

    cdef void _srot_left(self, Py_ssize_t x) noexcept nogil:
        cdef Py_ssize_t y = self.sright[x]
        self.sright[x] = self.sleft[y]
        if self.sleft[y]:
            self.sparent[self.sleft[y]] = x
        self.sparent[y] = self.sparent[x]
        if self.sparent[x] == 0:
            self.sroot = y
        elif x == self.sleft[self.sparent[x]]:
            self.sleft[self.sparent[x]] = y
        else:
            self.sright[self.sparent[x]] = y
        self.sleft[y] = x
        self.sparent[x] = y

    cdef void _srot_right(self, Py_ssize_t x) noexcept nogil:
        cdef Py_ssize_t y = self.sleft[x]
        self.sleft[x] = self.sright[y]
        if self.sright[y]:
            self.sparent[self.sright[y]] = x
        self.sparent[y] = self.sparent[x]
        if self.sparent[x] == 0:
            self.sroot = y
        elif x == self.sright[self.sparent[x]]:
            self.sright[self.sparent[x]] = y
        else:
            self.sleft[self.sparent[x]] = y
        self.sright[y] = x
        self.sparent[x] = y

    cdef void _sinsert(self, Py_ssize_t z) noexcept nogil:
        cdef Py_ssize_t y = 0
        cdef Py_ssize_t x = self.sroot
        cdef Py_ssize_t gp, u
        while x:
            y = x
            x = self.sleft[x] if self._less(z, x) else self.sright[x]
        self.sparent[z] = y
        if y == 0:
            self.sroot = z
        elif self._less(z, y):
            self.sleft[y] = z
        else:
            self.sright[y] = z
        self.sleft[z] = 0
        self.sright[z] = 0
        self.scolor[z] = 1
        while self.scolor[self.sparent[z]] == 1:
            gp = self.sparent[self.sparent[z]]
            if self.sparent[z] == self.sleft[gp]:
                u = self.sright[gp]
                if self.scolor[u] == 1:
                    self.scolor[self.sparent[z]] = 0
                    self.scolor[u] = 0
                    self.scolor[gp] = 1
                    z = gp
                else:
                    if z == self.sright[self.sparent[z]]:
                        z = self.sparent[z]
                        self._srot_left(z)
                    self.scolor[self.sparent[z]] = 0
                    self.scolor[self.sparent[self.sparent[z]]] = 1
                    self._srot_right(self.sparent[self.sparent[z]])
            else:
                u = self.sleft[gp]
                if self.scolor[u] == 1:
                    self.scolor[self.sparent[z]] = 0
                    self.scolor[u] = 0
                    self.scolor[gp] = 1
                    z = gp
                else:
                    if z == self.sleft[self.sparent[z]]:
                        z = self.sparent[z]
                        self._srot_right(z)
                    self.scolor[self.sparent[z]] = 0
                    self.scolor[self.sparent[self.sparent[z]]] = 1
                    self._srot_left(self.sparent[self.sparent[z]])
        self.scolor[self.sroot] = 0
        self.ssize += 1

    cdef void _stransplant(self, Py_ssize_t u, Py_ssize_t v) noexcept nogil:
        if self.sparent[u] == 0:
            self.sroot = v
        elif u == self.sleft[self.sparent[u]]:
            self.sleft[self.sparent[u]] = v
        else:
            self.sright[self.sparent[u]] = v
        self.sparent[v] = self.sparent[u]

    cdef inline Py_ssize_t _smin(self, Py_ssize_t x) noexcept nogil:
        while self.sleft[x]:
            x = self.sleft[x]
        return x

    cdef inline Py_ssize_t _ssucc(self, Py_ssize_t x) noexcept nogil:
        cdef Py_ssize_t y
        if self.sright[x]:
            return self._smin(self.sright[x])
        y = self.sparent[x]
        while y and x == self.sright[y]:
            x = y
            y = self.sparent[y]
        return y

    cdef void _sdelete(self, Py_ssize_t z) noexcept nogil:
        cdef Py_ssize_t y = z
        cdef Py_ssize_t x, w
        cdef char y_color = self.scolor[y]
        if self.sleft[z] == 0:
            x = self.sright[z]
            self._stransplant(z, self.sright[z])
        elif self.sright[z] == 0:
            x = self.sleft[z]
            self._stransplant(z, self.sleft[z])
        else:
            y = self._smin(self.sright[z])
            y_color = self.scolor[y]
            x = self.sright[y]
            if self.sparent[y] == z:
                self.sparent[x] = y
            else:
                self._stransplant(y, self.sright[y])
                self.sright[y] = self.sright[z]
                self.sparent[self.sright[y]] = y
            self._stransplant(z, y)
            self.sleft[y] = self.sleft[z]
            self.sparent[self.sleft[y]] = y
            self.scolor[y] = self.scolor[z]
        if y_color == 0:
            while x != self.sroot and self.scolor[x] == 0:
                if x == self.sleft[self.sparent[x]]:
                    w = self.sright[self.sparent[x]]
                    if self.scolor[w] == 1:
                        self.scolor[w] = 0
                        self.scolor[self.sparent[x]] = 1
                        self._srot_left(self.sparent[x])
                        w = self.sright[self.sparent[x]]
                    if self.scolor[self.sleft[w]] == 0 and self.scolor[self.sright[w]] == 0:
                        self.scolor[w] = 1
                        x = self.sparent[x]
                    else:
                        if self.scolor[self.sright[w]] == 0:
                            self.scolor[self.sleft[w]] = 0
                            self.scolor[w] = 1
                            self._srot_right(w)
                            w = self.sright[self.sparent[x]]
                        self.scolor[w] = self.scolor[self.sparent[x]]
                        self.scolor[self.sparent[x]] = 0
                        self.scolor[self.sright[w]] = 0
                        self._srot_left(self.sparent[x])
                        x = self.sroot
                else:
                    w = self.sleft[self.sparent[x]]
                    if self.scolor[w] == 1:
                        self.scolor[w] = 0
                        self.scolor[self.sparent[x]] = 1
                        self._srot_right(self.sparent[x])
                        w = self.sleft[self.sparent[x]]
                    if self.scolor[self.sright[w]] == 0 and self.scolor[self.sleft[w]] == 0:
                        self.scolor[w] = 1
                        x = self.sparent[x]
                    else:
                        if self.scolor[self.sleft[w]] == 0:
                            self.scolor[self.sright[w]] = 0
                            self.scolor[w] = 1
                            self._srot_left(w)
                            w = self.sleft[self.sparent[x]]
                        self.scolor[w] = self.scolor[self.sparent[x]]
                        self.scolor[self.sparent[x]] = 0
                        self.scolor[self.sleft[w]] = 0
                        self._srot_right(self.sparent[x])
                        x = self.sroot
            self.scolor[x] = 0
        # the sentinel may have been recoloured or re-parented above
        self.scolor[0] = 0
        self.sparent[0] = 0
        self.ssize -= 1

    # algorithm ----------------------------------------------------------------

    cdef int _observe(self, Py_ssize_t p) except -1:
        cdef double value
        cdef Py_ssize_t nid = p + 1
        if self.kind == K_PYTHON:
            x = tuple([self.X[p * self.D + d] for d in range(self.D)])
            value = evaluate(self.problem, x, self.streams.noise, self.sign)
        else:
            value = self.sign * _native_eval(self.kind, self.prm.data, self.X + p * self.D, self.D, self.g_noise)
        self.N[p] += 1
        self.R[p] += value
        if self.in_sat[p]:
            self._sdelete(nid)
        self.key[p] = self.R[p] / <double> self.N[p]
        self._sinsert(nid)
        self.in_sat[p] = 1
        self.total_replications += 1
        return 0

    def initialize(self):
        cdef Py_ssize_t created = 0
        cdef Py_ssize_t p, i
        cdef bint is_new
        cdef int d
        if self.k:
            raise RuntimeError("engine already initialized")
        while created < self.m:
            for d in range(self.D):
                self.xbuf[d] = self.lo[d] + <int64_t> _integers(self.g_init, <uint64_t> (self.hi[d] - self.lo[d] + 1))
            p = self._lookup_or_insert(self.xbuf, &is_new)
            if is_new:
                created += 1
        # positions 0..m-1 are exactly the created solutions
        for i in range(self.m):
            self._observe(i)
        self.k = 1

    cdef int _extract_best_m(self) except -1:
        cdef Py_ssize_t m = self.m
        cdef Py_ssize_t node, i, j, tmp, n_strict, n_pool, slots
        cdef double boundary
        if self.ssize < m:
            raise ValueError(f"only {self.ssize} solutions available, need {m}")
        node = self._smin(self.sroot)
        for i in range(m):
            self.elites[i] = node - 1
            node = self._ssucc(node)
        boundary = self.key[self.elites[m - 1]]
        if node and self.key[node - 1] == boundary:
            n_strict = 0
            while self.key[self.elites[n_strict]] < boundary:
                n_strict += 1
            n_pool = 0
            for i in range(n_strict, m):
                self._pool_push(self.elites[i], n_pool)
                n_pool += 1
            while node and self.key[node - 1] == boundary:
                self._pool_push(node - 1, n_pool)
                n_pool += 1
                node = self._ssucc(node)
            slots = m - n_strict
            for i in range(slots):
                j = i + <Py_ssize_t> _integers(self.g_tie, <uint64_t> (n_pool - i))
                tmp = self.pool[i]
                self.pool[i] = self.pool[j]
                self.pool[j] = tmp
            _sort_positions(self.pool, slots)
            for i in range(slots):
                self.elites[n_strict + i] = self.pool[i]
        for i in range(m):
            self._sdelete(self.elites[i] + 1)
            self.in_sat[self.elites[i]] = 0
        return 0

    cdef int _pool_push(self, Py_ssize_t p, Py_ssize_t at) except -1:
        if at >= self.pool_cap:
            self.pool_cap *= 2
            self.pool = <Py_ssize_t*> _grow(self.pool, self.pool_cap * sizeof(Py_ssize_t))
        self.pool[at] = p
        return 0

    cdef int64_t _mutate_component(self, int64_t value, int d) noexcept nogil:
        cdef int r
        cdef int64_t cand
        for r in range(MAX_RESAMPLES):
            cand = <int64_t> round(<double> value + self.sigma[d] * _normal(self.g_mut))
            if self.lo[d] <= cand <= self.hi[d]:
                return cand
        return self.lo[d] + <int64_t> _integers(self.g_mut, <uint64_t> (self.hi[d] - self.lo[d] + 1))

    def iterate(self):
        cdef Py_ssize_t m = self.m
        cdef int D = self.D
        cdef Py_ssize_t i, j, tmp, p, a, b, n_visit
        cdef int64_t t
        cdef int d, g
        cdef int64_t* child
        cdef bint is_new, dup
        if not self.k:
            raise RuntimeError("initialize() must run first")
        self._extract_best_m()

        # pairing and crossover
        for i in range(m):
            self.order[i] = self.elites[i]
        for i in range(m - 1, 0, -1):
            j = <Py_ssize_t> _integers(self.g_pair, <uint64_t> (i + 1))
            tmp = self.order[i]
            self.order[i] = self.order[j]
            self.order[j] = tmp
        for i in range(0, m, 2):
            a = self.order[i]
            b = self.order[i + 1]
            memcpy(self.kids + i * D, self.X + a * D, D * sizeof(int64_t))
            memcpy(self.kids + (i + 1) * D, self.X + b * D, D * sizeof(int64_t))
            if _uniform(self.g_cross) < self.p_cr and D >= 2:
                g = 1 + <int> _integers(self.g_cross, <uint64_t> (D - 1))
                for d in range(g, D):
                    t = self.kids[i * D + d]
                    self.kids[i * D + d] = self.kids[(i + 1) * D + d]
                    self.kids[(i + 1) * D + d] = t

        # mutation, then register distinct offspring
        for i in range(m):
            self.visit[i] = self.elites[i]
        n_visit = m
        for i in range(m):
            child = self.kids + i * D
            for d in range(D):
                if _uniform(self.g_mut) < self.p_mu:
                    child[d] = self._mutate_component(child[d], d)
            dup = False
            for j in range(i):
                if self._cmp(child, self.kids + j * D) == 0:
                    dup = True
                    break
            if dup:
                continue
            p = self._lookup_or_insert(child, &is_new)
            self.visit[n_visit] = p
            n_visit += 1

        _sort_positions(self.visit, n_visit)
        j = 0
        for i in range(n_visit):
            if i == 0 or self.visit[i] != self.visit[i - 1]:
                self.visit[j] = self.visit[i]
                j += 1
        self.n_visit = j
        for i in range(self.n_visit):
            self._observe(self.visit[i])
        if self.log is not None:
            self.log.append((tuple([self.elites[i] for i in range(m)]),
                             tuple([self.visit[i] for i in range(self.n_visit)])))
        self.k += 1

    def advance(self, max_replications=None, max_iterations=None, deadline=None):
        """Iterate until any given limit is reached (a started iteration always completes)."""
        cdef Py_ssize_t max_reps = -1 if max_replications is None else max_replications
        cdef Py_ssize_t max_iters = -1 if max_iterations is None else max_iterations
        monotonic = time.monotonic
        while True:
            if max_reps >= 0 and self.total_replications >= max_reps:
                return
            if max_iters >= 0 and self.k - 1 >= max_iters:
                return
            if deadline is not None and monotonic() >= deadline:
                return
            self.iterate()

    # inspection --------------------------------------------------------------

    @property
    def iterations(self):
        return max(self.k - 1, 0)

    @property
    def size(self):
        return self.n_rec

    def counts(self):
        out = np.empty(self.n_rec, dtype=np.int64)
        cdef int64_t[::1] view = out
        cdef Py_ssize_t i
        for i in range(self.n_rec):
            view[i] = self.N[i]
        return out

    def sums(self):
        out = np.empty(self.n_rec, dtype=np.float64)
        cdef double[::1] view = out
        cdef Py_ssize_t i
        for i in range(self.n_rec):
            view[i] = self.R[i]
        return out

    def coords(self):
        out = np.empty((self.n_rec, self.D), dtype=np.int64)
        cdef int64_t[:, ::1] view = out
        cdef Py_ssize_t i
        cdef int d
        for i in range(self.n_rec):
            for d in range(self.D):
                view[i, d] = self.X[i * self.D + d]
        return out

    def solution(self, Py_ssize_t p):
        if not 0 <= p < self.n_rec:
            raise IndexError(p)
        return tuple([self.X[p * self.D + d] for d in range(self.D)])

    def sat_positions(self):
        out = []
        cdef Py_ssize_t node = self._smin(self.sroot) if self.sroot else 0
        while node:
            out.append(node - 1)
            node = self._ssucc(node)
        return out

    def audit(self):
        """Raise AssertionError unless both trees satisfy their structural invariants."""
        count = self._audit_avl(self.lroot, -1, -1)
        assert count == self.n_rec, f"lookup tree holds {count} of {self.n_rec} records"
        assert self.scolor[0] == 0, "sentinel must be black"
        if self.sroot:
            assert self.scolor[self.sroot] == 0, "root must be black"
            assert self.sparent[self.sroot] == 0, "root has a parent"
        nodes = [0]
        self._audit_rb(self.sroot, -1, -1, nodes)
        assert nodes[0] == self.ssize, "red-black size mismatch"
        in_sat = 0
        for p in range(self.n_rec):
            if self.in_sat[p]:
                in_sat += 1
                assert self.key[p] == self.R[p] / <double> self.N[p], "SAT key out of date"
        assert in_sat == self.ssize

    def _audit_avl(self, Py_ssize_t node, Py_ssize_t lo, Py_ssize_t hi):
        if node == 0:
            return 0
        if lo >= 0:
            assert self._cmp(self.X + (node - 1) * self.D, self.X + (lo - 1) * self.D) > 0, "BST order violated"
        if hi >= 0:
            assert self._cmp(self.X + (node - 1) * self.D, self.X + (hi - 1) * self.D) < 0, "BST order violated"
        n = self._audit_avl(self.lleft[node], lo, node) + self._audit_avl(self.lright[node], node, hi) + 1
        lh = self._lh(self.lleft[node])
        rh = self._lh(self.lright[node])
        assert self.lheight[node] == 1 + max(lh, rh), "stale height"
        assert abs(lh - rh) <= 1, "AVL balance violated"
        return n

    def _audit_rb(self, Py_ssize_t node, Py_ssize_t lo, Py_ssize_t hi, list nodes):
        if node == 0:
            return 1
        nodes[0] += 1
        if lo >= 0:
            assert self._less(lo, node), "BST order violated"
        if hi >= 0:
            assert self._less(node, hi), "BST order violated"
        for child in (self.sleft[node], self.sright[node]):
            if child:
                assert self.sparent[child] == node, "broken parent link"
        if self.scolor[node] == 1:
            assert self.scolor[self.sleft[node]] == 0 and self.scolor[self.sright[node]] == 0, "red node with red child"
        lh = self._audit_rb(self.sleft[node], lo, node, nodes)
        rh = self._audit_rb(self.sright[node], node, hi, nodes)
        assert lh == rh, "unequal black heights"
        return lh + (1 if self.scolor[node] == 0 else 0)


cdef void* _grow(void* ptr, size_t nbytes) except NULL:
    cdef void* out = realloc(ptr, nbytes)
    if out == NULL:
        raise MemoryError()
    return out


cdef void _sort_positions(Py_ssize_t* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v
