# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled CDCL core; behaviourally identical to ``_core_py``."""

from libcpp.vector cimport vector
from libcpp.algorithm cimport sort as cpp_sort
from libc.stdint cimport uint64_t

cdef extern from *:
    """
    #include <algorithm>
    struct ReduceKey {
        int bin; double act; int cref;
        bool operator<(const ReduceKey& o) const {
            if (bin != o.bin) return bin < o.bin;
            if (act != o.act) return act < o.act;
            return cref < o.cref;
        }
    };
    """
    cdef cppclass ReduceKey:
        int bin
        double act
        int cref
        bint operator<(const ReduceKey&)

DEF C_UNDEF = 0
DEF C_TRUE = 1
DEF C_FALSE = -1

SAT = 10
UNSAT = 20
UNKNOWN = 0

cdef double VAR_DECAY = 0.95
cdef double CLA_DECAY = 0.999
cdef int RESTART_FIRST = 100
cdef double RESTART_INC = 1.5
cdef double LEARNTSIZE_FACTOR = 1.0 / 3.0
cdef double LEARNTSIZE_INC = 1.1


cdef class Core:
    cdef public int nvars
    cdef uint64_t rng
    cdef long long seed
    cdef public bint ok
    cdef vector[signed char] vals
    cdef vector[vector[int]] watches
    cdef vector[int] level
    cdef vector[int] reason
    cdef vector[double] activity
    cdef vector[int] polarity
    cdef vector[char] seen
    cdef vector[int] heap
    cdef vector[int] heap_idx
    cdef vector[int] lits
    cdef vector[int] cl_start
    cdef vector[int] cl_size
    cdef vector[char] cl_learnt
    cdef vector[double] cl_act
    cdef vector[char] cl_dead
    cdef long long n_original
    cdef vector[int] learnts
    cdef vector[int] trail
    cdef vector[int] trail_lim
    cdef int qhead
    cdef double var_inc
    cdef double cla_inc
    cdef double max_learnts
    cdef long long conflicts
    cdef long long decisions
    cdef long long propagations
    cdef long long restarts
    cdef public list model
    cdef public list conflict
    cdef vector[int] _learnt
    cdef vector[int] _out

    def __init__(self, seed=0):
        self.nvars = 0
        self.seed = seed
        self.rng = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
        self.ok = True
        self.n_original = 0
        self.qhead = 0
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.max_learnts = 0.0
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.restarts = 0
        self.model = []
        self.conflict = []

    # -- variables ---------------------------------------------------------
    cdef uint64_t _rand(self):
        cdef uint64_t x = self.rng
        x ^= x << 13
        x ^= x >> 7
        x ^= x << 17
        self.rng = x
        return x

    def new_var(self):
        cdef int v = self.nvars
        cdef double act = 0.0
        self.nvars += 1
        self.vals.push_back(C_UNDEF)
        self.vals.push_back(C_UNDEF)
        self.watches.push_back(vector[int]())
        self.watches.push_back(vector[int]())
        self.level.push_back(0)
        self.reason.push_back(-1)
        if self.seed:
            act = <double>(self._rand() % 1000) * 1e-5
        self.activity.push_back(act)
        self.polarity.push_back(1)
        self.seen.push_back(0)
        self.heap_idx.push_back(-1)
        self._heap_insert(v)
        return v

    # -- heap --------------------------------------------------------------
    cdef inline bint _lt(self, int a, int b):
        cdef double aa = self.activity[a]
        cdef double bb = self.activity[b]
        return aa > bb or (aa == bb and a < b)

    cdef void _heap_up(self, int i):
        cdef int v = self.heap[i]
        cdef int p
        while i > 0:
            p = (i - 1) >> 1
            if not self._lt(v, self.heap[p]):
                break
            self.heap[i] = self.heap[p]
            self.heap_idx[self.heap[i]] = i
            i = p
        self.heap[i] = v
        self.heap_idx[v] = i

    cdef void _heap_down(self, int i):
        cdef int v = self.heap[i]
        cdef int n = <int>self.heap.size()
        cdef int c
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and self._lt(self.heap[c + 1], self.heap[c]):
                c += 1
            if not self._lt(self.heap[c], v):
                break
            self.heap[i] = self.heap[c]
            self.heap_idx[self.heap[i]] = i
            i = c
        self.heap[i] = v
        self.heap_idx[v] = i

    cdef void _heap_insert(self, int v):
        if self.heap_idx[v] >= 0:
            return
        self.heap.push_back(v)
        self.heap_idx[v] = <int>self.heap.size() - 1
        self._heap_up(<int>self.heap.size() - 1)

    cdef int _heap_pop(self):
        cdef int v = self.heap[0]
        cdef int last = self.heap.back()
        self.heap.pop_back()
        self.heap_idx[v] = -1
        if self.heap.size() > 0:
            self.heap[0] = last
            self.heap_idx[last] = 0
            self._heap_down(0)
        return v

    # -- clauses -----------------------------------------------------------
    cdef int _alloc(self, vector[int]& c, bint learnt):
        cdef int cref = <int>self.cl_start.size()
        cdef size_t i
        self.cl_start.push_back(<int>self.lits.size())
        self.cl_size.push_back(<int>c.size())
        for i in range(c.size()):
            self.lits.push_back(c[i])
        self.cl_learnt.push_back(learnt)
        self.cl_act.push_back(0.0)
        self.cl_dead.push_back(0)
        self.watches[c[0] ^ 1].push_back(cref)
        self.watches[c[1] ^ 1].push_back(cref)
        return cref

    cdef bint _add(self, vector[int]& c):
        cdef vector[int] out
        cdef size_t i
        cdef int p, prev = -1
        if not self.ok:
            return False
        cpp_sort(c.begin(), c.end())
        for i in range(c.size()):
            p = c[i]
            if p == prev:
                continue
            if (prev >= 0 and (p ^ 1) == prev) or self.vals[p] == C_TRUE:
                return True
            prev = p
            if self.vals[p] == C_FALSE:
                continue
            out.push_back(p)
        if out.size() == 0:
            self.ok = False
            return False
        if out.size() == 1:
            self._enqueue(out[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return self.ok
        self._alloc(out, False)
        self.n_original += 1
        return True

    def add_clause(self, list lits):
        cdef vector[int] c
        for p in lits:
            c.push_back(<int>p)
        return self._add(c)

    def add_dimacs(self, list flat):
        """Add zero-terminated DIMACS-literal clauses in one call."""
        cdef vector[int] c
        cdef int lit
        cdef bint ok = self.ok
        for x in flat:
            lit = <int>x
            if lit == 0:
                ok = self._add(c)
                c.clear()
            elif lit > 0:
                c.push_back(2 * (lit - 1))
            else:
                c.push_back(2 * (-lit - 1) + 1)
        return ok

    # -- assignment --------------------------------------------------------
    cdef inline void _enqueue(self, int p, int reason):
        cdef int v = p >> 1
        self.vals[p] = C_TRUE
        self.vals[p ^ 1] = C_FALSE
        self.level[v] = <int>self.trail_lim.size()
        self.reason[v] = reason
        self.trail.push_back(p)

    cdef void _cancel_until(self, int lvl):
        cdef int i, p, v, stop
        if <int>self.trail_lim.size() <= lvl:
            return
        stop = self.trail_lim[lvl]
        i = <int>self.trail.size() - 1
        while i >= stop:
            p = self.trail[i]
            v = p >> 1
            self.vals[p] = C_UNDEF
            self.vals[p ^ 1] = C_UNDEF
            self.reason[v] = -1
            self.polarity[v] = p & 1
            self._heap_insert(v)
            i -= 1
        self.trail.resize(stop)
        self.trail_lim.resize(lvl)
        self.qhead = <int>self.trail.size()

    cdef int _propagate(self):
        cdef int confl = -1
        cdef int p, false_lit, cref, first, q, kk, st, sz, tmp
        cdef size_t i, j, n
        cdef bint found
        cdef vector[int]* ws
        cdef int* c
        while self.qhead < <int>self.trail.size():
            p = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = &self.watches[p]
            i = 0
            j = 0
            n = ws.size()
            while i < n:
                cref = ws[0][i]
                i += 1
                if self.cl_dead[cref]:
                    continue
                st = self.cl_start[cref]
                sz = self.cl_size[cref]
                c = &self.lits[st]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if self.vals[first] == C_TRUE:
                    ws[0][j] = cref
                    j += 1
                    continue
                found = False
                for kk in range(2, sz):
                    q = c[kk]
                    if self.vals[q] != C_FALSE:
                        c[1] = q
                        c[kk] = false_lit
                        self.watches[q ^ 1].push_back(cref)
                        # push_back on another list may not move ws: watches itself is not resized here
                        found = True
                        break
                if found:
                    continue
                ws[0][j] = cref
                j += 1
                if self.vals[first] == C_FALSE:
                    confl = cref
                    self.qhead = <int>self.trail.size()
                    while i < n:
                        ws[0][j] = ws[0][i]
                        j += 1
                        i += 1
                else:
                    self._enqueue(first, cref)
            ws.resize(j)
            if confl >= 0:
                break
        return confl

    # -- conflict analysis -------------------------------------------------
    cdef void _bump_var(self, int v):
        cdef int x
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for x in range(self.nvars):
                self.activity[x] *= 1e-100
            self.var_inc *= 1e-100
        if self.heap_idx[v] >= 0:
            self._heap_up(self.heap_idx[v])

    cdef void _bump_clause(self, int cref):
        cdef size_t i
        self.cl_act[cref] += self.cla_inc
        if self.cl_act[cref] > 1e20:
            for i in range(self.learnts.size()):
                self.cl_act[self.learnts[i]] *= 1e-20
            self.cla_inc *= 1e-20

    cdef int _analyze(self, int confl):
        """Fills self._learnt; returns the backtrack level."""
        cdef int cur = <int>self.trail_lim.size()
        cdef int pathc = 0
        cdef int p = -1
        cdef int idx = <int>self.trail.size() - 1
        cdef int kk, q, v, st, sz, start, r, x, w, mi, bt, tmp
        cdef size_t a
        cdef bint keep_it
        cdef vector[int] keep
        self._learnt.clear()
        self._learnt.push_back(0)
        while True:
            if self.cl_learnt[confl]:
                self._bump_clause(confl)
            st = self.cl_start[confl]
            sz = self.cl_size[confl]
            start = 0 if p == -1 else 1
            for kk in range(start, sz):
                q = self.lits[st + kk]
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self._bump_var(v)
                    self.seen[v] = 1
                    if self.level[v] >= cur:
                        pathc += 1
                    else:
                        self._learnt.push_back(q)
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            self.seen[p >> 1] = 0
            pathc -= 1
            if pathc <= 0:
                break
        self._learnt[0] = p ^ 1
        keep.push_back(self._learnt[0])
        for a in range(1, self._learnt.size()):
            q = self._learnt[a]
            r = self.reason[q >> 1]
            if r < 0:
                keep.push_back(q)
                continue
            st = self.cl_start[r]
            sz = self.cl_size[r]
            for x in range(1, sz):
                w = self.lits[st + x] >> 1
                if not self.seen[w] and self.level[w] > 0:
                    keep.push_back(q)
                    break
        for a in range(self._learnt.size()):
            self.seen[self._learnt[a] >> 1] = 0
        self._learnt = keep
        if self._learnt.size() == 1:
            bt = 0
        else:
            mi = 1
            for a in range(2, self._learnt.size()):
                if self.level[self._learnt[a] >> 1] > self.level[self._learnt[mi] >> 1]:
                    mi = <int>a
            tmp = self._learnt[1]
            self._learnt[1] = self._learnt[mi]
            self._learnt[mi] = tmp
            bt = self.level[self._learnt[1] >> 1]
        return bt

    cdef void _analyze_final(self, int p):
        cdef int i, q, v, r, st, sz, kk
        self._out.clear()
        self._out.push_back(p)
        if self.trail_lim.size() == 0:
            return
        self.seen[p >> 1] = 1
        i = <int>self.trail.size() - 1
        while i >= self.trail_lim[0]:
            q = self.trail[i]
            v = q >> 1
            if self.seen[v]:
                r = self.reason[v]
                if r < 0:
                    if self.level[v] > 0:
                        self._out.push_back(q ^ 1)
                else:
                    st = self.cl_start[r]
                    sz = self.cl_size[r]
                    for kk in range(1, sz):
                        if self.level[self.lits[st + kk] >> 1] > 0:
                            self.seen[self.lits[st + kk] >> 1] = 1
                self.seen[v] = 0
            i -= 1
        self.seen[p >> 1] = 0

    # -- learnt clause database -------------------------------------------
    cdef bint _locked(self, int cref):
        cdef int c0 = self.lits[self.cl_start[cref]]
        return self.vals[c0] == C_TRUE and self.reason[c0 >> 1] == cref

    cdef void _reduce_db(self):
        cdef vector[ReduceKey] order
        cdef ReduceKey key
        cdef size_t i, half
        cdef int c
        cdef double extra
        cdef vector[int] keep
        for i in range(self.learnts.size()):
            c = self.learnts[i]
            key.bin = 1 if self.cl_size[c] == 2 else 0
            key.act = self.cl_act[c]
            key.cref = c
            order.push_back(key)
        cpp_sort(order.begin(), order.end())
        extra = self.cla_inc / (order.size() if order.size() > 0 else 1)
        half = order.size() // 2
        for i in range(order.size()):
            c = order[i].cref
            if self.cl_size[c] > 2 and not self._locked(c) and (i < half or self.cl_act[c] < extra):
                self.cl_dead[c] = 1
            else:
                keep.push_back(c)
        cpp_sort(keep.begin(), keep.end())
        self.learnts = keep

    # -- search ------------------------------------------------------------
    cdef int _pick_branch(self):
        cdef int v
        while self.heap.size() > 0:
            v = self._heap_pop()
            if self.vals[2 * v] == C_UNDEF:
                return 2 * v + self.polarity[v]
        return -1

    cdef int _search(self, long long nof_conflicts, vector[int]& assumptions, long long budget_left):
        cdef long long conflict_c = 0
        cdef int confl, bt, cref, p, nxt
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflict_c += 1
                if self.trail_lim.size() == 0:
                    self.ok = False
                    return 20
                bt = self._analyze(confl)
                self._cancel_until(bt)
                if self._learnt.size() == 1:
                    self._enqueue(self._learnt[0], -1)
                else:
                    cref = self._alloc(self._learnt, True)
                    self.learnts.push_back(cref)
                    self._bump_clause(cref)
                    self._enqueue(self._learnt[0], cref)
                self.var_inc /= VAR_DECAY
                self.cla_inc /= CLA_DECAY
                if budget_left >= 0 and conflict_c >= budget_left:
                    self._cancel_until(0)
                    return 0
            else:
                if conflict_c >= nof_conflicts or (budget_left >= 0 and conflict_c >= budget_left):
                    self._cancel_until(0)
                    return 0
                if <double>(<long long>self.learnts.size() - <long long>self.trail.size()) >= self.max_learnts:
                    self._reduce_db()
                nxt = -1
                while self.trail_lim.size() < assumptions.size():
                    p = assumptions[self.trail_lim.size()]
                    if self.vals[p] == C_TRUE:
                        self.trail_lim.push_back(<int>self.trail.size())
                    elif self.vals[p] == C_FALSE:
                        self._analyze_final(p ^ 1)
                        self.conflict = [self._out[i] for i in range(self._out.size())]
                        return 20
                    else:
                        nxt = p
                        break
                if nxt < 0:
                    self.decisions += 1
                    nxt = self._pick_branch()
                    if nxt < 0:
                        return 10
                self.trail_lim.push_back(<int>self.trail.size())
                self._enqueue(nxt, -1)

    def solve(self, list assumptions, long long conflict_budget=-1):
        cdef vector[int] assum
        cdef int status = 0
        cdef double rest = RESTART_FIRST
        cdef long long start_conflicts = self.conflicts
        cdef long long left
        cdef int v
        for a in assumptions:
            assum.push_back(<int>a)
        self.model = []
        self.conflict = []
        if not self.ok:
            return 20
        self.max_learnts = self.n_original * LEARNTSIZE_FACTOR + 1000
        while status == 0:
            left = -1
            if conflict_budget >= 0:
                left = conflict_budget - (self.conflicts - start_conflicts)
                if left <= 0:
                    break
            status = self._search(<long long>rest, assum, left)
            if status == 0:
                self.restarts += 1
                rest *= RESTART_INC
                self.max_learnts *= LEARNTSIZE_INC
        if status == 10:
            self.model = [1 if self.vals[2 * v] == C_TRUE else 0 for v in range(self.nvars)]
        self._cancel_until(0)
        return status

    def stats(self):
        return (self.conflicts, self.decisions, self.propagations, self.restarts, <long long>self.learnts.size())
