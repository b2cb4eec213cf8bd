"""Pure-Python CDCL core.

Mirrors ``_core.pyx`` step for step so that both back ends produce identical
statistics for identical inputs. Literals are internal: ``2*v`` is the
positive literal of 0-based variable ``v`` and ``2*v + 1`` its negation.
"""

UNDEF = 0
TRUE = 1
FALSE = -1

SAT = 10
UNSAT = 20
UNKNOWN = 0

VAR_DECAY = 0.95
CLA_DECAY = 0.999
RESTART_FIRST = 100
RESTART_INC = 1.5
LEARNTSIZE_FACTOR = 1.0 / 3.0
LEARNTSIZE_INC = 1.1


class Core:
    def __init__(self, seed=0):
        self.nvars = 0
        self.seed = seed
        self.rng = seed & 0xFFFFFFFFFFFFFFFF
        self.ok = True
        # per literal
        self.vals = []
        self.watches = []
        # per variable
        self.level = []
        self.reason = []
        self.activity = []
        self.polarity = []
        self.seen = []
        self.heap = []
        self.heap_idx = []
        # clause arena
        self.cl_lits = []
        self.cl_learnt = []
        self.cl_act = []
        self.cl_dead = []
        self.n_original = 0
        self.learnts = []
        self.trail = []
        self.trail_lim = []
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
    def _rand(self):
        # xorshift64
        x = self.rng
        x ^= (x << 13) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 7
        x ^= (x << 17) & 0xFFFFFFFFFFFFFFFF
        self.rng = x
        return x

    def new_var(self):
        v = self.nvars
        self.nvars += 1
        self.vals.append(UNDEF)
        self.vals.append(UNDEF)
        self.watches.append([])
        self.watches.append([])
        self.level.append(0)
        self.reason.append(-1)
        act = 0.0
        if self.seed:
            act = (self._rand() % 1000) * 1e-5
        self.activity.append(act)
        self.polarity.append(1)
        self.seen.append(0)
        self.heap_idx.append(-1)
        self._heap_insert(v)
        return v

    # -- heap (max activity first, ties to the lower index) ---------------
    def _lt(self, a, b):
        act = self.activity
        return act[a] > act[b] or (act[a] == act[b] and a < b)

    def _heap_up(self, i):
        heap = self.heap
        idx = self.heap_idx
        v = heap[i]
        while i > 0:
            p = (i - 1) >> 1
            if not self._lt(v, heap[p]):
                break
            heap[i] = heap[p]
            idx[heap[i]] = i
            i = p
        heap[i] = v
        idx[v] = i

    def _heap_down(self, i):
        heap = self.heap
        idx = self.heap_idx
        v = heap[i]
        n = len(heap)
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and self._lt(heap[c + 1], heap[c]):
                c += 1
            if not self._lt(heap[c], v):
                break
            heap[i] = heap[c]
            idx[heap[i]] = i
            i = c
        heap[i] = v
        idx[v] = i

    def _heap_insert(self, v):
        if self.heap_idx[v] >= 0:
            return
        self.heap.append(v)
        self.heap_idx[v] = len(self.heap) - 1
        self._heap_up(len(self.heap) - 1)

    def _heap_pop(self):
        heap = self.heap
        v = heap[0]
        last = heap.pop()
        self.heap_idx[v] = -1
        if heap:
            heap[0] = last
            self.heap_idx[last] = 0
            self._heap_down(0)
        return v

    # -- clauses -----------------------------------------------------------
    def _alloc(self, lits, learnt):
        cref = len(self.cl_lits)
        self.cl_lits.append(lits)
        self.cl_learnt.append(learnt)
        self.cl_act.append(0.0)
        self.cl_dead.append(False)
        self.watches[lits[0] ^ 1].append(cref)
        self.watches[lits[1] ^ 1].append(cref)
        return cref

    def add_clause(self, lits):
        """Add an internal-literal clause at decision level 0."""
        if not self.ok:
            return False
        vals = self.vals
        seen_lits = set()
        out = []
        for p in sorted(lits):
            if p in seen_lits:
                continue
            if (p ^ 1) in seen_lits or vals[p] == TRUE:
                return True
            seen_lits.add(p)
            if vals[p] == FALSE:
                continue
            out.append(p)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return self.ok
        self._alloc(out, False)
        self.n_original += 1
        return True

    def add_dimacs(self, flat):
        """Add zero-terminated DIMACS-literal clauses in one call."""
        ok = self.ok
        c = []
        for lit in flat:
            if lit == 0:
                ok = self.add_clause(c)
                c = []
            else:
                c.append(2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1)
        return ok

    # -- assignment --------------------------------------------------------
    def _enqueue(self, p, reason):
        v = p >> 1
        self.vals[p] = TRUE
        self.vals[p ^ 1] = FALSE
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        trail = self.trail
        stop = self.trail_lim[lvl]
        vals = self.vals
        for i in range(len(trail) - 1, stop - 1, -1):
            p = trail[i]
            v = p >> 1
            vals[p] = UNDEF
            vals[p ^ 1] = UNDEF
            self.reason[v] = -1
            self.polarity[v] = p & 1
            self._heap_insert(v)
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause ref or -1."""
        vals = self.vals
        watches = self.watches
        cl_lits = self.cl_lits
        cl_dead = self.cl_dead
        trail = self.trail
        confl = -1
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[p]
            i = 0
            j = 0
            n = len(ws)
            while i < n:
                cref = ws[i]
                i += 1
                if cl_dead[cref]:
                    continue
                c = cl_lits[cref]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if vals[first] == TRUE:
                    ws[j] = cref
                    j += 1
                    continue
                found = False
                for kk in range(2, len(c)):
                    q = c[kk]
                    if vals[q] != FALSE:
                        c[1] = q
                        c[kk] = false_lit
                        watches[q ^ 1].append(cref)
                        found = True
                        break
                if found:
                    continue
                ws[j] = cref
                j += 1
                if vals[first] == FALSE:
                    confl = cref
                    self.qhead = len(trail)
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                else:
                    self._enqueue(first, cref)
            del ws[j:]
            if confl >= 0:
                break
        return confl

    # -- conflict analysis -------------------------------------------------
    def _bump_var(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for x in range(self.nvars):
                self.activity[x] *= 1e-100
            self.var_inc *= 1e-100
        if self.heap_idx[v] >= 0:
            self._heap_up(self.heap_idx[v])

    def _bump_clause(self, cref):
        self.cl_act[cref] += self.cla_inc
        if self.cl_act[cref] > 1e20:
            for c in self.learnts:
                self.cl_act[c] *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl):
        seen = self.seen
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        pathc = 0
        p = -1
        idx = len(trail) - 1
        while True:
            if self.cl_learnt[confl]:
                self._bump_clause(confl)
            c = self.cl_lits[confl]
            start = 0 if p == -1 else 1
            for kk in range(start, len(c)):
                q = c[kk]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump_var(v)
                    seen[v] = 1
                    if level[v] >= cur:
                        pathc += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            seen[p >> 1] = 0
            pathc -= 1
            if pathc <= 0:
                break
        learnt[0] = p ^ 1
        # local minimisation: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for kk in range(1, len(learnt)):
            q = learnt[kk]
            r = self.reason[q >> 1]
            if r < 0:
                keep.append(q)
                continue
            rc = self.cl_lits[r]
            for x in range(1, len(rc)):
                w = rc[x] >> 1
                if not seen[w] and level[w] > 0:
                    keep.append(q)
                    break
        for q in learnt:
            seen[q >> 1] = 0
        learnt = keep
        if len(learnt) == 1:
            bt = 0
        else:
            mi = 1
            for kk in range(2, len(learnt)):
                if level[learnt[kk] >> 1] > level[learnt[mi] >> 1]:
                    mi = kk
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        return learnt, bt

    def _analyze_final(self, p):
        """Assumptions responsible for ``p`` being false (``p`` is a failed assumption)."""
        out = [p]
        if not self.trail_lim:
            return out
        seen = self.seen
        seen[p >> 1] = 1
        for i in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            q = self.trail[i]
            v = q >> 1
            if seen[v]:
                r = self.reason[v]
                if r < 0:
                    if self.level[v] > 0:
                        out.append(q ^ 1)
                else:
                    c = self.cl_lits[r]
                    for kk in range(1, len(c)):
                        if self.level[c[kk] >> 1] > 0:
                            seen[c[kk] >> 1] = 1
                seen[v] = 0
        seen[p >> 1] = 0
        return out

    # -- learnt clause database -------------------------------------------
    def _locked(self, cref):
        c = self.cl_lits[cref]
        v = c[0] >> 1
        return self.vals[c[0]] == TRUE and self.reason[v] == cref

    def _reduce_db(self):
        act = self.cl_act
        lits = self.cl_lits
        order = sorted(self.learnts, key=lambda c: (len(lits[c]) == 2, act[c], c))
        extra = self.cla_inc / max(len(order), 1)
        half = len(order) // 2
        keep = []
        for i, c in enumerate(order):
            if len(lits[c]) > 2 and not self._locked(c) and (i < half or act[c] < extra):
                self.cl_dead[c] = True
            else:
                keep.append(c)
        keep.sort()
        self.learnts = keep

    # -- search ------------------------------------------------------------
    def _pick_branch(self):
        while self.heap:
            v = self._heap_pop()
            if self.vals[2 * v] == UNDEF:
                return 2 * v + self.polarity[v]
        return -1

    def _search(self, nof_conflicts, assumptions, budget_left):
        conflict_c = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflict_c += 1
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    cref = self._alloc(learnt, True)
                    self.learnts.append(cref)
                    self._bump_clause(cref)
                    self._enqueue(learnt[0], cref)
                self.var_inc /= VAR_DECAY
                self.cla_inc /= CLA_DECAY
                if budget_left >= 0 and conflict_c >= budget_left:
                    self._cancel_until(0)
                    return UNKNOWN
            else:
                if conflict_c >= nof_conflicts or (budget_left >= 0 and conflict_c >= budget_left):
                    self._cancel_until(0)
                    return UNKNOWN
                if len(self.learnts) - len(self.trail) >= self.max_learnts:
                    self._reduce_db()
                nxt = -1
                while len(self.trail_lim) < len(assumptions):
                    p = assumptions[len(self.trail_lim)]
                    if self.vals[p] == TRUE:
                        self.trail_lim.append(len(self.trail))
                    elif self.vals[p] == FALSE:
                        self.conflict = self._analyze_final(p ^ 1)
                        return UNSAT
                    else:
                        nxt = p
                        break
                if nxt < 0:
                    self.decisions += 1
                    nxt = self._pick_branch()
                    if nxt < 0:
                        return SAT
                self.trail_lim.append(len(self.trail))
                self._enqueue(nxt, -1)

    def solve(self, assumptions, conflict_budget=-1):
        self.model = []
        self.conflict = []
        if not self.ok:
            return UNSAT
        self.max_learnts = self.n_original * LEARNTSIZE_FACTOR + 1000
        status = UNKNOWN
        rest = float(RESTART_FIRST)
        start_conflicts = self.conflicts
        while status == UNKNOWN:
            left = -1
            if conflict_budget >= 0:
                left = conflict_budget - (self.conflicts - start_conflicts)
                if left <= 0:
                    break
            status = self._search(int(rest), assumptions, left)
            if status == UNKNOWN:
                self.restarts += 1
                rest *= RESTART_INC
                self.max_learnts *= LEARNTSIZE_INC
        if status == SAT:
            self.model = [1 if self.vals[2 * v] == TRUE else 0 for v in range(self.nvars)]
        self._cancel_until(0)
        return status

    def stats(self):
        return (self.conflicts, self.decisions, self.propagations, self.restarts, len(self.learnts))
