"""Race SNF pivot strategies on the n=12 sampling workload.

Writes progress to stdout; run with python3 -u.
"""

import heapq
import itertools
import random
import sys
import time

sys.path.insert(0, "src")

import cuphom.homology as ho
from cuphom.exterior import ExtElement, Monomial
from cuphom.insertion import insertion_power


def snf_heap(matrix, time_cap=1e9, log=None):
    """Minimal-degree-flavored SNF: lazy heap over (col nnz, |v|!=1)."""
    rows = {i: dict(r) for i, r in matrix.rows.items()}
    cols = {j: set(s) for j, s in matrix.cols.items()}
    done_rows, done_cols = set(), set()
    diag = []
    t0 = time.time()

    def row_op(dst, src, q):
        rdst = rows.get(dst)
        if rdst is None:
            rdst = rows[dst] = {}
        for j, v in rows[src].items():
            if j in rdst:
                nv = rdst[j] - q * v
                if nv:
                    rdst[j] = nv
                else:
                    del rdst[j]
                    cols[j].discard(dst)
            else:
                rdst[j] = -q * v
                cols[j].add(dst)
        if not rdst:
            del rows[dst]

    def col_op(dst, src, q):
        for i in list(cols.get(src, ())):
            ri = rows[i]
            w = q * ri[src]
            if dst in ri:
                nv = ri[dst] - w
                if nv:
                    ri[dst] = nv
                else:
                    del ri[dst]
                    cols[dst].discard(i)
            else:
                ri[dst] = -w
                cols.setdefault(dst, set()).add(i)

    heap = [(len(s), j) for j, s in cols.items() if s]
    heapq.heapify(heap)

    def best_in_col(j):
        # prefer units; among them min row nnz
        best = None
        key = None
        for i in cols[j]:
            if i in done_rows:
                continue
            v = rows[i][j]
            k = (0 if v in (1, -1) else 1, len(rows[i]), abs(v))
            if key is None or k < key:
                best, key = i, k
        return best

    count = 0
    while True:
        if time.time() - t0 > time_cap:
            return None, len(diag)
        pj = None
        while heap:
            nnz, j = heapq.heappop(heap)
            if j in done_cols or j not in cols or not (cols[j] - done_rows):
                continue
            cur = len(cols[j] - done_rows)
            if cur > nnz:
                heapq.heappush(heap, (cur, j))
                continue
            pj = j
            break
        if pj is None:
            # rebuild heap in case anything was missed
            rebuilt = [
                (len(s - done_rows), j)
                for j, s in cols.items()
                if j not in done_cols and (s - done_rows)
            ]
            if not rebuilt:
                break
            heap = rebuilt
            heapq.heapify(heap)
            continue
        pi = best_in_col(pj)
        while True:
            col_rows = [i for i in cols.get(pj, ()) if i not in done_rows]
            if len(col_rows) > 1:
                pi = min(col_rows, key=lambda i: abs(rows[i][pj]))
                pv = rows[pi][pj]
                for i in col_rows:
                    if i != pi:
                        q = rows[i][pj] // pv
                        if q:
                            row_op(i, pi, q)
                continue
            pi = col_rows[0]
            row_cols = [j for j in rows.get(pi, {}) if j not in done_cols]
            if len(row_cols) > 1:
                pj = min(row_cols, key=lambda j: abs(rows[pi][j]))
                pv = rows[pi][pj]
                for j in row_cols:
                    if j != pj:
                        q = rows[pi][j] // pv
                        if q:
                            col_op(j, pj, q)
                continue
            break
        done_rows.add(pi)
        done_cols.add(pj)
        diag.append(rows[pi][pj])
        # push affected columns back with fresh keys (lazy)
        count += 1
        if log and count % 128 == 0:
            nnz_total = sum(len(r) for r in rows.values())
            maxv = max((max(map(abs, r.values())) for r in rows.values()), default=0)
            print(
                f"  [{log}] pivot {count}, nnz {nnz_total}, maxabs digits "
                f"{len(str(maxv))}, t={time.time()-t0:.0f}s",
                flush=True,
            )
        for j in set().union(*[set(rows[i].keys()) for i in [pi] if i in rows] or [set()]):
            pass
    return diag, len(diag)


def main():
    rng = random.Random(7)
    subs = list(itertools.combinations(range(1, 13), 3))
    chosen = rng.sample(subs, 30)
    a = ExtElement(
        12, {Monomial(s): rng.choice([1, -1]) * rng.randint(1, 10) for s in chosen}
    )
    even, odd = ho._parity_bases(12)
    total = a
    m = 2
    while 2 * m + 1 <= 12:
        total = total + insertion_power(a, m)
        m += 1
    for name, x in (("cup", a), ("ext", total)):
        d_eo = ho._mult_matrix(x, even, odd)
        d_oe = ho._mult_matrix(x, odd, even)
        for tag, mat in ((f"{name}-eo", d_eo), (f"{name}-oe", d_oe)):
            t0 = time.time()
            diag, rank = snf_heap(mat, time_cap=900, log=tag)
            dt = time.time() - t0
            if diag is None:
                print(f"{tag}: TIMEOUT at rank {rank} ({dt:.0f}s)", flush=True)
            else:
                inv = [d for d in ho._normalize_invariants(diag) if d != 1]
                print(f"{tag}: rank {rank}, torsion {inv}, {dt:.0f}s", flush=True)


if __name__ == "__main__":
    main()
