#!/usr/bin/env python3
"""Integral cohomology of shipped simplicial sets by elementary reduction.

Independent of the C++ code: reads the data files with its own parser,
builds normalized coboundary matrices and diagonalizes them with row and
column operations. Checks the known values, then compares every degree and
coefficient choice against the CLI.
"""
import argparse
import itertools
import pathlib
import re
import subprocess
import sys

TOKEN = re.compile(r'\s*(?:#[^\n]*|(-?\d+)|([A-Za-z_][\w-]*)|(.))', re.S)


def tokens(text):
    for m in TOKEN.finditer(text):
        num, name, punct = m.groups()
        if num is not None:
            yield int(num)
        elif name is not None:
            yield name
        elif punct is not None and punct not in ', \n\t':
            yield punct


def parse(text):
    lines = [l.strip() for l in text.splitlines()]
    body = [l for l in lines if l and not l.startswith('#')]
    assert body[0] == 'heapstone-v1', 'bad header'
    toks = list(tokens(text.split('heapstone-v1', 1)[1]))
    pos = 0

    def value():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t == '[':
            out = []
            while toks[pos] != ']':
                out.append(value())
            pos += 1
            return out
        if t == '{' or (isinstance(t, str) and pos < len(toks) and toks[pos] == '{'):
            if t != '{':
                pos += 1
            rec = {}
            while toks[pos] != '}':
                key = toks[pos]
                assert toks[pos + 1] == ':'
                pos += 2
                rec[key] = value()
            pos += 1
            return rec
        return t

    return value()


def cells_of(rec):
    """Per dimension, for each nondegenerate simplex, its faces as
    (nondegenerate?, id)."""
    if 'facets' in rec:
        simplices = set()
        for f in rec['facets']:
            f = sorted(f)
            for k in range(1, len(f) + 1):
                simplices.update(itertools.combinations(f, k))
        by_dim = {}
        for s in simplices:
            by_dim.setdefault(len(s) - 1, []).append(s)
        for d in by_dim:
            by_dim[d].sort()
        index = {s: i for d in by_dim for i, s in enumerate(by_dim[d])}
        cells = [[[] for _ in by_dim[0]]]
        for d in range(1, max(by_dim) + 1):
            cells.append([[(True, index[s[:i] + s[i + 1:]]) for i in range(d + 1)] for s in by_dim.get(d, [])])
        return cells
    cells = [[[] for _ in range(rec['vertices'])]]
    d = 1
    while f'd{d}' in rec:
        row = []
        for s in rec[f'd{d}']:
            row.append([(True, f) if isinstance(f, int) else (len(f[0]) == 0, f[1]) for f in s])
        cells.append(row)
        d += 1
    return cells


def coboundary(cells, k):
    """Matrix of δ^k : C^k -> C^{k+1} as a list of rows (one per (k+1)-cell)."""
    nk = len(cells[k]) if k < len(cells) else 0
    if k + 1 >= len(cells):
        return [], nk
    rows = []
    for faces in cells[k + 1]:
        r = [0] * nk
        for i, (nondeg, fid) in enumerate(faces):
            if nondeg:
                r[fid] += (-1) ** i
        rows.append(r)
    return rows, nk


def diagonal(rows, ncols, p=0):
    """Nonzero diagonal entries after elementary reduction, over Z (p = 0)
    or F_p."""
    a = [list(r) for r in rows]
    if p:
        a = [[x % p for x in r] for r in a]
    m = len(a)
    out = []
    t = 0
    while t < min(m, ncols):
        piv = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, ncols) if a[i][j]]
        if not piv:
            break
        _, i, j = min(piv)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] * pow(a[t][t], -1, p) % p if p else a[i][t] // a[t][t]
                    a[i] = [(x - q * y) % p if p else x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        done = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    q = a[t][j] * pow(a[t][t], -1, p) % p if p else a[t][j] // a[t][t]
                    for r in a:
                        r[j] = (r[j] - q * r[t]) % p if p else r[j] - q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        done = False
            if done and not p:
                # divisibility: fold any entry not divisible by the pivot into row t
                bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, ncols) if a[i][j] % a[t][t]]
                if bad:
                    i, _ = bad[0]
                    a[t] = [x + y for x, y in zip(a[t], a[i])]
                    done = False
        out.append(abs(a[t][t]) if not p else 1)
        t += 1
    return out


def cohomology(cells, k, p=0):
    if k < 0 or k >= len(cells):
        return '0'
    nk = len(cells[k])
    dk, _ = coboundary(cells, k)
    dprev, _ = coboundary(cells, k - 1) if k > 0 else ([], 0)
    rk = len(diagonal(dk, nk, p))
    prev = diagonal(dprev, len(cells[k - 1]), p) if k > 0 else []
    if p:
        r = nk - rk - len(prev)
        return ' + '.join([f'Z/{p}'] * r) if r else '0'
    free = nk - rk - len(prev)
    tors = sorted(d for d in prev if d > 1)
    parts = ([] if free == 0 else ['Z' if free == 1 else f'Z^{free}']) + [f'Z/{d}' for d in tors]
    return ' + '.join(parts) if parts else '0'


KNOWN = [('s2.sset', 2, 'Z'), ('s2_minimal.sset', 2, 'Z'), ('rp2.sset', 2, 'Z/2'), ('rp2.sset', 1, '0'),
         ('torus.sset', 1, 'Z^2'), ('torus.sset', 2, 'Z'), ('s4.sset', 4, 'Z'), ('s4.sset', 2, '0')]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument('--data', required=True)
    ap.add_argument('--cli')
    args = ap.parse_args()
    data = pathlib.Path(args.data) / 'sset'
    failures = 0
    for name, k, want in KNOWN:
        got = cohomology(cells_of(parse((data / name).read_text())), k)
        ok = got == want
        failures += not ok
        print(f"{'pass' if ok else 'FAIL'}  oracle H^{k}({name}; Z) = {got}" + ('' if ok else f', expected {want}'))
    if args.cli:
        for path in sorted(data.glob('*.sset')):
            cells = cells_of(parse(path.read_text()))
            for k in range(len(cells) + 1):
                for p in (0, 2, 3):
                    want = cohomology(cells, k, p)
                    group = 'Z' if p == 0 else f'Z/{p}'
                    out = subprocess.run([args.cli, 'cohomology', str(path), '--degree', str(k), '--group', group],
                                         capture_output=True, text=True, check=True).stdout.strip()
                    if out != want:
                        failures += 1
                        print(f'FAIL  cli H^{k}({path.name}; {group}) = {out}, oracle {want}')
        print('cli agrees with the oracle' if failures == 0 else 'cli disagrees')
    return 1 if failures else 0


if __name__ == '__main__':
    sys.exit(main())
