#!/usr/bin/env python3
"""Regenerate the vendored b-files.

Each sequence comes from a recurrence or counting formula that does not go
through the generating functions of the library, and is cross-checked by
brute force at small sizes before anything is written.

    python3 crates/oeis/fixtures/generate.py
"""

from functools import lru_cache
from itertools import permutations, product
from math import comb
from pathlib import Path

HERE = Path(__file__).resolve().parent
TERMS = 30


def involutions(n):
    a = [1, 1]
    for k in range(2, n):
        a.append(a[k - 1] + (k - 1) * a[k - 2])
    return a[:n]


def no_short_cycles(n):
    a = [1, 0, 0]
    for k in range(3, n):
        a.append((k - 1) * a[k - 1] + (k - 1) * (k - 2) * a[k - 3])
    return a[:n]


def symmetric_matchings(n):
    a = [1, 1]
    for k in range(2, n):
        a.append(a[k - 1] + 2 * (k - 1) * a[k - 2])
    return a[:n]


def double_factorial(m):
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def no_centered(n):
    # inclusion-exclusion over the n possible centered arcs
    return [sum((-1) ** j * comb(k, j) * double_factorial(2 * (k - j) - 1) for j in range(k + 1)) for k in range(n)]


def stacks(n):
    @lru_cache(maxsize=None)
    def up(rem, last):
        # weakly increasing run ending in `last`; the tail starts at the
        # first strict descent
        total = 1 if rem == 0 else 0
        for p in range(1, rem + 1):
            total += up(rem - p, p) if p >= last else down(rem - p, p)
        return total

    @lru_cache(maxsize=None)
    def down(rem, last):
        if rem == 0:
            return 1
        return sum(down(rem - p, p) for p in range(1, min(last, rem) + 1))

    return [1] + [sum(up(k - p, p) for p in range(1, k + 1)) for k in range(1, n)]


def single_parity_partitions(n):
    def parts_in(allowed, k):
        ways = [1] + [0] * k
        for p in allowed:
            for s in range(p, k + 1):
                ways[s] += ways[s - p]
        return ways[k]

    out = [1]
    for k in range(1, n):
        odd = parts_in(range(1, k + 1, 2), k)
        even = parts_in(range(2, k + 1, 2), k)
        out.append(odd + even)
    return out


def uud_triangle(rows):
    return [[comb(n, k) * comb(n - k, k) * 2 ** (n - 2 * k) for k in range(n // 2 + 1)] for n in range(rows)]


# ---------------------------------------------------------------- brute force


def brute_perms(n, keep):
    return [sum(1 for p in permutations(range(k)) if keep(p)) for k in range(n)]


def cycle_lengths(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        j, c = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            c += 1
        out.append(c)
    return out


def matchings(points):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1:]
        for m in matchings(rest):
            yield [(a, points[i])] + m


def brute_matchings(n, keep):
    return [sum(1 for m in matchings(list(range(1, 2 * k + 1))) if keep(m, k)) for k in range(n)]


def brute_compositions(n, keep):
    out = []
    for k in range(n):
        count = 0
        for cuts in product([0, 1], repeat=max(k - 1, 0)):
            if k == 0:
                parts = []
            else:
                parts, run = [], 1
                for c in cuts:
                    if c:
                        parts.append(run)
                        run = 1
                    else:
                        run += 1
                parts.append(run)
            count += keep(parts)
        out.append(count)
    return out


def unimodal(parts):
    i = 0
    while i + 1 < len(parts) and parts[i] <= parts[i + 1]:
        i += 1
    while i + 1 < len(parts) and parts[i] >= parts[i + 1]:
        i += 1
    return i + 1 >= len(parts)


def occurrences(word, pat):
    return sum(1 for i in range(len(word) - len(pat) + 1) if word[i:i + len(pat)] == pat)


def brute_uud(rows):
    out = []
    for n in range(rows):
        row = [0] * (n // 2 + 1)
        for w in product("01", repeat=2 * n):
            if w.count("0") == n:
                row[occurrences("".join(w), "001")] += 1
        out.append(row)
    return out


def check(name, got, want):
    if got != want[: len(got)]:
        raise SystemExit(f"{name}: brute force {got} disagrees with {want[:len(got)]}")


def write(a_number, terms, title):
    path = HERE / f"b{a_number[1:]}.txt"
    lines = [f"# {a_number} {title}", "# generated by generate.py"]
    lines += [f"{i} {t}" for i, t in enumerate(terms)]
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path.name}: {len(terms)} terms")


def main():
    seqs = {
        "A000085": (involutions(TERMS), "involutions"),
        "A038205": (no_short_cycles(TERMS), "permutations without 1- or 2-cycles"),
        "A047974": (symmetric_matchings(TERMS), "a(n) = a(n-1) + 2(n-1) a(n-2)"),
        "A053871": (no_centered(TERMS), "matchings of [2n] with no arc (i, 2n+1-i)"),
        "A001523": (stacks(TERMS), "unimodal compositions (stacks)"),
        "A096441": (single_parity_partitions(TERMS), "partitions into all odd or all even parts"),
    }
    check("A000085", brute_perms(8, lambda p: all(c <= 2 for c in cycle_lengths(p))), seqs["A000085"][0])
    check("A038205", brute_perms(8, lambda p: all(c >= 3 for c in cycle_lengths(p))), seqs["A038205"][0])
    check(
        "A047974",
        brute_matchings(6, lambda m, k: sorted(tuple(sorted((2 * k + 1 - a, 2 * k + 1 - b))) for a, b in m) == sorted(m)),
        seqs["A047974"][0],
    )
    check("A053871", brute_matchings(6, lambda m, k: all(a + b != 2 * k + 1 for a, b in m)), seqs["A053871"][0])
    check("A001523", brute_compositions(15, lambda c: unimodal(c)), seqs["A001523"][0])
    check("A096441", brute_compositions(15, lambda c: unimodal(c) and c == c[::-1]), seqs["A096441"][0])
    triangle = uud_triangle(21)
    check("A051288", brute_uud(8), triangle)
    for a, (terms, title) in seqs.items():
        write(a, terms, title)
    write("A051288", [t for row in triangle for t in row], "triangle T(n,k), k = 0..floor(n/2): 001 occurrences")


if __name__ == "__main__":
    main()
