"""Independent reference computations used only by the tests."""
import itertools
import math


def rho_bisect(t, lo=1e-9, hi=1 - 1e-9):
    f = lambda x: 1 - x - math.exp(-t * x)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def v_bisect(t):
    r = rho_bisect(t)
    return r / (1 - r)


def u_bisect(t):
    return 1 / (1 - rho_bisect(t)) - t


def v_inverse_bisect(s):
    lo, hi = 1.0 + 1e-12, 2.0
    while v_bisect(hi) < s:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if v_bisect(mid) < s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def components_dfs(n, edges):
    adj = {x: set() for x in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    left = set(range(n))
    sizes = []
    while left:
        frontier = [left.pop()]
        size = 1
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y in left:
                    left.remove(y)
                    frontier.append(y)
                    size += 1
        sizes.append(size)
    return sorted(sizes, reverse=True)


def connected_prob_brute(n, p):
    """P(ER(n, p) connected) by summing over every graph, float arithmetic."""
    pairs = list(itertools.combinations(range(n), 2))
    total = 0.0
    for mask in range(1 << len(pairs)):
        edges = [pr for b, pr in enumerate(pairs) if mask >> b & 1]
        if len(components_dfs(n, edges)) == 1:
            total += p ** len(edges) * (1 - p) ** (len(pairs) - len(edges))
    return total
