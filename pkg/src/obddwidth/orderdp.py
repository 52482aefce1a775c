"""Minimising the worst prefix cost over all orders, by DP over prefix sets.

When the cost of a prefix depends only on which elements it contains, the
best order for a set S ends with some v in S and is the best order of
S - {v} followed by v::

    best(S) = max(cost(S), min over v in S of best(S - {v}))

which visits 2**n sets instead of n! orders.
"""
from typing import Callable, List, Tuple

from .config import check_cap


def min_max_prefix_order(n: int, cost: Callable[[int], int], cap: int) -> Tuple[int, List[int]]:
    """Return (value, order) where ``cost`` takes a prefix as a bitmask.

    The empty prefix is charged too.  Ties prefer the lowest element last,
    which keeps witnesses deterministic.
    """
    check_cap(n, cap, "subset DP elements")
    size = 1 << n
    best = [0] * size
    choice = [-1] * size
    best[0] = cost(0)
    # masks in increasing numeric order visit every subset after its subsets
    for mask in range(1, size):
        low, arg = None, -1
        m = mask
        while m:
            bit = m & -m
            v = bit.bit_length() - 1
            val = best[mask ^ bit]
            if low is None or val < low:
                low, arg = val, v
            m ^= bit
        c = cost(mask)
        best[mask] = c if c > low else low
        choice[mask] = arg
    order = []
    mask = size - 1
    while mask:
        v = choice[mask]
        order.append(v)
        mask ^= 1 << v
    order.reverse()
    return best[size - 1], order
