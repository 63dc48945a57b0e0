import numpy as np
import pytest

from hbrclust.graph import Partition, SimilarityGraph


def block_graph(sizes, seed=0, lo=0.5, hi=1.5):
    """Exactly-clustered graph: dense random-weight blocks, zero elsewhere."""
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    a = np.zeros((n, n))
    start = 0
    for size in sizes:
        block = rng.uniform(lo, hi, (size, size))
        block = np.triu(block, 1)
        a[start:start + size, start:start + size] = block + block.T
        start += size
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return SimilarityGraph.from_adjacency(a), Partition(labels=labels, m=len(sizes))


def random_graph(n, seed=0, density=0.6):
    """Random symmetric nonnegative adjacency (possibly disconnected)."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.uniform(0.0, 1.0, (n, n)), 1)
    upper[rng.random((n, n)) > density] = 0.0
    upper = np.triu(upper, 1)
    return SimilarityGraph.from_adjacency(upper + upper.T)


@pytest.fixture
def three_block():
    return block_graph((5, 7, 9), seed=3)
