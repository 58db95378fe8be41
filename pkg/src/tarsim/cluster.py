"""Hierarchical spherical k-means for cluster-stratified seeding.

Documents are clustered on their L2-normalized feature vectors with a
cosine-similarity variant of k-means (k-means++ initialization, Lloyd
iterations). The tree splits each node into up to ``branching`` children
down to ``depth`` layers, stopping early for nodes smaller than
``min_split``. Leaves partition the corpus exactly.

Construction is deterministic for a fixed seed: every node derives its
own random stream from (seed, node path), so results do not depend on
traversal scheduling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .featurize import SparseVector, stack

_MAX_ITERS = 25


@dataclass(frozen=True)
class KMeansResult:
    assignments: np.ndarray  # point index -> cluster label 0..k_eff-1
    centroids: np.ndarray  # (k_eff, dim), unit rows (zero rows possible)
    objective_history: tuple[float, ...]

    @property
    def n_clusters(self) -> int:
        return int(self.centroids.shape[0])


@dataclass(frozen=True)
class ClusterNode:
    id: str  # dotted path, "" for the root
    centroid: np.ndarray
    members: tuple[str, ...]  # leaf nodes only; empty for internal nodes
    children: tuple["ClusterNode", ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ClusterTree:
    root: ClusterNode
    branching: int
    depth: int
    leaf_index: dict[str, str]  # doc id -> leaf id

    def leaves(self) -> list[ClusterNode]:
        out: list[ClusterNode] = []
        stack_ = [self.root]
        while stack_:
            node = stack_.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack_.extend(reversed(node.children))
        return out


def _normalize_rows(X: sp.csr_matrix) -> sp.csr_matrix:
    norms = np.sqrt(np.asarray(X.power(2).sum(axis=1)).ravel())
    inv = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 0.0)
    return sp.csr_matrix(X.multiply(inv[:, None]))


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0 else v


def _plusplus_init(Xn: sp.csr_matrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding with (1 - cosine similarity) as the distance."""
    n = Xn.shape[0]
    centers = np.zeros((k, Xn.shape[1]))
    first = int(rng.integers(n))
    centers[0] = np.asarray(Xn[first].todense()).ravel()
    best_sim = np.asarray((Xn @ centers[0]).ravel())
    for j in range(1, k):
        dist = np.clip(1.0 - best_sim, 0.0, None)
        weights = dist * dist
        total = float(weights.sum())
        if total > 0:
            idx = int(rng.choice(n, p=weights / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = np.asarray(Xn[idx].todense()).ravel()
        best_sim = np.maximum(best_sim, np.asarray((Xn @ centers[j]).ravel()))
    return centers


def _mean_centroids(Xn: sp.csr_matrix, assign: np.ndarray, k: int) -> np.ndarray:
    centroids = np.zeros((k, Xn.shape[1]))
    for c in range(k):
        members = np.flatnonzero(assign == c)
        if members.size:
            centroids[c] = _unit(np.asarray(Xn[members].sum(axis=0)).ravel())
    return centroids


def kmeans(
    vectors: Sequence[SparseVector],
    k: int,
    rng: np.random.Generator,
    dim: int | None = None,
) -> KMeansResult:
    """Spherical k-means over L2-normalized vectors.

    Runs at most 25 Lloyd iterations or until assignments stop changing.
    Empty clusters are re-seeded with the point farthest from its current
    centroid. When n <= k each vector becomes its own cluster and the
    surplus clusters are pruned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not len(vectors):
        raise ValueError("no vectors to cluster")
    if dim is None:
        dim = 1 + max((v.positions[-1] for v in vectors if v.positions), default=0)
    Xn = _normalize_rows(stack(vectors, dim))
    n = Xn.shape[0]

    if n <= k:
        # every vector is its own centroid; unit rows contribute similarity 1
        assign = np.arange(n)
        centroids = np.asarray(Xn.todense())
        objective = float(np.asarray(Xn.power(2).sum(axis=1)).sum())
        return KMeansResult(assign, centroids, (objective,))

    centroids = _plusplus_init(Xn, k, rng)
    assign = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    for _ in range(_MAX_ITERS):
        sims = np.asarray((Xn @ centroids.T))
        new_assign = np.argmax(sims, axis=1)
        counts = np.bincount(new_assign, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            own_sim = sims[np.arange(n), new_assign]
            # farthest points first; index breaks ties deterministically
            order = np.lexsort((np.arange(n), own_sim))
            cursor = 0
            for c in empties:
                while counts[new_assign[order[cursor]]] < 2:
                    cursor += 1
                point = order[cursor]
                counts[new_assign[point]] -= 1
                new_assign[point] = c
                counts[c] = 1
                cursor += 1
        centroids = _mean_centroids(Xn, new_assign, k)
        history.append(float(np.sum(np.asarray((Xn @ centroids.T))[np.arange(n), new_assign])))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign

    # compact labels in ascending order; empties cannot survive the re-seeding
    live = np.flatnonzero(np.bincount(assign, minlength=k) > 0)
    relabel = np.full(k, -1, dtype=np.int64)
    relabel[live] = np.arange(live.size)
    return KMeansResult(relabel[assign], centroids[live], tuple(history))


def build_cluster_tree(
    doc_ids: Sequence[str],
    vectors: Sequence[SparseVector],
    branching: int = 3,
    depth: int = 5,
    min_split: int = 30,
    rng_seed: int = 0,
) -> ClusterTree:
    """Recursively split the corpus into a branching-way tree.

    A node becomes a leaf when it reaches ``depth``, holds fewer than
    ``min_split`` documents, or k-means collapses it into one cluster.
    """
    if len(doc_ids) != len(vectors):
        raise ValueError("doc_ids and vectors must align")
    dim = 1 + max((v.positions[-1] for v in vectors if v.positions), default=0)
    leaf_index: dict[str, str] = {}
    ids = np.asarray(doc_ids, dtype=object)

    def build(node_path: tuple[int, ...], member_idx: np.ndarray, level: int) -> ClusterNode:
        node_id = ".".join(str(p) for p in node_path)
        member_vecs = [vectors[i] for i in member_idx]
        centroid = _unit(np.asarray(_normalize_rows(stack(member_vecs, dim)).sum(axis=0)).ravel())
        if level >= depth or member_idx.size < min_split:
            return _leaf(node_id, centroid, member_idx)
        rng = np.random.default_rng(np.random.SeedSequence([rng_seed, 1, *node_path]))
        result = kmeans(member_vecs, branching, rng, dim=dim)
        if result.n_clusters < 2:
            return _leaf(node_id, centroid, member_idx)
        children = tuple(
            build(node_path + (c,), member_idx[result.assignments == c], level + 1)
            for c in range(result.n_clusters)
        )
        return ClusterNode(id=node_id, centroid=centroid, members=(), children=children)

    def _leaf(node_id: str, centroid: np.ndarray, member_idx: np.ndarray) -> ClusterNode:
        members = tuple(ids[member_idx])
        for doc_id in members:
            leaf_index[doc_id] = node_id
        return ClusterNode(id=node_id, centroid=centroid, members=members, children=())

    root = build((), np.arange(len(doc_ids)), 0)
    return ClusterTree(root=root, branching=branching, depth=depth, leaf_index=leaf_index)


def leaf_assignments(tree: ClusterTree) -> dict[str, str]:
    """Total map from document id to its leaf id."""
    return dict(tree.leaf_index)


def write_tree_csv(tree: ClusterTree, path: str | Path) -> None:
    """Dump `leaf_id,doc_id` rows, sorted for stable bytes."""
    rows = sorted(((leaf, doc) for doc, leaf in tree.leaf_index.items()))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["leaf_id", "doc_id"])
        writer.writerows(rows)
