"""
Level-i cluster construction.

The level-(i-1) clusters (eps-clusters) are the nodes of the cluster tree
T. Four phases group them into level-i clusters:

1. Subtrees around branching eps-clusters, grown breadth-first until their
   effective diameter reaches l. Then internal nodes of the leftover paths
   that touch a Phase-1 cluster are absorbed into it.
2. For each level-i spanner edge between two long paths, the minimal
   affixes of effective diameter >= l on both sides of both endpoints.
3. Low components (effective diameter < l) join an adjacent cluster.
4. Remaining paths are cut into pieces of effective diameter in [l, 2l);
   affix pieces next to an existing cluster join it.

Phases work on ``Draft`` records; ``build_level`` turns the drafts into
measured ``Cluster`` objects at the end.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any

import networkx as nx
import numpy as np

from ..exceptions import OrphanComponent
from ..partition import SubdividedSpanner
from .clusters import Cluster, Provenance, make_cluster, owner_map
from .config import CertConfig
from .tree import cluster_tree, connector_key, ediam, path_ediam


@dataclass
class Draft:
    """A level-i cluster under construction: its eps-cluster members and extras."""

    id: int
    origin: Provenance
    members: list[int]
    extra_edges: list[int] = field(default_factory=list)
    augmentations: list[Provenance] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)


@dataclass
class PathPiece:
    """A Phase-4 piece of a cluster path."""

    index: int
    path: int
    members: tuple[int, ...]
    affix: bool
    long: bool
    target: int
    own: bool
    sibling: int | None = None


@dataclass
class LevelBuild:
    """Everything built for one level, independent of the credit constant."""

    level: int
    ell: float
    eps_clusters: dict[int, Cluster]
    tree: nx.Graph
    clusters: dict[int, Cluster]
    member_of: dict[int, int]
    edges: list[int]
    pieces: list[PathPiece] = field(default_factory=list)
    orphans: list[list[int]] = field(default_factory=list)
    irregular: list[list[int]] = field(default_factory=list)

    @property
    def exception(self) -> bool:
        """No Phase-1/2 cluster at this level."""
        return not any(c.origin in (Provenance.PHASE1, Provenance.PHASE2) for c in self.clusters.values())

    def phase_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for cluster in self.clusters.values():
            counts[str(cluster.provenance)] = counts.get(str(cluster.provenance), 0) + 1
        return counts


def order_path(sub: nx.Graph, nodes: Iterable[int]) -> list[int] | None:
    """Nodes of a path component, from the end with the smaller id; None if not a path."""
    nodes = sorted(nodes)
    if len(nodes) == 1:
        return nodes
    part = sub.subgraph(nodes)
    ends = [x for x in nodes if part.degree(x) == 1]
    if len(ends) != 2 or any(part.degree(x) > 2 for x in nodes):
        return None
    walk, prev = [ends[0]], None
    while len(walk) < len(nodes):
        nxt = next(y for y in part.neighbors(walk[-1]) if y != prev)
        prev = walk[-1]
        walk.append(nxt)
    return walk


def _bfs_order(sub: nx.Graph, root: int) -> list[int]:
    order, seen, frontier = [root], {root}, [root]
    while frontier:
        layer = []
        for x in frontier:
            for y in sorted(sub.neighbors(x)):
                if y not in seen:
                    seen.add(y)
                    layer.append(y)
        order.extend(layer)
        frontier = layer
    return order


def _components(tree: nx.Graph, free: set[int]) -> list[list[int]]:
    sub = tree.subgraph(free)
    return sorted((sorted(c) for c in nx.connected_components(sub)), key=lambda c: c[0])


def _best_connector(
    sp: SubdividedSpanner, tree: nx.Graph, nodes: Iterable[int], owner: dict[int, int]
) -> tuple[tuple[int, int], int, int] | None:
    """Smallest (key, draft id, piece) over tree edges from ``nodes`` into owned nodes."""
    options = []
    for z in nodes:
        for nb in tree.neighbors(z):
            if nb in owner:
                piece = tree.edges[z, nb]["mst"]
                options.append((connector_key(sp, piece), owner[nb], piece))
    return min(options) if options else None


def phase1_branching(
    sp: SubdividedSpanner, tree: nx.Graph, ell: float, ids: Iterator[int]
) -> tuple[list[Draft], set[int]]:
    """
    Phase 1 on cluster tree ``tree``.

    Returns:
        The Phase-1 drafts and the set of nodes still unclustered.
    """
    drafts: list[Draft] = []
    owner: dict[int, int] = {}
    free = set(tree.nodes)

    while True:
        rest = tree.subgraph(free)
        pick = None
        for component in _components(tree, free):
            branching = [x for x in component if rest.degree(x) >= 3]
            if branching and ediam(tree, component) >= ell:
                pick = branching[0] if pick is None else min(pick, branching[0])
        if pick is None:
            break
        order = _bfs_order(rest, pick)
        size = 4
        while ediam(tree, order[:size]) < ell:
            size += 1
        chosen = order[:size]
        draft = Draft(next(ids), Provenance.PHASE1, sorted(chosen), notes={"branching": pick})
        drafts.append(draft)
        for x in chosen:
            owner[x] = draft.id
        free -= set(chosen)

    by_id = {d.id: d for d in drafts}
    changed = bool(drafts)
    while changed:
        changed = False
        rest = tree.subgraph(free)
        for component in _components(tree, free):
            if ediam(tree, component) < ell:
                continue
            path = order_path(rest, component) or []
            for z in path[1:-1]:
                best = _best_connector(sp, tree, [z], owner)
                if best is None:
                    continue
                _, target, _ = best
                by_id[target].members.append(z)
                by_id[target].notes.setdefault("absorbed", []).append(z)
                owner[z] = target
                free.discard(z)
                changed = True
                break
            if changed:
                break

    for draft in drafts:
        draft.members.sort()
    return drafts, free


def _affix_window(tree: nx.Graph, path: list[int], pos: int, ell: float) -> tuple[int, int] | None:
    """Minimal [a..pos] and [pos..b] with effective diameter >= ell, or None."""
    total, a = 0.0, None
    for k in range(pos, -1, -1):
        total += tree.nodes[path[k]]["diam"]
        if total >= ell:
            a = k
            break
    total, b = 0.0, None
    for k in range(pos, len(path)):
        total += tree.nodes[path[k]]["diam"]
        if total >= ell:
            b = k
            break
    if a is None or b is None:
        return None
    return a, b


def phase2_path_edges(
    tree: nx.Graph,
    paths: list[list[int]],
    edges: Iterable[int],
    owner_prev: np.ndarray,
    graph_uv: tuple[np.ndarray, np.ndarray],
    ell: float,
    ids: Iterator[int],
) -> tuple[list[Draft], list[list[int]], list[list[int]]]:
    """
    Phase 2: clusters around level-i edges joining long cluster paths.

    Args:
        tree: Cluster tree.
        paths: Long unclustered paths, each oriented.
        edges: Level-i S' edge ids in (weight, u, v) order.
        owner_prev: Vertex -> eps-cluster id.
        graph_uv: S' endpoint arrays.
        ell: Level scale.
        ids: Cluster id source.

    Returns:
        (drafts, long paths left, low remnants).
    """
    gu, gv = graph_uv
    live: dict[int, list[int]] = dict(enumerate(paths))
    next_pid = len(paths)
    where: dict[int, tuple[int, int]] = {
        x: (pid, pos) for pid, path in live.items() for pos, x in enumerate(path)
    }
    drafts: list[Draft] = []
    low: list[list[int]] = []

    for e in edges:
        cx, cy = int(owner_prev[gu[e]]), int(owner_prev[gv[e]])
        if cx == cy or cx not in where or cy not in where:
            continue
        (px_id, px), (py_id, py) = where[cx], where[cy]
        if px_id == py_id and px > py:
            cx, cy, px, py = cy, cx, py, px
        P, Q = live[px_id], live[py_id]
        wx = _affix_window(tree, P, px, ell)
        wy = _affix_window(tree, Q, py, ell)
        if wx is None or wy is None:
            continue
        (ax, bx), (ay, by) = wx, wy
        notes: dict[str, Any] = {
            "edge": e,
            "x_cluster": cx,
            "y_cluster": cy,
            "P1": P[ax : px + 1],
            "P2": P[px : bx + 1],
            "Q1": Q[ay : py + 1],
            "Q2": Q[py : by + 1],
        }
        taken: dict[int, set[int]] = {}
        if px_id != py_id:
            notes["case"] = "a"
            taken[px_id] = set(range(ax, bx + 1))
            taken[py_id] = set(range(ay, by + 1))
        elif bx < ay:
            notes["case"] = "b"
            taken[px_id] = set(range(ax, bx + 1)) | set(range(ay, by + 1))
        else:
            notes["case"] = "c"
            notes["Pxy"] = P[px : py + 1]
            taken[px_id] = set(range(ax, by + 1))

        members = sorted(live[pid][k] for pid, span in taken.items() for k in span)
        drafts.append(Draft(next(ids), Provenance.PHASE2, members, extra_edges=[e], notes=notes))

        for pid, span in taken.items():
            path = live.pop(pid)
            for x in path:
                where.pop(x, None)
            run: list[int] = []
            for k, x in enumerate(path + [None]):
                if x is not None and k not in span:
                    run.append(x)
                    continue
                if run:
                    if path_ediam(tree, run) >= ell:
                        live[next_pid] = run
                        for pos, z in enumerate(run):
                            where[z] = (next_pid, pos)
                        next_pid += 1
                    else:
                        low.append(run)
                run = []

    return drafts, [live[k] for k in sorted(live)], low


def phase3_low_diameter(
    sp: SubdividedSpanner,
    tree: nx.Graph,
    components: list[list[int]],
    drafts: list[Draft],
    strict: bool = False,
) -> list[list[int]]:
    """
    Attach every low component to an adjacent draft through its
    lexicographically smallest connector.

    Returns:
        Components with no connector (orphans).

    Raises:
        OrphanComponent: A component has no connector and ``strict`` is set.
    """
    owner = {x: d.id for d in drafts for x in d.members}
    by_id = {d.id: d for d in drafts}
    orphans = []
    for component in sorted(components, key=lambda c: c[0]):
        best = _best_connector(sp, tree, component, owner)
        if best is None:
            if strict:
                raise OrphanComponent(f"Low component {component} has no MST edge to a level cluster")
            orphans.append(component)
            continue
        _, target, piece = best
        draft = by_id[target]
        draft.members.extend(component)
        draft.augmentations.append(Provenance.PHASE3_AUGMENTED)
        draft.notes.setdefault("phase3", []).append({"component": component, "connector": piece})
        for x in component:
            owner[x] = target
    return orphans


def break_path(tree: nx.Graph, path: list[int], ell: float) -> list[list[int]]:
    """Cut ``path`` greedily into pieces of effective diameter >= ell; a short tail joins the last piece."""
    pieces: list[list[int]] = []
    current: list[int] = []
    total = 0.0
    for x in path:
        current.append(x)
        total += tree.nodes[x]["diam"]
        if total >= ell:
            pieces.append(current)
            current, total = [], 0.0
    if current:
        if pieces:
            pieces[-1].extend(current)
        else:
            pieces.append(current)
    return pieces


def phase4_paths(
    sp: SubdividedSpanner,
    tree: nx.Graph,
    paths: list[list[int]],
    drafts: list[Draft],
    ell: float,
    config: CertConfig,
    ids: Iterator[int],
) -> tuple[list[Draft], list[PathPiece]]:
    """
    Phase 4: break the remaining paths, merging affix pieces into adjacent
    clusters where possible.

    Returns:
        (new Phase-4 drafts, every piece with its fate).
    """
    owner = {x: d.id for d in drafts for x in d.members}
    by_id = {d.id: d for d in drafts}
    created: list[Draft] = []
    pieces: list[PathPiece] = []

    for pid, path in enumerate(paths):
        parts = break_path(tree, path, ell)
        last = len(parts) - 1
        first_index = len(pieces)
        for k, part in enumerate(parts):
            affix = k in (0, last)
            best = _best_connector(sp, tree, part, owner) if affix else None
            long = len(part) >= config.long_threshold
            if best is not None:
                _, target, piece = best
                draft = by_id[target]
                draft.members.extend(part)
                draft.augmentations.append(Provenance.PHASE4_AUGMENTED)
                draft.notes.setdefault("phase4", []).append({"piece": len(pieces), "connector": piece})
                own = False
            else:
                draft = Draft(
                    next(ids),
                    Provenance.PHASE4,
                    sorted(part),
                    notes={
                        "piece": len(pieces),
                        "path": list(part),
                        "long": long,
                        "affix": affix,
                        "ediam": path_ediam(tree, part),
                    },
                )
                created.append(draft)
                target, own = draft.id, True
            pieces.append(
                PathPiece(
                    index=len(pieces),
                    path=pid,
                    members=tuple(part),
                    affix=affix,
                    long=long,
                    target=target,
                    own=own,
                )
            )
        if last >= 1:
            pieces[first_index].sibling = first_index + last
            pieces[first_index + last].sibling = first_index

    return created, pieces


def build_level(
    sp: SubdividedSpanner,
    eps_clusters: list[Cluster],
    edges: list[int],
    level: int,
    ell: float,
    config: CertConfig,
    ids: Iterator[int],
) -> LevelBuild:
    """
    Run Phases 1-4 for one level.

    Args:
        sp: Subdivided spanner.
        eps_clusters: The level-(level-1) clusters, covering every S' vertex.
        edges: Level-i S' edge ids in (weight, u, v) order.
        level: i.
        ell: l_i.
        config: Certifier parameters.
        ids: Cluster id source shared by the whole stream.
    """
    tree = cluster_tree(sp, eps_clusters)
    owner_prev = owner_map(eps_clusters, sp.graph.n)

    drafts, free = phase1_branching(sp, tree, ell, ids)

    rest = tree.subgraph(free)
    long_paths, low, irregular = [], [], []
    for component in _components(tree, free):
        if ediam(tree, component) < ell:
            low.append(component)
            continue
        path = order_path(rest, component)
        if path is None:
            irregular.append(component)
            low.append(component)
        else:
            long_paths.append(path)

    phase2, long_paths, remnants = phase2_path_edges(
        tree, long_paths, edges, owner_prev, (sp.graph.u, sp.graph.v), ell, ids
    )
    drafts.extend(phase2)
    low.extend(remnants)

    had_clusters = bool(drafts)
    orphans = phase3_low_diameter(sp, tree, low, drafts) if drafts else sorted(low, key=lambda c: c[0])
    phase4, pieces = phase4_paths(sp, tree, long_paths, drafts, ell, config, ids)
    drafts.extend(phase4)
    if orphans and phase4:
        orphans = phase3_low_diameter(sp, tree, orphans, drafts)
    # a lone low tree with nothing around it is the expected Residual case
    unexpected = orphans if had_clusters or phase4 else []

    for component in orphans:
        drafts.append(Draft(next(ids), Provenance.RESIDUAL, sorted(component)))

    clusters: dict[int, Cluster] = {}
    member_of: dict[int, int] = {}
    by_eps = {c.id: c for c in eps_clusters}
    for draft in sorted(drafts, key=lambda d: d.id):
        members = sorted(set(draft.members))
        inside = set(members)
        connectors = sorted(
            data["mst"] for a, b, data in tree.edges(members, data=True) if a in inside and b in inside
        )
        vertices = np.concatenate([by_eps[m].vertices for m in members])
        edge_ids = [e for m in members for e in by_eps[m].edges.tolist()] + connectors + draft.extra_edges
        cluster = make_cluster(
            draft.id,
            level,
            sp.graph,
            sp.n_original,
            vertices.tolist(),
            edge_ids,
            draft.origin,
            members=tuple(members),
            connectors=tuple(connectors),
            extra_edges=tuple(draft.extra_edges),
            augmentations=list(draft.augmentations),
            notes=dict(draft.notes),
        )
        clusters[cluster.id] = cluster
        for m in members:
            member_of[m] = cluster.id

    return LevelBuild(
        level=level,
        ell=ell,
        eps_clusters=by_eps,
        tree=tree,
        clusters=clusters,
        member_of=member_of,
        edges=list(edges),
        pieces=pieces,
        orphans=unexpected,
        irregular=irregular,
    )
