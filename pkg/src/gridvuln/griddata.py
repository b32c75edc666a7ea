"""Temporal grid records: CSV parsing, validation and yearly snapshots.

Nodes (substations) and edges (lines) carry a commissioning year and an
optional decommissioning year. An element is active in year ``y`` when
``commissioned <= y < decommissioned``.
"""

import csv
import io
import logging
import os
from dataclasses import dataclass

from .errors import EmptySnapshotError, GridDataError
from .graph import Snapshot

__all__ = [
    "ElementRecord",
    "TemporalDataset",
    "NODE_COLUMNS",
    "EDGE_COLUMNS",
    "parse_dataset",
    "load_dataset",
    "serialize_dataset",
    "write_dataset",
    "snapshot",
]

log = logging.getLogger(__name__)

NODE_COLUMNS = ("id", "name", "commissioned", "decommissioned", "voltage_kv", "lat", "lon")
EDGE_COLUMNS = ("id", "from_id", "to_id", "commissioned", "decommissioned", "voltage_kv")


@dataclass(frozen=True)
class ElementRecord:
    id: str
    kind: str  # "node" or "edge"
    commissioned: int
    decommissioned: int = None
    name: str = None
    endpoints: tuple = None
    voltage_kv: float = None
    lat: float = None
    lon: float = None

    def active(self, year):
        return self.commissioned <= year and (self.decommissioned is None or year < self.decommissioned)


@dataclass(frozen=True)
class TemporalDataset:
    nodes: tuple
    edges: tuple

    @property
    def year_range(self):
        years = [r.commissioned for r in self.nodes + self.edges]
        years += [r.decommissioned for r in self.nodes + self.edges if r.decommissioned is not None]
        return (min(r.commissioned for r in self.nodes), max(years))

    def events(self):
        """Sorted distinct years in which any element appears or disappears."""
        ys = {r.commissioned for r in self.nodes + self.edges}
        ys |= {r.decommissioned for r in self.nodes + self.edges if r.decommissioned is not None}
        return sorted(ys)


def _rows(stream, columns, label):
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    text = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    header = None
    try:
        for lineno, line in enumerate(text, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            row = next(csv.reader([line]))
            if header is None:
                header = tuple(c.strip() for c in row)
                if header != columns:
                    raise GridDataError(
                        f"{label}: expected header {','.join(columns)}, got {','.join(header)}",
                        line=lineno,
                    )
                continue
            if len(row) != len(columns):
                raise GridDataError(
                    f"{label}: expected {len(columns)} fields, got {len(row)}", line=lineno
                )
            yield lineno, dict(zip(columns, (c.strip() for c in row)))
    except UnicodeDecodeError as exc:
        raise GridDataError(f"{label}: not valid UTF-8 ({exc.reason})") from None
    finally:
        text.detach()
    if header is None:
        raise GridDataError(f"{label}: missing header")


def _year(value, lineno, fieldname, optional=False):
    if value == "":
        if optional:
            return None
        raise GridDataError("missing year", line=lineno, field=fieldname)
    if len(value) != 4 or not value.isdigit():
        raise GridDataError(f"year must be a 4-digit integer, got {value!r}", line=lineno, field=fieldname)
    return int(value)


def _number(value, lineno, fieldname, positive=False):
    if value == "":
        return None
    try:
        x = float(value)
    except ValueError:
        raise GridDataError(f"not a number: {value!r}", line=lineno, field=fieldname) from None
    if positive and not x > 0:
        raise GridDataError(f"must be positive, got {value!r}", line=lineno, field=fieldname)
    return x


def _interval(lineno, commissioned, decommissioned):
    if decommissioned is not None and decommissioned < commissioned:
        raise GridDataError(
            f"decommissioned ({decommissioned}) precedes commissioned ({commissioned})",
            line=lineno,
            field="decommissioned",
        )


def parse_dataset(node_file, edge_file):
    """Parse and validate ``nodes.csv`` / ``edges.csv`` byte streams.

    Records are stored sorted by id, so the result does not depend on row
    order. Raises :class:`GridDataError` naming the line and field at fault.
    """
    nodes = {}
    for lineno, row in _rows(node_file, NODE_COLUMNS, "nodes.csv"):
        nid = row["id"]
        if not nid:
            raise GridDataError("empty id", line=lineno, field="id")
        if nid in nodes:
            raise GridDataError(f"duplicate node id {nid!r}", line=lineno, field="id")
        c = _year(row["commissioned"], lineno, "commissioned")
        d = _year(row["decommissioned"], lineno, "decommissioned", optional=True)
        _interval(lineno, c, d)
        nodes[nid] = ElementRecord(
            id=nid,
            kind="node",
            name=row["name"],
            commissioned=c,
            decommissioned=d,
            voltage_kv=_number(row["voltage_kv"], lineno, "voltage_kv", positive=True),
            lat=_number(row["lat"], lineno, "lat"),
            lon=_number(row["lon"], lineno, "lon"),
        )
    if not nodes:
        raise GridDataError("nodes.csv: no node records")

    edges = {}
    for lineno, row in _rows(edge_file, EDGE_COLUMNS, "edges.csv"):
        eid = row["id"]
        if not eid:
            raise GridDataError("empty id", line=lineno, field="id")
        if eid in edges:
            raise GridDataError(f"duplicate edge id {eid!r}", line=lineno, field="id")
        a, b = row["from_id"], row["to_id"]
        for fieldname, end in (("from_id", a), ("to_id", b)):
            if end not in nodes:
                raise GridDataError(f"dangling endpoint {end!r}", line=lineno, field=fieldname)
        if a == b:
            raise GridDataError(f"self-loop on node {a!r}", line=lineno, field="to_id")
        c = _year(row["commissioned"], lineno, "commissioned")
        d = _year(row["decommissioned"], lineno, "decommissioned", optional=True)
        _interval(lineno, c, d)
        for end in (a, b):
            nd = nodes[end]
            starts = max(c, nd.commissioned)
            ends = min(x for x in (d, nd.decommissioned, 10**9) if x is not None)
            if starts >= ends:
                raise GridDataError(
                    f"edge {eid!r} is never active together with endpoint {end!r}", line=lineno
                )
            if starts != c or ends != (d if d is not None else 10**9):
                log.warning("edge %s outlives endpoint %s; active only while both exist", eid, end)
        edges[eid] = ElementRecord(
            id=eid,
            kind="edge",
            endpoints=(a, b),
            commissioned=c,
            decommissioned=d,
            voltage_kv=_number(row["voltage_kv"], lineno, "voltage_kv", positive=True),
        )

    return TemporalDataset(
        nodes=tuple(nodes[k] for k in sorted(nodes)),
        edges=tuple(edges[k] for k in sorted(edges)),
    )


def load_dataset(directory):
    """Read ``nodes.csv`` and ``edges.csv`` from ``directory``."""
    paths = [os.path.join(directory, f) for f in ("nodes.csv", "edges.csv")]
    for p in paths:
        if not os.path.isfile(p):
            raise GridDataError(f"missing input file {p}")
    with open(paths[0], "rb") as fn, open(paths[1], "rb") as fe:
        return parse_dataset(fn, fe)


def _fmt(x):
    if x is None:
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def serialize_dataset(dataset):
    """Inverse of :func:`parse_dataset`; returns ``(nodes_bytes, edges_bytes)``."""
    nbuf, ebuf = io.StringIO(), io.StringIO()
    w = csv.writer(nbuf, lineterminator="\n")
    w.writerow(NODE_COLUMNS)
    for r in dataset.nodes:
        w.writerow([r.id, r.name or "", r.commissioned, _fmt(r.decommissioned),
                    _fmt(r.voltage_kv), _fmt(r.lat), _fmt(r.lon)])
    w = csv.writer(ebuf, lineterminator="\n")
    w.writerow(EDGE_COLUMNS)
    for r in dataset.edges:
        w.writerow([r.id, r.endpoints[0], r.endpoints[1], r.commissioned,
                    _fmt(r.decommissioned), _fmt(r.voltage_kv)])
    return nbuf.getvalue().encode("utf-8"), ebuf.getvalue().encode("utf-8")


def write_dataset(dataset, directory):
    os.makedirs(directory, exist_ok=True)
    nb, eb = serialize_dataset(dataset)
    with open(os.path.join(directory, "nodes.csv"), "wb") as f:
        f.write(nb)
    with open(os.path.join(directory, "edges.csv"), "wb") as f:
        f.write(eb)


def snapshot(dataset, year):
    """Graph of the elements active in ``year``.

    Dense node indices follow lexicographic id order. An edge appears only
    when it and both of its endpoints are active.
    """
    first = dataset.year_range[0]
    if year < first:
        raise EmptySnapshotError(f"no elements exist in {year}; the first commissioning is {first}")
    live = [r.id for r in dataset.nodes if r.active(year)]
    if not live:
        raise EmptySnapshotError(f"no active nodes in {year}")
    index = {nid: i for i, nid in enumerate(live)}
    pairs, eids = [], []
    for r in dataset.edges:
        a, b = r.endpoints
        if r.active(year) and a in index and b in index:
            pairs.append((index[a], index[b]))
            eids.append(r.id)
    return Snapshot.from_edges(len(live), pairs, ids=live, edge_ids=eids, year=year)
