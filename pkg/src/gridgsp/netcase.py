"""Power-network case parsing and graph/Laplacian construction.

Supports a subset of the MATPOWER case format (``mpc.baseMVA``, ``mpc.bus``,
``mpc.branch``, ``mpc.gen`` matrices, semicolon-terminated rows, ``%``
comments) plus a native JSON schema for hand-built toy cases (see README).

Bus ids are renumbered to 1..N preserving file order; the reference bus is
the bus with MATPOWER type 3.  Quantities are stored in per-unit on the case
base power, angles in radians.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DisconnectedNetwork,
    MalformedCase,
    NoReferenceBus,
    ZeroReactanceBranch,
)

#: edge-weight conventions for the susceptance Laplacian
WEIGHT_CONVENTIONS = ("susceptance", "inverse-reactance")


@dataclass(frozen=True)
class Bus:
    id: int                       # 1-based, contiguous after renumbering
    voltage_magnitude: float      # per-unit
    voltage_angle: float          # radians
    is_reference: bool
    active_injection: float       # per-unit, generation minus load
    reactive_injection: float     # per-unit
    shunt_conductance: float = 0.0
    shunt_susceptance: float = 0.0


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    resistance: float
    reactance: float
    total_charging_susceptance: float = 0.0
    tap_ratio: float = 1.0        # 1.0 if no transformer
    phase_shift: float = 0.0      # radians
    in_service: bool = True


@dataclass(frozen=True)
class Network:
    buses: tuple
    branches: tuple
    base_mva: float
    name: str = ""

    @property
    def n_bus(self):
        return len(self.buses)

    @property
    def reference_bus(self):
        """1-based id of the reference bus."""
        for b in self.buses:
            if b.is_reference:
                return b.id
        raise NoReferenceBus("network has no reference bus")

    def in_service_branches(self):
        return [br for br in self.branches if br.in_service]

    def angles(self):
        return np.array([b.voltage_angle for b in self.buses])

    def magnitudes(self):
        return np.array([b.voltage_magnitude for b in self.buses])

    def active_injections(self):
        return np.array([b.active_injection for b in self.buses])

    def reactive_injections(self):
        return np.array([b.reactive_injection for b in self.buses])


@dataclass(frozen=True)
class LaplacianMatrix:
    matrix: np.ndarray
    edge_weights: dict = field(compare=False)   # (k, n) k<n -> weight >= 0

    @property
    def n_bus(self):
        return self.matrix.shape[0]

    def edges(self):
        """Merged edges as a list of (k, n) pairs, k < n, in canonical order."""
        return list(self.edge_weights)


def merged_edge_pairs(net):
    """Unique unordered in-service bus pairs, sorted; parallel circuits merge."""
    pairs = {tuple(sorted((br.from_bus, br.to_bus)))
             for br in net.in_service_branches()}
    return sorted(pairs)


# ---------------------------------------------------------------------------
# MATPOWER parsing
# ---------------------------------------------------------------------------

_MATRIX_RE = r"mpc\.%s\s*=\s*\[(.*?)\]\s*;"


def _strip_comments(text):
    return re.sub(r"%[^\n]*", "", text)


def _read_matrix(text, name, required=True):
    m = re.search(_MATRIX_RE % name, text, re.S)
    if m is None:
        if required:
            raise MalformedCase(f"missing mpc.{name} section")
        return []
    rows = []
    for raw in m.group(1).split(";"):
        raw = raw.strip()
        if not raw:
            continue
        try:
            rows.append([float(v) for v in raw.split()])
        except ValueError as exc:
            raise MalformedCase(f"non-numeric entry in mpc.{name}: {raw!r}") from exc
    return rows


def parse_matpower_case(text, name=""):
    """Parse MATPOWER case-file content into a Network."""
    clean = _strip_comments(text)
    if not name:
        m = re.search(r"function\s+mpc\s*=\s*(\w+)", clean)
        name = m.group(1) if m else "case"

    m = re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)\s*;", clean)
    if m is None:
        raise MalformedCase("missing mpc.baseMVA")
    base = float(m.group(1))

    bus_rows = _read_matrix(clean, "bus")
    branch_rows = _read_matrix(clean, "branch")
    gen_rows = _read_matrix(clean, "gen", required=False)
    if not bus_rows or not branch_rows:
        raise MalformedCase("empty bus or branch table")

    # renumber external ids to 1..N preserving file order
    ext_ids = []
    for row in bus_rows:
        if len(row) < 9:
            raise MalformedCase("bus row too short")
        ext_ids.append(int(row[0]))
    if len(set(ext_ids)) != len(ext_ids):
        raise MalformedCase("duplicate bus ids")
    renum = {ext: i + 1 for i, ext in enumerate(ext_ids)}

    pg = dict.fromkeys(ext_ids, 0.0)
    qg = dict.fromkeys(ext_ids, 0.0)
    for row in gen_rows:
        if len(row) < 8:
            raise MalformedCase("gen row too short")
        gbus = int(row[0])
        if gbus not in renum:
            raise MalformedCase(f"generator at unknown bus {gbus}")
        if row[7] > 0:  # gen status
            pg[gbus] += row[1]
            qg[gbus] += row[2]

    buses = []
    ref_count = 0
    for row in bus_rows:
        ext = int(row[0])
        btype = int(row[1])
        is_ref = btype == 3
        ref_count += is_ref
        buses.append(Bus(
            id=renum[ext],
            voltage_magnitude=row[7],
            voltage_angle=math.radians(row[8]),
            is_reference=is_ref,
            active_injection=(pg[ext] - row[2]) / base,
            reactive_injection=(qg[ext] - row[3]) / base,
            shunt_conductance=row[4] / base,
            shunt_susceptance=row[5] / base,
        ))
    if ref_count == 0:
        raise NoReferenceBus("no type-3 bus in case")
    if ref_count > 1:
        raise MalformedCase(f"{ref_count} reference buses; expected exactly one")

    branches = []
    for row in branch_rows:
        if len(row) < 11:
            raise MalformedCase("branch row too short")
        fext, text_ = int(row[0]), int(row[1])
        if fext not in renum or text_ not in renum:
            raise MalformedCase(f"branch references unknown bus ({fext},{text_})")
        in_service = row[10] > 0
        if in_service and row[3] == 0.0:
            raise ZeroReactanceBranch(f"branch ({fext},{text_}) has x = 0")
        if fext == text_:
            raise MalformedCase(f"self-loop branch at bus {fext}")
        branches.append(Branch(
            from_bus=renum[fext],
            to_bus=renum[text_],
            resistance=row[2],
            reactance=row[3],
            total_charging_susceptance=row[4],
            tap_ratio=row[8] if row[8] != 0.0 else 1.0,
            phase_shift=math.radians(row[9]),
            in_service=in_service,
        ))

    net = Network(buses=tuple(buses), branches=tuple(branches),
                  base_mva=base, name=name)
    if net.n_bus < 2:
        raise MalformedCase("network must have at least 2 buses")
    return net


# ---------------------------------------------------------------------------
# native JSON schema
# ---------------------------------------------------------------------------

def parse_json_case(text):
    """Parse the native JSON case schema (see README for the format)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCase(f"invalid JSON case: {exc}") from exc
    try:
        base = float(doc.get("base_mva", 100.0))
        name = doc.get("name", "case")
        pg = {}
        qg = {}
        for g in doc.get("generators", []):
            if g.get("status", 1) > 0:
                pg[g["bus"]] = pg.get(g["bus"], 0.0) + float(g.get("pg", 0.0))
                qg[g["bus"]] = qg.get(g["bus"], 0.0) + float(g.get("qg", 0.0))
        buses = []
        ref_count = 0
        for i, b in enumerate(doc["buses"]):
            bid = int(b.get("id", i + 1))
            is_ref = b.get("type", "pq") == "ref"
            ref_count += is_ref
            if "p_inj" in b:
                p_inj, q_inj = float(b["p_inj"]), float(b.get("q_inj", 0.0))
            else:
                p_inj = (pg.get(bid, 0.0) - float(b.get("pd", 0.0))) / base
                q_inj = (qg.get(bid, 0.0) - float(b.get("qd", 0.0))) / base
            va = float(b["va_rad"]) if "va_rad" in b else math.radians(float(b.get("va_deg", 0.0)))
            buses.append(Bus(
                id=i + 1,
                voltage_magnitude=float(b.get("vm", 1.0)),
                voltage_angle=va,
                is_reference=is_ref,
                active_injection=p_inj,
                reactive_injection=q_inj,
                shunt_conductance=float(b.get("gs", 0.0)),
                shunt_susceptance=float(b.get("bs", 0.0)),
            ))
        if ref_count == 0:
            raise NoReferenceBus("no bus with type 'ref'")
        if ref_count > 1:
            raise MalformedCase("more than one reference bus")
        branches = []
        for br in doc["branches"]:
            in_service = br.get("status", 1) > 0
            x = float(br["x"])
            if in_service and x == 0.0:
                raise ZeroReactanceBranch(f"branch ({br['from']},{br['to']}) has x = 0")
            if br["from"] == br["to"]:
                raise MalformedCase("self-loop branch")
            shift = float(br["shift_rad"]) if "shift_rad" in br else math.radians(float(br.get("shift_deg", 0.0)))
            branches.append(Branch(
                from_bus=int(br["from"]),
                to_bus=int(br["to"]),
                resistance=float(br.get("r", 0.0)),
                reactance=x,
                total_charging_susceptance=float(br.get("b", 0.0)),
                tap_ratio=float(br.get("tap", 1.0)) or 1.0,
                phase_shift=shift,
                in_service=in_service,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedCase(f"bad JSON case structure: {exc}") from exc
    net = Network(buses=tuple(buses), branches=tuple(branches),
                  base_mva=base, name=name)
    if net.n_bus < 2:
        raise MalformedCase("network must have at least 2 buses")
    return net


def parse_case(text, name=""):
    """Dispatch on content: JSON object or MATPOWER case text."""
    if text.lstrip().startswith("{"):
        return parse_json_case(text)
    return parse_matpower_case(text, name=name)


def network_to_json(net):
    """Serialize a Network to the native JSON schema (lossless round-trip)."""
    doc = {
        "name": net.name,
        "base_mva": net.base_mva,
        "buses": [
            {
                "id": b.id,
                "type": "ref" if b.is_reference else "pq",
                "vm": b.voltage_magnitude,
                "va_rad": b.voltage_angle,
                "p_inj": b.active_injection,
                "q_inj": b.reactive_injection,
                "gs": b.shunt_conductance,
                "bs": b.shunt_susceptance,
            }
            for b in net.buses
        ],
        "branches": [
            {
                "from": br.from_bus,
                "to": br.to_bus,
                "r": br.resistance,
                "x": br.reactance,
                "b": br.total_charging_susceptance,
                "tap": br.tap_ratio,
                "shift_rad": br.phase_shift,
                "status": 1 if br.in_service else 0,
            }
            for br in net.branches
        ],
    }
    return json.dumps(doc, indent=1)


# ---------------------------------------------------------------------------
# Laplacian construction
# ---------------------------------------------------------------------------

def branch_weight(branch, convention="susceptance"):
    """Edge weight of a single branch.

    "susceptance" uses the magnitude of the series-admittance imaginary part,
    x / (r^2 + x^2); "inverse-reactance" uses the DC shortcut 1 / x.
    """
    if convention == "susceptance":
        return branch.reactance / (branch.resistance ** 2 + branch.reactance ** 2)
    if convention == "inverse-reactance":
        return 1.0 / branch.reactance
    raise ValueError(f"unknown weight convention {convention!r}")


def build_laplacian(net, convention="susceptance", require_connected=True):
    """Assemble the susceptance Laplacian L = B of the in-service graph.

    Parallel branches merge into one edge with summed weight.  Tap ratios and
    charging susceptance are ignored here (they enter only the AC model).
    Raises DisconnectedNetwork when the graph is not connected, unless
    `require_connected` is False (useful for component counting).
    """
    n = net.n_bus
    weights = {}
    for br in net.in_service_branches():
        key = tuple(sorted((br.from_bus, br.to_bus)))
        weights[key] = weights.get(key, 0.0) + branch_weight(br, convention)
    weights = dict(sorted(weights.items()))

    L = np.zeros((n, n))
    for (k, m), w in weights.items():
        L[k - 1, m - 1] -= w
        L[m - 1, k - 1] -= w
        L[k - 1, k - 1] += w
        L[m - 1, m - 1] += w
    lap = LaplacianMatrix(matrix=L, edge_weights=weights)
    if require_connected and validate_connectivity(lap) != 1:
        raise DisconnectedNetwork("in-service branch graph is not connected")
    return lap


def validate_connectivity(lap):
    """Number of connected components, by graph traversal (not eigenvalues)."""
    n = lap.n_bus
    adj = [[] for _ in range(n)]
    for (k, m) in lap.edge_weights:
        adj[k - 1].append(m - 1)
        adj[m - 1].append(k - 1)
    seen = [False] * n
    components = 0
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return components
