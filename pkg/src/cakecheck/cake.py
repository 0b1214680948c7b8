"""Combinatorics of the 16-triangle cake and the five-generator cover.

The relator R3 R1 R2 R3 R2 R1 R3 R1 R2 R3 R2 R1 defines twelve subwords
W_i; the twelve triangles W_i (Delta or Delta'), plus four attachments
W_2 R3, W_5 R3, W_8 R3, W_11 R3, tile the cake.  Its sixteen unglued
boundary sides are paired by eight identification isometries I_1..I_8;
vertex orbits of the boundary corners under the pairings give the
3 - 8 + 1 = -4 Euler characteristic of a genus 3 surface.

Slices are represented by their polar points, so every statement reduces
to a projective equality of vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hermitian import Isometry, projectively_equal
from .construction import THETA_INV_SQ, TriangleConfiguration, angles

# generator indices into cfg.reflections()
R0, R1, R2, R3 = 0, 1, 2, 3

RELATOR = (R3, R1, R2, R3, R2, R1, R3, R1, R2, R3, R2, R1)


class CakeReconstructionError(ValueError):
    """The boundary corner matching did not close into a single 16-cycle,
    or an orbit count disagrees with the published combinatorics."""


def subword(i: int):
    """W_i, the length-i prefix of the relator, as a letter tuple."""
    if not 0 <= i <= 12:
        raise ValueError("subword index must be in 0..12")
    return RELATOR[:i]


def realize_word(letters, cfg: TriangleConfiguration) -> Isometry:
    """Juxtaposition acts on the left: the rightmost letter applies first."""
    gens = cfg.reflections()
    if any(k == R3 for k in letters) and gens[R3] is None:
        raise ValueError("word uses R3 but the mirror construction has not run")
    iso = Isometry.identity(cfg.ctx)
    for k in letters:
        iso = iso * gens[k]
    return iso


# ---------------------------------------------------------------------------
# mapping tables


def _slice_point(cfg, k):
    return (cfg.p1, cfg.p2, cfg.p3)[k - 1]


def _spine_point(cfg, k):
    return (cfg.c1, cfg.c2, cfg.c3)[k - 1]


def verify_mapping_tables(cfg: TriangleConfiguration):
    """All slice and point identities of the subword tables, plus one
    deliberate negative control.  Returns (label, expected, observed)
    triples; slice statements W C_k = C_1 are checked as W p_k prop p_1."""
    checks = []

    # generator table
    gen_table = [
        ("R1 C1 = C2", (R1,), 1, 2), ("R1 C2 = C1", (R1,), 2, 1),
        ("R2 C2 = C3", (R2,), 2, 3), ("R2 C3 = C2", (R2,), 3, 2),
        ("R3 C1 = C1", (R3,), 1, 1), ("R3 C3 = C3", (R3,), 3, 3),
    ]
    table = list(gen_table)
    for i in (1, 6, 7, 12):
        table.append((f"W{i} C1 = C1", subword(i), 1, 1))
    for i in (2, 5, 8, 11):
        table.append((f"W{i} C2 = C1", subword(i), 2, 1))
    for i in (3, 4, 9, 10):
        table.append((f"W{i} C3 = C1", subword(i), 3, 1))

    for label, letters, src, dst in table:
        w = realize_word(letters, cfg)
        ok = projectively_equal(w.apply(_slice_point(cfg, src)), _slice_point(cfg, dst))
        checks.append((label, True, ok))
        # point version of the same identity on the spine representatives
        ok_pt = projectively_equal(w.apply(_spine_point(cfg, src)), _spine_point(cfg, dst))
        checks.append((label.replace("C", "c"), True, ok_pt))

    # negative control: an identity absent from the tables
    w1 = realize_word(subword(1), cfg)
    checks.append(
        ("W1 C2 = C1 (negative control)", False,
         projectively_equal(w1.apply(cfg.p2), cfg.p1))
    )
    return checks


# ---------------------------------------------------------------------------
# boundary sides and identifications

# each boundary side is (triangle label, begin slice, end slice); a slice is
# (word letters, basis index).  The sides are listed in the boundary cyclic
# order that the corner matching below must confirm.
W2R3 = subword(2) + (R3,)
W5R3 = subword(5) + (R3,)
W8R3 = subword(8) + (R3,)
W11R3 = subword(11) + (R3,)

BOUNDARY_SIDES = (
    ("Delta12", ((), 2), ((), 3)),
    ("Delta13", (W2R3, 3), (W2R3, 2)),
    ("Delta13", (W2R3, 1), (W2R3, 2)),
    ("Delta4", (subword(4), 2), (subword(4), 1)),
    ("Delta3", (subword(3), 2), (subword(3), 1)),
    ("Delta14", (W5R3, 1), (W5R3, 2)),
    ("Delta14", (W5R3, 3), (W5R3, 2)),
    ("Delta7", (subword(7), 2), (subword(7), 3)),
    ("Delta6", (subword(6), 2), (subword(6), 3)),
    ("Delta15", (W8R3, 3), (W8R3, 2)),
    ("Delta15", (W8R3, 1), (W8R3, 2)),
    ("Delta10", (subword(10), 2), (subword(10), 1)),
    ("Delta9", (subword(9), 2), (subword(9), 1)),
    ("Delta16", (W11R3, 1), (W11R3, 2)),
    ("Delta16", (W11R3, 3), (W11R3, 2)),
    ("Delta1", (subword(1), 2), (subword(1), 3)),
)

# identification isometries: name, word, source side index, target side index
IDENTIFICATIONS = (
    ("I1", subword(2) + (R3, R2), 0, 1),
    ("I2", subword(4) + (R1, R3) + tuple(reversed(subword(2))), 2, 3),
    ("I3", subword(5) + (R3, R1) + tuple(reversed(subword(3))), 4, 5),
    ("I4", subword(7) + (R2, R3) + tuple(reversed(subword(5))), 6, 7),
    ("I5", subword(8) + (R3, R2) + tuple(reversed(subword(6))), 8, 9),
    ("I6", subword(10) + (R1, R3) + tuple(reversed(subword(8))), 10, 11),
    ("I7", subword(11) + (R3, R1) + tuple(reversed(subword(9))), 12, 13),
    ("I8", subword(1) + (R2, R3) + tuple(reversed(subword(11))), 14, 15),
)

# the sixteen triangles: label -> (word letters, primed orientation flag)
TRIANGLES = tuple(
    [(f"Delta{i}", subword(i), i in (1, 2, 3, 7, 8, 9)) for i in range(1, 13)]
    + [("Delta13", W2R3, False), ("Delta14", W5R3, True),
       ("Delta15", W8R3, False), ("Delta16", W11R3, True)]
)


def _slice_vector(cfg, slice_ref):
    letters, k = slice_ref
    return realize_word(letters, cfg).apply(_slice_point(cfg, k))


def verify_identifications(cfg: TriangleConfiguration, tol: float = 1e-9):
    """Each identification must preserve the form and send the begin/end
    slices of its source side to the begin/end slices of its target side."""
    rows = []
    for name, letters, src, dst in IDENTIFICATIONS:
        iso = realize_word(letters, cfg)
        # the inverse-word letters were appended reversed; each letter is an
        # involution, so reversal alone realizes the inverse
        form_res = iso.form_residual([(cfg.p1, cfg.p2), (cfg.p2, cfg.p3), (cfg.c1, cfg.d3)])
        _, s_begin, s_end = BOUNDARY_SIDES[src]
        _, t_begin, t_end = BOUNDARY_SIDES[dst]
        begin_ok = projectively_equal(
            iso.apply(_slice_vector(cfg, s_begin)), _slice_vector(cfg, t_begin), tol
        )
        end_ok = projectively_equal(
            iso.apply(_slice_vector(cfg, s_end)), _slice_vector(cfg, t_end), tol
        )
        rows.append({
            "name": name,
            "form_residual": form_res,
            "begin_ok": begin_ok,
            "end_ok": end_ok,
            "ok": begin_ok and end_ok and form_res < tol,
        })
    return rows


# ---------------------------------------------------------------------------
# cake assembly


@dataclass
class CakeReport:
    triangle_count: int
    boundary_sides: int
    edge_pairs: int
    vertex_cycles: int
    euler_characteristic: int
    genus: int
    boundary_cycle: tuple  # side indices in confirmed cyclic order
    vertex_orbits: tuple  # tuple of corner-class frozensets
    angle_cycle_residual: float


def _corner_classes(cfg):
    """Group the 32 side endpoints (side, 'begin'|'end') into coincidence
    classes by projective equality of the slice vectors; each class must
    have exactly 2 members and the adjacency must close into a single
    16-cycle."""
    corners = []
    for si, (_, begin, end) in enumerate(BOUNDARY_SIDES):
        corners.append(((si, "begin"), _slice_vector(cfg, begin)))
        corners.append(((si, "end"), _slice_vector(cfg, end)))
    classes = []
    for key, vec in corners:
        for cls in classes:
            if projectively_equal(cls[0][1], vec):
                cls.append((key, vec))
                break
        else:
            classes.append([(key, vec)])
    return classes


def build_cake(cfg: TriangleConfiguration) -> CakeReport:
    """Assemble and audit the cake at a built configuration.

    The corner coincidences are decided numerically, so a configuration is
    required; everything downstream of the coincidence classes is pure
    combinatorics.
    """
    classes = _corner_classes(cfg)
    for cls in classes:
        if len(cls) != 2:
            raise CakeReconstructionError(
                f"corner class of size {len(cls)} (expected 2): "
                f"{[key for key, _ in cls]}"
            )
    if len(classes) != 16:
        raise CakeReconstructionError(f"{len(classes)} corner classes (expected 16)")

    # walk the boundary as an undirected cycle: each corner class joins two
    # distinct sides (the published side orientations follow the pairing
    # declarations, not the boundary orientation)
    neighbours = {si: [] for si in range(len(BOUNDARY_SIDES))}
    for cls in classes:
        sides = [key[0] for key, _ in cls]
        if sides[0] == sides[1]:
            raise CakeReconstructionError(f"side {sides[0]} has coincident endpoints")
        neighbours[sides[0]].append(sides[1])
        neighbours[sides[1]].append(sides[0])
    if any(len(v) != 2 for v in neighbours.values()):
        raise CakeReconstructionError("a side does not meet exactly two others")
    cycle = [0, neighbours[0][0]]
    while True:
        a, b = cycle[-2], cycle[-1]
        step = neighbours[b][1] if neighbours[b][0] == a else neighbours[b][0]
        if step == cycle[0]:
            break
        if step in cycle:
            raise CakeReconstructionError("boundary walk revisits a side before closing")
        cycle.append(step)
    if len(cycle) != 16:
        raise CakeReconstructionError(
            f"boundary closes after {len(cycle)} sides (expected a single 16-cycle)"
        )

    # vertex orbits: union corners across each pairing (begin with begin,
    # end with end), plus the coincidences within the boundary
    corner_class_of = {}
    for idx, cls in enumerate(classes):
        for key, _ in cls:
            corner_class_of[key] = idx
    parent = list(range(len(classes)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for _, _, src, dst in IDENTIFICATIONS:
        union(corner_class_of[(src, "begin")], corner_class_of[(dst, "begin")])
        union(corner_class_of[(src, "end")], corner_class_of[(dst, "end")])

    orbits = {}
    for idx in range(len(classes)):
        orbits.setdefault(find(idx), []).append(idx)
    vertex_cycles = len(orbits)
    edge_pairs = len(IDENTIFICATIONS)
    chi = vertex_cycles - edge_pairs + 1
    if vertex_cycles != 3:
        raise CakeReconstructionError(
            f"{vertex_cycles} vertex cycles (published combinatorics has 3)"
        )
    genus = (2 - chi) // 2

    # the twelve sector angles at the central slice sum to 4(b1+b2+b3) = 2 pi
    beta = angles(cfg)
    angle_residual = abs(4.0 * sum(beta) - 2.0 * math.pi)

    return CakeReport(
        triangle_count=len(TRIANGLES),
        boundary_sides=len(BOUNDARY_SIDES),
        edge_pairs=edge_pairs,
        vertex_cycles=vertex_cycles,
        euler_characteristic=chi,
        genus=genus,
        boundary_cycle=tuple(cycle),
        vertex_orbits=tuple(frozenset(v) for v in orbits.values()),
        angle_cycle_residual=angle_residual,
    )


# ---------------------------------------------------------------------------
# five-generator presentation


H5_WORDS = (
    ("X1", (R1,)),
    ("X2", (R2,)),
    ("X3", (R3, R2, R3)),
    ("X4", (R3, R1, R3)),
    ("X5", (R0,)),
)


def h5_presentation_check(cfg: TriangleConfiguration, tol: float = 1e-10):
    """The index-2 cover generators: each X_i is an involution, all are
    linear (even R3 count), and X5 X4 X3 X2 X1 is the scalar theta^-2."""
    realized = {name: realize_word(letters, cfg) for name, letters in H5_WORDS}
    inv_residuals = {}
    for name, iso in realized.items():
        inv_residuals[name] = (iso * iso).scalar_residual(1.0)
    product = (
        realized["X5"] * realized["X4"] * realized["X3"] * realized["X2"] * realized["X1"]
    )
    prod_residual = product.scalar_residual(THETA_INV_SQ)
    all_linear = not any(iso.antilinear for iso in realized.values())
    ok = (
        all_linear
        and all(r < tol for r in inv_residuals.values())
        and prod_residual < 1e-9
    )
    return {
        "involution_residuals": inv_residuals,
        "product_residual": prod_residual,
        "all_linear": all_linear,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# audit dump


def _word_name(letters):
    if not letters:
        return "Id"
    return ".".join(f"R{k}" for k in letters)


def dump(cfg: TriangleConfiguration) -> str:
    """Plain-text audit tables: triangles, boundary sides in cyclic order,
    pairings, vertex orbits."""
    report = build_cake(cfg)
    lines = ["[triangles]"]
    for label, letters, primed in TRIANGLES:
        base = "base'" if primed else "base"
        lines.append(f"  {label}: {_word_name(letters)} {base}")
    lines.append("[boundary sides, cyclic order]")
    for si in report.boundary_cycle:
        label, begin, end = BOUNDARY_SIDES[si]
        lines.append(
            f"  side {si}: {label} "
            f"[{_word_name(begin[0])} C{begin[1]} -> {_word_name(end[0])} C{end[1]}]"
        )
    lines.append("[pairings]")
    for name, letters, src, dst in IDENTIFICATIONS:
        lines.append(f"  {name} = {_word_name(letters)}: side {src} -> side {dst}")
    lines.append("[vertex orbits]")
    for k, orbit in enumerate(report.vertex_orbits):
        lines.append(f"  orbit {k}: corner classes {sorted(orbit)}")
    lines.append(
        f"[summary] triangles={report.triangle_count} "
        f"edge_pairs={report.edge_pairs} vertex_cycles={report.vertex_cycles} "
        f"chi={report.euler_characteristic} genus={report.genus} "
        f"angle_cycle_residual={report.angle_cycle_residual:.3e}"
    )
    return "\n".join(lines) + "\n"
