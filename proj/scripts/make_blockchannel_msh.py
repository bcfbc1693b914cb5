#!/usr/bin/env python3
"""Generates data/nonconstant_convection.msh.

Channel (0,5)x(0,2)x(0,2) minus the block (0.5,0.8)x(0.8,1.2)x(0.8,1.2),
meshed by splitting a graded structured grid into 6 tetrahedra per cell
(Kuhn split, consistent across cell faces). Boundary triangles carry
physical tags:
  1  outer channel walls and inlet (Dirichlet, u = 1)
  2  block walls (Dirichlet, u = 0)
  3  outlet x = 5 (homogeneous Neumann)
"""

import itertools
import os

XS = [0.0, 0.5, 0.8, 1.5, 2.2, 2.9, 3.6, 4.3, 5.0]
YS = [0.0, 0.8, 1.2, 2.0]
ZS = [0.0, 0.8, 1.2, 2.0]

HOLE = ((0.5, 0.8), (0.8, 1.2), (0.8, 1.2))
PERMS = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def in_hole(cx, cy, cz):
    return (HOLE[0][0] < cx < HOLE[0][1] and HOLE[1][0] < cy < HOLE[1][1]
            and HOLE[2][0] < cz < HOLE[2][1])


def main():
    nx, ny, nz = len(XS), len(YS), len(ZS)
    node_id = {}
    coords = []

    def nid(i, j, k):
        key = (i, j, k)
        if key not in node_id:
            node_id[key] = len(coords) + 1  # 1-based
            coords.append((XS[i], YS[j], ZS[k]))
        return node_id[key]

    tets = []
    for i, j, k in itertools.product(range(nx - 1), range(ny - 1),
                                     range(nz - 1)):
        cx = 0.5 * (XS[i] + XS[i + 1])
        cy = 0.5 * (YS[j] + YS[j + 1])
        cz = 0.5 * (ZS[k] + ZS[k + 1])
        if in_hole(cx, cy, cz):
            continue
        corner = {}
        for a, b, c in itertools.product((0, 1), repeat=3):
            corner[(a, b, c)] = nid(i + a, j + b, k + c)
        for perm in PERMS:
            path = [(0, 0, 0)]
            cur = [0, 0, 0]
            for axis in perm:
                cur[axis] = 1
                path.append(tuple(cur))
            tets.append(tuple(corner[p] for p in path))

    # boundary faces: sorted triple -> (unsorted triple, count)
    faces = {}
    for tet in tets:
        for tri in itertools.combinations(tet, 3):
            key = tuple(sorted(tri))
            if key in faces:
                faces[key][1] += 1
            else:
                faces[key] = [tri, 1]

    def face_tag(tri):
        pts = [coords[v - 1] for v in tri]
        if all(abs(p[0] - 5.0) < 1e-12 for p in pts):
            return 3
        for axis, (lo, hi) in enumerate(HOLE):
            for plane in (lo, hi):
                if all(abs(p[axis] - plane) < 1e-12 for p in pts) and all(
                        HOLE[a][0] - 1e-12 <= p[a] <= HOLE[a][1] + 1e-12
                        for p in pts for a in range(3) if a != axis):
                    return 2
        return 1

    tris = [(faces[key][0], face_tag(faces[key][0])) for key in sorted(faces)
            if faces[key][1] == 1]

    out = os.path.join(os.path.dirname(__file__), "..", "data",
                       "nonconstant_convection.msh")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$PhysicalNames\n3\n")
        f.write('2 1 "walls"\n2 2 "block"\n2 3 "outlet"\n')
        f.write("$EndPhysicalNames\n")
        f.write("$Nodes\n%d\n" % len(coords))
        for n, (x, y, z) in enumerate(coords, start=1):
            f.write("%d %.17g %.17g %.17g\n" % (n, x, y, z))
        f.write("$EndNodes\n")
        f.write("$Elements\n%d\n" % (len(tris) + len(tets)))
        eid = 1
        for tri, tag in tris:
            f.write("%d 2 2 %d %d %d %d %d\n" % (eid, tag, tag, *tri))
            eid += 1
        for tet in tets:
            f.write("%d 4 2 0 0 %d %d %d %d\n" % (eid, *tet))
            eid += 1
        f.write("$EndElements\n")
    print("wrote %s: %d nodes, %d tets, %d boundary tris" %
          (out, len(coords), len(tets), len(tris)))


if __name__ == "__main__":
    main()
