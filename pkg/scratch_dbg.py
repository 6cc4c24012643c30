import numpy as np
from cmod.triangulate import sphere_triangulation

g, _ = sphere_triangulation(2)
rng = np.random.default_rng(7)
face_set = {tuple(sorted(f)): tuple(f) for f in g.faces}
edge_faces = {}
deg = {v: 0 for v in range(g.n)}
edges = set()
for key in face_set:
    a, b, c = key
    for p in ((a, b), (b, c), (a, c)):
        edge_faces.setdefault(p, []).append(key)
        edges.add(p)
for u, v in edges:
    deg[u] += 1
    deg[v] += 1

def check(tag):
    for key in face_set:
        a, b, c = key
        for p in ((a, b), (b, c), (a, c)):
            assert p in edges, f"{tag}: face {key} edge {p} missing"
    for e, fs in edge_faces.items():
        if e in edges:
            assert len(fs) == 2, f"{tag}: edge {e} has {len(fs)} faces"

check("init")
done = 0
attempts = 0
while done < 120 and attempts < 50 * 120 + 100:
    attempts += 1
    pool = sorted(edges)
    u, v = pool[int(rng.integers(0, len(pool)))]
    fs = edge_faces[(u, v)]
    if len(fs) != 2:
        print("BAD edge_faces len", (u, v), len(fs), "at attempt", attempts)
        break
    opp = []
    for key in fs:
        opp.extend(x for x in key if x != u and x != v)
    a, b = sorted(opp)
    if a == b or (a, b) in edges:
        continue
    if deg[u] <= 4 or deg[v] <= 4:
        continue
    if deg[a] >= 7 or deg[b] >= 7:
        continue
    for key in fs:
        for p in ((key[0], key[1]), (key[1], key[2]), (key[0], key[2])):
            edge_faces[p].remove(key)
        del face_set[key]
    for tri in ((u, a, b), (v, a, b)):
        key = tuple(sorted(tri))
        face_set[key] = key
        for p in ((key[0], key[1]), (key[1], key[2]), (key[0], key[2])):
            edge_faces.setdefault(p, []).append(key)
    edges.remove((u, v))
    edges.add((a, b))
    deg[u] -= 1; deg[v] -= 1; deg[a] += 1; deg[b] += 1
    done += 1
    try:
        check(f"flip {done} edge ({u},{v}) -> ({a},{b})")
    except AssertionError as e:
        print(e)
        break
print("done", done, "attempts", attempts)
