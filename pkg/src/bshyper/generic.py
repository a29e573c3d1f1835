"""Finite fragments of the generic structure and extension formulas evaluated in them."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .constructions import amalgam, zero_extension
from .rank import delta, icl, icl_by_pairs, in_kalpha, is_strong, zero_set
from .structures import FinStructure, find_embeddings, free_join, induced, rename, sort_ids
from .weights import AlphaSpec, is_coherent


class IncoherentAtomicMode(ValueError):
    pass


@dataclass
class Fragment:
    spec: AlphaSpec
    mode: str = "generic"
    seed: int = 0
    size_cap: int = 5
    chain: list[FinStructure] = field(default_factory=lambda: [FinStructure([])])
    schedule_log: list[dict] = field(default_factory=list)

    @property
    def top(self) -> FinStructure:
        return self.chain[-1]

    @property
    def steps(self) -> int:
        return sum(1 for e in self.schedule_log if e["kind"] == "amalgam")

    def to_json(self) -> dict:
        return {
            "signature": self.spec.to_json(),
            "mode": self.mode,
            "seed": self.seed,
            "size_cap": self.size_cap,
            "chain": [S.to_json() for S in self.chain],
            "schedule_log": self.schedule_log,
        }

    @classmethod
    def from_json(cls, obj) -> "Fragment":
        return cls(AlphaSpec.from_json(obj["signature"]), obj.get("mode", "generic"), int(obj.get("seed", 0)),
                   int(obj.get("size_cap", 5)), [FinStructure.from_json(s) for s in obj["chain"]],
                   list(obj.get("schedule_log", [])))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


# -- tasks ------------------------------------------------------------------------

def canonical_key(spec: AlphaSpec, B: FinStructure, A=()) -> str:
    """Isomorphism-invariant key of the pair (A, B); exact up to 7 vertices."""
    A = set(A)
    n = len(B)
    verts = list(B.universe)
    best = None
    orders = permutations(range(n)) if n <= 7 else [tuple(range(n))]
    for perm in orders:
        pos = {verts[p]: i for i, p in enumerate(perm)}
        akey = tuple(sorted(pos[v] for v in A))
        rkey = tuple((sym, tuple(sorted(tuple(sorted(pos[x] for x in t)) for t in B.relations.get(sym, ()))))
                     for sym in spec.names)
        key = (akey, rkey)
        if best is None or key < best:
            best = key
    return json.dumps([n, best])


def random_task(spec: AlphaSpec, size: int, rng: random.Random, tries: int = 200):
    """A random pair A <= B with |B| = size and B in K_alpha."""
    V = [f"x{i}" for i in range(1, size + 1)]
    for _ in range(tries):
        p = rng.choice((0.15, 0.3, 0.5))
        rels = {e: [t for t in combinations(V, spec.arity(e)) if rng.random() < p] for e in spec.names}
        B = FinStructure(V, rels)
        if in_kalpha(spec, B):
            break
    else:
        B = FinStructure(V)
    strong = []
    for k in range(size):
        for A in combinations(V, k):
            if is_strong(spec, B, A):
                strong.append(A)
    A = rng.choice(strong) if strong else ()
    return frozenset(A), B


def _image(spec: AlphaSpec, M: FinStructure, B: FinStructure, A: frozenset, rng: random.Random,
           strong: bool = True, limit: int = 64):
    """A random embedding of A into M, strong in M when asked."""
    if not A:
        return {}
    SA = induced(B, A)
    embs = find_embeddings(SA, M, limit=limit)
    rng.shuffle(embs)
    for f in embs:
        if not strong or is_strong(spec, M, f.values()):
            return f
    return None


# -- fragments --------------------------------------------------------------------

def build_fragment(spec: AlphaSpec, steps: int, size_cap: int = 5, mode: str = "generic", seed: int = 0,
                   resume: Fragment | None = None, max_skips: int = 50) -> Fragment:
    """Realise `steps` extension tasks by amalgamation, starting from the empty structure.

    Task i has |B| = 1 + (i mod size_cap) and is drawn from a generator seeded
    by (seed, i), so a resumed run continues exactly where a straight run
    would.  Generic mode places A on a strong image, so every realised B' is
    strong.  Atomic mode accepts any image (A <= B alone keeps M <= N) and
    then joins a rank-0 extension of the closure of B' over that closure, so
    every vertex lies in a rank-0 subset; those links are inclusions only.
    """
    if mode not in ("generic", "atomic"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "atomic" and not is_coherent(spec)[0]:
        raise IncoherentAtomicMode("atomic fragments need coherent weights")
    frag = resume if resume is not None else Fragment(spec, mode, seed, size_cap)
    if resume is not None and (resume.mode != mode or resume.seed != seed or resume.size_cap != size_cap):
        raise ValueError("resume parameters differ from the saved fragment")
    while frag.steps < steps:
        i = frag.steps
        rng = random.Random(f"{seed}:{i}")
        M = frag.top
        size = 1 + i % size_cap
        for skip in range(max_skips + 1):
            A, B = random_task(spec, size, rng)
            if skip == max_skips:
                A = frozenset()
            img = _image(spec, M, B, A, rng, strong=(mode == "generic"))
            if img is not None:
                break
        taken = set(M.universe)
        fresh = {}
        k = len(M)
        for v in B.universe:
            if v in A:
                fresh[v] = img[v]
                continue
            while f"v{k}" in taken:
                k += 1
            fresh[v] = f"v{k}"
            taken.add(fresh[v])
        Bm = rename(B, fresh)
        image = frozenset(fresh[v] for v in A)
        cert = amalgam(spec, M, image, Bm)
        N = cert.result
        frag.chain.append(N)
        frag.schedule_log.append({
            "kind": "amalgam", "step": i, "size": size, "key": canonical_key(spec, B, A),
            "a_image": {v: fresh[v] for v in sort_ids(A)}, "b": Bm.to_json(),
        })
        if mode == "atomic":
            # close the realised copy of B and give the closure a rank-0 extension
            base = icl(spec, N, Bm.universe)
            SB = induced(N, base)
            if delta(spec, SB) > 0:
                Z = zero_extension(spec, SB, variant_seed=seed + i)
                ext = Z.result
                names = {}
                for v in ext.universe:
                    if v in base:
                        continue
                    while f"v{k}" in taken:
                        k += 1
                    names[v] = f"v{k}"
                    taken.add(names[v])
                ext = rename(ext, names)
                frag.chain.append(free_join([N, ext], base))
                frag.schedule_log.append({"kind": "zero", "step": i, "base": sort_ids(base),
                                          "zero_part": sort_ids(ext.universe)})
    return frag


def check_fragment(frag: Fragment) -> dict[str, bool]:
    """Re-verify the fragment invariants from scratch."""
    spec = frag.spec
    top = frag.top
    out = {"top_in_kalpha": bool(in_kalpha(spec, top))}
    # amalgamation links must be strong; zero links are plain inclusions whose
    # new rank-0 part is strong in the result
    idx = 1
    link_ok = []
    for entry in frag.schedule_log:
        prev, cur = frag.chain[idx - 1], frag.chain[idx]
        if not set(prev.universe) <= set(cur.universe) or induced(cur, prev.universe) != prev:
            link_ok.append(False)
        elif entry["kind"] == "amalgam":
            link_ok.append(bool(is_strong(spec, cur, prev.universe)))
        else:
            part = entry["zero_part"]
            link_ok.append(delta(spec, cur, part) == 0 and bool(is_strong(spec, cur, part)))
        idx += 1
    out["links"] = all(link_ok)
    tasks = [e for e in frag.schedule_log if e["kind"] == "amalgam"]
    out["tasks_satisfied"] = all(
        eval_extension_formula(spec, top, e["a_image"], _task_b(e)) for e in tasks)
    if frag.mode == "generic":
        out["realised_strong"] = all(bool(is_strong(spec, top, FinStructure.from_json(e["b"]).universe))
                                     for e in tasks)
    else:
        out["rank_zero_cover"] = zero_set(spec, top) == top.vertex_set
    return out


def _task_b(entry) -> FinStructure:
    """The task's B with its A-part named by the A-side labels used in a_image."""
    Bm = FinStructure.from_json(entry["b"])
    back = {img: a for a, img in entry["a_image"].items()}
    return rename(Bm, {v: back.get(v, f"y:{v}") for v in Bm.universe})


# -- formulas ---------------------------------------------------------------------

def eval_extension_formula(spec: AlphaSpec, M: FinStructure, a_image: dict, B: FinStructure) -> bool:
    """Does the extension formula of (A, B) hold at a_image in M?

    A is B restricted to the keys of a_image.  True iff a_image is an
    isomorphism of A onto its image and B embeds into M over it.  This is
    truth in the finite structure M; a false answer says nothing about the
    generic.
    """
    A = list(a_image)
    if not set(A) <= set(B.universe):
        raise ValueError("a_image must be defined on part of B")
    img = [a_image[a] for a in A]
    if len(set(img)) != len(img) or not set(img) <= set(M.universe):
        return False
    SA = induced(B, A)
    if rename(SA, dict(a_image)) != induced(M, img):
        return False
    return bool(find_embeddings(B, M, dict(a_image), limit=1))


def chain_minimal_reduce(spec: AlphaSpec, B: FinStructure, A, cap: int = 16) -> FinStructure:
    """The union of a maximal chain of minimal pairs over A inside B, i.e. icl_B(A).

    Uses the fixed-point closure on small structures and the minimiser-based
    closure otherwise; the result is strong in B.
    """
    A = frozenset(A)
    if len(B) - len(A) <= cap:
        C = icl_by_pairs(spec, B, A, cap=cap)
    else:
        C = icl(spec, B, A)
    assert is_strong(spec, B, C), "closure is not strong"
    return induced(B, C)
