"""Gate-level circuits for the tree-model dynamic programme.

``emit_scw_circuit(n, d, k)`` builds one circuit for all games with ``n``
vertices, ranks below ``d`` and tree-models with ``k`` colours and height
``k``. Emission is uniform: no constant folding and no dependence on the
input, so the depth depends on ``k`` only.

The tree-model is embedded into ``k + 1`` layers of ``n`` slots each. Layer 0
slot ``v`` is vertex ``v``; a slot in layer ``l`` selects its children in
layer ``l - 1`` through its ``TCC`` bits and its colour pairs through ``TCS``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import FormatError, ParityGame, Player, WinnerPartition
from .enforcement import Enforcement, all_enforcements, enf_leq, enf_merge
from .scw import check_model
from .treemodel import TreeModel, pad_palette, pad_to_height

EMIT_LIMIT = 4096


class Gate(enum.IntEnum):
    INPUT = 0
    CONST0 = 1
    CONST1 = 2
    NOT = 3
    AND = 4
    OR = 5


@dataclass
class Circuit:
    """Gates in topological order; gate ``i`` of kind INPUT reads input bit ``i``."""

    num_inputs: int
    kinds: list[Gate] = field(default_factory=list)
    inputs: list[tuple[int, ...]] = field(default_factory=list)
    outputs: list[tuple[int, str]] = field(default_factory=list)
    params: tuple[int, int, int] | None = None

    def __post_init__(self):
        if not self.kinds:
            for _ in range(self.num_inputs):
                self.kinds.append(Gate.INPUT)
                self.inputs.append(())

    def __len__(self) -> int:
        return len(self.kinds)

    def add(self, kind: Gate, ins: Sequence[int] = ()) -> int:
        if kind is Gate.NOT and len(ins) != 1:
            raise ValueError("NOT takes exactly one input")
        gid = len(self.kinds)
        if any(not 0 <= i < gid for i in ins):
            raise ValueError("gate inputs must refer to earlier gates")
        self.kinds.append(kind)
        self.inputs.append(tuple(ins))
        return gid

    def AND(self, *ins: int) -> int:
        return self.add(Gate.AND, ins)

    def OR(self, *ins: int) -> int:
        return self.add(Gate.OR, ins)

    def NOT(self, x: int) -> int:
        return self.add(Gate.NOT, (x,))

    def output(self, gid: int, label: str) -> None:
        self.outputs.append((gid, label))

    @property
    def gate_count(self) -> int:
        return len(self.kinds) - self.num_inputs

    def depths(self) -> list[int]:
        dep = [0] * len(self.kinds)
        for g, (kind, ins) in enumerate(zip(self.kinds, self.inputs)):
            if kind is not Gate.INPUT:
                dep[g] = 1 + max((dep[i] for i in ins), default=0)
        return dep

    def depth(self, prefix: str = "win") -> int:
        """Longest path into the outputs whose label starts with ``prefix``."""
        dep = self.depths()
        return max((dep[g] for g, lab in self.outputs if lab.startswith(prefix)), default=0)


# --- evaluation --------------------------------------------------------------


def eval_batch(circuit: Circuit, batch: Sequence[Sequence[int]]) -> list[list[int]]:
    """Evaluate many input vectors at once; bit ``j`` of every wire is instance ``j``."""
    m = len(batch)
    for bits in batch:
        if len(bits) != circuit.num_inputs:
            raise ValueError(f"expected {circuit.num_inputs} input bits, got {len(bits)}")
    full = (1 << m) - 1
    val = [0] * len(circuit.kinds)
    for i in range(circuit.num_inputs):
        word = 0
        for j, bits in enumerate(batch):
            if bits[i]:
                word |= 1 << j
        val[i] = word
    for g in range(circuit.num_inputs, len(circuit.kinds)):
        kind, ins = circuit.kinds[g], circuit.inputs[g]
        if kind is Gate.AND:
            w = full
            for i in ins:
                w &= val[i]
        elif kind is Gate.OR:
            w = 0
            for i in ins:
                w |= val[i]
        elif kind is Gate.NOT:
            w = full & ~val[ins[0]]
        elif kind is Gate.CONST1:
            w = full
        elif kind is Gate.CONST0:
            w = 0
        else:
            raise ValueError(f"INPUT gate {g} beyond the input range")
        val[g] = w
    return [[(val[g] >> j) & 1 for g, _ in circuit.outputs] for j in range(m)]


def eval_circuit(circuit: Circuit, bits: Sequence[int]) -> list[int]:
    return eval_batch(circuit, [bits])[0]


# --- input layout ------------------------------------------------------------


@dataclass(frozen=True)
class BitLayout:
    n: int
    d: int
    k: int

    @property
    def num_inputs(self) -> int:
        n, d, k = self.n, self.d, self.k
        return n * (k + d) + k + k * n * (n + k * k)

    def color(self, v: int, c: int) -> int:
        return v * (self.k + self.d) + c

    def vrank(self, v: int, r: int) -> int:
        return v * (self.k + self.d) + self.k + r

    def ecolor(self, c: int) -> int:
        return self.n * (self.k + self.d) + c

    def _block(self, level: int, slot: int) -> int:
        n, k = self.n, self.k
        base = n * (k + self.d) + k
        return base + ((level - 1) * n + slot) * (n + k * k)

    def tcc(self, level: int, slot: int, child: int) -> int:
        return self._block(level, slot) + child

    def tcs(self, level: int, slot: int, s: int, t: int) -> int:
        return self._block(level, slot) + self.n + s * self.k + t

    def names(self) -> list[str]:
        """Human-readable name of every input bit, in index order."""
        out = [""] * self.num_inputs
        for v in range(self.n):
            for c in range(self.k):
                out[self.color(v, c)] = f"ColorB[{v}][{c}]"
            for r in range(self.d):
                out[self.vrank(v, r)] = f"VRankB[{v}][{r}]"
        for c in range(self.k):
            out[self.ecolor(c)] = f"ECOLOR[{c}]"
        for lvl in range(1, self.k + 1):
            for i in range(self.n):
                for j in range(self.n):
                    out[self.tcc(lvl, i, j)] = f"TCC[{lvl}][{i}][{j}]"
                for s in range(self.k):
                    for t in range(self.k):
                        out[self.tcs(lvl, i, s, t)] = f"TCS[{lvl}][{i}][{s},{t}]"
        return out


def _slots(tm: TreeModel) -> dict[int, int]:
    slot = {v: v for v in tm.leaves}
    for lvl in range(1, tm.height + 1):
        at = sorted(u for u, (l2, _) in tm.nodes.items() if l2 == lvl)
        slot.update((u, i) for i, u in enumerate(at))
    return slot


def prepare_model(tm: TreeModel, k: int) -> TreeModel:
    """Pad palette and height to exactly ``k``."""
    return pad_to_height(pad_palette(tm, k), k)


def encode_input(game: ParityGame, tm: TreeModel, layout: BitLayout) -> list[int]:
    n, d, k = layout.n, layout.d, layout.k
    if tm.height != k:
        raise ValueError(f"tree-model height {tm.height} must equal k = {k}; pad it first")
    if tm.k != k:
        raise ValueError(f"palette has {tm.k} colours, expected exactly k = {k}")
    if game.n != n:
        raise ValueError(f"game has {game.n} vertices, layout expects {n}")
    if game.rank_bound > d:
        raise ValueError(f"ranks must lie below d = {d}")
    check_model(game, tm)
    bits = [0] * layout.num_inputs
    for v, c in tm.leaves.items():
        bits[layout.color(v, c)] = 1
        bits[layout.vrank(v, game.rank[v])] = 1
    for c, p in enumerate(tm.palette):
        bits[layout.ecolor(c)] = int(p is Player.E)
    slot = _slots(tm)
    for u, (lvl, children) in tm.nodes.items():
        for ch in children:
            bits[layout.tcc(lvl, slot[u], slot[ch])] = 1
        for s, t in tm.pairs_at(u):
            bits[layout.tcs(lvl, slot[u], s, t)] = 1
    return bits


def decode_input(bits: Sequence[int], layout: BitLayout) -> tuple[tuple[int, ...], TreeModel]:
    """Inverse of :func:`encode_input` up to renaming of internal nodes.

    Returns the ranks and a tree-model whose level-``l`` slot ``i`` becomes
    node ``n + (l - 1) * n + i``. Assumes :func:`valid_encoding` holds.
    """
    n, d, k = layout.n, layout.d, layout.k
    if len(bits) != layout.num_inputs:
        raise ValueError("bit vector length does not match the layout")
    leaves = {v: next(c for c in range(k) if bits[layout.color(v, c)]) for v in range(n)}
    rank = tuple(next(r for r in range(d) if bits[layout.vrank(v, r)]) for v in range(n))
    palette = tuple(Player.E if bits[layout.ecolor(c)] else Player.O for c in range(k))

    def nid(lvl: int, i: int) -> int:
        return i if lvl == 0 else n + (lvl - 1) * n + i

    nodes, pairs = {}, {}
    for lvl in range(1, k + 1):
        for i in range(n):
            ch = [nid(lvl - 1, j) for j in range(n) if bits[layout.tcc(lvl, i, j)]]
            if not ch:
                continue
            nodes[nid(lvl, i)] = (lvl, tuple(ch))
            pairs[nid(lvl, i)] = frozenset(
                (s, t) for s in range(k) for t in range(k) if bits[layout.tcs(lvl, i, s, t)]
            )
    return rank, TreeModel(k, palette, leaves, nodes, pairs)


def valid_encoding(bits: Sequence[int], layout: BitLayout) -> bool:
    """The well-formedness conditions the circuit's ``valid`` output checks."""
    n, d, k = layout.n, layout.d, layout.k
    for v in range(n):
        if sum(bits[layout.color(v, c)] for c in range(k)) != 1:
            return False
        if sum(bits[layout.vrank(v, r)] for r in range(d)) != 1:
            return False

    def has_children(lvl: int, i: int) -> bool:
        return lvl > 0 and any(bits[layout.tcc(lvl, i, j)] for j in range(n))

    def parents(lvl: int, i: int) -> int:
        if lvl == k:
            return 0
        return sum(bits[layout.tcc(lvl + 1, p, i)] for p in range(n))

    for lvl in range(k + 1):
        for i in range(n):
            par = parents(lvl, i)
            if par > 1:
                return False
            if lvl == 0 and par != 1:
                return False
            if 0 < lvl < k and has_children(lvl, i) and par == 0:
                return False
            if lvl > 0 and par == 1 and not has_children(lvl, i):
                return False
    return sum(has_children(k, i) for i in range(n)) == 1


def decode_output(out_bits: Sequence[int], circuit: Circuit) -> WinnerPartition:
    win = [b for b, (_, lab) in zip(out_bits, circuit.outputs) if lab.startswith("win")]
    return WinnerPartition(tuple(Player.E if b else Player.O for b in win))


def validation_bit(out_bits: Sequence[int], circuit: Circuit) -> int:
    return next(b for b, (_, lab) in zip(out_bits, circuit.outputs) if lab == "valid")


# --- emission ----------------------------------------------------------------


@dataclass
class _Pack:
    used: list[int]
    enf: list[list[int]]


class _Tables:
    """Static enforcement tables for fixed ``(d, k)``."""

    def __init__(self, d: int, k: int):
        self.d, self.k = d, k
        self.space = list(all_enforcements(d, k))
        self.size = len(self.space)
        idx = {p: i for i, p in enumerate(self.space)}
        self.idx = idx
        self.leq = [[enf_leq(q, p) for p in self.space] for q in self.space]
        # below[P]: indices S with S ⊑ P
        self.below = [[s for s in range(self.size) if self.leq[s][p]] for p in range(self.size)]
        self.above = [[p for p in range(self.size) if self.leq[q][p]] for q in range(self.size)]
        self._merge: dict = {}
        self._e_pairs: dict = {}
        self._o_terms: dict = {}

    def init_terms(self, p: int) -> list[tuple[int, int]]:
        pe = self.space[p]
        return [
            (c, r)
            for c in range(self.k)
            for r in range(self.d)
            if enf_leq(Enforcement.from_map({c: r}, self.k), pe)
        ]

    def merged(self, side: Player, s: int) -> list[list[int]]:
        """``m[q][r]`` = index of EnfMerge(q, s, r) computed for ``side``."""
        key = (side, s)
        if key not in self._merge:
            self._merge[key] = [
                [self.idx[enf_merge(side, q, s, r)] for r in self.space] for q in self.space
            ]
        return self._merge[key]

    def e_pairs(self, s: int) -> list[list[tuple[int, int]]]:
        """Per P, every (Q, R) with EnfMerge_E(Q, s, R) ⊑ P."""
        if s not in self._e_pairs:
            m = self.merged(Player.E, s)
            out: list[list[tuple[int, int]]] = [[] for _ in range(self.size)]
            for q in range(self.size):
                for r in range(self.size):
                    for p in self.above[m[q][r]]:
                        out[p].append((q, r))
            self._e_pairs[s] = out
        return self._e_pairs[s]

    def o_terms(self, s: int) -> list[tuple[int, int, list[int]]]:
        """(Q, P, Rs) for s ∈ Dom(Q), Q ⊑ P; Rs are the even-at-s R with EnfMerge_O(Q, s, R) ⊑ P."""
        if s not in self._o_terms:
            m = self.merged(Player.O, s)
            even = [r for r in range(self.size) if _even_or_undef(self.space[r], s)]
            out = []
            for q in range(self.size):
                if self.space[q][s] is None:
                    continue
                for p in self.above[q]:
                    out.append((q, p, [r for r in even if self.leq[m[q][r]][p]]))
            self._o_terms[s] = out
        return self._o_terms[s]


def _check_params(n: int, d: int, k: int) -> None:
    if n <= 1 or d <= 1 or k <= 0:
        raise ValueError("emission requires n > 1, d > 1 and k > 0")
    if (d + 1) ** k > EMIT_LIMIT:
        raise ValueError(f"(d+1)^k = {(d + 1) ** k} exceeds the emission limit {EMIT_LIMIT}")


def _choose(cc: Circuit, packs: Sequence[_Pack], cond: Sequence[int]) -> _Pack:
    n_v = len(packs[0].used)
    size = len(packs[0].enf[0])
    used = [cc.OR(*(cc.AND(p.used[v], c) for p, c in zip(packs, cond))) for v in range(n_v)]
    enf = [
        [cc.OR(*(cc.AND(p.enf[v][q], c) for p, c in zip(packs, cond))) for q in range(size)]
        for v in range(n_v)
    ]
    return _Pack(used, enf)


def _update_e(cc: Circuit, tb: _Tables, pk: _Pack, color, s: int, t: int) -> list[list[int]]:
    n_v, size = len(pk.used), tb.size
    redirect = [cc.AND(pk.used[w], color[w][t]) for w in range(n_v)]
    move = [cc.OR(*(cc.AND(redirect[w], pk.enf[w][p]) for w in range(n_v))) for p in range(size)]
    looped = []
    for p in range(size):
        pe = tb.space[p]
        if pe[s] is None:
            alts = [move[tb.idx[pe.updated(s, r)]] for r in range(0, tb.d, 2)]
            looped.append(cc.AND(cc.OR(*alts)))
        else:
            looped.append(cc.add(Gate.CONST0))
    opt = [cc.OR(move[p], looped[p]) for p in range(size)]
    pairs_for = tb.e_pairs(s)
    out = []
    for v in range(n_v):
        both = {}
        row = []
        for p in range(size):
            terms = [pk.enf[v][x] for x in tb.below[p]]
            for q, r in pairs_for[p]:
                if (q, r) not in both:
                    both[(q, r)] = cc.AND(pk.enf[v][q], opt[r])
                terms.append(both[(q, r)])
            row.append(cc.AND(pk.used[v], cc.OR(*terms)))
        out.append(row)
    return out


def _even_or_undef(p: Enforcement, s: int) -> bool:
    return p[s] is None or p[s] % 2 == 0


def _update_o(cc: Circuit, tb: _Tables, pk: _Pack, color, s: int, t: int) -> list[list[int]]:
    n_v, size = len(pk.used), tb.size
    not_used = [cc.NOT(pk.used[w]) for w in range(n_v)]
    not_t = [cc.NOT(color[w][t]) for w in range(n_v)]
    # NoPair(Q, s) is static; AnyGood is only emitted where s ∈ Dom(Q).
    any_good = {}
    for q, p, rs in tb.o_terms(s):
        per_w = [cc.OR(not_used[w], not_t[w], *(pk.enf[w][r] for r in rs)) for w in range(n_v)]
        any_good[(q, p)] = cc.AND(*per_w)
    out = []
    for v in range(n_v):
        row = []
        for p in range(size):
            terms = []
            for q in tb.below[p]:
                if tb.space[q][s] is None:
                    terms.append(pk.enf[v][q])
                else:
                    terms.append(cc.AND(pk.enf[v][q], any_good[(q, p)]))
            row.append(cc.AND(pk.used[v], cc.OR(*terms)))
        out.append(row)
    return out


def _select2(cc: Circuit, a: int, b: int, cond: int, ncond: int) -> int:
    return cc.OR(cc.AND(a, cond), cc.AND(b, ncond))


def _processing(cc: Circuit, tb: _Tables, pk: _Pack, color, ecolor, db) -> _Pack:
    k = tb.k
    for s in range(k):
        for t in range(k):
            ue = _update_e(cc, tb, pk, color, s, t)
            uo = _update_o(cc, tb, pk, color, s, t)
            ne = cc.NOT(ecolor[s])
            do = db[s][t]
            dont = cc.NOT(do)
            enf = []
            for v in range(len(pk.used)):
                row = []
                for p in range(tb.size):
                    upd = _select2(cc, ue[v][p], uo[v][p], ecolor[s], ne)
                    row.append(_select2(cc, upd, pk.enf[v][p], do, dont))
                enf.append(row)
            pk = _Pack(pk.used, enf)
    return pk


def _exactly_one(cc: Circuit, xs: Sequence[int]) -> int:
    return cc.AND(cc.OR(*xs), _at_most_one(cc, xs))


def _at_most_one(cc: Circuit, xs: Sequence[int]) -> int:
    clauses = [
        cc.NOT(cc.AND(xs[i], xs[j])) for i in range(len(xs)) for j in range(i + 1, len(xs))
    ]
    return cc.AND(*clauses)


def _validation(cc: Circuit, layout: BitLayout) -> int:
    n, d, k = layout.n, layout.d, layout.k
    checks = []
    for v in range(n):
        checks.append(_exactly_one(cc, [layout.color(v, c) for c in range(k)]))
        checks.append(_exactly_one(cc, [layout.vrank(v, r) for r in range(d)]))
    has_children = {
        (lvl, i): cc.OR(*(layout.tcc(lvl, i, j) for j in range(n)))
        for lvl in range(1, k + 1)
        for i in range(n)
    }
    for lvl in range(k):
        for i in range(n):
            incoming = [layout.tcc(lvl + 1, p, i) for p in range(n)]
            if lvl == 0:
                checks.append(_exactly_one(cc, incoming))
                continue
            checks.append(_at_most_one(cc, incoming))
            has_parent = cc.OR(*incoming)
            checks.append(cc.OR(cc.NOT(has_children[(lvl, i)]), has_parent))
            checks.append(cc.OR(cc.NOT(has_parent), has_children[(lvl, i)]))
    checks.append(_exactly_one(cc, [has_children[(k, i)] for i in range(n)]))
    return cc.AND(*checks)


def emit_scw_circuit(n: int, d: int, k: int) -> Circuit:
    _check_params(n, d, k)
    layout = BitLayout(n, d, k)
    tb = _Tables(d, k)
    cc = Circuit(layout.num_inputs, params=(n, d, k))
    zero, one = cc.add(Gate.CONST0), cc.add(Gate.CONST1)
    color = [[layout.color(v, c) for c in range(k)] for v in range(n)]
    ecolor = [layout.ecolor(c) for c in range(k)]

    layer = []
    for v in range(n):
        own = []
        for p in range(tb.size):
            own.append(
                cc.OR(*(cc.AND(color[v][c], layout.vrank(v, r)) for c, r in tb.init_terms(p)))
            )
        used = [one if w == v else zero for w in range(n)]
        enf = [own if w == v else [zero] * tb.size for w in range(n)]
        layer.append(_Pack(used, enf))

    for lvl in range(1, k + 1):
        nxt = []
        for i in range(n):
            merged = _choose(cc, layer, [layout.tcc(lvl, i, j) for j in range(n)])
            db = [[layout.tcs(lvl, i, s, t) for t in range(k)] for s in range(k)]
            nxt.append(_processing(cc, tb, merged, color, ecolor, db))
        layer = nxt

    final = _choose(cc, layer, [one] * n)
    neg = [cc.NOT(e) for e in ecolor]
    for v in range(n):
        terms = []
        for p in range(tb.size):
            dom = tb.space[p].domain
            terms.append(cc.AND(final.enf[v][p], *(neg[c] for c in sorted(dom))))
        cc.output(cc.OR(*terms), f"win[{v}]")
    cc.output(_validation(cc, layout), "valid")
    return cc


# --- text format -------------------------------------------------------------


def serialize_circuit(circuit: Circuit) -> str:
    lines = []
    if circuit.params is not None:
        n, d, k = circuit.params
        lines.append(f"# scw n={n} d={d} k={k}")
    lines.append(f"# inputs={circuit.num_inputs} gates={len(circuit.kinds)}")
    for g, (kind, ins) in enumerate(zip(circuit.kinds, circuit.inputs)):
        tail = " " + ",".join(map(str, ins)) if ins else ""
        lines.append(f"gate {g} {kind.name}{tail};")
    for g, label in circuit.outputs:
        lines.append(f"output {g} {label};")
    return "\n".join(lines)


def parse_circuit(text: str) -> Circuit:
    kinds: list[Gate] = []
    inputs: list[tuple[int, ...]] = []
    outputs: list[tuple[int, str]] = []
    params = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# scw"):
                try:
                    kv = dict(part.split("=") for part in line.split()[2:])
                    params = (int(kv["n"]), int(kv["d"]), int(kv["k"]))
                except (ValueError, KeyError):
                    raise FormatError("malformed circuit header", lineno) from None
            continue
        if not line.endswith(";"):
            raise FormatError("line must end with ';'", lineno)
        parts = line[:-1].split()
        try:
            if parts[0] == "gate":
                gid, kind = int(parts[1]), Gate[parts[2]]
                ins = tuple(int(x) for x in parts[3].split(",")) if len(parts) > 3 else ()
                if gid != len(kinds):
                    raise FormatError(f"gate ids must be consecutive, expected {len(kinds)}", lineno)
                if any(not 0 <= i < gid for i in ins):
                    raise FormatError(f"gate {gid} reads a later or unknown gate", lineno)
                if kind is Gate.INPUT and len(kinds) != sum(k is Gate.INPUT for k in kinds):
                    raise FormatError("INPUT gates must come first", lineno)
                if kind is Gate.NOT and len(ins) != 1:
                    raise FormatError("NOT takes exactly one input", lineno)
                kinds.append(kind)
                inputs.append(ins)
            elif parts[0] == "output":
                gid = int(parts[1])
                if not 0 <= gid < len(kinds):
                    raise FormatError(f"output refers to unknown gate {gid}", lineno)
                outputs.append((gid, parts[2]))
            else:
                raise FormatError(f"unknown directive {parts[0]!r}", lineno)
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed line {line!r}", lineno) from None
    num_inputs = sum(k is Gate.INPUT for k in kinds)
    return Circuit(num_inputs, kinds, inputs, outputs, params)


def parse_bits(text: str) -> list[int]:
    s = "".join(text.split())
    if any(ch not in "01" for ch in s):
        raise FormatError("input bits must be a 0/1 string")
    return [int(ch) for ch in s]


def format_bits(bits: Iterable[int]) -> str:
    return "".join(str(int(b)) for b in bits)
