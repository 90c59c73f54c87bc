"""Finite group machinery: matrix automorphism groups over Q(zeta_N), Galois
unit groups, their semidirect product, subgroup-pair enumeration and the
inequivalent-solution count for each pair.

All heavy computations run on integer element indices against cached
multiplication tables; matrices are only touched while building the tables.
"""

from dataclasses import dataclass, field
from hashlib import sha256
from math import gcd

from .cyclotomic import CycNum, GaloisUnit
from .errors import BudgetExceededError, StructureError
from . import linalg


class Budget:
    """Operation counter with a hard limit."""

    def __init__(self, limit, what="search"):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self, n=1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"{self.what} budget of {self.limit} operations exhausted")


def _matrix_key(m):
    return tuple(tuple(c.key() for c in row) for row in m)


class AutGroup:
    """A finite matrix group over Q(zeta_N) closed under multiplication.

    Element 0 is the identity.  Stores the full multiplication table, inverse
    table, element orders, and shortest generator words for display.
    """

    def __init__(self, conductor, matrices, table, gen_indices, gen_names, words):
        self.conductor = conductor
        self.matrices = matrices
        self.n = len(matrices)
        self.table = table
        self.gen_indices = gen_indices
        self.gen_names = gen_names
        self.words = words
        self.inverse = [row.index(0) for row in table]
        self.element_orders = [_order_from_table(table, i) for i in range(self.n)]

    @staticmethod
    def close(gens, names=None, bound=1000, ideal=None, conductor=1, budget=None,
              dim=None):
        """BFS closure of the generating matrices.  Every element is checked to
        preserve the canonical ideal when one is supplied."""
        names = names or [f"g{i+1}" for i in range(len(gens))]
        n_cond = conductor
        for m in gens:
            for row in m:
                for c in row:
                    n_cond = n_cond * c.n // gcd(n_cond, c.n)
        size = len(gens[0]) if gens else dim
        zero = CycNum.from_rational(0).lift(n_cond)
        one = CycNum.from_rational(1).lift(n_cond)
        if size is None:
            raise StructureError("group dimension unknown: no generators and no dim")
        ident = tuple(tuple(one if i == j else zero for j in range(size))
                      for i in range(size))
        lifted = []
        for name, m in zip(names, gens):
            if len(m) != size or any(len(row) != size for row in m):
                raise StructureError(f"generator {name} is not {size}x{size}")
            mm = tuple(tuple(c.lift(n_cond) for c in row) for row in m)
            try:
                linalg.mat_inv([list(r) for r in mm], zero, one)
            except StructureError:
                raise StructureError(f"generator matrix {name} not invertible")
            lifted.append(mm)

        matrices = [ident]
        index = {_matrix_key(ident): 0}
        parent = [(-1, -1)]  # (parent element, generator position)
        gen_indices = []
        for k, m in enumerate(lifted):
            key = _matrix_key(m)
            if key not in index:
                index[key] = len(matrices)
                matrices.append(m)
                parent.append((0, k))
            gen_indices.append(index[key])
        frontier = list(range(len(matrices)))
        gen_cols = [[None] * len(matrices) for _ in lifted]
        while frontier:
            new_frontier = []
            for i in frontier:
                for k, m in enumerate(lifted):
                    prod = _mat_mul_cyc(matrices[i], m, zero)
                    key = _matrix_key(prod)
                    j = index.get(key)
                    if j is None:
                        j = len(matrices)
                        if j >= bound:
                            raise BudgetExceededError(
                                f"group closure exceeded bound {bound}; "
                                "wrong input or non-finite group")
                        index[key] = j
                        matrices.append(prod)
                        parent.append((i, k))
                        for col in gen_cols:
                            col.append(None)
                        new_frontier.append(j)
                    gen_cols[k][i] = j
            frontier = new_frontier
        n = len(matrices)
        if budget:
            budget.tick(n * n)

        # Fill the multiplication table by word recursion: if b = p * g_k then
        # a*b = (a*p) * g_k, needing only n*len(gens) true matrix products.
        table = [[None] * n for _ in range(n)]
        order_by_depth = sorted(range(n), key=lambda i: _depth(parent, i))
        for a in range(n):
            row = table[a]
            row[0] = a
            for b in order_by_depth:
                if b == 0:
                    continue
                p, k = parent[b]
                row[b] = gen_cols[k][row[p]]
        # identity row
        for b in range(n):
            table[0][b] = b

        words = _shortest_words(n, gen_cols, names)
        group = AutGroup(n_cond, matrices, table, gen_indices, names, words)
        if ideal is not None:
            for i, m in enumerate(matrices):
                bad = ideal.preserved_by([list(r) for r in m])
                if bad is not None:
                    raise StructureError(
                        f"automorphism '{group.words[i]}' does not preserve the ideal "
                        f"(generator #{bad + 1} escapes)")
        return group

    def matrix(self, i):
        return self.matrices[i]

    def mul(self, a, b):
        return self.table[a][b]

    def word(self, i):
        return self.words[i]


def _mat_mul_cyc(a, b, zero):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for t in range(n):
                x = a[i][t]
                if x:
                    y = b[t][j]
                    if y:
                        acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _depth(parent, i):
    d = 0
    while parent[i][0] >= 0 and i != 0:
        i = parent[i][0]
        d += 1
    return d


def _shortest_words(n, gen_cols, names):
    words = [None] * n
    words[0] = "1"
    frontier = [0]
    trail = {0: None}
    while frontier:
        nxt = []
        for i in frontier:
            for k, col in enumerate(gen_cols):
                j = col[i]
                if j is not None and j not in trail:
                    trail[j] = (i, k)
                    nxt.append(j)
        frontier = nxt
    for j in range(n):
        if words[j] is not None:
            continue
        # walk back, collecting generator letters left to right
        letters = []
        cur = j
        while trail.get(cur) is not None:
            p, k = trail[cur]
            letters.append(k)
            cur = p
        letters.reverse()
        parts = []
        for k in letters:
            if parts and parts[-1][0] == k:
                parts[-1][1] += 1
            else:
                parts.append([k, 1])
        words[j] = "*".join(
            names[k] if e == 1 else f"{names[k]}^{e}" for k, e in parts) or "1"
    return words


def _order_from_table(table, i):
    o = 1
    x = i
    while x != 0:
        x = table[x][i]
        o += 1
    return o


class GalGroup:
    """A subgroup of (Z/NZ)^* acting on Q(zeta_N); element 0 is the identity."""

    def __init__(self, conductor, exponents, gen_positions, gen_names):
        self.conductor = conductor
        self.exponents = exponents
        self.n = len(exponents)
        self.index = {b: i for i, b in enumerate(exponents)}
        self.table = [[self.index[(a * b) % conductor if conductor > 1 else 1]
                       for b in exponents] for a in exponents]
        self.inverse = [row.index(0) for row in self.table]
        self.gen_positions = gen_positions
        self.gen_names = gen_names
        self.element_orders = [_order_from_table(self.table, i) for i in range(self.n)]

    @staticmethod
    def generate(conductor, gens, names=None):
        names = names or [f"t{i+1}" for i in range(len(gens))]
        for b in gens:
            if gcd(b, conductor) != 1:
                raise StructureError(f"{b} is not a unit modulo {conductor}")
        if conductor == 1:
            return GalGroup(1, [1], [], [])
        elements = [1]
        seen = {1}
        frontier = [1]
        while frontier:
            nxt = []
            for a in frontier:
                for b in gens:
                    c = (a * b) % conductor
                    if c not in seen:
                        seen.add(c)
                        elements.append(c)
                        nxt.append(c)
            frontier = nxt
        gen_positions = [elements.index(b % conductor) for b in gens]
        return GalGroup(conductor, elements, gen_positions, names)

    def unit(self, i):
        return GaloisUnit(self.conductor, self.exponents[i])

    def mul(self, a, b):
        return self.table[a][b]


def galois_action_table(aut, gal):
    """act[s][a] = index of the entrywise Galois image of matrix a under unit s.
    Fails when the Galois action does not stabilize the group."""
    if gal.conductor > 1 and aut.conductor != gal.conductor:
        raise StructureError(
            f"matrix entries live at conductor {aut.conductor} but the Galois "
            f"group acts at conductor {gal.conductor}")
    index = {_matrix_key(m): i for i, m in enumerate(aut.matrices)}
    act = []
    for s in range(gal.n):
        b = gal.exponents[s]
        row = []
        for a in range(aut.n):
            img = tuple(tuple(c.galois(b) for c in mrow) for mrow in aut.matrices[a])
            j = index.get(_matrix_key(img))
            if j is None:
                raise StructureError(
                    f"Galois unit {b} maps automorphism '{aut.words[a]}' outside the "
                    "group; the splitting field data is inconsistent")
            row.append(j)
        act.append(row)
    return act


class GammaGroup:
    """The twisting group Aut x| Gal with (a,s)(b,t) = (a * s(b), s t).

    Element index = s * |Aut| + a, so indices below |Aut| form Aut x {1}
    and index 0 is the identity.
    """

    def __init__(self, aut, gal):
        self.aut = aut
        self.gal = gal
        self.act = galois_action_table(aut, gal)
        nA, nS = aut.n, gal.n
        self.nA = nA
        self.n = nA * nS
        table = []
        for s1 in range(nS):
            for a1 in range(nA):
                row = [0] * self.n
                arow = aut.table[a1]
                actrow = self.act[s1]
                srow = gal.table[s1]
                for s2 in range(nS):
                    base = srow[s2] * nA
                    off = s2 * nA
                    for a2 in range(nA):
                        row[off + a2] = base + arow[actrow[a2]]
                table.append(row)
        self.table = table
        self.inverse = [row.index(0) for row in table]
        self.element_orders = [_order_from_table(table, i) for i in range(self.n)]

    def pi1(self, i):
        return i % self.nA

    def pi2(self, i):
        return i // self.nA

    def pair(self, i):
        return (i % self.nA, i // self.nA)

    def make(self, a, s):
        return s * self.nA + a

    def mul(self, a, b):
        return self.table[a][b]

    def power(self, x, k):
        if k < 0:
            x, k = self.inverse[x], -k
        out = 0
        while k:
            if k & 1:
                out = self.table[out][x]
            x = self.table[x][x]
            k >>= 1
        return out

    def conj(self, g, x):
        """g x g^-1."""
        return self.table[self.table[g][x]][self.inverse[g]]

    def word(self, i):
        a, s = self.pair(i)
        wa = self.aut.words[a]
        if s == 0:
            return f"({wa}, 1)"
        ws = _gal_word(self.gal, s)
        return f"({wa}, {ws})"

    def describe(self, i):
        return self.word(i)


def _gal_word(gal, s):
    if s == 0:
        return "1"
    # BFS over generator positions
    trail = {0: None}
    frontier = [0]
    while frontier and s not in trail:
        nxt = []
        for i in frontier:
            for pos, name in zip(gal.gen_positions, gal.gen_names):
                j = gal.table[i][pos]
                if j not in trail:
                    trail[j] = (i, name)
                    nxt.append(j)
        frontier = nxt
    letters = []
    cur = s
    while trail.get(cur) is not None:
        p, name = trail[cur]
        letters.append(name)
        cur = p
    letters.reverse()
    parts = []
    for name in letters:
        if parts and parts[-1][0] == name:
            parts[-1][1] += 1
        else:
            parts.append([name, 1])
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in parts) or "1"


# ---------------------------------------------------------------------------
# subgroup machinery


def closure(table, elements):
    """Closure of the given element indices under the multiplication table."""
    out = set(elements)
    out.add(0)
    frontier = list(out)
    while frontier:
        nxt = []
        for x in frontier:
            for y in list(out):
                for z in (table[x][y], table[y][x]):
                    if z not in out:
                        out.add(z)
                        nxt.append(z)
        frontier = nxt
    return out


def is_solvable(table, n):
    current = set(range(n))
    while len(current) > 1:
        inv = [row.index(0) for row in table]
        commutators = set()
        cur = list(current)
        for x in cur:
            for y in cur:
                c = table[table[x][y]][inv[table[y][x]]]
                commutators.add(c)
        derived = closure(table, commutators)
        if derived == current:
            return False
        current = derived
    return True


def all_subgroups(gamma, budget=None):
    """All subgroups of a solvable group, by bottom-up cyclic extensions:
    repeatedly adjoin a normalizing element with prime order modulo the
    current subgroup."""
    table = gamma.table
    n = gamma.n
    inv = gamma.inverse
    if not is_solvable(table, n):
        raise StructureError(
            "the twisting group is not solvable; the cyclic-extension subgroup "
            "search cannot enumerate its subgroup lattice")
    trivial = frozenset({0})
    found = {trivial: ()}
    queue = [trivial]
    while queue:
        S = queue.pop()
        gens = found[S]
        # normalizer via generator conjugation
        if gens:
            norm = [x for x in range(n)
                    if all(gamma.conj(x, g) in S for g in gens)]
        else:
            norm = list(range(n))
        if budget:
            budget.tick(len(norm) * max(len(gens), 1))
        size = len(S)
        for x in norm:
            if x in S:
                continue
            # order of x modulo S
            k = 1
            y = x
            while y not in S:
                y = table[y][x]
                k += 1
            if not _is_prime(k):
                continue
            coset = [x]
            cur = x
            for _ in range(k - 2):
                cur = table[cur][x]
                coset.append(cur)
            T = set(S)
            for c in coset:
                for s in S:
                    T.add(table[s][c])
            T = frozenset(T)
            if budget:
                budget.tick(len(T))
            if T not in found:
                found[T] = gens + (x,)
                queue.append(T)
    return found


def _is_prime(k):
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % d == 0:
            return False
        d += 1
    return True


@dataclass
class GroupFingerprint:
    """Cheap isomorphism invariants standing in for catalog identifiers."""

    order: int
    order_histogram: tuple
    abelian_invariants: tuple
    center_order: int
    derived_order: int

    def canonical(self):
        return (f"order={self.order};"
                f"orders={','.join(f'{o}:{c}' for o, c in self.order_histogram)};"
                f"ab={','.join(map(str, self.abelian_invariants))};"
                f"center={self.center_order};derived={self.derived_order}")

    def digest(self):
        return sha256(self.canonical().encode()).hexdigest()[:12]

    def is_abelian(self):
        return self.derived_order == 1


def fingerprint(gamma, subset):
    """Fingerprint of a subgroup given by its element indices."""
    table = gamma.table
    elems = sorted(subset)
    sset = set(elems)
    orders = {}
    for x in elems:
        orders[gamma.element_orders[x]] = orders.get(gamma.element_orders[x], 0) + 1
    hist = tuple(sorted(orders.items()))
    # center and derived subgroup
    center = [x for x in elems
              if all(table[x][y] == table[y][x] for y in elems)]
    commutators = set()
    inv = gamma.inverse
    for x in elems:
        for y in elems:
            commutators.add(table[table[x][y]][inv[table[y][x]]])
    derived = _closure_within(table, commutators, sset)
    invariants = _abelian_invariants(gamma, elems, derived)
    return GroupFingerprint(len(elems), hist, invariants, len(center), len(derived))


def _closure_within(table, seed, ambient):
    out = set(seed)
    out.add(0)
    frontier = list(out)
    while frontier:
        nxt = []
        for x in frontier:
            for y in list(out):
                z = table[x][y]
                if z not in out:
                    out.add(z)
                    nxt.append(z)
        frontier = nxt
    assert out <= ambient
    return out


def _abelian_invariants(gamma, elems, derived):
    """Invariant factors of the abelianization, recovered by order counting:
    for each prime, #{g : g^{p^j} = 1} determines the partition of the
    abelian p-group, and aligned prime powers give the invariant factors."""
    table = gamma.table
    # quotient by the derived subgroup
    coset_of = {}
    reps = []
    for x in elems:
        if x in coset_of:
            continue
        coset = frozenset(table[x][d] for d in derived)
        for y in coset:
            coset_of[y] = len(reps)
        reps.append(x)
    m = len(reps)
    if m == 1:
        return ()
    qtable = [[coset_of[table[a][b]] for b in reps] for a in reps]
    qorders = [_order_from_table(qtable, i) for i in range(m)]
    per_prime = {}
    for p in _prime_factors(m):
        logs = [0]  # log_p of #{g : g^{p^j} = 1}, j = 0, 1, ...
        j = 1
        while True:
            count = sum(1 for o in qorders if p ** j % o == 0)
            k = _ilog(count, p)
            if k == logs[-1]:
                break
            logs.append(k)
            j += 1
        cols = [logs[i + 1] - logs[i] for i in range(len(logs) - 1)]
        # cols[j] = number of cyclic factors of exponent > j
        exps = [sum(1 for c in cols if c > i) for i in range(cols[0])] if cols else []
        per_prime[p] = exps  # descending
    width = max((len(v) for v in per_prime.values()), default=0)
    factors = []
    for i in range(width):
        f = 1
        for p, exps in per_prime.items():
            if i < len(exps):
                f *= p ** exps[i]
        factors.append(f)
    return tuple(sorted(factors))


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _p_part(n, p):
    out = 1
    while n % p == 0:
        out *= p
        n //= p
    return out


def _ilog(n, p):
    k = 0
    while n > 1:
        assert n % p == 0, "count is not a p-power"
        n //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# pairs (G, H)


@dataclass
class PairGH:
    """A subgroup G of Gamma projecting onto the full Galois group, together
    with its kernel H = G intersect (Aut x 1)."""

    G: tuple
    H: tuple
    G_fingerprint: GroupFingerprint
    H_fingerprint: GroupFingerprint
    H_generator_indices: tuple   # indices into Aut
    H_generator_words: tuple
    solution_count: int = 0
    index: int = 0

    @property
    def order(self):
        return len(self.G)

    @property
    def kernel_order(self):
        return len(self.H)


def enumerate_pairs(gamma, budget=None):
    """All pairs (G, H) with surjective second projection, one representative
    per conjugacy class under Aut x {1}, sorted by |G|."""
    subs = all_subgroups(gamma, budget)
    nA = gamma.nA
    full_gal = set(range(gamma.gal.n))
    chosen = {}
    for S in subs:
        proj = {i // nA for i in S}
        if proj != full_gal:
            continue
        canon = min(tuple(sorted(frozenset(gamma.conj(a, x) for x in S)))
                    for a in range(nA))
        if canon in chosen:
            continue
        chosen[canon] = tuple(sorted(S))
    pairs = []
    for G in chosen.values():
        H = tuple(x for x in G if x < nA)
        gen_idx, gen_words = _kernel_generators(gamma, H)
        pairs.append(PairGH(
            G=G, H=H,
            G_fingerprint=fingerprint(gamma, G),
            H_fingerprint=fingerprint(gamma, H),
            H_generator_indices=gen_idx,
            H_generator_words=gen_words,
        ))
    pairs.sort(key=lambda p: (p.order, p.G_fingerprint.canonical()))
    for i, p in enumerate(pairs):
        p.index = i + 1
        p.solution_count = count_solutions(gamma, p, budget)
    return pairs


def _kernel_generators(gamma, H):
    """Generators of H for display: one generator per cyclic Sylow subgroup
    when H is abelian, greedy minimal generators otherwise."""
    if len(H) == 1:
        return (), ()
    aut = gamma.aut
    table = gamma.table
    abelian = all(table[x][y] == table[y][x] for x in H for y in H)
    gens = []
    if abelian:
        primes = sorted({p for x in H for p in _prime_factors(gamma.element_orders[x])})
        ok = True
        for p in primes:
            sylow = [x for x in H if _p_part(gamma.element_orders[x], p)
                     == gamma.element_orders[x] and x != 0]
            best = max(sylow, key=lambda x: (gamma.element_orders[x], -x))
            if gamma.element_orders[best] != len(sylow) + 1:
                ok = False  # non-cyclic Sylow subgroup
                break
            gens.append(best)
        if not ok:
            gens = []
    if not gens:
        gens = _greedy_generators(gamma, H)
    gens = tuple(sorted(gens, key=lambda x: gamma.element_orders[x]))
    return gens, tuple(aut.words[g] for g in gens)


def _greedy_generators(gamma, subset):
    sset = set(subset)
    gens = []
    span = {0}
    for x in sorted(subset, key=lambda x: (-gamma.element_orders[x], x)):
        if x in span:
            continue
        gens.append(x)
        span = _closure_within(gamma.table, span | {x}, sset)
        if span == sset:
            break
    return gens


# ---------------------------------------------------------------------------
# the solution-count formula


def count_solutions(gamma, pair, budget=None):
    """Number of inequivalent proper solutions sharing a splitting field:
    |Aut_2(G)| / |restrictions of conjugation by Aut x {1}|, where Aut_2 is
    the group of automorphisms of G fixing every second coordinate."""
    G = list(pair.G)
    Gset = set(G)
    table = gamma.table
    nA = gamma.nA
    gens = _greedy_generators(gamma, pair.G)
    candidates = []
    for g in gens:
        og, sg = gamma.element_orders[g], g // nA
        cands = [x for x in G
                 if gamma.element_orders[x] == og and x // nA == sg]
        candidates.append(cands)

    automorphisms = set()
    total = 1
    for c in candidates:
        total *= len(c)
    if budget:
        budget.tick(total)

    import itertools
    for images in itertools.product(*candidates):
        mapping = _extend_homomorphism(gamma, G, Gset, gens, images, budget)
        if mapping is None:
            continue
        automorphisms.add(tuple(mapping[x] for x in G))
    # restrictions of inner conjugation by normalizing elements of Aut x {1}
    inner = set()
    for a in range(nA):
        if all(gamma.conj(a, g) in Gset for g in gens):
            inner.add(tuple(gamma.conj(a, x) for x in G))
    inner &= automorphisms
    assert inner, "identity restriction must be present"
    count, rem = divmod(len(automorphisms), len(inner))
    assert rem == 0, "inner restrictions do not form a subgroup of Aut_2"
    return count


def _extend_homomorphism(gamma, G, Gset, gens, images, budget=None):
    """Extend generator images to a bijective endomorphism of G, or None.
    The map is grown over a spanning tree of the Cayley graph and then every
    edge is checked, which verifies the homomorphism property completely."""
    table = gamma.table
    mapping = {0: 0}
    frontier = [0]
    if budget:
        budget.tick(len(G) * len(gens))
    while frontier:
        nxt = []
        for x in frontier:
            mx = mapping[x]
            for g, img in zip(gens, images):
                y = table[x][g]
                my = table[mx][img]
                if y in mapping:
                    if mapping[y] != my:
                        return None
                else:
                    mapping[y] = my
                    nxt.append(y)
        frontier = nxt
    if len(mapping) != len(G):
        return None  # gens do not span (cannot happen for true generators)
    # full edge check + bijectivity + image containment
    values = set(mapping.values())
    if values != Gset:
        return None
    for x in G:
        mx = mapping[x]
        for g, img in zip(gens, images):
            if mapping[table[x][g]] != table[mx][img]:
                return None
    return mapping
