"""The stream cipher as an effectful Mealy machine over Stoch.

Alice and Bob are obtained by interpreting do-notation programs in which the
effects ``seed``, ``rand_a`` and ``rand_b`` edit a global state
``Seed * Seed`` (one seed per party).  The state of alice is
``Seed * Seed * State``; bob only touches the global part.  The machines are
then composed with the global state threaded through.

Security is exact for the one-time-pad parts of the argument and reported as
a total-variation distance for the pseudorandom part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from gmpy2 import mpq

from .donotation import Interpretation, interpret, parse
from .errors import ConfigInvalid, InputError, SizeLimitExceeded
from .kernel import (UNIT, Morph, ObjectType, Theory, is_deterministic, is_total,
                     join, split, tensor)
from .mealy import MealyMachine, mealy_seq, mealy_whisker
from .streams import StreamPrefix, stream_equal_upto, trace_process

SIZE_LIMIT = 10 ** 7
STATE = ObjectType("State", ["s0", "s1"])

CIPHER_SOURCE = """
sig {
  type C; type U
  value xor: C, C -> C
  pure unif: -> C
  pure init: -> U
  effect seed: U -> U
  effect rand_a: -> C
  effect rand_b: -> C
}
prog alice(u: U, m: C) -> (U, C):
  seed(u) ~> u1
  rand_a() ~> ka
  return(u1, xor(m, ka))
prog bob(e: C) -> (C):
  rand_b() ~> kb
  return(xor(e, kb))
prog secure(m: C) -> (C, C):
  unif() -> n
  return(n, m)
prog nil(m: C, k: C) -> (C):
  return(xor(xor(m, k), k))
prog nil_id(m: C, k: C) -> (C):
  return(m)
prog sweedler(x: C) -> (C):
  unif() -> b
  return(xor(x, b))
prog noise(x: C) -> (C):
  unif() -> b
  return(b)
prog first_step(u: U, m: C) -> (U, C, C):
  seed(u) ~> u1
  rand_a() ~> ka
  rand_b() ~> kb
  return(u1, xor(m, ka), xor(xor(m, ka), kb))
prog one_time_pad(m: C) -> (C, C):
  unif() -> k
  return(xor(m, k), xor(xor(m, k), k))
"""


def char_object(bits: int) -> ObjectType:
    if bits < 1:
        raise InputError("a character needs at least one bit")
    return ObjectType("Char", [format(i, f"0{bits}b") for i in range(2 ** bits)])


def bitwise_xor(char: ObjectType) -> Morph:
    cc = tensor(char, char)
    width = len(char.elements[0])

    def fn(e):
        a, b = e
        return format(int(a, 2) ^ int(b, 2), f"0{width}b")
    return Morph.from_function(Theory.STOCH, cc, char, fn)


@dataclass
class CipherConfig:
    """Alphabet, seed space, generator and XOR; ``unif`` defaults to uniform."""
    char: ObjectType
    seed: ObjectType
    prng: Morph
    xor: Morph
    unif: Optional[Morph] = None
    name: str = "custom"

    def __post_init__(self):
        n = self.char.size
        if n < 1 or n & (n - 1):
            raise ConfigInvalid("the alphabet size must be a power of 2")
        if self.prng.dom != self.seed or self.prng.cod != tensor(self.seed, self.char):
            raise ConfigInvalid("prng must be Seed -> Seed*Char")
        if self.xor.dom != tensor(self.char, self.char) or self.xor.cod != self.char:
            raise ConfigInvalid("xor must be Char*Char -> Char")
        for f in (self.prng, self.xor):
            if f.theory is not Theory.STOCH:
                raise ConfigInvalid("the cipher lives in stoch")
            if not (is_deterministic(f) and is_total(f)):
                raise ConfigInvalid("prng and xor must be deterministic and total")
        if self.unif is None:
            self.unif = Morph.uniform(Theory.STOCH, self.char)
        elif self.unif.dom != UNIT or self.unif.cod != self.char:
            raise ConfigInvalid("unif must be a distribution on Char")

    @classmethod
    def affine(cls, char_bits: int = 1, seed_size: int = 4) -> "CipherConfig":
        """``h = (5g + 1) mod |Seed|`` with key the low bits of ``h``."""
        char = char_object(char_bits)
        if seed_size < char.size or seed_size % char.size:
            raise ConfigInvalid("seed size must be a multiple of the alphabet size")
        seed = ObjectType("Seed", [f"g{i}" for i in range(seed_size)])

        def fn(g):
            h = (5 * int(g[1:]) + 1) % seed_size
            return (f"g{h}", char.elements[h % char.size])
        prng = Morph.from_function(Theory.STOCH, seed, tensor(seed, char), fn)
        return cls(char, seed, prng, bitwise_xor(char), name=f"affine/{seed_size}")

    @classmethod
    def repeating(cls, char_bits: int = 1, seed_size: int = 4) -> "CipherConfig":
        """Keeps the seed and always emits its low bits: the pad is reused."""
        char = char_object(char_bits)
        if seed_size % char.size:
            raise ConfigInvalid("seed size must be a multiple of the alphabet size")
        seed = ObjectType("Seed", [f"g{i}" for i in range(seed_size)])
        prng = Morph.from_function(Theory.STOCH, seed, tensor(seed, char),
                                   lambda g: (g, char.elements[int(g[1:]) % char.size]))
        return cls(char, seed, prng, bitwise_xor(char), name=f"repeating/{seed_size}")

    @classmethod
    def ideal(cls, char_bits: int = 1, horizon: int = 2) -> "CipherConfig":
        """A pad of ``horizon + 1`` characters read off a rotating register.

        Up to the horizon every key is a fresh uniform character, so this is
        the ideal-key substitution for all steps the trace looks at.
        """
        char = char_object(char_bits)
        length = horizon + 1
        pads = [()]
        for _ in range(length):
            pads = [p + (c,) for p in pads for c in char.elements]
        seed = ObjectType("Seed", ["p" + ".".join(p) for p in pads])

        def fn(g):
            cells = g[1:].split(".")
            return ("p" + ".".join(cells[1:] + cells[:1]), cells[0])
        prng = Morph.from_function(Theory.STOCH, seed, tensor(seed, char), fn)
        return cls(char, seed, prng, bitwise_xor(char), name=f"ideal/{length}")


def _estimate(cfg: CipherConfig) -> int:
    s, c = cfg.seed.size, cfg.char.size
    return s * s * 2 * c * (s + 1)


def _guard(n: int, what: str):
    if n > SIZE_LIMIT:
        raise SizeLimitExceeded(f"{what} needs about {n} table entries (limit {SIZE_LIMIT})")


def _programs():
    return parse(CIPHER_SOURCE)


def _generators(cfg: CipherConfig, with_state: bool = True) -> Dict[str, Morph]:
    t = Theory.STOCH
    plain = {"xor": cfg.xor, "unif": cfg.unif, "init": Morph.point(t, STATE, "s0")}
    if not with_state:
        return plain
    S, C = cfg.seed, cfg.char
    G = tensor(S, S)
    prng = cfg.prng
    unif_s = mpq(1, S.size)

    def seed_row(e):
        ga, gb, s = e
        if s == "s1":
            return {e: 1}
        return {(g, g, "s1"): unif_s for g in S.elements}

    def rand(side):
        def row(e):
            ga, gb = e
            ((h, k),) = prng.row(ga if side == "a" else gb)
            return {(h, gb, k) if side == "a" else (ga, h, k): 1}
        return row

    return {
        **plain,
        "seed": Morph.build(t, tensor(G, STATE), tensor(G, STATE), seed_row),
        "rand_a": Morph.build(t, G, tensor(G, C), rand("a")),
        "rand_b": Morph.build(t, G, tensor(G, C), rand("b")),
    }


def _interpretation(cfg: CipherConfig, with_state: bool = True) -> Interpretation:
    G = tensor(cfg.seed, cfg.seed)
    return Interpretation(Theory.STOCH, {"C": cfg.char, "U": STATE}, _generators(cfg, with_state),
                          global_state=G if with_state else None)


def _placeholder(cfg: CipherConfig) -> Morph:
    """Uniform seeds (overwritten by the first ``seed``) and state ``s0``."""
    G = tensor(cfg.seed, cfg.seed)
    w = mpq(1, G.size)
    return Morph(Theory.STOCH, UNIT, tensor(G, STATE),
                 {(): {join([G, STATE], [g, "s0"]): w for g in G.elements}})


def build_cipher(cfg: CipherConfig) -> Dict[str, MealyMachine]:
    """alice, bob, the composite cipher ``Char -> Char*Char`` and the secure channel.

    The cipher emits ``(e, d)``: what an eavesdropper sees and what bob decodes.
    The secure channel emits ``(n, m)`` with ``n`` uniform noise.
    """
    _guard(_estimate(cfg), "the cipher")
    if not verify_nilpotence(cfg):
        raise ConfigInvalid("xor is not nilpotent: xor(xor(m, k), k) != m")
    t = Theory.STOCH
    C = cfg.char
    G = tensor(cfg.seed, cfg.seed)
    _, progs = _programs()
    itp = _interpretation(cfg)
    fa = interpret(progs["alice"], itp)
    fb = interpret(progs["bob"], itp)
    alice = MealyMachine(tensor(G, STATE), C, C, _placeholder(cfg), fa)
    g_init = pushforward_first(_placeholder(cfg), G)
    bob = MealyMachine(G, C, C, g_init, fb)
    copy_stage = MealyMachine(G, C, tensor(C, C), g_init,
                              Morph.from_function(t, tensor(G, C), tensor(G, C, C),
                                                  lambda e: e + (e[-1],)))
    cipher = mealy_seq(mealy_seq(alice, copy_stage, shared=G),
                       mealy_whisker(bob, C, "left"), shared=G)
    plain = _interpretation(cfg, with_state=False)
    secure = MealyMachine.stateless(interpret(progs["secure"], plain))
    return {"alice": alice, "bob": bob, "cipher": cipher, "secure": secure}


def pushforward_first(m: Morph, g: ObjectType) -> Morph:
    """Marginal of a state ``I -> G * rest`` on ``G``."""
    rest = tensor(*m.cod.factors[g.arity:])
    acc = {}
    for e, w in m.row(()).items():
        k = split([g, rest], e)[0]
        acc[k] = acc.get(k, 0) + w
    return Morph(m.theory, UNIT, g, {(): acc})


def verify_nilpotence(cfg: CipherConfig) -> bool:
    _, progs = _programs()
    plain = _interpretation(cfg, with_state=False)
    return interpret(progs["nil"], plain) == interpret(progs["nil_id"], plain)


def tv_distance(p: dict, q: dict) -> mpq:
    """Half the L1 distance between two finite distributions."""
    keys = set(p) | set(q)
    return sum((abs(mpq(p.get(k, 0)) - mpq(q.get(k, 0))) for k in keys), mpq(0)) / 2


def _max_row_tv(f: Morph, g: Morph) -> mpq:
    return max((tv_distance(f.row(x), g.row(x)) for x in f.dom.elements), default=mpq(0))


@dataclass
class OTPReport:
    checks: Dict[str, bool]
    head_residual: mpq
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> List[str]:
        return [k for k, v in self.checks.items() if not v]


def _dinaturality(cfg: CipherConfig, cipher: MealyMachine, horizon: int) -> bool:
    """Slide the seeding ``unif`` across the first memory boundary.

    Left: the simplified first step (fresh shared seed ``h`` already in
    memory, key ``k`` uniform, outputs ``(k, m)``), then the cipher.
    Right: one secure step that leaves the seeds untouched and the state at
    ``s0``, then the cipher, which seeds itself on its next step.
    """
    t = Theory.STOCH
    S, C = cfg.seed, cfg.char
    mem = cipher.state
    out = cipher.out
    cod = tensor(mem, out)
    ws = mpq(1, S.size * C.size)
    wg = mpq(1, S.size * S.size * C.size)

    def left(m):
        return {join([mem, out], [(h, h, "s1"), (k, m)]): ws for h in S.elements for k in C.elements}

    def right(m):
        return {join([mem, out], [(ga, gb, "s0"), (k, m)]): wg
                for ga in S.elements for gb in S.elements for k in C.elements}

    tail = [cipher.trans] * horizon
    k = horizon + 1
    shape = ([C] * k, [out] * k, [mem] * k)
    s_left = StreamPrefix(*shape, [Morph.build(t, C, cod, left)] + tail)
    s_right = StreamPrefix(*shape, [Morph.build(t, C, cod, right)] + tail)
    return stream_equal_upto(s_left, s_right, horizon)


def head_residual(cfg: CipherConfig) -> mpq:
    """TV between one cipher step and one secure step, from a single program.

    The whole first step is interpreted with the global seeds, started from
    the placeholder state, and its memory discarded.
    """
    _guard(_estimate(cfg), "the cipher")
    _, progs = _programs()
    step = interpret(progs["first_step"], _interpretation(cfg))
    secure = interpret(progs["secure"], _interpretation(cfg, with_state=False))
    C = cfg.char
    init = _placeholder(cfg)
    worst = mpq(0)
    for m in C.elements:
        acc = {}
        for e, w in init.row(()).items():
            for k, v in step.row(e + (m,)).items():
                out = k[-2:]
                acc[out] = acc.get(out, 0) + w * v
        worst = max(worst, tv_distance(acc, secure.row(m)))
    return worst


def verify_otp_identities(cfg: CipherConfig, horizon: int = 2) -> OTPReport:
    """Exact checks: nilpotence, the Sweedler identity, the ideal-key step, dinaturality."""
    _, progs = _programs()
    plain = _interpretation(cfg, with_state=False)

    def eq(a, b):
        return interpret(progs[a], plain) == interpret(progs[b], plain)

    checks = {
        "nilpotence": eq("nil", "nil_id"),
        "sweedler": eq("sweedler", "noise"),
        "ideal_step": eq("one_time_pad", "secure"),
    }
    notes = {}
    residual = head_residual(cfg)
    if checks["nilpotence"]:
        machines = build_cipher(cfg)
        checks["dinaturality"] = _dinaturality(cfg, machines["cipher"], horizon)
    else:
        checks["dinaturality"] = False
        notes["dinaturality"] = "skipped: the cipher cannot be built without a nilpotent xor"
    return OTPReport(checks, residual, notes)


@dataclass
class CipherComparison:
    tv_per_step: List[mpq]
    prng_eps: mpq

    def bound_violations(self) -> List[int]:
        """Steps where ``tv[n] <= (n + 1) * prng_eps`` fails."""
        return [n for n, tv in enumerate(self.tv_per_step) if tv > (n + 1) * self.prng_eps]


def prng_eps(cfg: CipherConfig) -> mpq:
    """TV between ``unif -> g; prng(g)`` and independent uniform seed and key."""
    S, C = cfg.seed, cfg.char
    lhs = {}
    for g in S.elements:
        for hk in cfg.prng.row(g):
            lhs[hk] = lhs.get(hk, 0) + mpq(1, S.size)
    rhs = {join([S, C], [g, c]): mpq(1, S.size * C.size) for g in S.elements for c in C.elements}
    return tv_distance(lhs, rhs)


def cipher_vs_secure(cfg: CipherConfig, horizon: int) -> CipherComparison:
    """Per-step TV between the traces of cipher and secure, maximised over inputs."""
    if horizon < 0:
        raise InputError("horizon must be nonnegative")
    _guard(_estimate(cfg), "the cipher")
    _guard(cfg.char.size ** (3 * (horizon + 1)), "the joint output tables")
    m = build_cipher(cfg)
    pc = trace_process(m["cipher"], horizon)
    ps = trace_process(m["secure"], horizon)
    tvs = [_max_row_tv(f, g) for f, g in zip(pc.components, ps.components)]
    return CipherComparison(tvs, prng_eps(cfg))
