import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqmt import dcnet
from aqmt.dcnet import MANY, ONE, ZERO, DCNet, PadTable, anonymous_parity_round
from aqmt.gf2m import GF2m, bits_to_int, int_to_bits, is_irreducible, modulus
from aqmt.rand import Stream, enumerate_branches

from checks import coalition_view_distribution, distribution_close


class Deviation:
    """Minimal corrupt-party hook set for driving DCNet directly."""

    def __init__(self, corrupt, publish=None, inputs=None):
        self.corrupt = frozenset(corrupt)
        self.publish = publish or (lambda i, ctx, v: v)
        self.inputs = inputs or (lambda i, ctx, b: b)

    def dc_input(self, i, ctx, b):
        return self.inputs(i, ctx, b)

    def dc_publish(self, i, ctx, v):
        return self.publish(i, ctx, v)


# -- GF(2^s) -----------------------------------------------------------------

@pytest.mark.parametrize("s", range(1, 17))
def test_modulus_irreducible(s):
    assert is_irreducible(modulus(s))
    assert modulus(s).bit_length() == s + 1


def test_field_axioms_small():
    f = GF2m(4)
    for a in range(1, 16):
        inv = f.pow(a, 14)
        assert f.mul(a, inv) == 1
    for a, b, c in itertools.product(range(16), repeat=3):
        if (a + b + c) % 7 == 0:
            assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)


def test_bits_roundtrip():
    for v in range(64):
        assert bits_to_int(int_to_bits(v, 6)) == v


# -- parity round ------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 5])
def test_parity_round_exhaustive(n):
    gen_pads = list(itertools.product((0, 1), repeat=n * (n - 1) // 2))
    for inputs in itertools.product((0, 1), repeat=n):
        for values in gen_pads[:: max(1, len(gen_pads) // 8)]:
            res = anonymous_parity_round(inputs, PadTable.from_pairs(n, values))
            assert res.output == sum(inputs) % 2


def test_parity_round_examples():
    pads = PadTable.fresh(3, Stream(0))
    assert anonymous_parity_round([0, 0, 0], pads).output == 0
    assert anonymous_parity_round([1, 0, 0], pads).output == 1
    assert anonymous_parity_round([1, 1, 0], pads).output == 0


def test_published_triple_uniform_over_odd_parity():
    counts = {}
    for values in itertools.product((0, 1), repeat=3):
        pub = tuple(anonymous_parity_round([1, 0, 0], PadTable.from_pairs(3, values)).published)
        counts[pub] = counts.get(pub, 0) + 1
    odd = [t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2]
    assert sorted(counts) == sorted(odd)
    assert set(counts.values()) == {2}


def test_pad_table_symmetric():
    pads = PadTable.fresh(5, Stream(3))
    assert (pads.bits == pads.bits.T).all()
    assert not pads.bits.diagonal().any()


def test_refusal_counts_as_zero_and_is_flagged():
    res = anonymous_parity_round([1, 0, 0], PadTable.fresh(3, Stream(1)), published={2: None})
    assert res.refused == {2}
    assert res.published[2] is None


@pytest.mark.parametrize("coalition", [(0,), (0, 1)])
def test_parity_round_view_depends_only_on_parity(coalition):
    n = 4
    honest = [i for i in range(n) if i not in coalition]
    by_parity = {0: [], 1: []}
    for bits in itertools.product((0, 1), repeat=len(honest)):
        inputs = [0] * n
        for i, b in zip(honest, bits):
            inputs[i] = b
        by_parity[sum(bits) % 2].append(coalition_view_distribution(inputs, set(coalition)))
    for dists in by_parity.values():
        for d in dists[1:]:
            assert distribution_close(dists[0], d)


# -- logical OR --------------------------------------------------------------

def or_miss_probability(inputs, s):
    return sum(p for p, out in enumerate_branches(0, ["coin"], lambda st: DCNet(len(inputs), st).logical_or(inputs, s)) if out == 0)


def test_or_all_zero_is_zero():
    for seed in range(50):
        assert dcnet.logical_or([0, 0, 0, 0], 3, Stream(seed)) == 0


@pytest.mark.parametrize("s", [1, 2, 4, 8])
def test_or_single_one_miss_is_exactly_2_to_minus_s(s):
    assert or_miss_probability([0, 1, 0], s) == pytest.approx(2.0**-s, abs=1e-15)


def test_or_two_ones_miss():
    # parity of two coins is a fair coin as well
    assert or_miss_probability([1, 1, 0], 3) == pytest.approx(2.0**-3, abs=1e-15)


def test_or_silent_party_forces_one():
    dev = Deviation({2}, publish=lambda i, ctx, v: None)
    for seed in range(20):
        assert dcnet.logical_or([0, 0, 0], 4, Stream(seed), deviation=dev) == 1


def test_or_s16_monte_carlo():
    assert all(dcnet.logical_or([0, 0, 1, 0], 16, Stream(seed)) for seed in range(300))


@settings(max_examples=50, deadline=None)
@given(bits=st.lists(st.integers(0, 1), min_size=3, max_size=5), seed=st.integers(0, 2**31), s=st.integers(1, 6), pos=st.integers(0, 4))
def test_or_monotone_and_never_raises(bits, seed, s, pos):
    out = dcnet.logical_or(bits, s, Stream(seed))
    raised = list(bits)
    raised[pos % len(bits)] = 1
    # coins of the already-set holders are drawn identically; the extra holder only adds coins
    if out == 1 and raised == bits:
        assert dcnet.logical_or(raised, s, Stream(seed)) == 1
    assert out in (0, 1)
    if not any(bits):
        assert out == 0


def test_or_rejects_bad_s():
    with pytest.raises(ValueError):
        dcnet.logical_or([0, 0, 0], 0, Stream(0))


# -- collision detection -----------------------------------------------------

def collision_distribution(inputs, s):
    dist = {}
    for p, r in enumerate_branches(0, ["coin"], lambda st: DCNet(len(inputs), st).collision_detection(inputs, s)):
        dist[r] = dist.get(r, 0.0) + p
    return dist


def test_collision_all_zero():
    assert collision_distribution([0, 0, 0], 4) == {ZERO: 1.0}


def test_collision_one_holder_exhaustive_s4():
    d = collision_distribution([0, 1, 0], 4)
    assert d.get(ONE, 0) >= 1 - 2.0 ** -3
    assert d.get(MANY, 0) == 0


def test_collision_two_holders_monte_carlo():
    trials = 4000
    many = sum(dcnet.collision_detection([1, 1, 0], 8, Stream(seed)) == MANY for seed in range(trials))
    # a miss needs phase A or the closing OR to fail, each 2^-s
    p = 1 - 2.0**-7
    assert many / trials >= p - 3 * np.sqrt(p * (1 - p) / trials)


def test_collision_corrupt_can_force_many():
    dev = Deviation({2}, publish=lambda i, ctx, v: None)
    assert all(dcnet.collision_detection([0, 1, 0], 4, Stream(seed), deviation=dev) == MANY for seed in range(30))


# -- notification ------------------------------------------------------------

def test_notification_nobody():
    assert dcnet.notification([set(), set(), set()], 4, Stream(0)) == [0, 0, 0]


def test_notification_two_to_zero():
    for seed in range(200):
        assert dcnet.notification([set(), set(), {0}, set()], 16, Stream(seed)) == [1, 0, 0, 0]


def test_notification_forced_silence():
    out = dcnet.notification([set(), {2}, set()], 4, Stream(0), forced_silent={(1, 2)})
    assert out == [0, 0, 0]


def test_notification_view_independent_of_pair():
    # one private round to each target j; coalition {0} at n=4
    n, coalition = 4, {0}
    honest = [1, 2, 3]
    dists = {}
    for S, R in itertools.permutations(honest, 2):
        per_target = []
        for j in range(n):
            d = {}
            for coin in (0, 1):
                contrib = [0] * n
                contrib[S] = coin if j == R else 0
                for values in itertools.product((0, 1), repeat=6):
                    res = anonymous_parity_round(contrib, PadTable.from_pairs(n, values), output_scope=j)
                    own = tuple(values[:3])  # pads of party 0
                    seen = tuple(res.published) if j in coalition else (res.published[0],)
                    key = (own, seen, res.output if j in coalition else None)
                    d[key] = d.get(key, 0) + 1 / 128
            per_target.append(d)
        dists[(S, R)] = per_target
    ref = next(iter(dists.values()))
    for other in dists.values():
        for a, b in zip(ref, other):
            assert distribution_close(a, b)


# -- anonymous message transmission ------------------------------------------

def test_amt_honest_delivery():
    res = dcnet.amt_send([1, 0, 1, 1, 0], 1, 3, 8, Stream(5), n=4)
    assert not res.aborted and res.message == [1, 0, 1, 1, 0]


def test_amt_rejects_bad_arguments():
    with pytest.raises(ValueError):
        dcnet.amt_send([], 1, 2, 4, Stream(0), n=3)
    with pytest.raises(ValueError):
        dcnet.amt_send([1], 1, 1, 4, Stream(0), n=3)


def test_mac_bound_within_documented_budget():
    for L in (1, 6, 20):
        for s in (4, 8, 16):
            assert dcnet.mac_forgery_bound(L, s) <= (L + 2 * s) / 2**s


def test_mac_tag_linear_in_message():
    # the tag is affine in the message, so additive tampering shifts it by a key-dependent amount
    s = 6
    f = GF2m(s)
    for key in range(1, 2**s, 7):
        a, b = [1, 0, 1, 1, 0, 1, 1], [0, 1, 1, 0, 0, 1, 0]
        ab = [x ^ y for x, y in zip(a, b)]
        zero = dcnet.mac_tag([0] * 7, key, s)
        assert dcnet.mac_tag(ab, key, s) == dcnet.mac_tag(a, key, s) ^ dcnet.mac_tag(b, key, s) ^ zero
    assert f.mul(3, 5) == f.mul(5, 3)


def test_amt_body_flip_detected():
    flip_round = 2
    dev = Deviation({0}, publish=lambda i, ctx, v: v ^ 1 if ctx.subprotocol == "amt" and ctx.round == flip_round else v)
    trials = 2000
    escapes = sum(not dcnet.amt_send([1, 0, 1, 1, 0, 0], 1, 3, 8, Stream(seed), n=4, deviation=dev).aborted for seed in range(trials))
    bound = (6 + 16) / 2**8
    assert escapes / trials <= bound + 3 * np.sqrt(bound / trials)


def test_amt_outputs_uniform_and_pair_independent():
    def outputs(S, R):
        d = {}

        def one(stream):
            seen = []
            net = DCNet(4, stream, observer=lambda ctx, res: seen.append((ctx.subprotocol, res.output)))
            net.amt_send([1, 0], S, R, 2)
            return tuple(seen)

        for p, view in enumerate_branches(0, ["mask", "mackey"], one):
            d[view] = d.get(view, 0.0) + p
        return d

    ref = outputs(1, 2)
    assert len(ref) == 2**6
    assert all(abs(p - 2.0**-6) < 1e-12 for p in ref.values())
    for S, R in [(2, 1), (3, 1), (2, 3)]:
        assert distribution_close(ref, outputs(S, R))
