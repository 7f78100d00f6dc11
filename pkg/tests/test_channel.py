import numpy as np
import pytest

from qentropy.linalg import ValidationError, kron, partial_trace
from qentropy.channel import (
    KrausChannel,
    MeasurePrepareChannel,
    as_kraus,
    choi,
    constant_channel,
    cq_channel,
    dephasing,
    dephasing_mp,
    depolarizing,
    extend_left,
    extend_right,
    identity_channel,
    is_ppt,
    mp_to_kraus,
    qc_channel,
    random_channel,
    random_mp_channel,
    tensor_channels,
)
from qentropy.qstate import RngStream, basis_state, maximally_mixed, purify, random_density


def test_kraus_completeness_enforced():
    with pytest.raises(ValidationError):
        KrausChannel((np.eye(2) * 0.5,))
    ch = KrausChannel((np.eye(2),))
    assert ch.d_in == ch.d_out == 2


def test_identity_channel_is_identity():
    gen = RngStream(20).generator()
    rho = random_density(3, gen)
    assert np.allclose(identity_channel(3).apply(rho).matrix, rho.matrix, atol=1e-14)


def test_random_channel_is_trace_preserving():
    gen = RngStream(21).generator()
    for _ in range(50):
        d_in = int(gen.integers(2, 5))
        d_out = int(gen.integers(2, 5))
        # completeness needs d_out * count >= d_in
        low = -(-d_in // d_out)
        count = int(gen.integers(low, d_in * d_out + 1))
        ch = random_channel(d_in, d_out, count, gen)
        rho = random_density(d_in, gen)
        out = ch.apply(rho)
        assert out.dim == d_out
        assert abs(np.trace(out.matrix).real - 1.0) <= 1e-9


def test_random_channel_rejects_rank_starved_kraus():
    gen = RngStream(22).generator()
    # one 2x4 Kraus operator cannot satisfy completeness on a rank-4 input
    with pytest.raises(ValidationError):
        random_channel(4, 2, 1, gen)


def test_mp_channel_agrees_with_direct_sum():
    gen = RngStream(23).generator()
    mp = random_mp_channel(3, 2, 4, gen)
    rho = random_density(3, gen)
    want = sum(
        float(np.trace(m @ rho.matrix).real) * s.matrix
        for m, s in zip(mp.povm, mp.outputs)
    )
    assert np.allclose(mp.apply(rho).matrix, want, atol=1e-12)


def test_mp_to_kraus_equivalence():
    gen = RngStream(24).generator()
    for _ in range(20):
        d_in = int(gen.integers(2, 4))
        d_out = int(gen.integers(2, 4))
        size = int(gen.integers(2, 5))
        mp = random_mp_channel(d_in, d_out, size, gen)
        k = mp_to_kraus(mp)
        assert isinstance(k, KrausChannel)
        rho = random_density(d_in, gen)
        assert np.allclose(mp.apply(rho).matrix, k.apply(rho).matrix, atol=1e-10)


def test_mp_to_kraus_rejects_kraus_input():
    with pytest.raises(ValidationError):
        mp_to_kraus(identity_channel(2))


def test_mp_povm_validation():
    bad_povm = [np.eye(2) * 0.5, np.eye(2) * 0.4]  # sums to 0.9 I
    outs = (maximally_mixed(2), maximally_mixed(2))
    with pytest.raises(ValidationError):
        MeasurePrepareChannel(tuple(bad_povm), outs)


def test_extension_acts_trivially_on_the_other_factor():
    gen = RngStream(25).generator()
    ch = random_channel(2, 2, 2, gen)
    rho = random_density(2, gen)
    sigma = random_density(3, gen)
    joint = kron(rho.matrix, sigma.matrix)
    ext = extend_right(ch, 3)
    got = ext.apply_matrix(joint)
    want = kron(ch.apply(rho).matrix, sigma.matrix)
    assert np.allclose(got, want, atol=1e-12)
    ext_l = extend_left(ch, 3)
    got_l = ext_l.apply_matrix(kron(sigma.matrix, rho.matrix))
    assert np.allclose(got_l, kron(sigma.matrix, ch.apply(rho).matrix), atol=1e-12)


def test_extension_of_mp_channel_matches_conditional_form():
    # (Phi x id) psi = sum_k sigma_k x Tr_A[(M_k x I) psi]
    gen = RngStream(26).generator()
    mp = random_mp_channel(2, 3, 3, gen)
    psi = purify(random_density(2, gen)).density()
    got = extend_right(mp, 2).apply_matrix(psi.matrix)
    want = np.zeros((6, 6), dtype=complex)
    for m, s in zip(mp.povm, mp.outputs):
        cond = partial_trace(kron(m, np.eye(2)) @ psi.matrix, (2, 2), (1,))
        want += kron(s.matrix, cond)
    assert np.allclose(got, want, atol=1e-11)


def test_tensor_channels_on_product_input():
    gen = RngStream(27).generator()
    a = random_channel(2, 2, 2, gen)
    b = random_channel(3, 3, 2, gen)
    rho, sigma = random_density(2, gen), random_density(3, gen)
    got = tensor_channels(a, b).apply_matrix(kron(rho.matrix, sigma.matrix))
    want = kron(a.apply(rho).matrix, b.apply(sigma).matrix)
    assert np.allclose(got, want, atol=1e-12)


def test_choi_of_identity_is_max_entangled():
    c = choi(identity_channel(2))
    want = np.zeros((4, 4))
    want[0, 0] = want[0, 3] = want[3, 0] = want[3, 3] = 0.5
    assert np.allclose(c.matrix, want, atol=1e-12)


def test_choi_reproduces_action():
    # Tr_in[(I x rho^T) J] recovers Phi(rho) when the output is the first factor
    gen = RngStream(28).generator()
    ch = random_channel(3, 2, 3, gen)
    rho = random_density(3, gen)
    j = choi(ch)
    lifted = kron(np.eye(2), rho.matrix.T) @ (j.matrix * 3)
    got = partial_trace(lifted, (2, 3), (0,))
    assert np.allclose(got, ch.apply(rho).matrix, atol=1e-11)


def test_mp_choi_is_ppt():
    gen = RngStream(29).generator()
    for _ in range(10):
        mp = random_mp_channel(2, 2, int(gen.integers(2, 5)), gen)
        assert is_ppt(choi(mp))


def test_identity_choi_is_not_ppt():
    assert not is_ppt(choi(identity_channel(2)))


def test_depolarizing_extremes():
    gen = RngStream(30).generator()
    rho = random_density(2, gen)
    assert np.allclose(depolarizing(2, 0.0).apply(rho).matrix, rho.matrix, atol=1e-12)
    out = depolarizing(2, 1.0).apply(rho)
    assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_depolarizing_interpolates():
    gen = RngStream(31).generator()
    for d in (2, 3):
        rho = random_density(d, gen)
        p = 0.3
        want = (1 - p) * rho.matrix + p * np.eye(d) / d
        assert np.allclose(depolarizing(d, p).apply(rho).matrix, want, atol=1e-12)
    with pytest.raises(ValidationError):
        depolarizing(2, 1.5)


def test_dephasing_kills_off_diagonals():
    gen = RngStream(32).generator()
    rho = random_density(3, gen)
    want = np.diag(np.diag(rho.matrix))
    assert np.allclose(dephasing(3).apply(rho).matrix, want, atol=1e-12)
    assert np.allclose(dephasing_mp(3).apply(rho).matrix, want, atol=1e-12)


def test_cq_and_qc_channels():
    gen = RngStream(33).generator()
    outs = (random_density(3, gen), random_density(3, gen))
    cq = cq_channel(outs)
    rho = random_density(2, gen)
    p = np.diag(rho.matrix).real
    want = p[0] * outs[0].matrix + p[1] * outs[1].matrix
    assert np.allclose(cq.apply(rho).matrix, want, atol=1e-12)

    qc = qc_channel(tuple(np.outer(v, v.conj()) for v in np.eye(2)))
    got = qc.apply(rho)
    assert np.allclose(got.matrix, np.diag(p), atol=1e-12)


def test_constant_channel():
    gen = RngStream(34).generator()
    sigma = random_density(3, gen)
    ch = constant_channel(sigma, d_in=2)
    rho = random_density(2, gen)
    assert np.allclose(ch.apply(rho).matrix, sigma.matrix, atol=1e-12)


def test_as_kraus_passthrough():
    k = identity_channel(2)
    assert as_kraus(k) is k
    mp = dephasing_mp(2)
    assert isinstance(as_kraus(mp), KrausChannel)


def test_apply_rejects_wrong_dimension():
    ch = identity_channel(2)
    with pytest.raises(ValidationError):
        ch.apply(maximally_mixed(3))
