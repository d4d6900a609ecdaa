"""State machinery: partial traces, spectra, per-state measures."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgsub import quantum
from avgsub.errors import PrecisionFailure, ResourceCapError
from avgsub.partition import FactorList, flat_index
from avgsub.quantum import DensityMatrix, PureState, Spectrum
from avgsub.sampler import sample_haar_state, stream_for


def bell_state() -> PureState:
    fl = FactorList((2, 2))
    return PureState(np.array([1, 0, 0, 1]) / math.sqrt(2), fl)


def seeded_state(dims, seed=0, index=0) -> PureState:
    return sample_haar_state(FactorList(tuple(dims)), stream_for(seed, index))


def partial_trace_oracle(state: PureState, keep_indices) -> np.ndarray:
    """Literal double loop over kept and traced multi-indices, built on
    the flat-index contract; independent of the vectorized kernel."""
    factors = state.factors
    keep = tuple(keep_indices)
    rest = tuple(i for i in range(factors.count) if i not in keep)
    keep_dims = [factors.dims[i] for i in keep]
    rest_dims = [factors.dims[i] for i in rest]
    n_keep = int(np.prod(keep_dims)) if keep_dims else 1
    n_rest = int(np.prod(rest_dims)) if rest_dims else 1

    def recombine(kept_digits, rest_digits):
        multi = [0] * factors.count
        for pos, digit in zip(keep, kept_digits):
            multi[pos] = digit
        for pos, digit in zip(rest, rest_digits):
            multi[pos] = digit
        return flat_index(factors, multi)

    def digits(flat, dims):
        out = []
        for d in reversed(dims):
            out.append(flat % d)
            flat //= d
        return tuple(reversed(out))

    rho = np.zeros((n_keep, n_keep), dtype=complex)
    psi = state.amplitudes
    for a in range(n_keep):
        for b in range(n_keep):
            for c in range(n_rest):
                ia = recombine(digits(a, keep_dims), digits(c, rest_dims))
                ib = recombine(digits(b, keep_dims), digits(c, rest_dims))
                rho[a, b] += psi[ia] * np.conj(psi[ib])
    return rho


class TestPureState:
    def test_norm_enforced(self):
        fl = FactorList((2, 2))
        with pytest.raises(ValueError, match="normalized"):
            PureState(np.array([1.0, 1.0, 0, 0]), fl)

    def test_length_enforced(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 0, 0]), FactorList((2, 2)))


class TestDensityMatrix:
    def test_hermiticity_enforced(self):
        bad = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(bad)

    def test_trace_enforced(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2))


class TestSpectrum:
    def test_validation(self):
        with pytest.raises(ValueError, match="descending"):
            Spectrum(np.array([0.2, 0.8]))
        with pytest.raises(ValueError, match="sum"):
            Spectrum(np.array([0.7, 0.2]))
        with pytest.raises(ValueError):
            Spectrum(np.array([1.2, -0.2]))

    def test_clamping_policy(self):
        w = quantum._clamp_eigenvalues(np.array([0.9, 0.1, -1e-11]))
        assert w[2] == 0.0
        with pytest.raises(PrecisionFailure):
            quantum._clamp_eigenvalues(np.array([1.0, -1e-6]))


class TestPartialTrace:
    def test_product_state(self):
        fl = FactorList((2, 2))
        state = PureState(np.array([1.0, 0, 0, 0]), fl)
        rho = quantum.partial_trace(state, fl.select([0]))
        assert np.allclose(rho.entries, np.diag([1.0, 0.0]))

    def test_bell_state(self):
        fl = FactorList((2, 2))
        rho = quantum.partial_trace(bell_state(), fl.select([0]))
        assert np.allclose(rho.entries, np.eye(2) / 2)

    def test_keep_second_factor_matches_first_spectrum(self):
        state = seeded_state((2, 3), seed=11)
        fl = state.factors
        rho1 = quantum.partial_trace(state, fl.select([1]))
        assert abs(np.trace(rho1.entries) - 1) < 1e-12
        w0 = quantum.spectrum_of(state, fl.select([0])).eigenvalues
        w1 = np.linalg.eigvalsh(rho1.entries)[::-1]
        # 3-dim side carries the 2-dim spectrum padded with one zero
        assert np.allclose(w1[:2], w0, atol=1e-9)
        assert abs(w1[2]) < 1e-9

    @pytest.mark.parametrize(
        "dims,keep",
        [((2, 2), (0,)), ((2, 3), (1,)), ((2, 3, 2), (0, 2)), ((3, 2, 2), (1,)), ((4, 4, 4), (0, 2))],
    )
    def test_against_loop_oracle(self, dims, keep):
        state = seeded_state(dims, seed=5, index=3)
        rho = quantum.partial_trace(state, state.factors.select(list(keep)))
        oracle = partial_trace_oracle(state, keep)
        assert np.allclose(rho.entries, oracle, atol=1e-12)

    def test_cap_message_points_to_gram_path(self):
        fl = FactorList((4096, 2))
        state = PureState(
            np.concatenate([[1.0], np.zeros(fl.total - 1)]), fl
        )
        with pytest.raises(ResourceCapError, match="spectrum_of"):
            quantum.partial_trace(state, fl.select([0]))


class TestSpectrumOf:
    def test_bell(self):
        fl = FactorList((2, 2))
        spec = quantum.spectrum_of(bell_state(), fl.select([0]))
        assert np.allclose(spec.eigenvalues, [0.5, 0.5])

    def test_product(self):
        fl = FactorList((2, 2))
        state = PureState(np.array([0, 1.0, 0, 0]), fl)
        spec = quantum.spectrum_of(state, fl.select([0]))
        assert np.allclose(spec.eigenvalues, [1.0, 0.0])

    def test_schmidt_equality_on_224(self):
        state = seeded_state((2, 2, 4), seed=9)
        fl = state.factors
        w_front = quantum.spectrum_of(state, fl.select([0, 1])).eigenvalues
        w_back = quantum.spectrum_of(state, fl.select([2])).eigenvalues
        assert np.allclose(w_front, w_back, atol=1e-9)

    def test_gram_path_matches_full_path(self):
        for keep in [(0,), (1,), (0, 1), (0, 2)]:
            state = seeded_state((4, 4, 4), seed=21, index=keep[0])
            sel = state.factors.select(list(keep))
            gram = quantum.spectrum_of(state, sel).eigenvalues
            full = np.linalg.eigvalsh(quantum.partial_trace(state, sel).entries)[::-1]
            k = len(gram)
            assert np.allclose(full[:k], gram, atol=1e-9)
            assert np.all(np.abs(full[k:]) < 1e-9)

    def test_spectrum_properties_random_states(self):
        for index in range(20):
            state = seeded_state((3, 5), seed=2, index=index)
            spec = quantum.spectrum_of(state, state.factors.select([0]))
            w = spec.eigenvalues
            assert np.all(w >= 0) and np.all(w <= 1)
            assert abs(w.sum() - 1) < 1e-10

    def test_eigensolver_residuals(self):
        # Accuracy contract: ||rho v - l v|| <= 1e-8 for every pair.
        state = seeded_state((4, 4, 4), seed=3)
        sel = state.factors.select([0, 1])
        rho = quantum.partial_trace(state, sel).entries
        vals, vecs = np.linalg.eigh(rho)
        for lam, vec in zip(vals, vecs.T):
            assert np.linalg.norm(rho @ vec - lam * vec) <= 1e-8

    def test_trivial_side(self):
        fl = FactorList((2, 2))
        spec = quantum.spectrum_of(bell_state(), fl.select([]))
        assert list(spec.eigenvalues) == [1.0]


class TestMeasures:
    def test_pure_spectrum(self):
        spec = Spectrum(np.array([1.0, 0.0]))
        assert quantum.von_neumann(spec) == 0.0
        assert quantum.purity(spec) == 1.0
        assert quantum.tangle(spec) == 0.0
        assert quantum.concurrence(spec) == 0.0
        assert quantum.pure_state_negativity(spec) == 0.0
        assert quantum.tsallis(spec, 3.0) == 0.0
        assert quantum.renyi(spec, 3.0) == 0.0

    def test_maximally_mixed_qubit(self):
        spec = Spectrum(np.array([0.5, 0.5]))
        assert quantum.von_neumann(spec) == pytest.approx(math.log(2), abs=1e-15)
        assert quantum.tsallis(spec, 2.0) == pytest.approx(0.5, abs=1e-15)
        assert quantum.renyi(spec, 2.0) == pytest.approx(math.log(2), abs=1e-15)
        assert quantum.purity(spec) == pytest.approx(0.5, abs=1e-15)
        assert quantum.tangle(spec) == pytest.approx(1.0, abs=1e-15)
        assert quantum.concurrence(spec) == pytest.approx(1.0, abs=1e-15)
        assert quantum.pure_state_negativity(spec) == pytest.approx(0.5, abs=1e-15)

    def test_hand_evaluated_three_level(self):
        spec = Spectrum(np.array([0.5, 0.25, 0.25]))
        assert quantum.von_neumann(spec) == pytest.approx(1.5 * math.log(2), abs=1e-15)
        expected_neg = ((1 / math.sqrt(2) + 1) ** 2 - 1) / 2
        assert quantum.pure_state_negativity(spec) == pytest.approx(expected_neg, abs=1e-15)

    def test_order_validation(self):
        spec = Spectrum(np.array([0.5, 0.5]))
        for q in (0.0, -1.0, 1.0):
            with pytest.raises(ValueError):
                quantum.tsallis(spec, q)
            with pytest.raises(ValueError):
                quantum.renyi(spec, q)

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_tangle_is_twice_quadratic_tsallis(self, index):
        state = seeded_state((3, 4), seed=77, index=index)
        spec = quantum.spectrum_of(state, state.factors.select([0]))
        assert quantum.tangle(spec) == pytest.approx(
            2 * quantum.tsallis(spec, 2.0), abs=1e-12
        )

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_q_to_one_limits(self, index):
        state = seeded_state((2, 5), seed=13, index=index)
        spec = quantum.spectrum_of(state, state.factors.select([0]))
        s = quantum.von_neumann(spec)
        assert abs(quantum.tsallis(spec, 1.0001) - s) <= 1e-3
        assert abs(quantum.renyi(spec, 1.0001) - s) <= 1e-3
        assert abs(quantum.tsallis(spec, 0.9999) - s) <= 1e-3
        assert abs(quantum.renyi(spec, 0.9999) - s) <= 1e-3


class TestMutualInfo:
    def test_independent_bell_pairs(self):
        fl = FactorList((2, 2, 2, 2))
        pair = np.array([1, 0, 0, 1]) / math.sqrt(2)
        amps = np.kron(pair, pair)  # pairs (0,1) and (2,3)
        state = PureState(amps, fl)
        mi = quantum.mutual_info(state, fl.select([0]), fl.select([2]))
        assert mi == pytest.approx(0.0, abs=1e-12)

    def test_bell_pair(self):
        fl = FactorList((2, 2))
        mi = quantum.mutual_info(bell_state(), fl.select([0]), fl.select([1]))
        assert mi == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_doubles_entropy_when_pair_exhausts_state(self):
        for index in range(10):
            state = seeded_state((2, 2), seed=4, index=index)
            fl = state.factors
            mi = quantum.mutual_info(state, fl.select([0]), fl.select([1]))
            s = quantum.von_neumann(quantum.spectrum_of(state, fl.select([0])))
            assert mi == pytest.approx(2 * s, abs=1e-9)

    def test_overlap_rejected(self):
        fl = FactorList((2, 2, 2))
        with pytest.raises(ValueError, match="overlap"):
            quantum.mutual_info(bell_state_on(fl), fl.select([0, 1]), fl.select([1]))

    def test_complementarity_identities(self):
        # S_K = S_Kbar and doubled-entropy identities on seeded states.
        for index in range(25):
            state = seeded_state((2, 2, 4), seed=99, index=index)
            fl = state.factors
            for indices in [[0], [1], [2], [0, 1], [0, 2], [1, 2]]:
                sel = fl.select(indices)
                s = quantum.von_neumann(quantum.spectrum_of(state, sel))
                s_bar = quantum.von_neumann(quantum.spectrum_of(state, sel.complement()))
                assert abs(s - s_bar) < 1e-9
            s_a = quantum.von_neumann(quantum.spectrum_of(state, fl.select([0])))
            s_c = quantum.von_neumann(quantum.spectrum_of(state, fl.select([2])))
            mi_a = quantum.mutual_info(state, fl.select([0]), fl.select([1, 2]))
            mi_c = quantum.mutual_info(state, fl.select([2]), fl.select([0, 1]))
            assert abs(mi_a - 2 * s_a) < 1e-9
            assert abs(mi_c - 2 * s_c) < 1e-9


def bell_state_on(fl: FactorList) -> PureState:
    amps = np.zeros(fl.total)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(amps, fl)
