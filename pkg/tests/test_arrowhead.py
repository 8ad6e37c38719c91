import numpy as np
import pytest

from conftest import balanced_arrowhead, random_matrix, rng_for
from numrange_lab.arrowhead import (
    ArrowheadMatrix,
    NotApplicableError,
    NotArrowheadError,
    arrowhead_from_dense,
    dichotomy_check,
    gauwu_balanced,
    gauwu_unbalanced_two,
    gauwu_with_zero_pairs,
    irreducible_dichotomous_check,
    normal_eigenvalue_check,
    projection_recognize,
    secular_eigen,
    secular_function,
)
from numrange_lab.generators import FamilySpec, generate
from numrange_lab.linalg import herm_part_at, matrix_scale
from numrange_lab.oracle import max_orthonormal_boundary_set
from numrange_lab.reduction import commutant_dimension


class TestFromDense:
    def test_any_2x2_is_arrowhead(self):
        a = random_matrix(rng_for(0), 2)
        ah = arrowhead_from_dense(a)
        assert np.allclose(ah.to_dense(), a)

    def test_diagonal_accepted(self):
        ah = arrowhead_from_dense(np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(ah.col, 0) and np.allclose(ah.row, 0)

    def test_dense_random_rejected(self):
        rng = rng_for(1)
        rejected = 0
        for _ in range(10):
            a = random_matrix(rng, 4)
            mask = np.zeros((4, 4), dtype=bool)
            mask[np.arange(4), np.arange(4)] = True
            mask[:, 3] = mask[3, :] = True
            try:
                arrowhead_from_dense(a)
            except NotArrowheadError:
                assert np.max(np.abs(a[~mask])) > 1e-8
                rejected += 1
        assert rejected == 10

    def test_round_trip(self):
        rng = rng_for(2)
        ah = ArrowheadMatrix(
            rng.standard_normal(3) + 1j * rng.standard_normal(3),
            rng.standard_normal(3) + 1j * rng.standard_normal(3),
            rng.standard_normal(3) + 1j * rng.standard_normal(3),
            1.5 - 0.5j,
        )
        back = arrowhead_from_dense(ah.to_dense())
        assert np.allclose(back.to_dense(), ah.to_dense())


class TestSecular:
    def test_interlacing_two_poles(self):
        ah = ArrowheadMatrix([0.0, 1.0], [1.0, 1.0], [1.0, 1.0], 0.0)
        res = secular_eigen(ah)
        roots = np.sort([p.value.real for p in res.eigen])
        inside = [r for r in roots if 0 < r < 1]
        assert len(inside) == 1
        assert roots[0] < 0 and roots[-1] > 1

    def test_degenerate_pole_root(self):
        # secular equation reduces to 1 - lambda = 0; the other eigenvalue
        # sits exactly on the pole and comes back through the nullspace
        ah = ArrowheadMatrix([0.0], [1.0], [0.0], 1.0)
        res = secular_eigen(ah)
        vals = sorted(v.real for v in res.values())
        assert np.allclose(vals, [0.0, 1.0], atol=1e-10)
        assert len(res.eigen) == 1 and abs(res.eigen[0].value - 1.0) < 1e-12
        assert len(res.degenerate) == 1 and abs(res.degenerate[0].value) < 1e-10

    def test_matches_dense_eigensolver(self):
        rng = rng_for(3)
        for trial in range(5):
            n = 6
            ah = ArrowheadMatrix(
                rng.uniform(-1, 1, n - 1) + 1j * rng.uniform(-1, 1, n - 1),
                rng.uniform(0.2, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1)),
                rng.uniform(0.2, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1)),
                rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1),
            )
            res = secular_eigen(ah)
            mine = np.array([p.value for p in res.eigen] + [p.value for p in res.degenerate])
            dense = np.linalg.eigvals(ah.to_dense())
            # match by nearest pairing
            for lam in mine:
                assert np.min(np.abs(dense - lam)) < 1e-8

    def test_residuals_and_vectors(self):
        rng = rng_for(4)
        n = 20
        ah = ArrowheadMatrix(
            rng.uniform(-1, 1, n - 1) + 1j * rng.uniform(-1, 1, n - 1),
            rng.uniform(0.2, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1)),
            rng.uniform(0.2, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1)),
            0.2,
        )
        res = secular_eigen(ah)
        scale = matrix_scale(ah.to_dense())
        assert len(res.eigen) == n
        for p in res.eigen:
            assert p.residual <= 1e-9 * scale
            assert abs(secular_function(ah, p.value)) < 1e-8 * scale

    def test_hermitian_interlaces_poles(self):
        rng = rng_for(5)
        n = 12
        d = np.linspace(-1, 1, n - 1) + rng.uniform(-0.03, 0.03, n - 1)
        b = rng.uniform(0.1, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1))
        ah = ArrowheadMatrix(d, b, np.conj(b), 0.3)
        res = secular_eigen(ah)
        roots = np.sort([p.value.real for p in res.eigen])
        assert len(roots) == n
        for i, pole in enumerate(np.sort(d)):
            assert roots[i] < pole < roots[i + 1]


class TestNormalEigenvalue:
    def test_zero_pair_condition(self):
        ah = ArrowheadMatrix([0.5, -0.5], [1.0, 0.0], [0.5j, 0.0], 0.1)
        certs = normal_eigenvalue_check(ah)
        assert any(c.condition == "i" and c.indices == (1,) for c in certs)

    def test_repeated_diagonal_condition(self):
        ah = ArrowheadMatrix([0.3, 0.3, -1.0], [1.0, 1.0, 0.5], [1.0, 1.0, 0.2], 0.0)
        certs = normal_eigenvalue_check(ah)
        assert any(c.condition == "ii" for c in certs)

    def test_triple_repeat_condition(self):
        ah = ArrowheadMatrix([0.3, 0.3, 0.3], [1.0, 2.0, 0.5], [1.0, 0.7, 0.2], 0.0)
        certs = normal_eigenvalue_check(ah)
        assert any(c.condition == "iii" for c in certs)

    def test_essentially_hermitian_rotation_fires_iv(self):
        rng = rng_for(6)
        n = 4
        d = rng.uniform(-1, 1, n - 1)
        b = rng.uniform(0.2, 1, n - 1) * np.exp(1j * rng.uniform(0, 7, n - 1))
        herm = ArrowheadMatrix(d, b, np.conj(b), 0.4).to_dense()
        a = np.exp(1j * 0.9) * herm
        certs = normal_eigenvalue_check(arrowhead_from_dense(a))
        assert any(c.condition == "iv" for c in certs)

    def test_concurrent_lines_fire_iv(self):
        # reverse-engineer: pick a target eigenvalue and couplings so all
        # coupling-direction lines pass through it
        rng = rng_for(7)
        lam = 0.3 + 0.2j
        d = np.array([lam + 1.0 * np.exp(1j * 0.2), lam + 0.8 * np.exp(1j * 1.4), lam + 1.3 * np.exp(1j * 2.9)])
        phis = np.angle(lam - d)
        mod = rng.uniform(0.3, 0.8, 3)
        beta = rng.uniform(0, 7, 3)
        col = mod * np.exp(1j * beta)
        row = mod * np.exp(1j * (2 * phis - beta))
        # corner fixed by the secular identity at lam
        corner = lam - np.sum(col * row / (lam - d))
        ah = ArrowheadMatrix(d, col, row, corner)
        certs = normal_eigenvalue_check(ah)
        assert any(c.condition == "iv" for c in certs)
        cert = [c for c in certs if c.condition == "iv"][0]
        assert abs(cert.witness_lambda - lam) < 1e-8

    def test_generic_has_none(self):
        ah = ArrowheadMatrix([0.5, -0.3 + 0.7j], [1.0, 0.5], [0.3j, 0.8], 0.1)
        assert normal_eigenvalue_check(ah) == []


class TestProjectionRecognize:
    def test_diagonal_01(self):
        ah = arrowhead_from_dense(np.diag([1.0, 0.0, 1.0]))
        assert projection_recognize(ah).kind == "Diagonal01"

    def test_rank_structured_block(self):
        t, alpha = 0.25, np.sqrt(3) / 4
        dense = np.zeros((4, 4))
        dense[2, 2] = t
        dense[3, 3] = 1 - t
        dense[2, 3] = dense[3, 2] = alpha
        form = projection_recognize(arrowhead_from_dense(dense))
        assert form.kind == "RankStructured"
        assert form.index == 2
        assert abs(form.t - t) < 1e-12
        assert abs(form.alpha - alpha) < 1e-12

    def test_random_involution_not_arrowhead(self):
        # a Hermitian idempotent without arrow structure never reaches the
        # recognizer: the dense reader rejects it first
        rng = rng_for(8)
        for _ in range(5):
            z = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
            q, _ = np.linalg.qr(z)
            p = q @ q.conj().T
            with pytest.raises(NotArrowheadError):
                arrowhead_from_dense(p)

    def test_not_projection(self):
        ah = arrowhead_from_dense(np.diag([0.5, 0.5, 0.5]))
        assert projection_recognize(ah).kind == "NotProjection"


class TestDichotomy:
    def test_case_a_instance(self):
        ah = ArrowheadMatrix(
            [1j, 1 + 1j], [0.4j, 0.9j], [0.4j, 0.9j], 1 + 0.5j
        )
        cert = dichotomy_check(ah)
        assert cert is not None and cert.case == "a"
        assert abs(cert.theta % np.pi) < 1e-9
        assert abs(cert.h0 - 0) < 1e-9 and abs(cert.h1 - 1) < 1e-9

    def test_essentially_hermitian_rejected(self):
        d = np.array([0.1, 0.5, 0.9])
        b = np.array([0.3, 0.4, 0.5]) * np.exp(1j * np.array([0.1, 1.0, 2.0]))
        ah = ArrowheadMatrix(d, b, np.conj(b), 0.7)
        assert dichotomy_check(ah) is None

    def test_case_b_round_trip(self):
        # build from the coupled projection shape with t = 1/3 and recover it
        t, h0, h1 = 1.0 / 3.0, 0.0, 1.0
        alpha = np.sqrt(t * (1 - t)) * np.exp(1j * 0.6)
        n, i = 4, 1
        p = np.zeros((n, n), dtype=complex)
        p[0, 0], p[2, 2] = 1.0, 0.0
        p[i, i], p[n - 1, n - 1] = t, 1 - t
        p[i, n - 1], p[n - 1, i] = alpha, np.conj(alpha)
        k = np.zeros((n, n), dtype=complex)
        k[np.arange(n), np.arange(n)] = [0.2, -0.4, 0.9, 0.1]
        m = np.array([0.5 * np.exp(0.2j), 0.7 * np.exp(-1.1j), 0.3 * np.exp(2.0j)])
        k[: n - 1, n - 1] = m
        k[n - 1, : n - 1] = np.conj(m)
        a = (h0 * np.eye(n) + (h1 - h0) * p) + 1j * k
        cert = dichotomy_check(arrowhead_from_dense(a))
        assert cert is not None and cert.case == "b"
        assert cert.exceptional_index == i
        assert abs(cert.t - t) < 1e-9
        assert abs(abs(cert.alpha) - abs(alpha)) < 1e-9

    def test_reconstruction_invariant(self):
        for seed in range(5):
            a = generate(FamilySpec("dichotomous-arrowhead-coupled", seed=seed))
            ah = arrowhead_from_dense(a)
            cert = dichotomy_check(ah)
            assert cert is not None
            n = ah.n
            proj = (herm_part_at(a, cert.theta) - cert.h0 * np.eye(n)) / (cert.h1 - cert.h0)
            assert np.linalg.norm(proj @ proj - proj) < 1e-8 * n


class TestIrreducibleDichotomous:
    def test_case_a_irreducible(self):
        for seed in range(5):
            a = generate(FamilySpec("dichotomous-arrowhead-diag", seed=seed))
            ah = arrowhead_from_dense(a)
            cert = dichotomy_check(ah)
            assert cert is not None and cert.case == "a"
            irr, reason = irreducible_dichotomous_check(ah, cert)
            assert irr, reason
            assert commutant_dimension(a) == 1

    def test_aligned_resonance_reducible(self):
        for seed in range(5):
            a = generate(FamilySpec("reducible-aligned", seed=seed))
            ah = arrowhead_from_dense(a)
            cert = dichotomy_check(ah)
            assert cert is not None and cert.case == "b"
            irr, reason = irreducible_dichotomous_check(ah, cert)
            assert not irr
            assert commutant_dimension(a) >= 2

    def test_aligned_reducing_eigenvector_shape(self):
        # the reducing eigenvector pairs the projection's kernel direction
        # with a full secular eigenvector of the skew part
        a = generate(FamilySpec("reducible-aligned", seed=1))
        from numrange_lab.reduction import reducing_eigenvectors

        red = reducing_eigenvectors(a)
        assert red, "expected a reducing eigenvector"

    def test_mixed_case_reducible(self):
        for seed in range(5):
            a = generate(FamilySpec("reducible-mixed", seed=seed))
            ah = arrowhead_from_dense(a)
            cert = dichotomy_check(ah)
            assert cert is not None and cert.case == "b"
            irr, reason = irreducible_dichotomous_check(ah, cert)
            assert not irr
            assert commutant_dimension(a) >= 2

    def test_generic_coupled_irreducible(self):
        for seed in range(5):
            a = generate(FamilySpec("dichotomous-arrowhead-coupled", seed=seed))
            ah = arrowhead_from_dense(a)
            cert = dichotomy_check(ah)
            irr, reason = irreducible_dichotomous_check(ah, cert)
            assert irr, reason
            assert commutant_dimension(a) == 1


class TestGauwuBalanced:
    def test_simple_extremes_give_two(self):
        # three distinct levels: simple max and min, so exactly a pair
        ah = ArrowheadMatrix(
            [0.0 + 0.2j, 1.0 - 0.4j], [0.5j, 0.8j], [0.5j, 0.8j], 0.5 + 0.9j
        )
        res = gauwu_balanced(ah)
        assert res.k == 2
        assert res.certificate["top_indices"] == [1]
        assert res.certificate["bottom_indices"] == [0]

    def test_split_three_one_gives_four(self):
        from numrange_lab.generators import generate_with_info

        a, info = generate_with_info(FamilySpec("k4-split-31", seed=2, knobs={"conjugate": False, "theta": 0.0}))
        res = gauwu_balanced(arrowhead_from_dense(a))
        assert res.k == 4

    def test_matches_search_oracle(self):
        for seed in range(8):
            n = 3 + seed % 4
            ah = balanced_arrowhead(seed, n)
            res = gauwu_balanced(ah)
            orc = max_orthonormal_boundary_set(ah.to_dense())
            assert res.k == orc.k_lower, (seed, n, res.k, orc.k_lower)

    def test_invariances(self):
        ah = balanced_arrowhead(33, 4)
        base = gauwu_balanced(ah).k
        rng = rng_for(34)
        # diagonal unitary similarity preserves the arrow and the value
        phases = np.exp(1j * rng.uniform(0, 7, 4))
        d = np.diag(phases)
        conj = d.conj().T @ ah.to_dense() @ d
        assert gauwu_balanced(arrowhead_from_dense(conj)).k == base
        # permutation of the first n-1 indices
        perm = np.eye(4)[:, [2, 0, 1, 3]]
        permuted = perm.T @ ah.to_dense() @ perm
        assert gauwu_balanced(arrowhead_from_dense(permuted)).k == base
        # scalar rotation
        rotated = np.exp(1j * 0.77) * ah.to_dense()
        assert gauwu_balanced(arrowhead_from_dense(rotated)).k == base

    def test_unbalanced_rejected(self):
        a = generate(FamilySpec("pure-almost-normal", seed=0))
        with pytest.raises(NotApplicableError):
            gauwu_balanced(arrowhead_from_dense(a))


class TestGauwuZeroPairs:
    def _with_zero_pair(self, seed, z0):
        ah = balanced_arrowhead(seed, 3)
        diag = np.concatenate([[z0], ah.diag])
        col = np.concatenate([[0.0], ah.col])
        row = np.concatenate([[0.0], ah.row])
        return ArrowheadMatrix(diag, col, row, ah.corner)

    def test_no_zero_pairs_delegates(self):
        ah = balanced_arrowhead(40, 4)
        assert gauwu_with_zero_pairs(ah).k == gauwu_balanced(ah).k

    def test_interior_scalar_contributes_zero(self):
        ah = balanced_arrowhead(41, 3)
        center = np.mean(np.concatenate([ah.diag, [ah.corner]]))
        big = self._with_zero_pair(41, center)
        res = gauwu_with_zero_pairs(big)
        orc = max_orthonormal_boundary_set(big.to_dense())
        assert res.k == orc.k_lower

    def test_exterior_scalar_certified_against_oracle(self):
        ah = balanced_arrowhead(42, 3)
        far = np.max(np.abs(np.concatenate([ah.diag, [ah.corner]]))) * 3.0
        big = self._with_zero_pair(42, far + 0j)
        res = gauwu_with_zero_pairs(big)
        orc = max_orthonormal_boundary_set(big.to_dense())
        assert res.k == orc.k_lower
        assert 0 in res.certificate["scalars_on_boundary"]


class TestGauwuUnbalanced:
    def test_pure_almost_normal(self):
        for seed in range(4):
            a = generate(FamilySpec("pure-almost-normal", seed=seed))
            res = gauwu_unbalanced_two(arrowhead_from_dense(a))
            assert res.k == 2
            assert res.certificate["direction"] == "column"

    def test_strictness_violation_rejected(self):
        # balanced pair on a hull index breaks the hypothesis
        ah = balanced_arrowhead(50, 4)
        with pytest.raises(NotApplicableError):
            gauwu_unbalanced_two(ah)

    def test_oracle_agrees(self):
        for seed in range(4):
            a = generate(FamilySpec("unbalanced-arrowhead", seed=seed))
            res = gauwu_unbalanced_two(arrowhead_from_dense(a))
            orc = max_orthonormal_boundary_set(a)
            assert res.k == 2 == orc.k_lower

    def test_row_dominant_direction(self):
        a = generate(FamilySpec("unbalanced-arrowhead", seed=3, knobs={"direction": "row"}))
        res = gauwu_unbalanced_two(arrowhead_from_dense(a))
        assert res.k == 2
        assert res.certificate["direction"] == "row"
