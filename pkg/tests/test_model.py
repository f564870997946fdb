import numpy as np
import pytest

from conftest import demo_truncation, random_partition, random_ssc_system
from lipstab.errors import ValidationError
from lipstab.model import (
    BlockPartition,
    LinearSystem,
    Perturbation,
    characteristic_generators,
    perturbed_system,
    residual_inverse_distance,
    validate,
)


def two_row_system():
    return LinearSystem(2, (("t1", [1.0, 0.0], 0.0), ("t2", [-1.0, 0.0], 0.0)))


class TestValidate:
    def test_well_formed_accepted(self):
        system = two_row_system()
        part = BlockPartition((("b1", ("t1",)), ("b2", ("t2",))))
        assert validate(system, part).accepted

    def test_partition_missing_label_rejected(self):
        system = two_row_system()
        part = BlockPartition((("b1", ("t1",)),))
        report = validate(system, part)
        assert not report.accepted
        assert any("does not cover" in issue for issue in report.issues)

    def test_row_length_mismatch_rejected(self):
        system = LinearSystem(2, (("t1", [1.0, 0.0, 3.0], 0.0),))
        report = validate(system)
        assert not report.accepted

    def test_duplicate_labels_rejected(self):
        system = LinearSystem(1, (("t", [1.0], 0.0), ("t", [2.0], 0.0)))
        assert any("duplicate" in i for i in validate(system).issues)

    def test_overlapping_blocks_rejected(self):
        system = two_row_system()
        part = BlockPartition((("b1", ("t1", "t2")), ("b2", ("t2",))))
        assert any("more than one block" in i for i in validate(system, part).issues)

    def test_zero_rows_permitted(self):
        system = LinearSystem(2, (("z", [0.0, 0.0], 1.0),))
        assert validate(system).accepted

    def test_raise_if_rejected(self):
        system = two_row_system()
        part = BlockPartition((("b1", ("t1",)),))
        with pytest.raises(ValidationError):
            validate(system, part).raise_if_rejected()


class TestResidualInverseDistance:
    def test_halfspace_violated(self):
        system = LinearSystem(2, (("t", [1.0, 0.0], 1.0),))
        part = BlockPartition.maximum(system.labels)
        d = residual_inverse_distance(system, part, Perturbation((0.0,)), [2.0, 0.0])
        assert d == pytest.approx(1.0)

    def test_halfspace_feasible_clips(self):
        system = LinearSystem(2, (("t", [1.0, 0.0], 1.0),))
        part = BlockPartition.maximum(system.labels)
        d = residual_inverse_distance(system, part, Perturbation((0.0,)), [0.0, 0.0])
        assert d == 0.0

    def test_two_rows_one_block(self):
        # hand enumeration: residuals 0.3 and -0.3, block sup 0.3
        system = two_row_system()
        part = BlockPartition.minimum(system.labels)
        d = residual_inverse_distance(system, part, Perturbation((0.0,)), [0.3, 0.0])
        assert d == pytest.approx(0.3)

    def test_nonnegative_and_zero_iff_feasible(self, rng):
        for _ in range(40):
            system, xhat = random_ssc_system(rng, n=3, m=8)
            part = random_partition(rng, system.labels, 3)
            p = Perturbation(tuple(rng.normal(size=3) * 0.2))
            x = xhat + rng.normal(size=3)
            d = residual_inverse_distance(system, part, p, x)
            assert d >= 0.0
            feasible = perturbed_system(system, part, p).is_feasible(x)
            assert (d <= 1e-12) == feasible

    def test_one_lipschitz_in_p(self, rng):
        system, xhat = random_ssc_system(rng, n=3, m=10)
        part = random_partition(rng, system.labels, 4)
        for _ in range(60):
            p = rng.normal(size=4)
            q = rng.normal(size=4)
            x = xhat + rng.normal(size=3)
            dp = residual_inverse_distance(system, part, Perturbation(tuple(p)), x)
            dq = residual_inverse_distance(system, part, Perturbation(tuple(q)), x)
            assert abs(dp - dq) <= np.abs(p - q).max() + 1e-12


class TestCharacteristicGenerators:
    def test_single_shift(self):
        system = LinearSystem(2, (("t", [1.0, 2.0], 3.0),))
        part = BlockPartition.maximum(system.labels)
        gens = characteristic_generators(system, part, Perturbation((0.5,)))
        assert np.allclose(gens.coefficients, [[1.0, 2.0]])
        assert np.allclose(gens.offsets, [3.5])

    def test_zero_perturbation_partition_independent(self, rng):
        system, _ = random_ssc_system(rng, n=3, m=12)
        parts = [
            BlockPartition.minimum(system.labels),
            BlockPartition.maximum(system.labels),
            random_partition(rng, system.labels, 4),
        ]
        references = None
        for part in parts:
            gens = characteristic_generators(
                system, part, Perturbation.zero(part))
            if references is None:
                references = gens
            else:
                assert np.array_equal(gens.coefficients, references.coefficients)
                assert np.array_equal(gens.offsets, references.offsets)

    def test_per_block_not_per_row_shift(self):
        system = LinearSystem(1, (("a", [1.0], 0.0), ("b", [2.0], 0.0),
                                  ("c", [3.0], 0.0)))
        part = BlockPartition((("b1", ("a", "b")), ("b2", ("c",))))
        gens = characteristic_generators(system, part, Perturbation((1.0, -1.0)))
        assert np.allclose(gens.offsets, [1.0, 1.0, -1.0])

    def test_generator_count_matches_rows(self):
        system = demo_truncation(5)
        part = BlockPartition.maximum(system.labels)
        gens = characteristic_generators(system, part, Perturbation.zero(part))
        assert len(gens) == len(system.rows)

    def test_refinement_changes_arity_only(self, rng):
        system, _ = random_ssc_system(rng, n=2, m=6)
        fine = BlockPartition.maximum(system.labels)
        coarse = BlockPartition.minimum(system.labels)
        g_fine = characteristic_generators(system, fine, Perturbation.zero(fine))
        g_coarse = characteristic_generators(system, coarse, Perturbation.zero(coarse))
        assert np.array_equal(g_fine.offsets, g_coarse.offsets)
        assert len(Perturbation.zero(fine).values) == 6
        assert len(Perturbation.zero(coarse).values) == 1


def test_perturbation_sup_norm():
    assert Perturbation((0.5, -2.0, 1.0)).sup_norm == 2.0
    part = BlockPartition((("j", ("t",)),))
    assert Perturbation.zero(part).sup_norm == 0.0
