import numpy as np
import pytest

from harmonic_certify import (DilatedLocalizer, ExponentialSum,
                              MatchPartition, ModelViolation,
                              PreconditionViolated, SampleGrid,
                              SeparationViolated, ThresholdMismatch,
                              UnmatchedFrequencies, Variant, Verdict,
                              check_main_bound, check_wellsep, energy,
                              main_bound_rhs, pair_weights, signed_wrap,
                              symmetric_energy, symmetric_offsets,
                              vandermonde_bound_pairs,
                              vandermonde_bound_separated,
                              weighted_frequency_error,
                              wellposedness_certificate, wellsep_constants,
                              wrap_frequency)
from harmonic_certify.experiments import (critical_dft_sum,
                                          random_main_scenario,
                                          random_wellsep_scenario,
                                          two_term_difference)
from harmonic_certify.noise import noise_stream

REFERENCE = ExponentialSum((0.1, 0.3, 0.6, 0.9), (1.1, -1.1, 2.0, 2.0))


# --------------------------------------------------------- two-sided bound

def test_wellsep_constants_examples():
    assert wellsep_constants(SampleGrid(0, 20), 0.2) == pytest.approx((17.0, 25.0))
    lo, up = wellsep_constants(SampleGrid(0, 20), 1 / 22)
    assert lo == pytest.approx(0.0, abs=1e-12)
    assert up == pytest.approx(42.0, rel=1e-14)
    assert wellsep_constants(SampleGrid(0, 1), 0.5) == pytest.approx((1.0, 3.0))


def test_check_wellsep_single_exponential():
    f = ExponentialSum([0.42], [1.0])
    report = check_wellsep(f, SampleGrid(0, 20), 0.5)
    assert report.lhs == pytest.approx(21.0, rel=1e-13)
    assert report.constants["lower"] == pytest.approx(20.0)
    assert report.constants["upper"] == pytest.approx(22.0)
    assert report.holds


def test_check_wellsep_reference_sum():
    report = check_wellsep(REFERENCE, SampleGrid(-20, 20), 0.2)
    assert report.lhs == pytest.approx(energy(REFERENCE, SampleGrid(-20, 20)))
    norm_sq = REFERENCE.coefficient_norm_sq
    assert report.rhs == pytest.approx((40 + 2 - 5) * norm_sq, rel=1e-12)
    assert report.constants["upper_rhs"] == pytest.approx((40 + 5) * norm_sq, rel=1e-12)
    assert report.holds


def test_check_wellsep_randomized():
    rng = noise_stream(7, key=(1,))
    for _ in range(300):
        f, grid, q = random_wellsep_scenario(rng)
        assert check_wellsep(f, grid, q).holds


def test_check_wellsep_separation_precondition():
    f = ExponentialSum([0.1, 0.15], [1.0, 1.0])
    with pytest.raises(SeparationViolated):
        check_wellsep(f, SampleGrid(0, 10), 0.2)


def test_wellsep_constants_rejects_bad_q():
    with pytest.raises(ValueError):
        wellsep_constants(SampleGrid(0, 5), 0.0)


def test_critical_separation_vanishing_sum():
    grid = SampleGrid(3, 24)
    f, q = critical_dft_sum(grid)
    assert q == pytest.approx(1.0 / (grid.size + 1))
    lower, _ = wellsep_constants(grid, q)
    assert lower == pytest.approx(0.0, abs=1e-10)
    assert energy(f, grid) < 1e-18 * f.coefficient_norm_sq
    report = check_wellsep(f, grid, q)
    assert report.holds
    assert report.constants["vacuous"] in (0.0, 1.0)


# ------------------------------------------------------ decomposition rhs

def test_single_frequency_rhs_all_variants():
    part = MatchPartition((), ((0.37, "first"),), 3 / 21)
    coeffs = {0.37: 1.0}
    for variant in Variant:
        assert main_bound_rhs(part, coeffs, {}, 20, variant) == pytest.approx(14.0)
    f = ExponentialSum([0.37], [1.0])
    lhs = energy(f, SampleGrid(1, 20))
    assert lhs == pytest.approx(20.0, rel=1e-13)
    assert lhs >= 14.0


def test_pair_weakened_rhs_matches_formula():
    tau = 1e-3
    part = MatchPartition(((0.0, tau),), (), 3 / 21)
    rhs = main_bound_rhs(part, {0.0: 1.0}, {tau: -1.0}, 20, Variant.WEAKENED)
    assert rhs == pytest.approx(np.pi**2 * 9261 / 486 * 1e-6 * 2, rel=1e-12)
    assert rhs == pytest.approx(3.7617e-4, rel=1e-4)
    lhs = energy(two_term_difference(tau), SampleGrid(1, 20))
    assert lhs == pytest.approx(0.11320923652701531, rel=1e-12)


def test_pair_symmetric_rhs_sum_branch():
    # aligned coefficients at tiny offset: the sum term dominates
    tau = 1e-3
    part = MatchPartition(((0.0, tau),), (), 3 / 21)
    f = ExponentialSum([0.0, tau], [1.0, 1.0])
    rhs = main_bound_rhs(part, {0.0: 1.0}, {tau: 1.0}, 20, Variant.SYMMETRIC)
    assert rhs == pytest.approx(28.0, rel=1e-6)
    lhs = symmetric_energy(f, 20)
    assert lhs == pytest.approx(80.0, rel=1e-2)
    assert lhs >= rhs


def test_threshold_mismatch():
    part = MatchPartition(((0.0, 0.001),), (), 3 / 21)
    with pytest.raises(ThresholdMismatch):
        main_bound_rhs(part, {0.0: 1.0}, {0.001: 1.0}, 30, Variant.WEAKENED)


def test_admissibility_rejections():
    t = 3 / 21
    # two unmatched frequencies closer than the threshold
    part = MatchPartition((), ((0.1, "first"), (0.15, "first")), t)
    with pytest.raises(PreconditionViolated):
        main_bound_rhs(part, {0.1: 1.0, 0.15: 1.0}, {}, 20, Variant.WEAKENED)
    # two matched frequencies of the first set closer than the threshold
    part = MatchPartition(((0.10, 0.08), (0.13, 0.155)), (), 0.04)
    with pytest.raises(PreconditionViolated):
        main_bound_rhs(part, {0.10: 1.0, 0.13: 1.0}, {0.08: 1.0, 0.155: 1.0},
                       74, Variant.WEAKENED)


def test_pair_kernel_identity():
    """The eigen-expansion used by the modulated right side is exact.

    Independent oracle: the localized quadratic form of a pair evaluated
    from the kernel entries directly.
    """
    rng = np.random.default_rng(5)
    for _ in range(500):
        n = int(rng.integers(6, 80))
        loc = DilatedLocalizer(n)
        u = float(rng.uniform(-1, 1)) * 2.9 / (n + 1)
        if abs(u) < 1e-9:
            continue
        ca = complex(rng.normal(), rng.normal())
        cb = complex(rng.normal(), rng.normal())
        k0 = loc.phi_hat(0.0).real
        z = loc.phi_hat(u)
        quadratic = (k0 * (abs(ca) ** 2 + abs(cb) ** 2)
                     + 2 * np.real(ca * np.conj(cb) * z))
        theta = loc.phase(u)
        rho = abs(z)
        expansion = 0.5 * ((k0 + rho) * abs(ca + np.exp(-1j * theta) * cb) ** 2
                           + (k0 - rho) * abs(ca - np.exp(-1j * theta) * cb) ** 2)
        assert expansion == pytest.approx(quadratic, rel=1e-11, abs=1e-11)


def test_localized_form_lower_bounds_energy():
    """Poisson route oracle: sum_k phi_N(k) |f(k)|^2 equals the kernel form
    and lower-bounds the windowed energy."""
    rng = np.random.default_rng(6)
    n = 20
    loc = DilatedLocalizer(n)
    f, partition = random_main_scenario(rng, n)
    ks = np.arange(-4000, 4000 + n)
    localized = float(np.sum(loc.phi(ks) * np.abs(f.evaluate(ks)) ** 2))
    freqs = f.frequencies
    coefs = f.coefficients
    kernel = 0.0
    for i in range(len(freqs)):
        for j in range(len(freqs)):
            u = signed_wrap(freqs[j] - freqs[i])
            kernel += float(np.real(coefs[i] * np.conj(coefs[j]) * loc.phi_hat(u)))
    assert localized == pytest.approx(kernel, rel=1e-5, abs=1e-5)
    assert energy(f, SampleGrid(1, n)) >= localized - 1e-6


def test_check_main_bound_randomized_all_variants():
    rng = noise_stream(11, key=(2,))
    for n in (10, 20, 50):
        for _ in range(150):
            for variant in Variant:
                grid = SampleGrid(-n, n) if variant is Variant.SYMMETRIC \
                    else SampleGrid(1, n)
                f, partition = random_main_scenario(rng, grid.size)
                report = check_main_bound(f, partition, grid, variant)
                assert report.holds, (n, variant, f)


def test_weakened_below_modulated():
    rng = noise_stream(12, key=(3,))
    for _ in range(400):
        n = int(rng.integers(6, 60))
        f, partition = random_main_scenario(rng, n)
        grid = SampleGrid(1, n)
        weak = check_main_bound(f, partition, grid, Variant.WEAKENED).rhs
        mod = check_main_bound(f, partition, grid, Variant.MODULATED).rhs
        assert weak <= mod + 1e-12 * max(1.0, mod)


def test_degenerate_pair_slack_ratio_bounded():
    n = 20
    t = 3 / (n + 1)
    for gap in (1e-3, 1e-4, 1e-5, 1e-6):
        f = ExponentialSum([0.0, gap], [1.0, -1.0])
        part = MatchPartition(((0.0, gap),), (), t)
        report = check_main_bound(f, part, SampleGrid(1, n), Variant.MODULATED)
        assert report.holds
        assert report.lhs < 4e5 * gap**2  # both sides vanish with the gap
        assert report.rhs > 0
        assert report.lhs / report.rhs < 350


def test_unmatched_only_reduces_to_constant():
    n = 20
    t = 3 / (n + 1)
    freqs = (0.05, 0.35, 0.75)
    coefs = (1.0 + 1j, -2.0, 0.5j)
    f = ExponentialSum(freqs, coefs)
    part = MatchPartition((), tuple((y, "first") for y in freqs), t)
    report = check_main_bound(f, part, SampleGrid(1, n), Variant.MODULATED)
    assert report.rhs == pytest.approx(14.0 * sum(abs(c) ** 2 for c in coefs), rel=1e-13)


def test_check_main_bound_shifted_grid():
    rng = noise_stream(13, key=(4,))
    n = 20
    for _ in range(50):
        f, partition = random_main_scenario(rng, n)
        for variant in (Variant.MODULATED, Variant.WEAKENED):
            report = check_main_bound(f, partition, SampleGrid(7, 7 + n - 1), variant)
            assert report.holds


def test_symmetric_variant_requires_symmetric_grid():
    f = ExponentialSum([0.2, 0.7], [1.0, 1.0])
    part = MatchPartition((), ((0.2, "first"), (0.7, "first")), 3 / 22)
    with pytest.raises(PreconditionViolated):
        check_main_bound(f, part, SampleGrid(0, 20), Variant.SYMMETRIC)


def test_symmetric_offsets_match_integer_grid_when_odd():
    f = ExponentialSum([0.12, 0.62], [1.0, -2.0])
    n = 21
    offsets = symmetric_offsets(n)
    assert np.array_equal(offsets, np.arange(-10, 11))
    assert symmetric_energy(f, n) == pytest.approx(energy(f, SampleGrid(-10, 10)))


def test_check_main_bound_partition_must_cover_support():
    f = ExponentialSum([0.1, 0.5], [1.0, 1.0])
    part = MatchPartition((), ((0.1, "first"),), 3 / 21)
    with pytest.raises(PreconditionViolated):
        check_main_bound(f, part, SampleGrid(1, 20), Variant.WEAKENED)


# ------------------------------------------------------- weighted error

def test_weighted_error_identity():
    matching = MatchPartition(((0.1, 0.1), (0.4, 0.4)), (), 0.05)
    coeffs = {0.1: 1.0 + 1j, 0.4: -2.0}
    assert weighted_frequency_error(matching, coeffs, coeffs, 20) == 0.0


def test_weighted_error_frequency_only_perturbation():
    n, tau = 20, 1e-3
    matching = MatchPartition(((0.3, 0.3 + tau),), (), 0.05)
    value = weighted_frequency_error(matching, {0.3: 1.0}, {0.3 + tau: 1.0}, n)
    expected = 2 * np.pi**2 * (n + 1) ** 3 / 3**5 * tau**2 * 4
    assert value == pytest.approx(expected, rel=1e-12)


def test_weighted_error_coefficient_only_perturbation():
    n, eps = 20, 1e-2
    matching = MatchPartition(((0.3, 0.3),), (), 0.05)
    value = weighted_frequency_error(matching, {0.3: 1.0}, {0.3: 1.0 + eps}, n)
    assert value == pytest.approx((n + 1) / 3 * eps**2, rel=1e-12)


def test_weighted_error_requires_total_matching():
    matching = MatchPartition((), ((0.3, "first"),), 0.05)
    with pytest.raises(UnmatchedFrequencies):
        weighted_frequency_error(matching, {0.3: 1.0}, {}, 20)


def test_weighted_error_invariances():
    rng = np.random.default_rng(9)
    pairs = ((0.1, 0.102), (0.5, 0.499), (0.8, 0.8))
    cf = {a: complex(rng.normal(), rng.normal()) for a, _ in pairs}
    cg = {b: complex(rng.normal(), rng.normal()) for _, b in pairs}
    base = weighted_frequency_error(MatchPartition(pairs, (), 0.05), cf, cg, 20)
    # relabeling the pairs
    shuffled = MatchPartition((pairs[2], pairs[0], pairs[1]), (), 0.05)
    assert weighted_frequency_error(shuffled, cf, cg, 20) == pytest.approx(base, rel=1e-14)
    # simultaneous global phase on both coefficient maps
    for alpha in rng.uniform(0, 2 * np.pi, 5):
        rot = np.exp(1j * alpha)
        rotated = weighted_frequency_error(
            MatchPartition(pairs, (), 0.05),
            {k: rot * v for k, v in cf.items()},
            {k: rot * v for k, v in cg.items()}, 20)
        assert rotated == pytest.approx(base, rel=1e-12)


# --------------------------------------------------------- well-posedness

def test_wellposedness_identity():
    cert = wellposedness_certificate(REFERENCE, REFERENCE, 20, 0.0999)
    assert cert.verdict is Verdict.CERTIFIED
    assert cert.premise_value == pytest.approx(0.0, abs=1e-24)
    assert cert.weighted_error == pytest.approx(0.0, abs=1e-24)
    assert cert.matching.is_total


def test_wellposedness_small_shift_certified():
    g = ExponentialSum((0.1 + 1e-4, 0.3, 0.6, 0.9), (1.1, -1.1, 2.0, 2.0))
    cert = wellposedness_certificate(REFERENCE, g, 20, 0.0999)
    assert cert.verdict is Verdict.CERTIFIED
    assert cert.premise_value < cert.premise_threshold
    assert cert.weighted_error <= cert.premise_value


def test_wellposedness_far_apart_premise_fails():
    f = ExponentialSum((0.0, 0.4), (3.0, 3.0))
    g = ExponentialSum((0.2, 0.6), (3.0, 3.0))
    cert = wellposedness_certificate(f, g, 20, 0.0999)
    assert cert.verdict is Verdict.PREMISE_FAILED
    assert cert.premise_value >= cert.premise_threshold
    assert cert.matching is None and cert.weighted_error is None


def test_wellposedness_model_violations():
    crowded = ExponentialSum((0.1, 0.15), (1.0, 1.0))
    with pytest.raises(ModelViolation):
        wellposedness_certificate(crowded, crowded, 20, 0.1)
    with pytest.raises(ModelViolation):
        wellposedness_certificate(REFERENCE, REFERENCE, 20, 0.01)  # q < 3/(2n+2)


def test_wellposedness_randomized_estimate_dominated():
    rng = np.random.default_rng(17)
    n = 20
    for _ in range(100):
        base = np.sort(rng.uniform(0, 1, 3))
        if min(np.diff(np.concatenate([base, [base[0] + 1]]))) < 0.25:
            continue
        coefs = rng.normal(size=3) + 1j * rng.normal(size=3)
        coefs += np.exp(1j * np.angle(coefs))  # keep moduli >= ~1
        f = ExponentialSum(base, coefs)
        g = ExponentialSum(base + rng.normal(scale=2e-4, size=3),
                           coefs * (1 + rng.normal(scale=1e-3, size=3)))
        cert = wellposedness_certificate(f, g, n, 0.1)
        if cert.verdict is Verdict.CERTIFIED:
            assert cert.weighted_error <= cert.premise_value * (1 + 1e-10)


# ------------------------------------------------- singular value bounds

def test_vandermonde_bound_separated_examples():
    assert vandermonde_bound_separated(21, 0.2) == pytest.approx(17.0)
    assert vandermonde_bound_separated(21, 1 / 22) == pytest.approx(0.0, abs=1e-12)
    assert vandermonde_bound_separated(64, 0.1) == pytest.approx(55.0)
    assert vandermonde_bound_separated(5, 0.01) == 0.0  # clamped


def test_vandermonde_bound_pairs_examples():
    assert vandermonde_bound_pairs(20, 0.2, 1e-3) == pytest.approx(
        np.pi**2 / 486 * 9261 * 1e-6, rel=1e-12)
    assert vandermonde_bound_pairs(20, 0.2, 1e-3) == pytest.approx(1.8807e-4, rel=1e-4)
    assert vandermonde_bound_pairs(20, 0.2, 0.2) == pytest.approx(14.0)
    assert vandermonde_bound_pairs(20, 0.2, 0.0) == 0.0
    with pytest.raises(PreconditionViolated):
        vandermonde_bound_pairs(20, 0.1, 1e-3)  # q below 3/(N+1)


def test_vandermonde_bound_pairs_monotone_in_tau():
    taus = np.linspace(0, 3 / 21 - 1e-9, 200)
    values = [vandermonde_bound_pairs(20, 0.2, t) for t in taus]
    assert all(b >= a for a, b in zip(values, values[1:]))
