import math

import numpy as np
import pytest
from scipy.special import logsumexp

from periodex.core.partitions import (
    PartitionSet,
    PartitionStyle,
    canonicalize,
    make_partition_set,
    make_period_list_set,
    make_period_range_set,
)
from periodex.core.policies import (
    ArmDistribution,
    Exp3,
    GammaSchedule,
    NumericMode,
    OptimalRandom,
    PeriodicExp4,
    PolicyConfig,
    SlotContext,
    UniformRandom,
    Variant,
    make_policy,
    optimal_random_distribution,
    restrict_to_available,
    sample_arm,
)
from periodex.exceptions import MissingDistributionError, PolicyError, RewardRangeError

UNIT_GAMMA = GammaSchedule(kind="fixed", value=1.0)


class _FixedDraw:
    def __init__(self, u: float) -> None:
        self.u = u

    def random(self) -> float:
        return self.u


def _config(K: int, **kwargs: object) -> PolicyConfig:
    return PolicyConfig(num_arms=K, **kwargs)


def _recomputed_aggregates(policy: PeriodicExp4) -> tuple[np.ndarray, np.ndarray]:
    log_s = np.full(policy.logS.shape, np.nan)
    log_b = np.zeros(len(policy.partitions))
    for index, f in enumerate(policy.partitions):
        for label in range(f.num_labels):
            log_s[index, label] = logsumexp(policy.logb[index, label])
            log_b[index] += log_s[index, label]
    return log_s, log_b


def _drive(policy: PeriodicExp4, steps: int, rng: np.random.Generator) -> None:
    for _ in range(steps):
        dist = policy.distribution()
        arm = sample_arm(dist, rng)
        policy.update(arm, float(rng.random()))


def test_init_state() -> None:
    F = make_partition_set([canonicalize([1, 1, 1, 1])])
    policy = PeriodicExp4(F, _config(2))
    assert np.all(policy.logb == 0.0)
    assert policy.logS[0, 0] == pytest.approx(math.log(2))
    assert policy.logB.tolist() == pytest.approx([math.log(2)])

    G = make_period_list_set([1, 2], 2, 4, PartitionStyle.MODULAR)
    policy = PeriodicExp4(G, _config(3))
    assert policy.logB.tolist() == pytest.approx([math.log(3), 2 * math.log(3)])


def test_empty_partition_set_is_rejected() -> None:
    with pytest.raises(PolicyError):
        PeriodicExp4(PartitionSet(functions=()), _config(2))


def test_config_validation() -> None:
    with pytest.raises(ValueError):
        PolicyConfig(num_arms=1)
    with pytest.raises(ValueError):
        PolicyConfig(num_arms=2, mixing=1.0)
    with pytest.raises(ValueError):
        GammaSchedule(kind="fixed")
    schedule = GammaSchedule()
    assert schedule.at(1) == 1.0
    assert schedule.at(1024) == pytest.approx(1024 ** (-0.1))


def test_first_step_is_uniform() -> None:
    F = make_period_range_set(3, 3, 9, PartitionStyle.MODULAR)
    for variant in Variant:
        dist = PeriodicExp4(F, _config(3, variant=variant)).distribution()
        assert dist.probs.tolist() == pytest.approx([1 / 3] * 3)


def test_untrained_label_stays_uniform() -> None:
    F = make_partition_set([canonicalize([1, 2])])
    policy = PeriodicExp4(F, _config(2, gamma=UNIT_GAMMA))
    policy.distribution()
    policy.update(0, 1.0)
    assert policy.logb[0, 0, 0] == pytest.approx(1.0)
    assert policy.distribution().probs.tolist() == pytest.approx([0.5, 0.5])


def test_unseen_label_factor_per_variant() -> None:
    F = make_partition_set([canonicalize([1, 1]), canonicalize([1, 2])])
    as_written = PeriodicExp4(F, _config(2, variant=Variant.AS_WRITTEN)).distribution()
    corrected = PeriodicExp4(F, _config(2, variant=Variant.CORRECTED)).distribution()
    assert as_written.scores is not None and corrected.scores is not None
    assert np.exp(as_written.scores).tolist() == pytest.approx([2.0, 2.0])
    assert np.exp(corrected.scores).tolist() == pytest.approx([3.0, 3.0])


def test_update_increment_and_zero_reward() -> None:
    F = make_partition_set([canonicalize([1, 1, 1])])
    policy = PeriodicExp4(F, _config(2, gamma=UNIT_GAMMA))
    policy.distribution()
    policy.update(1, 1.0)
    assert policy.logb[0, 0].tolist() == pytest.approx([0.0, 1.0])

    before = policy.logb.copy()
    policy.distribution()
    policy.update(0, 0.0)
    assert np.array_equal(policy.logb, before)
    assert policy.t == 3


def test_update_errors() -> None:
    F = make_partition_set([canonicalize([1, 2, 1])])
    policy = PeriodicExp4(F, _config(2))
    with pytest.raises(MissingDistributionError):
        policy.update(0, 0.5)
    policy.distribution()
    with pytest.raises(RewardRangeError):
        policy.update(0, 1.5)
    with pytest.raises(PolicyError):
        policy.update(2, 0.5)
    policy.update(0, 0.5)
    with pytest.raises(MissingDistributionError):
        policy.update(0, 0.5)


def test_beyond_horizon_is_rejected() -> None:
    F = make_partition_set([canonicalize([1, 2])])
    policy = PeriodicExp4(F, _config(2))
    _drive(policy, 2, np.random.default_rng(0))
    with pytest.raises(PolicyError):
        policy.distribution()


def test_aggregates_stay_consistent_after_many_updates() -> None:
    T = 10_000
    F = make_period_list_set([1, 2, 3, 5], T, T, PartitionStyle.MODULAR)
    policy = PeriodicExp4(F, _config(3))
    _drive(policy, T, np.random.default_rng(3))
    log_s, log_b = _recomputed_aggregates(policy)
    for index, f in enumerate(F):
        np.testing.assert_allclose(
            policy.logS[index, : f.num_labels], log_s[index, : f.num_labels], rtol=1e-9
        )
    np.testing.assert_allclose(policy.logB, log_b, rtol=1e-9)


def test_naive_and_aggregate_scores_agree() -> None:
    rng = np.random.default_rng(11)
    for trace in range(20):
        variant = Variant.CORRECTED if trace % 2 else Variant.AS_WRITTEN
        F = make_period_range_set(3, 60, 60, PartitionStyle.MODULAR)
        policy = PeriodicExp4(F, _config(3, variant=variant))
        for _ in range(60):
            np.testing.assert_allclose(
                policy.naive_log_scores(), policy.log_scores(), rtol=1e-9, atol=1e-9
            )
            dist = policy.distribution()
            policy.update(sample_arm(dist, rng), float(rng.random()))


def test_variants_agree_for_periods_one_and_two() -> None:
    F = make_period_range_set(2, 40, 40, PartitionStyle.MODULAR)
    a = PeriodicExp4(F, _config(2, variant=Variant.AS_WRITTEN))
    b = PeriodicExp4(F, _config(2, variant=Variant.CORRECTED))
    rng = np.random.default_rng(5)
    for _ in range(40):
        pa, pb = a.distribution().probs, b.distribution().probs
        np.testing.assert_allclose(pa, pb, atol=1e-12)
        arm, reward = sample_arm(ArmDistribution(probs=pa), rng), float(rng.random())
        a.update(arm, reward)
        b.update(arm, reward)


def test_max_approx_brackets_exact_scores() -> None:
    F = make_period_range_set(4, 200, 200, PartitionStyle.MODULAR)
    policy = PeriodicExp4(F, _config(3))
    rng = np.random.default_rng(2)
    for _ in range(200):
        exact = policy.log_scores(NumericMode.EXACT)
        approx = policy.log_scores(NumericMode.MAX_APPROX)
        assert np.all(approx <= exact + 1e-12)
        assert np.all(exact <= approx + math.log(len(F)) + 1e-12)
        dist = policy.distribution()
        policy.update(sample_arm(dist, rng), float(rng.random()))


def test_max_approx_mode_emits_a_distribution() -> None:
    F = make_period_range_set(3, 30, 30, PartitionStyle.MODULAR)
    policy = PeriodicExp4(F, _config(3, numeric_mode=NumericMode.MAX_APPROX))
    rng = np.random.default_rng(4)
    for _ in range(30):
        dist = policy.distribution()
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
        policy.update(sample_arm(dist, rng), float(rng.random()))


def test_permuting_arms_permutes_distributions() -> None:
    perm = np.array([2, 0, 1])
    F = make_period_range_set(3, 50, 50, PartitionStyle.MODULAR)
    a = PeriodicExp4(F, _config(3))
    b = PeriodicExp4(F, _config(3))
    rng = np.random.default_rng(9)
    for _ in range(50):
        pa, pb = a.distribution().probs, b.distribution().probs
        np.testing.assert_allclose(pb[perm], pa, atol=1e-12)
        arm, reward = sample_arm(ArmDistribution(probs=pa), rng), float(rng.random())
        a.update(arm, reward)
        b.update(int(perm[arm]), reward)


def test_mixing_and_simplex() -> None:
    F = make_period_range_set(2, 300, 300, PartitionStyle.MODULAR)
    policy = PeriodicExp4(F, _config(3, mixing=0.3))
    rng = np.random.default_rng(1)
    for _ in range(300):
        dist = policy.distribution()
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(dist.probs >= 0.1 - 1e-12)
        arm = sample_arm(dist, rng)
        policy.update(arm, 1.0 if arm == 0 else 0.0)


def test_exp3_matches_period_set_of_one() -> None:
    T = 200
    rng = np.random.default_rng(21)
    for _ in range(20):
        exp3 = Exp3(_config(3), horizon=T)
        periodic = PeriodicExp4(make_period_range_set(1, T, T), _config(3))
        for _ in range(T):
            p_exp3 = exp3.distribution().probs
            p_periodic = periodic.distribution().probs
            assert np.max(np.abs(p_exp3 - p_periodic)) <= 1e-12
            arm, reward = sample_arm(ArmDistribution(probs=p_exp3), rng), float(rng.random())
            exp3.update(arm, reward)
            periodic.update(arm, reward)


def test_dump_state_rows() -> None:
    F = make_partition_set([canonicalize([1, 1])])
    policy = PeriodicExp4(F, _config(2))
    assert policy.dump_state().splitlines() == [
        "# periodic_exp4 t=1 K=2 |F|=1",
        "b 1 1 1 0",
        "b 1 1 2 0",
        "S 1 1 0.69314718055994529",
        "B 1 0.69314718055994529",
    ]


def test_optimal_random_distribution() -> None:
    assert optimal_random_distribution(np.array([4.0, 10.0, 6.0])).probs.tolist() == [
        0.2,
        0.5,
        0.3,
    ]
    assert optimal_random_distribution(np.array([7.0])).probs.tolist() == [1.0]
    masked = optimal_random_distribution(
        np.array([4.0, 10.0, 6.0]), np.array([True, False, True])
    )
    assert masked.probs.tolist() == [0.4, 0.0, 0.6]
    with pytest.raises(PolicyError):
        optimal_random_distribution(np.array([0.0, 0.0]))
    with pytest.raises(PolicyError):
        optimal_random_distribution(np.array([3.0, 1.0]), np.array([False, False]))


def test_optimal_random_policy_uses_context() -> None:
    policy = OptimalRandom(3)
    with pytest.raises(PolicyError):
        policy.distribution()
    context = SlotContext(bandwidths=np.array([4.0, 10.0, 6.0]), available=np.ones(3, bool))
    assert policy.distribution(context).probs.tolist() == [0.2, 0.5, 0.3]
    policy.update(1, 0.3)

    down = SlotContext(
        bandwidths=np.array([0.0, 10.0, 0.0]), available=np.array([True, False, True])
    )
    dist = policy.distribution(down)
    assert dist.fallback
    assert dist.probs.tolist() == [0.5, 0.0, 0.5]


def test_uniform_random() -> None:
    dist = UniformRandom(4).distribution()
    assert dist.probs.tolist() == [0.25] * 4


def test_restrict_to_available() -> None:
    dist = ArmDistribution(probs=np.array([0.2, 0.5, 0.3]))
    assert restrict_to_available(dist, np.array([True, True, True])) is dist

    restricted = restrict_to_available(dist, np.array([True, False, True]))
    assert restricted.probs.tolist() == pytest.approx([0.4, 0.0, 0.6])
    assert not restricted.fallback

    degenerate = restrict_to_available(
        ArmDistribution(probs=np.array([0.0, 1.0, 0.0])), np.array([True, False, True])
    )
    assert degenerate.fallback
    assert degenerate.probs.tolist() == [0.5, 0.0, 0.5]

    with pytest.raises(PolicyError):
        restrict_to_available(dist, np.array([False, False, False]))
    with pytest.raises(PolicyError):
        restrict_to_available(dist, np.array([True, False]))


def test_sample_arm_inverse_cdf() -> None:
    rng = np.random.default_rng(0)
    assert sample_arm(ArmDistribution(probs=np.array([1.0, 0.0, 0.0])), rng) == 0
    half = ArmDistribution(probs=np.array([0.5, 0.5]))
    assert sample_arm(half, _FixedDraw(0.49)) == 0  # type: ignore[arg-type]
    assert sample_arm(half, _FixedDraw(0.51)) == 1  # type: ignore[arg-type]


def test_sample_arm_frequencies() -> None:
    probs = np.array([0.2, 0.5, 0.3])
    dist = ArmDistribution(probs=probs)
    rng = np.random.default_rng(12345)
    n = 100_000
    counts = np.bincount([sample_arm(dist, rng) for _ in range(n)], minlength=3)
    sigma = np.sqrt(n * probs * (1 - probs))
    assert np.all(np.abs(counts - n * probs) <= 4 * sigma)


def test_registry() -> None:
    F = make_period_range_set(2, 4, 8)
    assert isinstance(make_policy("exp3", num_arms=3, partitions=F), Exp3)
    assert isinstance(make_policy("periodic_exp4", num_arms=3, partitions=F), PeriodicExp4)
    assert isinstance(make_policy("optimal_random", num_arms=3, partitions=F), OptimalRandom)
    assert isinstance(make_policy("uniform", num_arms=3, partitions=F), UniformRandom)
    with pytest.raises(PolicyError):
        make_policy("periodic_exp4", num_arms=3, partitions=F, config=_config(2))
    with pytest.raises(ValueError):
        make_policy("epsilon_greedy", num_arms=3, partitions=F)
