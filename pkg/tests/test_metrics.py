"""Formula suite: each ratio matches an independent re-computation, the
quadrature matches closed forms and a halving-step oracle, and the window
aggregation matches a naive single-pass scan over the same trace.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnfsdnsim.metrics import (
    AnalyticParams,
    EmptyTraffic,
    InsufficientSeries,
    KpiCounters,
    MonitorSample,
    NoAttempts,
    NoDevices,
    NoThreats,
    WindowAggregator,
    ZeroWindow,
    access_outcome_rate,
    check_hypothesis1,
    composite_simpson,
    exposure_ratio,
    kpi_rollup,
    monitor_growth_check,
    monitored_traffic,
    reliability_ratio,
    secure_traffic_pct,
    security_integral,
    strength,
    threat_detection_rate,
    unauthorized_block_rate,
)

SECOND = 1_000_000


# ----------------------------------------------------------------------
# tabulated ratio examples


def test_secure_traffic_pct_examples():
    assert secure_traffic_pct(KpiCounters(total_packets=200, blocked_packets=50)) == 75.0
    assert secure_traffic_pct(KpiCounters(total_packets=7, blocked_packets=0)) == 100.0
    assert secure_traffic_pct(KpiCounters(total_packets=9, blocked_packets=9)) == 0.0
    with pytest.raises(EmptyTraffic):
        secure_traffic_pct(KpiCounters())


def test_threat_detection_rate_examples():
    assert (
        threat_detection_rate(KpiCounters(threat_packets=40, blocked_threat_packets=30))
        == 0.75
    )
    assert (
        threat_detection_rate(KpiCounters(threat_packets=13, blocked_threat_packets=13))
        == 1.0
    )
    with pytest.raises(NoThreats):
        threat_detection_rate(KpiCounters(threat_packets=0))


def test_unauthorized_block_rate_examples():
    assert (
        unauthorized_block_rate(
            KpiCounters(unauthorized_attempts=20, blocked_unauthorized=18)
        )
        == 0.9
    )
    assert (
        unauthorized_block_rate(
            KpiCounters(unauthorized_attempts=4, blocked_unauthorized=0)
        )
        == 0.0
    )
    with pytest.raises(NoAttempts):
        unauthorized_block_rate(KpiCounters())


def test_exposure_ratio_examples():
    assert exposure_ratio(KpiCounters(devices_total=100, devices_affected=10)) == 0.9
    assert exposure_ratio(KpiCounters(devices_total=5, devices_affected=0)) == 1.0
    assert exposure_ratio(KpiCounters(devices_total=6, devices_affected=6)) == 0.0
    with pytest.raises(NoDevices):
        exposure_ratio(KpiCounters())


def test_access_outcome_rate_examples():
    assert access_outcome_rate(KpiCounters(access_attempts=50, failed_access=5)) == 0.9
    assert access_outcome_rate(KpiCounters(access_attempts=8, failed_access=0)) == 1.0
    assert access_outcome_rate(KpiCounters(access_attempts=8, failed_access=8)) == 0.0
    with pytest.raises(NoAttempts):
        access_outcome_rate(KpiCounters())


def test_reliability_ratio_examples():
    assert (
        reliability_ratio(
            KpiCounters(uptime_us=3600 * SECOND, downtime_us=36 * SECOND)
        )
        == 0.99
    )
    assert reliability_ratio(KpiCounters(uptime_us=10 * SECOND)) == 1.0
    assert (
        reliability_ratio(KpiCounters(uptime_us=7 * SECOND, downtime_us=7 * SECOND))
        == 0.0
    )
    with pytest.raises(ZeroWindow):
        reliability_ratio(KpiCounters())


def test_ratios_match_independent_recomputation_on_random_counters():
    rng = random.Random(12345)
    for _ in range(100):
        total = rng.randint(1, 10**6)
        blocked = rng.randint(0, total)
        threat = rng.randint(1, total)
        bthreat = rng.randint(0, threat)
        attempts = rng.randint(1, 10**4)
        battempts = rng.randint(0, attempts)
        access = rng.randint(1, 10**4)
        failed = rng.randint(0, access)
        devices = rng.randint(1, 500)
        affected = rng.randint(0, devices)
        window = rng.randint(1, 10**9)
        down = rng.randint(0, window)
        c = KpiCounters(
            total_packets=total,
            blocked_packets=blocked,
            threat_packets=threat,
            blocked_threat_packets=bthreat,
            unauthorized_attempts=attempts,
            blocked_unauthorized=battempts,
            access_attempts=access,
            failed_access=failed,
            devices_total=devices,
            devices_affected=affected,
            uptime_us=window,
            downtime_us=down,
        )
        # Independent re-computation, deliberately written in a different
        # algebraic form: ratio = 1 - complement/denominator.
        assert abs(secure_traffic_pct(c) - (100.0 - blocked / total * 100.0)) < 1e-12
        assert abs(threat_detection_rate(c) - (1.0 - (threat - bthreat) / threat)) < 1e-12
        assert abs(
            unauthorized_block_rate(c) - (1.0 - (attempts - battempts) / attempts)
        ) < 1e-12
        assert abs(exposure_ratio(c) - (1.0 - affected / devices)) < 1e-12
        assert abs(access_outcome_rate(c) - (1.0 - failed / access)) < 1e-12
        assert abs(reliability_ratio(c) - (1.0 - down / window)) < 1e-12
        assert 0.0 <= secure_traffic_pct(c) <= 100.0
        for value in (
            threat_detection_rate(c),
            unauthorized_block_rate(c),
            exposure_ratio(c),
            access_outcome_rate(c),
            reliability_ratio(c),
        ):
            assert 0.0 <= value <= 1.0


@given(
    threat=st.integers(min_value=1, max_value=10**9),
    missed=st.integers(min_value=0, max_value=10**9),
)
@settings(max_examples=100, deadline=None)
def test_tdr_bounds_property(threat, missed):
    blocked = max(threat - missed, 0)
    c = KpiCounters(threat_packets=threat, blocked_threat_packets=blocked)
    value = threat_detection_rate(c)
    assert 0.0 <= value <= 1.0
    if missed == 0:
        assert value == 1.0


def test_counter_invariants_rejected():
    with pytest.raises(ValueError):
        KpiCounters(total_packets=5, blocked_packets=6).check()
    with pytest.raises(ValueError):
        KpiCounters(threat_packets=2, blocked_threat_packets=3).check()
    with pytest.raises(ValueError):
        KpiCounters(total_packets=-1).check()


# ----------------------------------------------------------------------
# analytic strength model


def test_strength_examples():
    assert strength(AnalyticParams(n=4, gamma_n=0.5, m=1.0), 0.0) == 2.0
    assert strength(AnalyticParams(n=1, gamma_n=0.0), 123.456) == 1.0
    # sin(m·√n·t) = 1 at t = π/(2·m·√n) with n=9, m=2 → √9 + 0.2
    t = math.pi / (2 * 2 * 3)
    assert abs(strength(AnalyticParams(n=9, gamma_n=0.2, m=2.0), t) - 3.2) < 1e-12


def test_params_reject_amplitude_at_or_above_baseline():
    with pytest.raises(ValueError):
        AnalyticParams(n=4, gamma_n=2.0)
    with pytest.raises(ValueError):
        AnalyticParams(n=1, gamma_n=1.0)
    with pytest.raises(ValueError):
        AnalyticParams(n=0)


def test_composite_simpson_exact_for_cubics():
    # Simpson integrates cubics exactly; ∫₀³ x² dx = 9, ∫₀² x³ dx = 4.
    assert abs(composite_simpson(lambda x: x * x, 0.0, 3.0, 2) - 9.0) < 1e-12
    assert abs(composite_simpson(lambda x: x**3, 0.0, 2.0, 2) - 4.0) < 1e-12
    with pytest.raises(ValueError):
        composite_simpson(lambda x: x, 0.0, 1.0, 3)
    with pytest.raises(ValueError):
        composite_simpson(lambda x: x, 0.0, 1.0, 0)


def test_security_integral_closed_forms():
    # With γ=0 the integrand is the constant √(√n): integral = a·T·n^¼.
    value = security_integral(AnalyticParams(n=16, a_n=1.0, gamma_n=0.0, horizon_s=1.0))
    assert abs(value - 2.0) <= 1e-8 * 2.0
    value = security_integral(AnalyticParams(n=1, a_n=1.0, gamma_n=0.0, horizon_s=5.0))
    assert abs(value - 5.0) <= 1e-8 * 5.0
    for n in (1, 4, 9, 16):
        value = security_integral(AnalyticParams(n=n, gamma_n=0.0, horizon_s=1.0))
        assert abs(value - n**0.25) <= 1e-8 * n**0.25


def _halving_oracle(p: AnalyticParams, rel_tol: float = 1e-9) -> float:
    """Step-halving quadrature, independent of the shipped interval count."""
    intervals = 64
    previous = composite_simpson(
        lambda t: p.a_n * math.sqrt(strength(p, t)), 0.0, p.horizon_s, intervals
    )
    while True:
        intervals *= 2
        current = composite_simpson(
            lambda t: p.a_n * math.sqrt(strength(p, t)), 0.0, p.horizon_s, intervals
        )
        if abs(current - previous) <= rel_tol * abs(current):
            return current
        previous = current


def test_security_integral_matches_halving_oracle():
    p = AnalyticParams(n=4, a_n=1.0, gamma_n=0.3, m=1.0, horizon_s=10.0)
    assert abs(security_integral(p) - _halving_oracle(p)) <= 1e-6


def test_check_hypothesis1_monotone_for_quiet_model():
    result = check_hypothesis1(AnalyticParams(n=1, gamma_n=0.0), [1, 4, 9, 16])
    assert result.increasing
    values = [v for _, v in result.rows]
    assert values == sorted(values)
    for (n, v) in result.rows:
        assert abs(v - n**0.25) <= 1e-8 * n**0.25


def test_check_hypothesis1_single_size_is_vacuously_true():
    result = check_hypothesis1(AnalyticParams(n=1, gamma_n=0.0), [1])
    assert result.increasing
    assert len(result.rows) == 1


def test_check_hypothesis1_matches_high_resolution_oracle():
    base = AnalyticParams(n=1, a_n=1.0, gamma_n=0.5, m=3.0, horizon_s=20.0)
    sizes = list(range(1, 17))
    result = check_hypothesis1(base, sizes)
    oracle_values = []
    for n in sizes:
        p = AnalyticParams(n=n, a_n=1.0, gamma_n=0.5, m=3.0, horizon_s=20.0)
        oracle_values.append(
            composite_simpson(
                lambda t: p.a_n * math.sqrt(strength(p, t)), 0.0, p.horizon_s, 100_000
            )
        )
    oracle_increasing = all(
        b > a for a, b in zip(oracle_values, oracle_values[1:])
    )
    assert result.increasing == oracle_increasing
    for (_, got), want in zip(result.rows, oracle_values):
        assert abs(got - want) <= 1e-6 * abs(want)


def test_check_hypothesis1_rejects_bad_size_lists():
    base = AnalyticParams(n=1, gamma_n=0.0)
    with pytest.raises(ValueError):
        check_hypothesis1(base, [])
    with pytest.raises(ValueError):
        check_hypothesis1(base, [2, 4])
    with pytest.raises(ValueError):
        check_hypothesis1(base, [1, 9, 4])
    with pytest.raises(ValueError):
        check_hypothesis1(base, [1, 4], gamma_scale="cubic")


def test_gamma_scale_sqrt_keeps_amplitude_proportional():
    base = AnalyticParams(n=1, gamma_n=0.1, m=1.0, horizon_s=20.0)
    assert check_hypothesis1(base, [1, 4, 9, 16], gamma_scale="sqrt").increasing


# ----------------------------------------------------------------------
# monitored-traffic model


def test_monitored_traffic_examples():
    assert monitored_traffic(MonitorSample(time_us=0, pairs=())) == 0.0
    sample = MonitorSample(time_us=0, pairs=((1.0, 100.0), (1.0, 200.0), (2.0, 300.0)))
    assert monitored_traffic(sample) == 900.0
    rng = random.Random(7)
    pairs = tuple((rng.uniform(0.1, 3.0), rng.uniform(1, 2000)) for _ in range(500))
    want = sum(w * m for w, m in pairs)
    assert abs(monitored_traffic(MonitorSample(time_us=0, pairs=pairs)) - want) < 1e-9


def test_monitor_sample_rejects_bad_pairs():
    with pytest.raises(ValueError):
        MonitorSample(time_us=0, pairs=((0.0, 5.0),))
    with pytest.raises(ValueError):
        MonitorSample(time_us=0, pairs=((1.0, -1.0),))


def _series(values_by_time: dict[int, float]):
    return [
        MonitorSample(time_us=t, pairs=((1.0, v),)) for t, v in sorted(values_by_time.items())
    ]


def test_monitor_growth_constant_equal_series_is_nonstrictly_true():
    times = {int(i * SECOND): 25.0 for i in range(5)}
    series = {1: _series(times), 2: _series(times), 4: _series(times)}
    result = monitor_growth_check(series)
    assert result.non_decreasing
    first = result.integrals[0][1]
    for _, v in result.integrals:
        assert abs(v - first) < 1e-9


def test_monitor_growth_linear_in_n_matches_closed_form():
    # Mₙ(t) = n constant over [0, T] → ∫√Mₙ dt = T·√n.
    horizon = 4
    series = {
        n: _series({int(i * SECOND): float(n) for i in range(horizon + 1)})
        for n in (1, 2, 4, 9)
    }
    result = monitor_growth_check(series)
    assert result.non_decreasing
    for n, integral in result.integrals:
        assert abs(integral - horizon * math.sqrt(n)) < 1e-9


def test_monitor_growth_needs_three_sizes_and_two_samples():
    good = _series({0: 1.0, SECOND: 1.0})
    with pytest.raises(InsufficientSeries):
        monitor_growth_check({1: good, 2: good})
    with pytest.raises(InsufficientSeries):
        monitor_growth_check({1: good, 2: good, 3: good[:1]})


# ----------------------------------------------------------------------
# window aggregation vs a naive trace scan


def _trace_for_rollup():
    """Two windows of hand-checkable traffic plus degenerate third window."""
    t0 = 100_000
    trace = [
        # window 0: three benign sent, two delivered (1 ms / 3 ms), one qdrop
        ("emit", t0, 1, "benign", True, 1000, "bench/a", 0, 9, "tag"),
        ("emit", t0 + 10, 2, "benign", True, 1000, "bench/a", 0, 9, "tag"),
        ("emit", t0 + 20, 3, "benign", True, 500, "bench/a", 0, 9, "tag"),
        ("deliver", t0 + 1_000, 1, "benign", True, 1000, 1_000, 9),
        ("deliver", t0 + 3_000, 2, "benign", True, 1000, 3_000, 9),
        ("qdrop", t0 + 500, 3, "benign", True, 500, "bench/a"),
        ("cost", t0, 4_000),
        ("mem", t0, 80.0),
        # window 1: threat blocked, unauthorized blocked, benign delivered at 5 ms
        ("emit", SECOND + t0, 4, "threat", False, 800, "ddos/x", 1, 9, "bad"),
        ("block", SECOND + t0 + 50, 4, "threat", False, "ddos/x", "policy", 1),
        ("emit", SECOND + t0 + 100, 5, "unauthorized_access", False, 200, "access/u", 2, 9, "bad"),
        ("block", SECOND + t0 + 150, 5, "unauthorized_access", False, "access/u", "policy", 2),
        ("emit", SECOND + t0 + 200, 6, "benign", True, 1500, "bench/a", 0, 9, "tag"),
        ("deliver", SECOND + t0 + 5_200, 6, "benign", True, 1500, 5_000, 9),
        ("rtt", SECOND + t0 + 5_200, 6, 10_000),
        ("detect", SECOND + t0 + 60, (1, 9, "bad"), 2_000),
        ("mem", SECOND + t0, 90.0),
    ]
    return trace


def test_kpi_rollup_matches_naive_scan():
    trace = _trace_for_rollup()
    report = kpi_rollup(trace, window_s=1.0, devices_total=12)

    # Naive independent scan.
    sent0 = sum(1 for r in trace if r[0] == "emit" and r[4] and r[1] < SECOND)
    del0 = [r for r in trace if r[0] == "deliver" and r[1] < SECOND]
    assert report.windows[0].sent_benign == sent0 == 3
    assert report.windows[0].delivered_benign == len(del0) == 2
    assert report.windows[0].benign_queue_drops == 1
    # window 0 latency: mean(1 ms, 3 ms) = 2 ms; jitter needs ≥2 windows.
    assert report.windows[0].mean_latency_ms == pytest.approx(2.0)
    assert report.windows[1].mean_latency_ms == pytest.approx(5.0)
    # throughput of window 0: 2000 bytes · 8 / 1 s = 0.016 Mbps
    assert report.windows[0].throughput_mbps == pytest.approx(0.016)
    # availability: 2/3 in window 0, 1/1 in window 1
    assert report.windows[0].availability_pct == pytest.approx(200 / 3)
    assert report.windows[1].availability_pct == pytest.approx(100.0)
    # run-level jitter = |5 - 2| = 3 ms (one consecutive pair)
    assert report.jitter_ms == pytest.approx(3.0)
    # counters
    c = report.counters
    assert c.total_packets == 6
    assert c.delivered_packets == 3
    assert c.blocked_packets == 2
    assert c.queue_dropped == 1
    assert c.threat_packets == c.blocked_threat_packets == 1
    assert c.unauthorized_attempts == c.blocked_unauthorized == 1
    assert c.access_attempts == c.failed_access == 1
    # ratios against direct formulas
    assert report.tdr == 1.0
    assert report.ubr == 1.0
    assert report.secure_traffic_pct == pytest.approx((6 - 2) / 6 * 100)
    assert report.access_outcome == 0.0
    # detection + rtt
    assert report.detection_time_ms == pytest.approx(2.0)
    assert report.mean_rtt_ms == pytest.approx(10.0)
    assert report.response_time_ms == pytest.approx(12.0)
    # memory: mean of 80/90 over observed windows, max 90
    assert report.memory_mb_max == pytest.approx(90.0)
    assert report.memory_mb_mean == pytest.approx(85.0)
    # cpu: 4000 µs busy in window 0 → 0.4% of that window, 0 in window 1
    assert report.windows[0].cpu_pct == pytest.approx(0.4)
    assert report.benign_loss_total == 1  # one queue drop, no benign blocks


def test_rollup_degenerate_windows_are_excluded_not_zeroed():
    trace = [
        ("emit", 10, 1, "benign", True, 100, "b/a", 0, 1, "t"),
        ("deliver", 1_010, 1, "benign", True, 100, 1_000, 1),
    ]
    report = kpi_rollup(trace, window_s=1.0, duration_us=3 * SECOND)
    assert len(report.windows) == 3
    assert report.windows[1].availability_pct is None
    assert report.windows[2].availability_pct is None
    assert report.availability_pct == pytest.approx(100.0)
    # no threats / attempts / devices → undefined, never coerced to 0 or 1
    assert report.tdr is None
    assert report.ubr is None
    assert report.exposure is None
    assert report.access_outcome is None


def test_rollup_throughput_definitional_case():
    # 250 Mbit delivered within one 1-s window → 250 Mbps.
    size = 31_250_000  # bytes; ·8 = 250 Mbit
    trace = [
        ("emit", 0, 1, "benign", True, size, "b/a", 0, 1, "t"),
        ("deliver", 999_999, 1, "benign", True, size, 999_999, 1),
    ]
    report = kpi_rollup(trace, window_s=1.0, duration_us=SECOND)
    assert report.windows[0].throughput_mbps == pytest.approx(250.0)


def test_rollup_empty_trace_rejected():
    from vnfsdnsim.metrics import EmptyTrace

    with pytest.raises(EmptyTrace):
        kpi_rollup([], window_s=1.0)


def test_aggregator_availability_capped_at_100():
    agg = WindowAggregator(window_s=1.0)
    # a packet emitted in window 0 but delivered in window 1 can push the
    # per-window delivered count above the sent count
    agg.feed(("emit", 10, 1, "benign", True, 100, "b/a", 0, 1, "t"))
    agg.feed(("emit", 20, 2, "benign", True, 100, "b/a", 0, 1, "t"))
    agg.feed(("deliver", 100, 1, "benign", True, 100, 90, 1))
    agg.feed(("emit", SECOND + 10, 3, "benign", True, 100, "b/a", 0, 1, "t"))
    agg.feed(("deliver", SECOND + 20, 2, "benign", True, 100, 100, 1))
    agg.feed(("deliver", SECOND + 30, 3, "benign", True, 100, 20, 1))
    report = agg.finalize(2 * SECOND, devices_total=2)
    assert report.windows[1].availability_pct == 100.0
    assert all(
        w.availability_pct is None or 0 <= w.availability_pct <= 100
        for w in report.windows
    )
