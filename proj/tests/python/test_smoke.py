import random
from fractions import Fraction

import pytest

import distillq
import oracle_emulator as oracle


def circuit_from_slots(slots):
    text = "qubits 2\n" + "".join("t 0\n" if s else "h 1\n" for s in slots)
    return distillq.parse_circuit(text, "random")


def test_version():
    assert distillq.__version__.count(".") == 2


@pytest.mark.parametrize("shape", ["uniform", "burst", "tapered"])
@pytest.mark.parametrize("n", [2, 5, 16, 33])
def test_adder_matches_oracle(shape, n):
    c = distillq.generate_adder(n, shape)
    tl = distillq.sequentialize(c)
    slots = oracle.adder_slots(n, shape)
    assert tl.t_positions() == [i for i, s in enumerate(slots) if s]
    for buffer in (None, 0, 3, 7):
        got = distillq.emulate(c, buffer=buffer)
        ref = oracle.emulate(slots, buffer=buffer)
        assert got.occupancy == ref["occupancy"]
        assert got.stall_steps == ref["stalls"]
        assert got.pause_steps == ref["pauses"]
        assert got.produced == ref["produced"]


def test_random_runs_match_oracle():
    rng = random.Random(2024)
    for _ in range(300):
        slots = [int(rng.random() < 0.4) for _ in range(rng.randint(1, 80))]
        den = rng.randint(1, 10)
        rate = Fraction(rng.randint(1, den), den)
        buffer = rng.choice([None, 0, 1, 2, 5])
        look = rng.choice([None, None, 1, 3, 6])
        warmup = rng.randint(0, 4)
        policy = "stop-when-full" if look is None else f"lookahead:{look}"
        got = distillq.emulate(circuit_from_slots(slots), rate=str(rate), buffer=buffer,
                               policy=policy, warmup=warmup)
        ref = oracle.emulate(slots, rate=rate, buffer=buffer, lookahead=look, warmup=warmup)
        assert got.occupancy == ref["occupancy"]
        assert got.held_at_end == ref["held"]


def test_metrics_match_time_average():
    trace = distillq.emulate(distillq.generate_adder(16))
    chain = distillq.build_chain(trace)
    m = distillq.queue_metrics(distillq.steady_state(chain), chain)
    ref = oracle.time_average(trace.occupancy)
    assert m["num_states"] == ref["num_states"] == 10
    assert m["num_transitions"] == 270
    for key in ("v0", "v_full", "mean_jobs", "utilization"):
        assert m[key] == pytest.approx(ref[key], abs=1e-12)


def test_steady_state_examples():
    nu = distillq.steady_state(distillq.TransitionMatrix.from_probabilities([[0.9, 0.1], [0.5, 0.5]]))
    assert nu.nu == pytest.approx([5 / 6, 1 / 6], abs=1e-14)
    periodic = distillq.TransitionMatrix.from_probabilities([[0, 1], [1, 0]])
    assert distillq.check_ergodic(periodic)["period"] == 2
    with pytest.raises(distillq.NonUniqueSteadyState):
        distillq.steady_state(distillq.TransitionMatrix.from_probabilities([[1, 0], [0, 1]]))


def test_sweep_and_optimal_buffer():
    report = distillq.sweep_buffers(distillq.generate_adder(16), [0, 1, 2, 7, None])
    assert [r["depth"] for r in report["rows"]] == [270] * 5
    assert report["rows"][-1]["capacity"] is None
    assert report["optimal_buffer"] == 0
    assert report["rows"][3]["metrics"]["v_full"] <= 0.05

    burst = distillq.sweep_buffers(distillq.generate_adder(4, "burst"), [0, "inf"])
    assert burst["rows"][0]["depth"] > burst["baseline_depth"]


def test_shutdown_time():
    r = distillq.shutdown_time(distillq.generate_adder(16))
    assert r["verified"]
    assert 0 < r["shutdown_step"] < 270


def test_table1_and_calibrate():
    ref = distillq.reference_table()
    assert len(ref) == 9 and ref[0]["transitions"] == 270
    row = distillq.table1_row(32)
    assert row["transitions"] == 558 and row["states_infinite"] == 19
    cal = distillq.calibrate(["1/4", "1/3"], ["uniform"], [16, 32])
    assert cal["best_rate"] == "1/4"
    assert len(cal["candidates"]) == 2


def test_parse_serialize_round_trip():
    c = distillq.generate_adder(6, "tapered")
    back = distillq.parse_circuit(distillq.serialize(c))
    assert back == c
    assert distillq.circuit_stats(c)["t_count"] == 20


def test_errors_map_to_python():
    with pytest.raises(distillq.InvalidQubitCount):
        distillq.generate_adder(1)
    with pytest.raises(distillq.UnknownGate):
        distillq.parse_circuit("h 0\nfoo 1")
    with pytest.raises(distillq.EmptyCircuit):
        distillq.parse_circuit("")
    with pytest.raises(distillq.InvalidConfig):
        distillq.emulate(distillq.generate_adder(2), rate="3/2")
    with pytest.raises(ValueError):
        distillq.emulate(distillq.generate_adder(2), buffer=-1)
