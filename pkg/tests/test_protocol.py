"""End-to-end protocol: stages, verdicts, fault-set sweeps, pair ordering."""

import numpy as np
import pytest

from hstateprep.catalog import UnsupportedDistance, build_hm_circuit
from hstateprep.framesim import OutcomeGroups, compile_circuit, frames_from_pauli, run_batch
from hstateprep.lattice import build_lattice
from hstateprep.noise import LogicalNoiseModel, NoiseModel
from hstateprep.protocol import (
    ABORT_REASONS, VERDICTS, ConfigError, ProtocolSpec, fault_sweep, ordering_regression, run_block,
    run_encoded_trial, run_trial, skeleton, stage2_circuit,
)


def test_spec_validation():
    with pytest.raises(UnsupportedDistance):
        ProtocolSpec(9)
    with pytest.raises(ConfigError):
        ProtocolSpec(3, mode="encoded")
    with pytest.raises(ConfigError):
        ProtocolSpec(3, mode="encoded", d1=5, d2=3, logical=LogicalNoiseModel((0.0,), (0.0,)))
    with pytest.raises(ConfigError):
        ProtocolSpec(3, ordering="shuffled")
    assert ProtocolSpec(7).r == 3


@pytest.mark.parametrize("d", [3, 5, 7])
def test_noiseless_protocol_accepts(d):
    res = run_block(ProtocolSpec(d), 0.0, 8, np.random.default_rng(0))
    assert (res.verdict == 0).all() and (res.failure == 0).all()
    assert not res.residual_x.any() and not res.residual_z.any()


def test_stage_layout():
    _, names = stage2_circuit(7)
    assert names == ("Hm", "EC") * 3
    assert stage2_circuit(5, "unpaired")[1] == ("Hm", "Hm", "EC", "EC")
    assert run_trial(ProtocolSpec(5), 0.0, np.random.default_rng(0)).meta["stages"] == ("G", "Hm", "EC", "Hm", "EC")


def test_verdicts_exclusive_and_exhaustive():
    res = run_block(ProtocolSpec(3), 5e-3, 20_000, np.random.default_rng(4))
    counts = np.bincount(res.verdict, minlength=len(VERDICTS))
    assert counts.sum() == 20_000 and len(counts) == 1 + len(ABORT_REASONS)
    assert counts[1:].min() >= 0 and counts[0] > 0
    # failure classes exist exactly for accepted trials
    assert ((res.failure >= 0) == (res.verdict == 0)).all()


def test_acceptance_factorizes():
    res = run_block(ProtocolSpec(3), 2e-3, 40_000, np.random.default_rng(8))
    v = res.verdict
    s1 = (v != VERDICTS.index("stage1_syndrome")) & (v != VERDICTS.index("stage1_logical"))
    p1 = s1.mean()
    p2 = (v == 0).sum() / s1.sum()
    assert (v == 0).mean() == pytest.approx(p1 * p2, rel=1e-12)


def test_run_trial_accepts_rate_or_model():
    spec = ProtocolSpec(3)
    t = run_trial(spec, NoiseModel(0.0), np.random.default_rng(1))
    assert t.accepted and t.failure == "success" and t.residual_error.is_identity()
    with pytest.raises(ConfigError):
        run_encoded_trial(spec, 1e-3, np.random.default_rng(1))


def test_encoded_t_only_is_cleaner():
    model = LogicalNoiseModel(p_lc=(0.0, 20.0), p_inject=(0.0, 1.0))
    full = ProtocolSpec(3, mode="encoded", d1=3, d2=7, logical=model)
    t_only = ProtocolSpec(3, mode="encoded", d1=3, d2=7, logical=model, t_only=True)
    a = run_block(full, 1e-3, 50_000, np.random.default_rng(2))
    b = run_block(t_only, 1e-3, 50_000, np.random.default_rng(2))
    assert (b.verdict == 0).mean() > (a.verdict == 0).mean()
    fails_a = (a.failure > 0).sum() / (a.verdict == 0).sum()
    fails_b = (b.failure > 0).sum() / (b.verdict == 0).sum()
    assert fails_b <= fails_a
    assert run_encoded_trial(t_only, 1e-3, np.random.default_rng(0)).verdict in VERDICTS


# injected logical errors on a noiseless H_m ------------------------------------


@pytest.mark.parametrize("d", [3, 5])
@pytest.mark.parametrize("which,expected", [("Y", 1.0), ("X", 0.5), ("Z", 0.5)])
def test_injected_logical_abort_rate(d, which, expected):
    lat = build_lattice(d)
    e = {"X": lat.logical_x, "Z": lat.logical_z, "Y": lat.logical_x * lat.logical_z}[which]
    c = build_hm_circuit(d).circuit
    cc = compile_circuit(c)
    x, z = frames_from_pauli(e, 100_000, c.num_qubits, cc.data)
    res = run_batch(cc, x, z, rng=np.random.default_rng(d))
    aborted = (OutcomeGroups.from_circuit(c).verdicts(res.meas) != 0).mean()
    assert aborted == pytest.approx(expected, abs=0.01)


# pair ordering -------------------------------------------------------------------


def test_pair_ordering_regression():
    paired = ordering_regression(5, "paired")
    unpaired = ordering_regression(5, "unpaired")
    assert paired.accepted_bad < 1e-12
    assert unpaired.accepted_bad > 0.1


def test_ordering_needs_two_pairs():
    with pytest.raises(ValueError):
        ordering_regression(3)


# fault-set sweeps ------------------------------------------------------------------


def test_sweep_single_fault_d3():
    rep = fault_sweep(3, 1)
    assert rep.ok, rep.violations[:3]
    assert rep.fault_sets > 1000 and rep.accepted_runs > 0


def test_sweep_two_faults_d5_sampled():
    rep = fault_sweep(5, 2, samples=3000, seed=11)
    assert rep.ok, rep.violations[:3]


def test_skeleton_cached():
    assert skeleton(3) is skeleton(3)
    assert skeleton(3).corr_x.shape == (2, 7)
