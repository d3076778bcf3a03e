"""Tests for ifslab.coupling."""

from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from ifslab.clt import uniform_sum_gap
from ifslab.config import load_config
from ifslab.coupling import (
    block_tail_stats,
    paired_sum_gap,
    pairing_batch,
    pairing_envelope,
    pairing_sampler,
    success_words,
    survival_table,
    verify_p3,
)
from ifslab.coupling.checks import birkhoff_gaps
from ifslab.coupling.pairing import decode, encode, landed_in_arc, success_codes
from ifslab.engine import IFS, Harmonic, uniformize
from ifslab.errors import BudgetExceeded, EmptySuccessSet
from ifslab.geometry import Arc, CirclePoint, Rotation, Word
from ifslab.runner import certify

TOY_ARC = Arc(CirclePoint(0.4), CirclePoint(0.6))
WIDE_ARC = Arc(CirclePoint(0.2), CirclePoint(0.8))
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


class TestWords:
    """Tests for success words and codes."""

    def test_encode_decode(self):
        """Test that the first symbol is the most significant digit."""
        assert encode([1, 0, 1], 2) == 5
        assert decode(5, 2, 3) == [1, 0, 1]
        assert decode(0, 3, 2) == [0, 0]

    def test_success_words_half_turn(self, half_turn_ifs):
        """Test which one-letter words put 0 and 1/2 into [0.4, 0.6]."""
        assert success_words(half_turn_ifs, 0.0, TOY_ARC, 1) == [Word((1,))]
        assert success_words(half_turn_ifs, 0.5, TOY_ARC, 1) == [Word((2,))]

    def test_success_words_are_lexicographic(self, half_turn_ifs):
        """Test ordering of length-2 success words."""
        words = success_words(half_turn_ifs, 0.0, TOY_ARC, 2)
        assert words == [Word((1, 2)), Word((2, 1))]

    def test_success_codes_match_composition(self, demo_ifs):
        """Test codes against direct word evaluation."""
        from ifslab.geometry import compose_word

        arc = Arc(CirclePoint(0.45), CirclePoint(0.55))
        codes = success_codes(demo_ifs, 0.2, arc, 4)
        for code in range(2**4):
            word = Word(tuple(s + 1 for s in decode(code, 2, 4)))
            assert (code in codes) == arc.contains(compose_word(demo_ifs, word, 0.2))

    def test_empty_success_set(self, half_turn_ifs):
        """Test an arc no word can reach."""
        with pytest.raises(EmptySuccessSet):
            success_words(half_turn_ifs, 0.0, Arc(CirclePoint(0.2), CirclePoint(0.3)), 2)

    def test_non_uniform_rejected(self):
        """Test that pairing needs equal weights."""
        ifs = IFS((Rotation(0.5), Rotation(0.0)), (0.25, 0.75))
        with pytest.raises(ValueError):
            success_words(ifs, 0.0, TOY_ARC, 1)
        assert success_words(uniformize(ifs, 4), 0.0, TOY_ARC, 1) == [Word((1,))]

    def test_word_budget(self, demo_ifs):
        """Test the node budget on word enumeration."""
        with pytest.raises(BudgetExceeded):
            success_codes(demo_ifs, 0.0, TOY_ARC, 12, node_budget=1000)


class TestPairingSampler:
    """Tests for the block-wise pairing."""

    def test_toy_partner(self, half_turn_ifs):
        """Test omega' = (3 - omega_1, omega_2, omega_3) for {R_1/2, id} from 0 and 1/2."""
        for seed in range(8):
            t = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, seed=seed)
            omega, partner = t.omega.symbols, t.omega_prime.symbols
            assert len(omega) == 3
            assert partner[0] == 3 - omega[0]
            assert partner[1:] == omega[1:]

    def test_marginal_is_the_tape(self, rotation_ifs):
        """Test that omega is the drawn tape for every start pair."""
        a = pairing_sampler(rotation_ifs, 0.0, 0.5, WIDE_ARC, 3, 40, 0.9, seed=2)
        b = pairing_sampler(rotation_ifs, 0.1, 0.7, WIDE_ARC, 3, 40, 0.9, seed=2)
        assert a.omega == b.omega

    def test_same_start_pairs_identically(self, rotation_ifs):
        """Test that x = y gives omega' = omega."""
        t = pairing_sampler(rotation_ifs, 0.3, 0.3, WIDE_ARC, 3, 30, 0.9, seed=1)
        assert t.omega == t.omega_prime

    def test_blocks_cover_the_word(self, rotation_ifs):
        """Test block bookkeeping."""
        t = pairing_sampler(rotation_ifs, 0.0, 0.5, WIDE_ARC, 3, 40, 0.9, seed=5)
        assert t.blocks[0].start == 0
        assert [b.start for b in t.blocks] == sorted(b.start for b in t.blocks)
        assert t.level == len(t.blocks)
        assert t.level_at(1) == 1
        assert landed_in_arc(t)
        assert len(t.omega_prime) == 40

    def test_partner_marginal_is_uniform(self, rotation_ifs):
        """Test omega' symbol frequencies on the first two blocks with a chi-square test."""
        ts = pairing_batch(rotation_ifs, 0.0, 0.5, WIDE_ARC, 2, 4, 0.9, 1000, seed=8)
        codes = [encode([s - 1 for s in t.omega_prime.symbols], 2) for t in ts]
        counts = np.bincount(codes, minlength=16)
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_prefix_does_not_depend_on_length(self, rotation_ifs):
        """Test that omega' up to the last block start is fixed by the tape prefix."""
        short = pairing_sampler(rotation_ifs, 0.0, 0.5, WIDE_ARC, 3, 20, 0.9, seed=4)
        long = pairing_sampler(rotation_ifs, 0.0, 0.5, WIDE_ARC, 3, 40, 0.9, seed=4)
        cut = short.blocks[-1].start
        assert long.omega.symbols[:20] == short.omega.symbols
        assert long.omega_prime.symbols[:cut] == short.omega_prime.symbols[:cut]

    def test_parameter_checks(self, half_turn_ifs):
        """Test q and m preconditions."""
        with pytest.raises(ValueError):
            pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 1.0)
        with pytest.raises(ValueError):
            pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 0, 3, 0.5)

    def test_batch_is_reproducible(self, half_turn_ifs):
        """Test that replicate r always reads the same stream."""
        a = pairing_batch(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 6, 0.5, 40, seed=3)
        b = pairing_batch(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 6, 0.5, 40, seed=3)
        assert [t.omega for t in a] == [t.omega for t in b]
        single = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 6, 0.5, seed=3, index=37)
        assert a[37].omega == single.omega

    def test_to_dict(self, half_turn_ifs):
        """Test the transcript record."""
        t = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, seed=0, alpha_hat=0.25)
        data = t.to_dict()
        assert data["constants"]["gamma"] == pytest.approx(2.0)
        assert data["constants"]["alpha_hat"] == 0.25
        assert len(data["omega"]) == 3


class TestChecks:
    """Tests for the partial-sum and survival checks."""

    @pytest.fixture
    def unit_cosine(self) -> Harmonic:
        f = Harmonic(a=(1.0,))
        return f.scaled(1.0 / f.lipschitz)

    def test_toy_bound_holds(self, half_turn_ifs, unit_cosine):
        """Test the partial-sum bound on the toy system."""
        for seed in range(5):
            t = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, seed=seed)
            ok, worst = verify_p3(t, half_turn_ifs, unit_cosine)
            assert ok
            assert worst <= 1.0

    def test_rotation_bound_holds(self, rotation_ifs, unit_cosine):
        """Test the bound along rotation transcripts, where tails never contract."""
        for t in pairing_batch(rotation_ifs, 0.0, 0.5, WIDE_ARC, 3, 60, 0.9, 20, seed=1):
            assert verify_p3(t, rotation_ifs, unit_cosine)[0]

    def test_lipschitz_one_required(self, half_turn_ifs, cosine):
        """Test that observables must be rescaled first."""
        t = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, seed=0)
        with pytest.raises(ValueError):
            verify_p3(t, half_turn_ifs, cosine)

    def test_gaps_vanish_after_merging(self, half_turn_ifs, unit_cosine):
        """Test that once both paths meet, the gap stops changing."""
        t = pairing_sampler(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, seed=0)
        gaps = birkhoff_gaps(t, half_turn_ifs, unit_cosine)
        assert gaps[2] == pytest.approx(gaps[0])

    def test_survival_table(self):
        """Test survival fractions and the envelope."""
        rows = survival_table([1, 1, 2, None], alpha_hat=0.5, l_max=2)
        assert [r.survival for r in rows] == pytest.approx([1.0, 0.5, 0.25])
        assert rows[2].envelope == pytest.approx(0.25)
        assert rows[0].ci_low <= rows[0].survival <= rows[0].ci_high

    def test_block_tail_stats_needs_transcripts(self, half_turn_ifs):
        """Test the transcript minimum."""
        ts = pairing_batch(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 3, 0.5, 10, seed=0)
        with pytest.raises(ValueError):
            block_tail_stats(ts)

    def test_block_tail_stats(self, half_turn_ifs):
        """Test survival over a batch of toy transcripts."""
        ts = pairing_batch(half_turn_ifs, 0.0, 0.5, TOY_ARC, 1, 12, 0.5, 120, seed=0, alpha_hat=0.5)
        rows = block_tail_stats(ts, l_max=5)
        survival = [r.survival for r in rows]
        assert survival[0] == 1.0
        assert all(a >= b for a, b in zip(survival, survival[1:]))

    def test_paired_sum_gap(self, rotation_ifs, unit_cosine):
        """Test mean gaps of paired sums."""
        rows = paired_sum_gap(rotation_ifs, unit_cosine, 0.0, 0.5, [5, 20], 30, seed=0, arc=WIDE_ARC, m=3, q=0.9)
        assert [r.n for r in rows] == [5, 20]
        assert all(np.isfinite(r.mean_abs_gap) for r in rows)
        assert all(0.0 <= r.coupled_fraction <= 1.0 for r in rows)

    def test_envelope(self):
        """Test the two-part bound."""
        rows = pairing_envelope(1, 2.0, 0.5, 1.0, [16], beta=0.25)
        assert rows[0]["coupled_part"] == pytest.approx(2 * (2 * 2 * 1.0 + 2.0))
        assert rows[0]["uncoupled_part"] == pytest.approx(2 * 16 * 0.25)
        assert rows[0]["total"] == pytest.approx(rows[0]["coupled_part"] + rows[0]["uncoupled_part"])


@pytest.mark.slow
class TestDemoCoupling:
    """Acceptance checks of the pairing on the demo Arnold system."""

    @pytest.fixture(scope="class")
    def certified(self):
        spec = load_config(CONFIGS / "demo.json")
        ifs = spec.build_ifs()
        cert, _ = certify(spec, ifs, 7)
        return uniformize(ifs, 2), cert

    @pytest.fixture(scope="class")
    def transcripts(self, certified):
        ifs, cert = certified
        return pairing_batch(ifs, 0.0, 0.5, cert.arc, max(1, cert.m), 200, cert.q_hat, 300, seed=7,
                             alpha_hat=cert.alpha_hat)

    @pytest.fixture
    def unit_cosine(self) -> Harmonic:
        f = Harmonic(a=(1.0,))
        return f.scaled(1.0 / f.lipschitz)

    def test_certificate(self, certified):
        """Test that seed 7 certifies a contracting arc."""
        _, cert = certified
        assert 0.0 < cert.q_hat < 1.0
        assert cert.alpha_hat > 0.0

    def test_partial_sum_bound(self, certified, transcripts, unit_cosine):
        """Test the partial-sum bound on every transcript."""
        ifs, _ = certified
        assert len(transcripts) >= 300
        violations = [t for t in transcripts if not verify_p3(t, ifs, unit_cosine)[0]]
        assert violations == []
        assert all(landed_in_arc(t) for t in transcripts)

    def test_survival_under_envelope(self, transcripts):
        """Test that (1 - alpha)^l is never below the survival interval."""
        rows = block_tail_stats(transcripts, l_max=20)
        assert len(rows) == 21
        for row in rows:
            assert row.ci_low <= row.envelope + 1e-12

    def test_partner_marginal_is_uniform(self, transcripts):
        """Test omega' symbol triples at the start and mid-word with a chi-square test."""
        for begin in (0, 100):
            codes = [encode([s - 1 for s in t.omega_prime.symbols[begin:begin + 3]], 2) for t in transcripts]
            counts = np.bincount(codes, minlength=8)
            assert stats.chisquare(counts).pvalue > 1e-3

    def test_paired_gap_matches_exact(self, certified, unit_cosine):
        """Test mean paired gaps against the exact difference of dual sums."""
        ifs, cert = certified
        ns = [4, 8, 12, 16]
        rows = paired_sum_gap(ifs, unit_cosine, 0.0, 0.5, ns, 4000, seed=11, arc=cert.arc,
                              m=max(1, cert.m), q=cert.q_hat, alpha_hat=cert.alpha_hat)
        exact = uniform_sum_gap(ifs, unit_cosine, 0.0, 0.5, ns)
        for row, oracle in zip(rows, exact):
            assert row.n == oracle["n"]
            assert abs(row.mean_signed_gap - oracle["signed_gap"]) <= 4.0 * row.stderr + 1e-9
