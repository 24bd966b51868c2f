import math

import numpy as np
import pytest
from scipy import stats

from qualifit.errors import ConfigError, DataError
from qualifit.lang import load_constraints, parse_constraints
from qualifit.models import BiphasicToyModel, secondary_name
from qualifit.synthetic import (
    LOWER,
    MIDDLE,
    UPPER,
    SyntheticSpec,
    categorize,
    generate,
    nested_delays,
    noisy_responses,
    read_quantitative_csv,
    report_sampling_model,
    three_category_reports,
)

TRUTH = BiphasicToyModel.defaults


class TestDelays:
    def test_grid(self):
        d = nested_delays(64)
        assert len(d) == 64 and d[0] == 0.5 and d[-1] == 64.0
        assert np.all(np.diff(d) > 0)

    def test_nested(self):
        sets = {n: set(nested_delays(n)) for n in (4, 8, 16, 32, 64)}
        for a, b in [(4, 8), (8, 16), (16, 32), (32, 64)]:
            assert sets[a] < sets[b]
        assert 64.0 in sets[4]

    def test_bad_size(self):
        with pytest.raises(ConfigError):
            nested_delays(24)


class TestGenerate:
    def test_noise_free_sign(self):
        spec = SyntheticSpec(truth=TRUTH, delays=(2.0, 30.0), noise_sigma=0.0)
        stmts = parse_constraints(generate(spec).text)
        assert [(s.lhs, s.op, s.rhs) for s in stmts] == [
            ("p1", ">", secondary_name(2.0)), ("p1", "<", secondary_name(30.0))]
        assert stmts[0].enforcement.time == 2.0
        assert stmts[0].qualifier.confidence == 0.98

    def test_tolerance_bookkeeping(self):
        spec = SyntheticSpec(truth=TRUTH, delays=(2.0,), noise_sigma=0.025)
        assert spec.diff_sigma == 0.05 and spec.category_threshold == pytest.approx(0.15)
        assert parse_constraints(generate(spec).text)[0].qualifier.tolerance == 0.05
        quad = SyntheticSpec(truth=TRUTH, delays=(2.0,), noise_sigma=0.025, combine="quadrature")
        assert quad.diff_sigma == pytest.approx(0.025 * math.sqrt(2))
        assert parse_constraints(generate(quad).text)[0].qualifier.tolerance == quad.diff_sigma

    def test_three_category_statements(self):
        # delays 0.5 (p1 well above p3), 6 (within threshold), 30 (p3 above)
        spec = SyntheticSpec(truth=TRUTH, delays=(0.5, 6.0, 30.0), noise_sigma=0.0,
                             mode="three-cat", threshold=0.15)
        data = generate(spec)
        assert data.categories.tolist() == [UPPER, MIDDLE, LOWER]
        stmts = parse_constraints(data.text)
        got = [(s.lhs, s.op, s.rhs) for s in stmts]
        assert got == [
            ("degrLow", ">", "p3_0p5"),
            ("degrHigh", ">", "p3_6"), ("degrLow", "<", "p3_6"),
            ("degrHigh", "<", "p3_30"),
        ]
        q = stmts[0].qualifier
        assert (q.pmin, q.pmax, q.tolerance) == (0.01, 0.98, 0.0)
        with pytest.raises(ConfigError):
            SyntheticSpec(truth=TRUTH, noise_sigma=0.0, mode="three-cat")

    def test_quantitative_file(self):
        spec = SyntheticSpec(truth=TRUTH, delays=(1.0, 2.0), mode="quantitative", seed=3)
        text = generate(spec).text
        assert text.splitlines()[0] == "observable,delay,value,sigma"
        pts = read_quantitative_csv(text)
        assert [(p.observable, p.time) for p in pts] == [("p1", 1.0), ("p3", 1.0),
                                                         ("p1", 2.0), ("p3", 2.0)]
        assert all(p.sigma == 0.025 for p in pts)

    def test_seeded_determinism(self):
        spec = SyntheticSpec(truth=TRUTH, delays=nested_delays(16), seed=9)
        assert generate(spec).text == generate(spec).text
        other = SyntheticSpec(truth=TRUTH, delays=nested_delays(16), seed=10)
        assert generate(other).text != generate(spec).text

    def test_nested_datasets(self):
        small = generate(SyntheticSpec(truth=TRUTH, delays=nested_delays(8), seed=4)).text
        big = generate(SyntheticSpec(truth=TRUTH, delays=nested_delays(64), seed=4)).text
        assert set(small.splitlines()[1:]) <= set(big.splitlines()[1:])

    def test_loads_as_observations(self):
        data = generate(SyntheticSpec(truth=TRUTH, delays=nested_delays(8), mode="three-cat"))
        obs, pen, _ = load_constraints(data.text)
        assert not pen and all(o.eps_plus == 0.01 for o in obs)

    @pytest.mark.parametrize("kw", [dict(mode="four-cat"), dict(combine="max"),
                                    dict(noise_sigma=-1), dict(threshold=0.0),
                                    dict(model="decay")])
    def test_invalid_spec(self, kw):
        with pytest.raises(ConfigError):
            SyntheticSpec(truth=TRUTH, **kw)

    def test_bad_quantitative_header(self):
        with pytest.raises(DataError):
            read_quantitative_csv("obs,t,v,s\np1,1,1,1\n")
        with pytest.raises(DataError):
            read_quantitative_csv("observable,delay,value,sigma\np1,1,x,1\n")

    def test_category_frequencies(self):
        # 10^5 datasets at one delay against the analytic category probabilities (eps = 0)
        spec = SyntheticSpec(truth=TRUTH, delays=(6.0,), mode="three-cat", threshold=0.04)
        traj = BiphasicToyModel().simulate(spec.truth_theta(), spec.protocol())
        mean = float(traj["p1"][0] - traj["p3"][0])
        sd = spec.noise_sigma * math.sqrt(2)  # independent draws add in quadrature
        n = 10**5
        diffs = np.empty(n)
        for s in range(n):
            spec.seed = s
            a, b = noisy_responses(spec)
            diffs[s] = a[0] - b[0]
        cats = categorize(diffs, 0.04)
        p_low = stats.norm.cdf(-0.04, mean, sd)
        p_up = stats.norm.sf(0.04, mean, sd)
        for code, p in ((LOWER, p_low), (MIDDLE, 1 - p_low - p_up), (UPPER, p_up)):
            freq = np.mean(cats == code)
            assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / n)


class TestSamplingModels:
    def test_report_extremes(self):
        rng = np.random.default_rng(0)
        assert report_sampling_model(-100, 1, 0, 0, 0, 1000, rng).all()
        r = report_sampling_model(100, 1, 0, 0.2, 0.1, 10**5, rng)
        assert abs(r.mean() - 0.2) < 0.005

    def test_three_category_forced(self):
        rng = np.random.default_rng(1)
        codes = three_category_reports(100.0, 5.0, 85.0, 115.0, 0.03, 10**5, rng)
        freq = np.bincount(codes, minlength=3) / codes.size
        assert freq[LOWER] == pytest.approx(0.03, abs=0.002)
        assert freq[UPPER] == pytest.approx(0.03, abs=0.002)
        with pytest.raises(ValueError):
            three_category_reports(0, 1, -1, 1, 0.4, 10, rng)
