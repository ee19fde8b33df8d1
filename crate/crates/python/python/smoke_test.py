"""Quick end-to-end check of the compiled module."""

import json
import math

import qrf_lab_py as q


def main():
    s3 = q.Group("symmetric", 3)
    assert s3.order == 6
    assert sorted(s3.irrep_dims) == [1, 1, 2]
    dims = s3.irrep_dims
    assert s3.effective_dimension(dims, dims, dims) == 6
    std = dims.index(2)
    assert s3.fusion(std, std, std) == 1

    assert abs(q.renyi_entropy([0.5, 0.5], 2.0) - math.log(2)) < 1e-12
    assert abs(q.renyi_entropy([0.25] * 4, 1.0, base="2") - 2.0) < 1e-12

    names = [name for name, _ in q.presets()]
    assert "z3-tradeoff-violation" in names

    exp = q.Experiment.from_preset("z2-ideal-pair")
    exp.trials = 5
    report = exp.run()
    assert report.passed, report.summary()
    again = exp.run()
    assert report.to_json() == again.to_json()
    assert json.loads(report.to_json())["provenance"]["seed"] == exp.seed

    witness = q.Experiment.from_preset("z3-tradeoff-violation").run()
    attempt, frames, gap = witness.witness()
    replay = q.Report.from_json(witness.to_json()).reverify_witness()
    assert gap > 1e-6 and abs(replay - gap) < 1e-12

    try:
        q.Experiment.from_toml("bogus = 1\n")
    except ValueError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("unknown key accepted")

    print("smoke test passed:", ", ".join(f"{k}={v[1]:.1e}" for k, v in report.summary().items()))


if __name__ == "__main__":
    main()
