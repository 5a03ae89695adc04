"""Generators, the telemonitoring loader, sealing, and splits."""

import numpy as np
import pytest

from conftest import TELE_HEADER, write_telemonitoring_csv
from fedcsa.data import (
    DIM,
    LabeledDataset,
    gen_case1,
    gen_case2,
    gen_target_pool,
    load_parkinsons,
    seal,
    standardize_by_sources,
    train_test_split,
)
from fedcsa.errors import MalformedCsv, TooFewRows


def test_case1_shapes_and_names():
    target, sources = gen_case1(20, 30, 20, seed=0)
    assert target.features.shape == (20, DIM)
    assert [s.n for s in sources] == [30, 20]
    assert len({target.name, sources[0].name, sources[1].name}) == 3


def test_case1_moments_at_scale():
    _, sources = gen_case1(5, 100_000, 100_000, seed=1)
    s1, s2 = sources
    assert np.all(np.abs(s1.features.mean(axis=0) - 1.0) < 0.05)
    assert np.all(np.abs(s1.features.var(axis=0) - 3.0) < 0.15)
    assert np.all(np.abs(s2.features.mean(axis=0) - 5.0) < 0.05)
    assert np.all(np.abs(s2.features.var(axis=0) - 0.5) < 0.05)


def test_case1_label_law():
    target, _ = gen_case1(100_000, 5, 5, seed=2)
    noise = target.outputs - target.features.mean(axis=1)
    assert abs(noise.mean()) < 0.02
    assert abs(noise.var() - 1.0) < 0.05


def test_case1_deterministic():
    a_target, a_sources = gen_case1(10, 15, 12, seed=33)
    b_target, b_sources = gen_case1(10, 15, 12, seed=33)
    assert np.array_equal(a_target.features, b_target.features)
    assert np.array_equal(a_sources[1].outputs, b_sources[1].outputs)
    c_target, _ = gen_case1(10, 15, 12, seed=34)
    assert not np.array_equal(a_target.features, c_target.features)


def test_case1_rejects_empty_sizes():
    with pytest.raises(ValueError):
        gen_case1(0, 10, 10, seed=0)


def test_case2_fixed_sizes():
    for c in (1.0, 2.5, 5.0):
        target, sources = gen_case2(c, seed=0)
        assert target.n == 20
        assert [s.n for s in sources] == [50, 40]


def test_case2_shift_moves_sources():
    # crude location check at the generator's own small sizes: averaging
    # over coordinates and rows gives ~0.045 standard error
    _, (s1, s2) = gen_case2(4.0, seed=5)
    assert abs(s1.features.mean() - 4.0) < 0.3
    assert abs(s2.features.mean() - 5.0) < 0.3


def test_case2_deterministic():
    a = gen_case2(1.5, seed=7)
    b = gen_case2(1.5, seed=7)
    assert np.array_equal(a[0].features, b[0].features)


def test_target_pool():
    pool = gen_target_pool(50_000, seed=9)
    assert pool.features.shape == (50_000, DIM)
    assert np.all(np.abs(pool.features.mean(axis=0)) < 0.05)
    assert np.array_equal(
        pool.features, gen_target_pool(50_000, seed=9).features
    )


def test_sealed_outputs_guard():
    ds = LabeledDataset(np.ones((3, 2)), np.array([1.0, 2.0, 3.0]), name="t")
    sealed = seal(ds)
    with pytest.raises(TypeError):
        np.asarray(sealed.outputs)
    with pytest.raises(TypeError):
        len(sealed.outputs)
    with pytest.raises(TypeError):
        iter(sealed.outputs)
    with pytest.raises(TypeError):
        sealed.outputs[0]
    np.testing.assert_array_equal(sealed.outputs.reveal_for_evaluation(), ds.outputs)
    assert np.array_equal(sealed.features, ds.features)


def test_loader_groups_by_subject(tele_csv):
    datasets = load_parkinsons(str(tele_csv))
    assert len(datasets) == 5
    assert [d.name for d in datasets] == [f"subject-{i}" for i in range(1, 6)]
    assert sum(d.n for d in datasets) == 120
    for d in datasets:
        assert d.features.shape == (24, 16)


def test_loader_reads_target_column(tmp_path):
    path = tmp_path / "toy.csv"
    rows = [TELE_HEADER]
    for subject, count in ((1, 3), (2, 2)):
        for i in range(count):
            rows.append(",".join(str(v) for v in [subject, 60, 1, i, 10.0, 21.5 + i] + [0.1 * j for j in range(16)]))
    path.write_text("\n".join(rows) + "\n")
    datasets = load_parkinsons(str(path))
    assert [d.n for d in datasets] == [3, 2]
    np.testing.assert_allclose(datasets[0].outputs, [21.5, 22.5, 23.5])


def test_loader_malformed_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(MalformedCsv, match="empty"):
        load_parkinsons(str(empty))

    bad_header = tmp_path / "header.csv"
    bad_header.write_text("a,b,c\n")
    with pytest.raises(MalformedCsv, match="expected 22"):
        load_parkinsons(str(bad_header))

    good_row = ",".join(["1"] * 22)
    short_row = tmp_path / "short.csv"
    short_row.write_text("\n".join([TELE_HEADER, good_row, "1,2,3"]) + "\n")
    with pytest.raises(MalformedCsv, match="row 3"):
        load_parkinsons(str(short_row))

    bad_cell = tmp_path / "cell.csv"
    bad_cell.write_text(
        "\n".join([TELE_HEADER, good_row, good_row, good_row.replace("1", "x", 1)]) + "\n"
    )
    with pytest.raises(MalformedCsv, match="row 4"):
        load_parkinsons(str(bad_cell))

    with pytest.raises(FileNotFoundError):
        load_parkinsons(str(tmp_path / "missing.csv"))


def test_standardize_uses_source_statistics_only():
    s1 = LabeledDataset(np.array([[0.0, 10.0], [2.0, 10.0]]), np.zeros(2), "s1")
    s2 = LabeledDataset(np.array([[4.0, 10.0], [6.0, 10.0]]), np.zeros(2), "s2")
    target = LabeledDataset(np.array([[3.0, 12.0]]), np.zeros(1), "t")
    sources, scaled_target = standardize_by_sources([s1, s2], target)

    pooled = np.vstack([s1.features, s2.features])
    np.testing.assert_allclose(
        np.vstack([s.features for s in sources]).mean(axis=0)[0], 0.0, atol=1e-12
    )
    # first column: (3 - 3) / std = 0; second has zero spread and is left unscaled
    expected = (target.features - pooled.mean(axis=0)) / np.array(
        [pooled.std(axis=0)[0], 1.0]
    )
    np.testing.assert_allclose(scaled_target.features, expected)
    np.testing.assert_allclose(scaled_target.features[0, 1], 2.0)


def test_train_test_split_sizes_and_coverage():
    ds = LabeledDataset(np.arange(20).reshape(10, 2), np.arange(10), "d")
    train, test = train_test_split(ds, 0.7, seed=0)
    assert (train.n, test.n) == (7, 3)
    merged = np.vstack([train.features, test.features])
    assert {tuple(r) for r in merged} == {tuple(r) for r in ds.features}
    again = train_test_split(ds, 0.7, seed=0)
    assert np.array_equal(train.features, again[0].features)


def test_train_test_split_validation():
    ds = LabeledDataset(np.zeros((1, 1)), np.zeros(1), "d")
    with pytest.raises(TooFewRows):
        train_test_split(ds, 0.5, seed=0)
    ok = LabeledDataset(np.zeros((4, 1)), np.zeros(4), "d")
    with pytest.raises(ValueError):
        train_test_split(ok, 1.0, seed=0)


def test_fixture_writer_is_deterministic(tmp_path):
    a = write_telemonitoring_csv(tmp_path / "a.csv").read_text()
    b = write_telemonitoring_csv(tmp_path / "b.csv").read_text()
    assert a == b
