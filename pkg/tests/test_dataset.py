import numpy as np
import pytest

from hybridfi.data import (
    Dataset,
    ReconstructionSpec,
    SplitSpec,
    apply_reconstruction,
    constituent_stats,
    encode_interaction,
    load_csv,
    remove_features,
    split,
    write_csv,
)
from hybridfi.errors import ConfigError, DatasetError

from conftest import random_dataset


def _write(tmp_path, text: str):
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_minimal(tmp_path):
    d = load_csv(_write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n"), "y")
    assert d.feature_names == ["a", "b"]
    assert d.n_rows == 3
    np.testing.assert_array_equal(d.target, [3.0, 6.0, 9.0])
    np.testing.assert_array_equal(d.column("b"), [2.0, 5.0, 8.0])


def test_load_csv_missing_target(tmp_path):
    with pytest.raises(DatasetError, match="'y'"):
        load_csv(_write(tmp_path, "a,b\n1,2\n"), "y")


def test_load_csv_rejects_nan_with_location(tmp_path):
    with pytest.raises(DatasetError, match=r"line 3, column 'b'"):
        load_csv(_write(tmp_path, "a,b,y\n1,2,3\n4,NaN,6\n"), "y")


def test_load_csv_rejects_text_and_duplicates(tmp_path):
    with pytest.raises(DatasetError, match="non-numeric"):
        load_csv(_write(tmp_path, "a,b,y\n1,x,3\n"), "y")
    with pytest.raises(DatasetError, match="duplicate"):
        load_csv(_write(tmp_path, "a,a,y\n1,2,3\n"), "y")


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    d = Dataset.from_arrays(rng.normal(size=(25, 3)) * 1e3, rng.normal(size=25) / 7.0, ["p", "q", "r"], "t")
    path = tmp_path / "round.csv"
    write_csv(d, path)
    back = load_csv(path, "t")
    assert back.feature_names == d.feature_names
    np.testing.assert_array_equal(back.values, d.values)
    np.testing.assert_array_equal(back.target, d.target)


def test_dataset_is_read_only():
    d = random_dataset(5, 2)
    with pytest.raises(ValueError):
        d.values[0, 0] = 1.0


def test_split_partition_and_determinism():
    d = random_dataset(10, 2)
    s = SplitSpec(train_count=7, seed=1)
    train, test = split(d, s)
    again, _ = split(d, s)
    assert train.n_rows == 7 and test.n_rows == 3
    np.testing.assert_array_equal(train.values, again.values)
    assert train.features == d.features


def test_split_rejects_full_train():
    d = random_dataset(10, 2)
    with pytest.raises(DatasetError):
        split(d, SplitSpec(train_count=10, seed=0))
    with pytest.raises(ConfigError):
        SplitSpec(train_count=0)


def test_split_union_is_the_original_rows():
    values = np.arange(40, dtype=np.float64).reshape(20, 2)
    d = Dataset.from_arrays(values, np.arange(20.0), ["a", "b"])
    for seed in range(100):
        train, test = split(d, SplitSpec(train_count=13, seed=seed))
        rows = np.concatenate([train.target, test.target])
        assert sorted(rows.tolist()) == list(range(20))


def test_split_from_fraction():
    assert SplitSpec.from_fraction(100, 0.75).train_count == 75
    with pytest.raises(ConfigError):
        SplitSpec.from_fraction(100, 1.0)


def test_encode_interaction_identity_and_hand_product():
    d = Dataset.from_arrays(np.array([[1.0, 3.0, 1.0], [2.0, 4.0, 1.0]]), [0.0, 1.0], ["a", "b", "ones"])
    identity = encode_interaction(d, ["a", "ones"])
    np.testing.assert_array_equal(identity.column("a*ones"), [1.0, 2.0])
    product = encode_interaction(d, ["b", "a"])
    np.testing.assert_array_equal(product.column("a*b"), [3.0, 8.0])
    descriptor = product.descriptor("a*b")
    assert descriptor.is_interaction and descriptor.constituents == ("a", "b")
    np.testing.assert_array_equal(product.values[:, :3], d.values)


def test_encode_interaction_matches_row_loop():
    d = random_dataset(50, 3, seed=3)
    out = encode_interaction(d, ["x1", "x2", "x3"])
    expected = [row[0] * row[1] * row[2] for row in d.values]
    np.testing.assert_allclose(out.column("x1*x2*x3"), expected, rtol=0, atol=0)


def test_encode_interaction_order_insensitive():
    d = random_dataset(30, 3, seed=4)
    a = encode_interaction(d, ["x3", "x1", "x2"])
    b = encode_interaction(d, ["x2", "x3", "x1"])
    assert a.feature_names == b.feature_names
    np.testing.assert_array_equal(a.values, b.values)


def test_encode_interaction_errors():
    d = random_dataset(5, 2)
    with pytest.raises(DatasetError):
        encode_interaction(d, ["x1"])
    with pytest.raises(DatasetError):
        encode_interaction(d, ["x1", "zz"])


def test_encode_interaction_standardized():
    d = random_dataset(40, 2, seed=5)
    out = encode_interaction(d, ["x1", "x2"], standardize=True)
    z = [(c - c.mean()) / c.std() for c in (d.column("x1"), d.column("x2"))]
    np.testing.assert_allclose(out.column("x1*x2"), z[0] * z[1])


def test_remove_features():
    d = random_dataset(6, 3)
    assert remove_features(d, []) is d
    out = remove_features(d, ["x2"])
    assert out.feature_names == ["x1", "x3"]
    np.testing.assert_array_equal(out.values, d.values[:, [0, 2]])
    with pytest.raises(DatasetError):
        remove_features(d, ["x1", "x2", "x3"])
    with pytest.raises(DatasetError):
        remove_features(d, ["nope"])


def test_remove_and_encode_commute_on_disjoint_names():
    d = random_dataset(20, 4, seed=2)
    a = remove_features(encode_interaction(d, ["x1", "x2"]), ["x4"])
    b = encode_interaction(remove_features(d, ["x4"]), ["x1", "x2"])
    assert sorted(a.feature_names) == sorted(b.feature_names)
    np.testing.assert_array_equal(a.values, b.values[:, [b.index_of(n) for n in a.feature_names]])


def test_apply_reconstruction_uses_original_raw_columns():
    d = random_dataset(15, 4, seed=9)
    recipe = ReconstructionSpec(removed_raw=("x1",), interactions=(("x1", "x3"),), removed_stage2=("x2",))
    out = apply_reconstruction(d, recipe)
    assert out.feature_names == ["x3", "x4", "x1*x3"]
    np.testing.assert_array_equal(out.column("x1*x3"), d.column("x1") * d.column("x3"))
    assert ReconstructionSpec.from_dict(recipe.to_dict()) == recipe


def test_apply_reconstruction_deduplicates_constituent_sets():
    d = random_dataset(12, 3, seed=4)
    recipe = ReconstructionSpec(interactions=(("x1", "x2"), ("x2", "x1"), ("x1", "x3")))
    out = apply_reconstruction(d, recipe)
    assert out.feature_names == ["x1", "x2", "x3", "x1*x2", "x1*x3"]


def test_apply_reconstruction_rejects_name_collisions():
    X = np.random.default_rng(3).normal(size=(10, 2))
    d = Dataset.from_arrays(np.column_stack([X, X[:, 0] + 1.0]), X[:, 1], ["a", "b", "a*b"])
    with pytest.raises(DatasetError, match="collides"):
        apply_reconstruction(d, ReconstructionSpec(interactions=(("a", "b"),)))
    out = apply_reconstruction(d, ReconstructionSpec(removed_raw=("a*b",), interactions=(("a", "b"),)))
    np.testing.assert_array_equal(out.column("a*b"), X[:, 0] * X[:, 1])


def test_standardized_interactions_use_recorded_stats():
    d = random_dataset(30, 3, seed=6)
    train, _ = split(d, SplitSpec(train_count=20, seed=1))
    stats = constituent_stats(train, [("x3", "x1")])
    assert [s[0] for s in stats] == ["x1", "x3"]
    recipe = ReconstructionSpec(interactions=(("x1", "x3"),), standardize_interactions=True, interaction_stats=stats)
    out = apply_reconstruction(d, recipe)
    z1 = (d.column("x1") - train.column("x1").mean()) / train.column("x1").std()
    z3 = (d.column("x3") - train.column("x3").mean()) / train.column("x3").std()
    np.testing.assert_allclose(out.column("x1*x3"), z1 * z3)
    assert ReconstructionSpec.from_dict(recipe.to_dict()) == recipe


def test_negative_split_seed_is_rejected():
    with pytest.raises(ConfigError):
        SplitSpec(train_count=7, seed=-1)
