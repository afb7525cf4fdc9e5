import pytest

from kpakit.corpus import (
    Argument,
    KeyPoint,
    LabeledPair,
    CorpusError,
    Dataset,
    MatchLabel,
    Split,
    Stance,
    dataset_stats,
    load_dataset,
    load_arguments,
    save_dataset,
    split_by_topics,
    validate_dataset,
)

from synthdata import toy_dataset


def write_toy(tmp_path):
    data = toy_dataset()
    paths = (tmp_path / "args.csv", tmp_path / "kps.csv", tmp_path / "labels.csv")
    save_dataset(data, *paths)
    return data, paths


def test_round_trip_is_identity(tmp_path):
    data, paths = write_toy(tmp_path)
    loaded = load_dataset(*paths)
    assert loaded == data


def test_round_trip_without_quality(tmp_path):
    data = toy_dataset()
    bare = Dataset(
        arguments=tuple(a.__class__(a.id, a.text, a.topic, a.stance) for a in data.arguments),
        key_points=data.key_points,
        pairs=data.pairs,
    )
    paths = (tmp_path / "a.csv", tmp_path / "k.csv", tmp_path / "l.csv")
    save_dataset(bare, *paths)
    header = paths[0].read_text(encoding="utf-8").splitlines()[0]
    assert "quality" not in header
    assert load_dataset(*paths) == bare


def test_stance_parsing():
    assert Stance.parse("1", "") is Stance.PRO
    assert Stance.parse("-1", "") is Stance.CON
    with pytest.raises(CorpusError):
        Stance.parse("2", "somewhere: ")


def test_loader_rejects_duplicate_argument_id(tmp_path):
    path = tmp_path / "args.csv"
    path.write_text(
        "arg_id,argument,topic,stance\n"
        "a1,text one,t,1\n"
        "a1,text two,t,1\n",
        encoding="utf-8",
    )
    with pytest.raises(CorpusError, match=r"args\.csv:3.*duplicate"):
        load_arguments(path)


def test_loader_rejects_bad_quality(tmp_path):
    path = tmp_path / "args.csv"
    path.write_text(
        "arg_id,argument,topic,stance,quality\n"
        "a1,some text,t,1,1.5\n",
        encoding="utf-8",
    )
    with pytest.raises(CorpusError, match="quality"):
        load_arguments(path)


def test_loader_rejects_missing_columns(tmp_path):
    path = tmp_path / "args.csv"
    path.write_text("arg_id,argument\n a1,x\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="column"):
        load_arguments(path)


def test_label_for_unknown_argument_rejected(tmp_path):
    data, (args_path, kps_path, labels_path) = write_toy(tmp_path)
    labels_path.write_text(
        "arg_id,key_point_id,label\nmissing,k1,1\n", encoding="utf-8"
    )
    with pytest.raises(CorpusError, match="missing"):
        load_dataset(args_path, kps_path, labels_path)


def test_cross_topic_pair_rejected():
    data = toy_dataset()
    bad = Dataset(
        arguments=data.arguments,
        key_points=data.key_points,
        pairs=data.pairs + (data.pairs[0].__class__("a1", "k4", MatchLabel.MATCH),),
    )
    with pytest.raises(CorpusError, match="topic"):
        validate_dataset(bad)


def test_cross_stance_pair_rejected():
    data = toy_dataset()
    bad = Dataset(
        arguments=data.arguments,
        key_points=data.key_points,
        pairs=data.pairs + (data.pairs[0].__class__("a1", "k2", MatchLabel.MATCH),),
    )
    with pytest.raises(CorpusError, match="stance"):
        validate_dataset(bad)


def test_ambiguous_column_round_trip(tmp_path):
    args = tmp_path / "a.csv"
    kps = tmp_path / "k.csv"
    labels = tmp_path / "l.csv"
    args.write_text("arg_id,argument,topic,stance\na1,some argument text,t,1\n", encoding="utf-8")
    kps.write_text("key_point_id,key_point,topic,stance\nk1,the key point,t,1\n", encoding="utf-8")
    labels.write_text("arg_id,key_point_id,label,ambiguous\na1,k1,0,1\n", encoding="utf-8")
    data = load_dataset(args, kps, labels)
    assert data.pairs[0].label is MatchLabel.AMBIGUOUS
    out = (tmp_path / "a2.csv", tmp_path / "k2.csv", tmp_path / "l2.csv")
    save_dataset(data, *out)
    assert load_dataset(*out) == data


def test_dataset_stats_buckets():
    """Hand-counted buckets for the toy corpus.

    a1, a2, a5, a8 match exactly one key point; a3 and a4 match one each
    (their second pair is a NO_MATCH); a7 matches one; a6 matches none.
    """
    stats = dataset_stats(toy_dataset())
    assert stats.topic_count == 2
    assert stats.argument_count == 8
    assert stats.key_point_count == 6
    assert stats.pair_count == 12
    assert stats.matching_pair_count == 7
    assert stats.match_rate == pytest.approx(7 / 12)
    assert (stats.unmatched, stats.single, stats.multiple, stats.ambiguous) == (1, 7, 0, 0)
    assert stats.unmatched + stats.single + stats.multiple + stats.ambiguous == stats.argument_count


def test_dataset_stats_multiple_and_ambiguous_buckets():
    args = (
        Argument("a1", "first text", "t", Stance.PRO),
        Argument("a2", "second text", "t", Stance.PRO),
        Argument("a3", "third text", "t", Stance.PRO),
    )
    kps = (
        KeyPoint("k1", "point one", "t", Stance.PRO),
        KeyPoint("k2", "point two", "t", Stance.PRO),
    )
    pairs = (
        LabeledPair("a1", "k1", MatchLabel.MATCH),
        LabeledPair("a1", "k2", MatchLabel.MATCH),
        LabeledPair("a2", "k1", MatchLabel.AMBIGUOUS),
        LabeledPair("a3", "k1", MatchLabel.NO_MATCH),
    )
    stats = dataset_stats(Dataset(args, kps, pairs))
    assert (stats.unmatched, stats.single, stats.multiple, stats.ambiguous) == (1, 0, 1, 1)


def test_dataset_stats_empty():
    stats = dataset_stats(Dataset(arguments=(), key_points=(), pairs=()))
    assert stats.argument_count == 0
    assert stats.match_rate == 0.0


def test_split_by_topics_partitions():
    data = toy_dataset()
    train, val, test = split_by_topics(data, ["Homeschooling should be banned"], [], ["Students should wear uniforms"])
    assert {a.topic for a in train.arguments} == {"Homeschooling should be banned"}
    assert {a.topic for a in test.arguments} == {"Students should wear uniforms"}
    assert val.arguments == ()
    assert train.split is Split.TRAIN and test.split is Split.TEST
    assert len(train.arguments) + len(val.arguments) + len(test.arguments) == len(data.arguments)
    assert len(train.pairs) + len(val.pairs) + len(test.pairs) == len(data.pairs)


def test_split_by_topics_rejects_overlap_and_uncovered():
    data = toy_dataset()
    with pytest.raises(CorpusError, match="assigned to both"):
        split_by_topics(data, ["Homeschooling should be banned"], ["Homeschooling should be banned"], [])
    with pytest.raises(CorpusError, match="not assigned"):
        split_by_topics(data, ["Homeschooling should be banned"], [], [])


def test_groups_sorted_and_complete():
    groups = toy_dataset().groups()
    assert groups == [
        ("Homeschooling should be banned", Stance.CON),
        ("Homeschooling should be banned", Stance.PRO),
        ("Students should wear uniforms", Stance.CON),
        ("Students should wear uniforms", Stance.PRO),
    ]
