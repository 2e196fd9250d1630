"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute.
"""

import csv
import random
import time
from collections import Counter

import numpy as np
import pytest

from sensewalk.adjacency import build_network
from sensewalk.attgraph import GraphConfig, build_training_graph, insert_test
from sensewalk.classify import (
    HighLevelConfig,
    MembershipVector,
    bayes_predict,
    bayes_train,
    c45_predict,
    c45_train,
    candidate_thresholds,
    entropy,
    high_level_predict,
    hybrid_predict,
    information_gain,
    knn_predict,
    train_low_level,
)
from sensewalk.cli import main as cli_main
from sensewalk.evaluate import (
    PipelineConfig,
    _fold_records,
    make_fold_plan,
    make_synthetic_corpus,
    run_word_experiments,
    toy_experiment,
)
from sensewalk.features import Dataset, Instance, feature_stats, standardize
from sensewalk.tourist import InsertionTrial, walk

from walk_oracle import oracle_neighbors, oracle_walk, random_geometric_graph
from test_tourist import component_from_points


def report(number, description, ok):
    print(f"\nACCEPTANCE {number:2d} | {description}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {number} failed: {description}"


def seeded_graphs(count, max_n=12, master_seed=20240):
    rng = random.Random(master_seed)
    for _ in range(count):
        n = rng.randint(2, max_n)
        yield random_geometric_graph(rng, n)


def test_criterion_1_walk_oracle_equivalence():
    started = time.time()
    mismatches = 0
    checked = 0
    for positions, edges in seeded_graphs(200):
        comp = component_from_points(positions, edges)
        adj = oracle_neighbors(positions, edges)
        n = len(positions)
        for start in positions:
            for mu in range(0, n + 1):
                got = walk(comp, start, mu)
                want = oracle_walk(positions, adj, start, mu)
                checked += 1
                if (got.transient, got.cycle) != want:
                    mismatches += 1
    elapsed = time.time() - started
    ok = mismatches == 0 and elapsed < 60.0
    report(1, f"walk matches brute-force oracle on {checked} cases in {elapsed:.1f}s", ok)


def test_criterion_2_mu_zero_degeneracy():
    bad = 0
    for positions, edges in seeded_graphs(200):
        comp = component_from_points(positions, edges)
        for start in positions:
            result = walk(comp, start, 0)
            if (result.transient, result.cycle) != (0, 1):
                bad += 1
    report(2, "mu=0 walks give t=0, c=1 from every start of every graph", bad == 0)


def _overlapping_dataset(n=500, seed=77):
    rng = np.random.default_rng(seed)
    sizes = (170, 170, 160)
    centers = ((0.0, 0.0), (2.5, 0.0), (1.2, 2.2))
    X, labels = [], []
    for class_id, (size, center) in enumerate(zip(sizes, centers), start=1):
        X.append(rng.normal(center, 1.0, size=(size, 2)))
        labels += [class_id] * size
    return Dataset(list(range(n)), np.vstack(X), labels, ["x", "y"])


def test_criterion_3_lambda_zero_bit_identity():
    ds = _overlapping_dataset()
    plan = make_fold_plan(ds.labels, 5, seed=3)
    config = PipelineConfig(high=HighLevelConfig(mu_critical=4))
    records = _fold_records(ds, ("knn", "bayes", "c45"), config, plan, need_high=True)
    # direct low-level predictions, computed independently of the hybrid path
    direct = {name: {} for name in ("knn", "bayes", "c45")}
    for train_idx, test_idx in plan.folds:
        train, test = ds.subset(train_idx), ds.subset(test_idx)
        stats = feature_stats(train)
        train_z, test_z = standardize(train, stats), standardize(test, stats)
        models = {name: train_low_level(name, train_z) for name in direct}
        for row, orig in enumerate(test_idx):
            for name in direct:
                direct[name][orig] = models[name](test_z.X[row])
    identical = True
    for r in records:
        for name in direct:
            membership, label = hybrid_predict(r.lows[name], r.high, 0.0)
            want = direct[name][r.index]
            if membership.scores != want.scores or label != want.argmax():
                identical = False
    report(3, "lambda=0 hybrid output is bit-identical to each low-level "
              f"classifier over {len(records)} instances x 3 classifiers", identical)


def test_criterion_4_normalization_suite():
    rng = np.random.default_rng(123)
    worst = 0.0
    insertions = 0
    config = HighLevelConfig(mu_critical=4)
    while insertions < 1000:
        seed = int(rng.integers(2**31))
        data_rng = np.random.default_rng(seed)
        centers = data_rng.uniform(-3, 3, size=(3, 2))
        X, labels = [], []
        for class_id, center in enumerate(centers, start=1):
            X.append(data_rng.normal(center, 0.8, size=(12, 2)))
            labels += [class_id] * 12
        ds = Dataset(list(range(36)), np.vstack(X), labels, ["x", "y"])
        z = standardize(ds)
        graphs = build_training_graph(z, GraphConfig(kappa=3))
        for _ in range(50):
            base = int(data_rng.integers(36))
            probe = z.X[base] + data_rng.normal(0, 0.3, size=2)
            views = insert_test(probe, graphs)
            if not any(v.linked for v in views):
                continue
            probe_instance = Instance(1000 + insertions, probe, None)
            trial = InsertionTrial(probe_instance.id, graphs, views)
            mu = int(data_rng.integers(config.mu_critical + 1))
            dt, dc = trial.variations(mu)
            high = high_level_predict(probe_instance, graphs, config, views)
            lam = float(data_rng.random())
            raw = data_rng.random(3)
            low = MembershipVector.normalized(dict(zip((1, 2, 3), raw)))
            membership, _ = hybrid_predict(low, high, lam)
            for total in (sum(dt.values()), sum(dc.values()),
                          sum(high.scores.values()), sum(membership.scores.values())):
                worst = max(worst, abs(total - 1.0))
            insertions += 1
            if insertions >= 1000:
                break
    report(4, f"delta/H/M sums stay within {worst:.2e} of 1 over 1000 insertions",
           worst <= 1e-9)


def test_criterion_5_affinity_of_lambda():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        low = MembershipVector.normalized(dict(zip((1, 2, 3), rng.random(3))))
        high = MembershipVector.normalized(dict(zip((1, 2, 3), rng.random(3))))
        quarter, _ = hybrid_predict(low, high, 0.25)
        zero, _ = hybrid_predict(low, high, 0.0)
        half, _ = hybrid_predict(low, high, 0.5)
        for c in (1, 2, 3):
            blend = 0.5 * zero.scores[c] + 0.5 * half.scores[c]
            worst = max(worst, abs(quarter.scores[c] - blend))
    report(5, f"M(0.25) equals the 0/0.5 average within {worst:.2e}", worst <= 1e-12)


POEM_LEMMAS = (
    "middle road stone stone middle road stone middle road stone never "
    "forget event lifetime fatigue retina never forget middle road stone "
    "stone middle road middle road stone"
).split()


def test_criterion_6_reference_poem_network():
    net = build_network({"poem": POEM_LEMMAS})
    oracle = Counter(zip(POEM_LEMMAS, POEM_LEMMAS[1:]))
    named = {
        ("middle", "road"): 6,
        ("road", "stone"): 5,
        ("stone", "stone"): 2,
        ("stone", "middle"): 3,
        ("road", "middle"): 1,
        ("never", "forget"): 2,
    }
    ok = net.weights == dict(oracle)
    for pair, weight in named.items():
        ok = ok and net.weights.get(pair) == weight
    ok = ok and net.total_weight() == len(POEM_LEMMAS) - 1
    report(6, "reference poem network reproduces exact bigram weights", ok)


def test_criterion_7_toy_boundary_shift():
    result = toy_experiment()
    miss_at_zero = result.predictions_at[0.0] == result.unstructured_class
    flips = result.flip_lambda is not None and result.flip_lambda <= 0.8
    ok = miss_at_zero and flips and result.monotone_after_flip
    report(7, "toy probe: wrong at lambda=0, structured by "
              f"lambda={result.flip_lambda}, monotone after", ok)


def test_criterion_8_synthetic_wsd_end_to_end():
    started = time.time()
    docs, annotations = make_synthetic_corpus(n_per_sense=110, seed=7)
    streams = {doc_id: d.content_lemmas() for doc_id, d in docs.items()}
    ok = True
    details = []
    for paradigm in ("semantic", "topological"):
        reports = run_word_experiments(streams, annotations, paradigm=paradigm,
                                       window=5, n_folds=10, seed=0)
        for rep in reports:
            base = rep.accuracy_at(0.0)
            best = rep.best_accuracy
            ok = ok and best >= base and best >= 0.9
            details.append(f"{paradigm}/{rep.low_level}={best:.2f}")
    elapsed = time.time() - started
    ok = ok and elapsed < 300.0
    report(8, f"synthetic corpus best-lambda accuracies ({', '.join(details)}) "
              f"in {elapsed:.0f}s", ok)


def test_criterion_9_walk_curve_steady_states(tmp_path):
    xs, ys = np.meshgrid(np.arange(4), np.arange(4))
    lattice = np.column_stack([xs.ravel(), ys.ravel()]) * 1.0
    cloud = np.random.default_rng(1).uniform(10, 16, size=(16, 2))
    ds = Dataset(list(range(32)), np.vstack([lattice, cloud]),
                 [1] * 16 + [2] * 16, ["x", "y"])
    features = tmp_path / "features.csv"
    ds.to_csv(features)
    out = tmp_path / "curves.csv"
    code = cli_main(["walk-curves", "--features", str(features), "--mu-max", "18",
                     "--epsilon", "1.4", "--kappa", "3", "--no-standardize",
                     "--out", str(out)])
    onsets = {}
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        onsets[int(row["class"])] = int(row["steady_state_mu"])
    ok = code == 0 and len(rows) == 2 * 19 and onsets[1] != onsets[2]
    report(9, f"walk-curve steady states differ by structure "
              f"(lattice mu={onsets.get(1)}, cloud mu={onsets.get(2)})", ok)


def test_criterion_10_classifier_unit_suite():
    rng = np.random.default_rng(42)
    gain_ok = True
    for _ in range(30):
        x = rng.normal(size=15)
        y = list(rng.integers(1, 4, size=15))
        h = entropy(y)
        for thr in candidate_thresholds(x):
            gain = information_gain(y, x, thr)
            gain_ok = gain_ok and -1e-12 <= gain <= h + 1e-12

    # symmetric one-dimensional classes put the decision boundary at 0
    train = Dataset(list(range(6)),
                    np.array([[-1.5], [-1.0], [-0.5], [0.5], [1.0], [1.5]]),
                    [1, 1, 1, 2, 2, 2], ["f"])
    model = bayes_train(train)

    def diff(x):
        m = bayes_predict(model, np.array([x]))
        return m.scores[2] - m.scores[1]

    lo, hi = -0.4, 0.4
    for _ in range(60):
        mid = (lo + hi) / 2
        if diff(mid) < 0:
            lo = mid
        else:
            hi = mid
    boundary = (lo + hi) / 2
    bayes_ok = abs(boundary) <= 1e-3

    X = rng.normal(size=(60, 3))
    labels = list(rng.integers(1, 4, size=60))
    leave_in = Dataset(list(range(60)), X, labels, ["a", "b", "c"])
    knn_ok = all(
        knn_predict(leave_in, X[i], k=1).argmax() == labels[i] for i in range(60)
    )
    tree = c45_train(leave_in, min_size=1)
    tree_ok = all(
        c45_predict(tree, X[i]).argmax() == labels[i] for i in range(60)
    )

    ok = gain_ok and bayes_ok and knn_ok and tree_ok
    report(10, f"gain bounds, Bayes midpoint ({boundary:+.1e}), 1-NN and tree "
               f"leave-in accuracy", ok)
