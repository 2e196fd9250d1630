"""Low-level classifiers, the walk-based high-level classifier, and their
hybrid combination.

Every prediction is a :class:`MembershipVector`: per-class scores in
[0, 1] summing to one. The hybrid membership is the convex combination

    M(j) = (1 - lam) * L(j) + lam * H(j)

where L comes from a conventional classifier (nearest neighbors, naive
Bayes with Parzen-window likelihoods, or an information-gain decision
tree), H scores how little the test instance perturbs each class
component's tourist-walk statistics, and ``lam`` trades the two off.
At ``lam == 0`` the hybrid reduces exactly to the low-level classifier.

Trained models are immutable; predictions are pure reads and safe to run
concurrently across test instances.
"""

import io
import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .tourist import InsertionTrial, component_stats

log = logging.getLogger(__name__)

LOW_LEVEL_NAMES = ("knn", "bayes", "c45")


@dataclass(frozen=True)
class MembershipVector:
    """Normalized per-class scores."""

    scores: dict

    def argmax(self):
        # deterministic: ties go to the smallest class id
        best = None
        for class_id in sorted(self.scores):
            if best is None or self.scores[class_id] > self.scores[best]:
                best = class_id
        return best

    def as_array(self, class_order):
        return np.array([self.scores[c] for c in class_order])

    @classmethod
    def normalized(cls, raw):
        total = sum(raw.values())
        if total <= 0:
            return cls({c: 1.0 / len(raw) for c in raw})
        return cls({c: v / total for c, v in raw.items()})


@dataclass(frozen=True)
class HighLevelConfig:
    """Weights of the transient/cycle variations and the memory sweep cap."""

    alpha_t: float = 0.5
    alpha_c: float = 0.5
    mu_critical: int = 10

    def __post_init__(self):
        if not (0 <= self.alpha_t <= 1 and 0 <= self.alpha_c <= 1):
            raise ValueError("alpha_t and alpha_c must lie in [0, 1]")
        if abs(self.alpha_t + self.alpha_c - 1.0) > 1e-9:
            raise ValueError("alpha_t + alpha_c must equal 1")
        if self.mu_critical < 0:
            raise ValueError("mu_critical must be >= 0")


@dataclass(frozen=True)
class HybridConfig:
    """Compliance weight and the low-level classifier behind the hybrid."""

    lam: float = 0.5
    low_level: str = "knn"

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise ValueError("lam must lie in [0, 1]")
        if self.low_level not in LOW_LEVEL_NAMES:
            raise ValueError(f"low_level must be one of {LOW_LEVEL_NAMES}")


# ---------------------------------------------------------------------------
# k-nearest neighbors


def knn_predict(train_dataset, x, k=1):
    """Vote fractions among the k nearest training instances (Euclidean)."""
    x = np.asarray(getattr(x, "features", x), dtype=float)
    d = np.sqrt(((train_dataset.X - x) ** 2).sum(axis=1))
    order = sorted(range(len(d)), key=lambda i: (d[i], train_dataset.ids[i]))
    votes = Counter(train_dataset.labels[i] for i in order[:k])
    classes = train_dataset.classes()
    return MembershipVector({c: votes.get(c, 0) / k for c in classes})


# ---------------------------------------------------------------------------
# naive Bayes with Parzen-window likelihoods

_BANDWIDTH_FLOOR = 1e-6


@dataclass(frozen=True)
class BayesModel:
    classes: tuple
    log_priors: dict
    values: dict  # class -> (n, d) training array
    bandwidths: dict  # class -> per-feature bandwidth array
    feature_names: tuple = field(default=())


def _silverman(values):
    n = len(values)
    sigma = values.std(axis=0)
    return 1.06 * sigma * n ** (-1 / 5)


def bayes_train(train_dataset, bandwidth="silverman"):
    """Fit priors and per-class per-feature Gaussian kernel densities.

    ``bandwidth`` may be the name of the plug-in rule, a constant, or a
    callable mapping a class's (n, d) array to per-feature bandwidths.
    Bandwidths are floored so single-point classes stay well-defined.
    """
    classes = tuple(train_dataset.classes())
    n_total = sum(train_dataset.class_counts.values())
    log_priors, values, bandwidths = {}, {}, {}
    for c in classes:
        rows = [i for i, lab in enumerate(train_dataset.labels) if lab == c]
        V = train_dataset.X[rows]
        if bandwidth == "silverman":
            h = _silverman(V)
        elif callable(bandwidth):
            h = np.asarray(bandwidth(V), dtype=float)
        else:
            h = np.full(V.shape[1], float(bandwidth))
        values[c] = V
        bandwidths[c] = np.maximum(h, _BANDWIDTH_FLOOR)
        log_priors[c] = math.log(len(rows) / n_total)
    return BayesModel(classes, log_priors, values, bandwidths, tuple(train_dataset.feature_names))


def _log_kde(x, values, h):
    """Per-feature log density of x under Gaussian kernels (log-sum-exp)."""
    z = (x[None, :] - values) / h[None, :]  # (n, d)
    logk = -0.5 * z * z - np.log(h[None, :] * math.sqrt(2 * math.pi))
    m = logk.max(axis=0)
    return m + np.log(np.exp(logk - m[None, :]).sum(axis=0)) - math.log(len(values))


def bayes_predict(model, x):
    """Posterior memberships under the attribute-independence hypothesis."""
    x = np.asarray(getattr(x, "features", x), dtype=float)
    log_scores = {}
    for c in model.classes:
        log_scores[c] = model.log_priors[c] + _log_kde(x, model.values[c], model.bandwidths[c]).sum()
    shift = max(log_scores.values())
    raw = {c: math.exp(s - shift) for c, s in log_scores.items()}
    return MembershipVector.normalized(raw)


def bayes_bandwidths_csv(model):
    """Introspection dump: ``class,feature,bandwidth`` rows."""
    out = io.StringIO()
    out.write("class,feature,bandwidth\n")
    names = model.feature_names or tuple(
        f"f{i}" for i in range(next(iter(model.bandwidths.values())).shape[0])
    )
    for c in model.classes:
        for name, h in zip(names, model.bandwidths[c]):
            out.write(f"{c},{name},{float(h)!r}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# decision tree (binary splits on continuous attributes, information gain)


@dataclass
class TreeNode:
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: dict | None = None  # leaf class counts

    @property
    def is_leaf(self):
        return self.feature is None


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    classes: tuple


def entropy(labels):
    counts = Counter(labels)
    n = len(labels)
    return -sum((k / n) * math.log2(k / n) for k in counts.values() if k)


def split_entropy(y, x, threshold):
    left = [lab for lab, v in zip(y, x) if v <= threshold]
    right = [lab for lab, v in zip(y, x) if v > threshold]
    n = len(y)
    h = 0.0
    if left:
        h += len(left) / n * entropy(left)
    if right:
        h += len(right) / n * entropy(right)
    return h


def information_gain(y, x, threshold):
    """Entropy drop from splitting labels ``y`` on feature values ``x``."""
    return entropy(y) - split_entropy(y, x, threshold)


def candidate_thresholds(x):
    """Midpoints between consecutive distinct sorted feature values."""
    vals = sorted(set(float(v) for v in x))
    return [(a + b) / 2 for a, b in zip(vals, vals[1:])]


def _entropies_by_row(counts, totals):
    """Entropy of each row of class counts (rows with zero total give 0)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals[:, None]
        term = np.where(counts > 0, p * np.log2(p), 0.0)
    return -term.sum(axis=1)


def _best_split(X, y):
    """(gain, feature, threshold) maximizing gain; ties favor the smallest
    feature index then threshold. None when no feature admits a split."""
    base = entropy(y)
    n = len(y)
    class_ids = sorted(set(y))
    one_hot = np.array([[1.0 if lab == c else 0.0 for c in class_ids] for lab in y])
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cum = one_hot[order].cumsum(axis=0)
        boundaries = np.nonzero(xs[:-1] < xs[1:])[0]  # split after these rows
        if len(boundaries) == 0:
            continue
        left = cum[boundaries]
        right = cum[-1][None, :] - left
        nl = left.sum(axis=1)
        nr = right.sum(axis=1)
        cond = (nl / n) * _entropies_by_row(left, nl) + (nr / n) * _entropies_by_row(right, nr)
        gains = base - cond
        for b, gain in zip(boundaries, gains):
            thr = (xs[b] + xs[b + 1]) / 2
            key = (-gain, f, thr)
            if best is None or key < best[0]:
                best = (key, float(gain), f, float(thr))
    if best is None:
        return None
    _, gain, f, thr = best
    return gain, f, thr


def c45_train(train_dataset, min_size=2):
    """Grow a binary tree by recursive best-gain splits.

    A node becomes a leaf when it is pure, smaller than ``min_size``, or
    offers no admissible split (all feature values equal). Splits with
    zero gain are still taken on impure nodes so that patterns needing
    two coordinated tests remain learnable.
    """
    X = train_dataset.X
    y = [lab for lab in train_dataset.labels]
    if any(lab is None for lab in y):
        raise ValueError("training labels must all be set")
    classes = tuple(sorted(set(y)))

    def grow(rows):
        labels = [y[i] for i in rows]
        counts = dict(Counter(labels))
        if len(counts) == 1 or len(rows) < min_size:
            return TreeNode(counts=counts)
        found = _best_split(X[rows], labels)
        if found is None:
            return TreeNode(counts=counts)
        _, f, thr = found
        left_rows = [i for i in rows if X[i, f] <= thr]
        right_rows = [i for i in rows if X[i, f] > thr]
        node = TreeNode(feature=f, threshold=thr)
        node.left = grow(left_rows)
        node.right = grow(right_rows)
        return node

    return DecisionTree(grow(list(range(len(y)))), classes)


def c45_predict(tree, x):
    """Walk threshold tests to a leaf; membership = leaf class proportions."""
    x = np.asarray(getattr(x, "features", x), dtype=float)
    node = tree.root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    total = sum(node.counts.values())
    return MembershipVector({c: node.counts.get(c, 0) / total for c in tree.classes})


def tree_to_text(tree, feature_names=None):
    """Introspection dump: the tree as indented threshold tests."""
    lines = []

    def name(f):
        return feature_names[f] if feature_names else f"f{f}"

    def render(node, depth):
        pad = "  " * depth
        if node.is_leaf:
            counts = ", ".join(f"{c}:{n}" for c, n in sorted(node.counts.items()))
            lines.append(f"{pad}leaf [{counts}]")
        else:
            lines.append(f"{pad}if {name(node.feature)} <= {node.threshold:.6g}:")
            render(node.left, depth + 1)
            lines.append(f"{pad}else:")
            render(node.right, depth + 1)

    render(tree.root, 0)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# high-level classifier and hybrid combination


def combine_walk_variations(variations, priors, config):
    """Fold per-mu (delta_t, delta_c) maps into normalized memberships.

    Each class accumulates, over mu = 0..mu_critical,
    ``alpha_t * (1 - delta_t * p) + alpha_c * (1 - delta_c * p)`` with p
    its training proportion; the totals are normalized across classes.
    """
    totals = {c: 0.0 for c in priors}
    for mu, (dt, dc) in variations.items():
        for c in priors:
            t_term = dt[c] * priors[c]
            c_term = dc[c] * priors[c]
            totals[c] += config.alpha_t * (1.0 - t_term) + config.alpha_c * (1.0 - c_term)
    return MembershipVector.normalized(totals)


def class_priors(class_graphs):
    total = sum(g.vertex_count for g in class_graphs)
    return {g.class_id: g.vertex_count / total for g in class_graphs}


def high_level_predict(test_instance, class_graphs, config, views):
    """Membership from insertion-induced walk variations across mu.

    ``test_instance`` must carry an ``id`` comparable with the training
    instance ids (it orders distance ties inside the walk engine).
    Raises :class:`sensewalk.tourist.AllViewsEmpty` when the instance
    links into no class; callers fall back to the low-level membership.
    """
    test_id = getattr(test_instance, "id", None)
    for graph in class_graphs:
        component_stats(graph, config.mu_critical)  # warm the shared cache
    trial = InsertionTrial(test_id, class_graphs, views)
    variations = {mu: trial.variations(mu) for mu in range(config.mu_critical + 1)}
    return combine_walk_variations(variations, class_priors(class_graphs), config)


def hybrid_predict(low, high, lam):
    """Blend memberships; returns (membership, predicted label).

    Affine in ``lam``: at 0 the result is exactly the low-level vector,
    at 1 exactly the high-level one.
    """
    if not 0 <= lam <= 1:
        raise ValueError("lam must lie in [0, 1]")
    if high is None:
        membership = low
    else:
        membership = MembershipVector(
            {c: (1.0 - lam) * low.scores[c] + lam * high.scores[c] for c in low.scores}
        )
    return membership, membership.argmax()


def train_low_level(name, train_dataset, knn_k=1, min_size=2):
    """Uniform handle over the three low-level classifiers."""
    if name == "knn":
        return lambda x: knn_predict(train_dataset, x, k=knn_k)
    if name == "bayes":
        model = bayes_train(train_dataset)
        return lambda x: bayes_predict(model, x)
    if name == "c45":
        tree = c45_train(train_dataset, min_size=min_size)
        return lambda x: c45_predict(tree, x)
    raise ValueError(f"unknown low-level classifier {name!r}")
