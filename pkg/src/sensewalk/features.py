"""Feature extraction for annotated occurrences, under two paradigms.

Semantic: each occurrence is described by the counts of the lemmas among
its nearest context words. Topological: each occurrence is described by
the eight structural measurements of its node in the word-adjacency
network. Both produce a :class:`Dataset`; distance-based downstream
methods expect the features to be standardized first.
"""

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .adjacency import NodeTopology, node_topology


class MissingNode(Exception):
    """An annotation has no occurrence node in the network."""


@dataclass(frozen=True)
class Instance:
    id: object
    features: np.ndarray
    label: int | None


class Dataset:
    """A fixed-order collection of feature vectors with optional labels.

    All rows share the feature ordering in ``feature_names``. Labels are
    sense ids; unlabeled rows carry ``None``.
    """

    def __init__(self, ids, X, labels, feature_names):
        self.ids = list(ids)
        self.X = np.asarray(X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(len(self.ids), -1)
        self.labels = list(labels)
        self.feature_names = list(feature_names)
        if len(self.ids) != len(self.labels) or len(self.ids) != self.X.shape[0]:
            raise ValueError("ids, labels and feature rows must align")

    def __len__(self):
        return len(self.ids)

    @property
    def dim(self):
        return self.X.shape[1]

    @property
    def class_counts(self):
        return dict(Counter(lab for lab in self.labels if lab is not None))

    def classes(self):
        return sorted(self.class_counts)

    def instance(self, i):
        return Instance(self.ids[i], self.X[i], self.labels[i])

    def subset(self, indices):
        idx = list(indices)
        return Dataset(
            [self.ids[i] for i in idx],
            self.X[idx],
            [self.labels[i] for i in idx],
            self.feature_names,
        )

    def to_csv(self, path):
        """Header of feature names plus trailing ``label`` column."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(self.feature_names) + ["label"])
            for row, label in zip(self.X, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [label if label is not None else ""])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[-1] != "label":
                raise ValueError("feature CSV must end with a 'label' column")
            names = header[:-1]
            X, labels, ids = [], [], []
            for i, row in enumerate(reader):
                X.append([float(v) for v in row[:-1]])
                labels.append(int(row[-1]) if row[-1] != "" else None)
                ids.append(i)
        return cls(ids, np.array(X, dtype=float), labels, names)


def window_lemmas(stream, position, window):
    """The ``window`` content lemmas nearest to ``position`` in the stream.

    Candidates are ordered by distance, preceding words first on ties, so
    an interior occurrence takes ceil(window/2) before and floor(window/2)
    after, while occurrences near a document edge draw the shortfall from
    the other side.
    """
    chosen = []
    left = position - 1
    right = position + 1
    n = len(stream)
    while len(chosen) < window and (left >= 0 or right < n):
        d_left = position - left if left >= 0 else None
        d_right = right - position if right < n else None
        if d_right is None or (d_left is not None and d_left <= d_right):
            chosen.append(stream[left])
            left -= 1
        else:
            chosen.append(stream[right])
            right += 1
    return chosen


def semantic_vocabulary(token_streams, annotations, window):
    """Sorted union of lemmas appearing in any annotation window."""
    vocab = set()
    for ann in annotations:
        vocab.update(window_lemmas(token_streams[ann.document_id], ann.position, window))
    return sorted(vocab)


def semantic_features(token_streams, annotations, window=5, vocabulary=None):
    """One count-vector instance per annotation.

    When ``vocabulary`` is given (e.g. fitted on a training fold), window
    lemmas outside it are dropped; otherwise the vocabulary is the union
    over all windows seen here.
    """
    if vocabulary is None:
        vocabulary = semantic_vocabulary(token_streams, annotations, window)
    index = {lemma: i for i, lemma in enumerate(vocabulary)}
    X = np.zeros((len(annotations), len(vocabulary)))
    ids, labels = [], []
    for row, ann in enumerate(annotations):
        for lemma in window_lemmas(token_streams[ann.document_id], ann.position, window):
            j = index.get(lemma)
            if j is not None:
                X[row, j] += 1.0
        ids.append((ann.document_id, ann.position))
        labels.append(ann.sense_id)
    return Dataset(ids, X, labels, vocabulary)


def topological_features(network, annotations):
    """One instance per annotation from its occurrence node's measurements."""
    X = np.zeros((len(annotations), len(NodeTopology.FIELD_NAMES)))
    ids, labels = [], []
    for row, ann in enumerate(annotations):
        node = network.node_for(ann.document_id, ann.position)
        if node is None:
            raise MissingNode(f"no occurrence node for ({ann.document_id}, {ann.position})")
        X[row] = node_topology(network, node).as_vector()
        ids.append((ann.document_id, ann.position))
        labels.append(ann.sense_id)
    return Dataset(ids, X, labels, list(NodeTopology.FIELD_NAMES))


def feature_stats(dataset):
    """Per-feature mean and population standard deviation."""
    if len(dataset) < 2:
        raise ValueError("standardization needs at least 2 instances")
    mean = dataset.X.mean(axis=0)
    std = dataset.X.std(axis=0)  # population convention (divide by N)
    return mean, std


def standardize(dataset, stats=None):
    """Z-score the features; constant columns map to zero.

    Pass ``stats`` fitted on a training fold to transform held-out data
    with the training statistics.
    """
    mean, std = feature_stats(dataset) if stats is None else stats
    safe = np.where(std > 0, std, 1.0)
    Z = (dataset.X - mean) / safe
    Z[:, std == 0] = 0.0
    return Dataset(dataset.ids, Z, dataset.labels, dataset.feature_names)
