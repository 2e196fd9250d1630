"""Command-line front end.

Subcommands mirror the pipeline stages: ``preprocess``, ``build-net``,
``extract``, ``evaluate``, ``sweep``, ``walk-curves`` and ``toy``. Every
option can also be supplied through ``--config FILE`` holding
``key = value`` lines (flag names with dashes replaced by underscores);
explicit flags win over the file, the file wins over built-in defaults.
"""

import argparse
import sys
from pathlib import Path

from . import adjacency, corpus, evaluate as ev
from .attgraph import GraphConfig, build_training_graph, write_class_graphs
from .classify import (
    HighLevelConfig,
    bayes_bandwidths_csv,
    bayes_train,
    c45_train,
    tree_to_text,
)
from .features import Dataset, semantic_features, standardize, topological_features


# config keys follow the flag names; two flags have differing argparse dests
_CONFIG_ALIASES = {"lambda": "lam", "in": "in_dir"}


def parse_config_file(path):
    values = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        values[_CONFIG_ALIASES.get(key, key)] = value.strip()
    return values


class Settings:
    """Flag > config file > default resolution for one parsed command."""

    def __init__(self, args):
        self.args = args
        self.config = parse_config_file(args.config) if args.config else {}

    def get(self, name, default=None, cast=str):
        flag_value = getattr(self.args, name, None)
        if flag_value is not None:
            return flag_value
        if name in self.config:
            raw = self.config[name]
            if cast is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return cast(raw)
        return default


def _add_common(parser):
    parser.add_argument("--config", help="key = value file supplying defaults")


def _add_corpus_inputs(parser):
    parser.add_argument("--in", dest="in_dir", help="directory of .txt documents")
    parser.add_argument("--annotations", help="TSV of document, position, word, sense")
    parser.add_argument("--stopwords", help="override the bundled stopword list")
    parser.add_argument("--lemmas", help="override the bundled lemma table")


def _add_graph_flags(parser):
    parser.add_argument("--epsilon", type=float,
                        help="link radius (default: median same-class distance)")
    parser.add_argument("--kappa", type=int, help="nearest-neighbor count (default 3)")
    parser.add_argument("--fallback-factor", dest="fallback_factor", type=float,
                        help="test-insertion reach in units of epsilon (default 3)")


def _load_corpus(settings):
    stop_path = settings.get("stopwords")
    lemma_path = settings.get("lemmas")
    stopwords = corpus.load_stopwords(stop_path)
    lemma_table = corpus.load_lemma_table(lemma_path)
    in_dir = settings.get("in_dir")
    if not in_dir:
        raise SystemExit("--in directory is required")
    documents = corpus.load_documents(in_dir, stopwords, lemma_table)
    if not documents:
        raise SystemExit(f"no .txt documents found in {in_dir}")
    annotations = []
    ann_path = settings.get("annotations")
    if ann_path:
        annotations = corpus.load_annotations(ann_path, documents=documents)
    streams = {doc_id: doc.content_lemmas() for doc_id, doc in documents.items()}
    return documents, streams, annotations


def _graph_config(settings):
    return GraphConfig(
        epsilon=settings.get("epsilon", None, float),
        kappa=settings.get("kappa", 3, int),
        fallback_factor=settings.get("fallback_factor", 3.0, float),
    )


def _pipeline_config(settings, lam=None):
    alpha_t = settings.get("alpha_t", 0.5, float)
    return ev.PipelineConfig(
        low_level=settings.get("low_level", "knn"),
        lam=settings.get("lam", 0.5, float) if lam is None else lam,
        graph=_graph_config(settings),
        high=HighLevelConfig(alpha_t=alpha_t, alpha_c=1.0 - alpha_t,
                             mu_critical=settings.get("mu_c", 10, int)),
        knn_k=settings.get("knn_k", 1, int),
    )


def _feature_dataset(settings):
    """Either a ready-made features CSV or a corpus run through one paradigm."""
    features_path = settings.get("features")
    if features_path:
        return Dataset.from_csv(features_path), None, None
    documents, streams, annotations = _load_corpus(settings)
    if not annotations:
        raise SystemExit("--annotations is required to extract features")
    paradigm = settings.get("paradigm", "semantic")
    window = settings.get("window", 5, int)
    if paradigm == "semantic":
        dataset = semantic_features(streams, annotations, window)
    elif paradigm == "topological":
        network = adjacency.build_network(streams, annotations)
        dataset = topological_features(network, annotations)
    else:
        raise SystemExit(f"unknown paradigm {paradigm!r}")
    return dataset, streams, annotations


def cmd_preprocess(settings):
    documents, streams, annotations = _load_corpus(settings)
    out_dir = Path(settings.get("out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc_id, lemmas in streams.items():
        (out_dir / f"{doc_id}.lemmas").write_text(" ".join(lemmas) + "\n", encoding="utf-8")
    total = sum(len(s) for s in streams.values())
    print(f"{len(documents)} document(s), {total} content lemmas -> {out_dir}")
    if annotations:
        print(f"{len(annotations)} annotations validated")
    return 0


def cmd_build_net(settings):
    documents, streams, annotations = _load_corpus(settings)
    network = adjacency.build_network(streams, annotations)
    out = settings.get("out")
    adjacency.write_edgelist(network, out)
    print(f"{len(network.nodes)} nodes, {len(network.weights)} edges, "
          f"total weight {network.total_weight()} -> {out}")
    return 0


def cmd_extract(settings):
    dataset, _, _ = _feature_dataset(settings)
    out = settings.get("out")
    dataset.to_csv(out)
    print(f"{len(dataset)} instances x {dataset.dim} features -> {out}")
    return 0


def cmd_evaluate(settings):
    lam = settings.get("lam", 0.5, float)
    low_level = settings.get("low_level", "knn")
    config = _pipeline_config(settings, lam=lam)
    n_folds = settings.get("folds", 10, int)
    seed = settings.get("seed", 0, int)
    p_method = settings.get("p_method", "binomial")

    dataset, streams, annotations = _feature_dataset(settings)
    if streams is not None and annotations is not None:
        reports = ev.run_word_experiments(
            streams, annotations, paradigm=settings.get("paradigm", "semantic"),
            window=settings.get("window", 5, int), low_levels=(low_level,),
            lambda_grid=(lam,), config=config, n_folds=n_folds, seed=seed,
        )
    else:
        plan = ev.make_fold_plan(dataset.labels, n_folds, seed)
        reports = [ev.lambda_sweep(dataset, low_level, (lam,), config, plan,
                                   word="dataset", paradigm="features")]
    for report in reports:
        row_lam, acc, p = report.rows[0]
        if p_method != "binomial" and streams is None:
            p = ev.p_value(acc, len(dataset), dataset.class_counts,
                           method=p_method, seed=seed)
        print(f"{report.word}\t{report.low_level}\tlambda={row_lam:.2f}\t"
              f"accuracy={acc:.4f}\tp={p:.3g}")
    report_path = settings.get("report")
    if report_path:
        ev.write_report_csv(reports, report_path)
        print(f"report -> {report_path}")
    _maybe_dump_models(settings, dataset, config)
    return 0


def _maybe_dump_models(settings, dataset, config):
    dump_model = settings.get("dump_model")
    dump_graphs = settings.get("dump_graphs")
    if not dump_model and not dump_graphs:
        return
    z = standardize(dataset)
    if dump_model:
        low_level = settings.get("low_level", "knn")
        if low_level == "c45":
            text = tree_to_text(c45_train(z), z.feature_names)
        elif low_level == "bayes":
            text = bayes_bandwidths_csv(bayes_train(z))
        else:
            text = "k-nearest neighbors keeps no fitted parameters beyond the training set\n"
        Path(dump_model).write_text(text if text.endswith("\n") else text + "\n", "utf-8")
        print(f"model dump -> {dump_model}")
    if dump_graphs:
        graphs = build_training_graph(z, config.graph)
        write_class_graphs(graphs, dump_graphs)
        print(f"class graphs -> {dump_graphs}")


def cmd_sweep(settings):
    grid_text = settings.get("lambda_grid")
    grid = tuple(float(v) for v in grid_text.split(",")) if grid_text else ev.LAMBDA_GRID
    low_levels_text = settings.get("low_levels", "knn,bayes,c45")
    low_levels = tuple(name.strip() for name in low_levels_text.split(","))
    config = _pipeline_config(settings)
    n_folds = settings.get("folds", 10, int)
    seed = settings.get("seed", 0, int)

    dataset, streams, annotations = _feature_dataset(settings)
    if streams is not None and annotations is not None:
        reports = ev.run_word_experiments(
            streams, annotations, paradigm=settings.get("paradigm", "semantic"),
            window=settings.get("window", 5, int), low_levels=low_levels,
            lambda_grid=grid, config=config, n_folds=n_folds, seed=seed,
        )
    else:
        plan = ev.make_fold_plan(dataset.labels, n_folds, seed)
        swept = ev.cv_sweep(dataset, low_levels, grid, config, plan,
                            word="dataset", paradigm="features")
        reports = [swept[name] for name in low_levels]
    for report in reports:
        print(f"{report.word}\t{report.paradigm}\t{report.low_level}\t"
              f"best lambda={report.best_lambda:.2f}\t"
              f"accuracy={report.best_accuracy:.4f}")
    out = settings.get("out")
    if out:
        ev.write_report_csv(reports, out)
        print(f"report -> {out}")
    return 0


def cmd_walk_curves(settings):
    features_path = settings.get("features")
    if not features_path:
        raise SystemExit("--features CSV is required")
    dataset = Dataset.from_csv(features_path)
    if settings.get("no_standardize", False, bool):
        z = dataset
    else:
        z = standardize(dataset)
    graphs = build_training_graph(z, _graph_config(settings))
    rows = ev.walk_curve_rows(graphs, settings.get("mu_max", 10, int))
    out = settings.get("out")
    ev.write_walk_curves(rows, out)
    onsets = {class_id: steady for class_id, _, _, _, steady in rows}
    for class_id, steady in sorted(onsets.items()):
        print(f"class {class_id}: steady state from mu={steady}")
    print(f"curves -> {out}")
    dump_graphs = settings.get("dump_graphs")
    if dump_graphs:
        write_class_graphs(graphs, dump_graphs)
        print(f"class graphs -> {dump_graphs}")
    return 0


def cmd_toy(settings):
    report = ev.toy_experiment(mu_critical=settings.get("mu_c", 10, int))
    names = {report.structured_class: "structured", report.unstructured_class: "unstructured"}
    for lam in (0.0, 0.5, 0.8):
        label = report.predictions_at[lam]
        print(f"lambda={lam:.1f}: probe -> class {label} ({names[label]})")
    if report.flip_lambda is None:
        print("prediction never flips to the structured class")
    else:
        print(f"first structured prediction at lambda={report.flip_lambda:.2f} "
              f"(monotone after: {report.monotone_after_flip})")
    out = settings.get("out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("lambda,predicted_class,structured_membership\n")
            for lam, label, members in report.rows:
                fh.write(f"{lam:.2f},{label},{members!r}\n")
        print(f"rows -> {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sensewalk",
        description="word-sense disambiguation with tourist-walk hybrid classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="tokenize, filter and lemmatize documents")
    _add_common(p)
    _add_corpus_inputs(p)
    p.add_argument("--out", required=True, help="output directory for .lemmas files")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("build-net", help="build the word-adjacency network")
    _add_common(p)
    _add_corpus_inputs(p)
    p.add_argument("--out", required=True, help="edge-list output path")
    p.set_defaults(func=cmd_build_net)

    p = sub.add_parser("extract", help="extract feature vectors for annotations")
    _add_common(p)
    _add_corpus_inputs(p)
    p.add_argument("--paradigm", choices=("semantic", "topological"))
    p.add_argument("--window", type=int, help="context size for semantic features (5, 20 or 50)")
    p.add_argument("--out", required=True, help="feature CSV output path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="cross-validated accuracy at one lambda")
    _add_common(p)
    _add_corpus_inputs(p)
    p.add_argument("--features", help="feature CSV instead of a corpus")
    p.add_argument("--paradigm", choices=("semantic", "topological"))
    p.add_argument("--window", type=int)
    p.add_argument("--low-level", dest="low_level", choices=("knn", "bayes", "c45"))
    p.add_argument("--lambda", dest="lam", type=float, help="compliance term in [0, 1]")
    p.add_argument("--alpha-t", dest="alpha_t", type=float,
                   help="transient weight; cycle weight is its complement")
    p.add_argument("--mu-c", dest="mu_c", type=int, help="maximum walk memory length")
    _add_graph_flags(p)
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--p-method", dest="p_method", choices=("binomial", "montecarlo"))
    p.add_argument("--report", help="write the result rows as CSV")
    p.add_argument("--dump-model", dest="dump_model", help="write model introspection text")
    p.add_argument("--dump-graphs", dest="dump_graphs", help="write per-class edge lists")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="accuracy across the whole lambda grid")
    _add_common(p)
    _add_corpus_inputs(p)
    p.add_argument("--features")
    p.add_argument("--paradigm", choices=("semantic", "topological"))
    p.add_argument("--window", type=int)
    p.add_argument("--low-levels", dest="low_levels",
                   help="comma-separated subset of knn,bayes,c45")
    p.add_argument("--lambda-grid", dest="lambda_grid",
                   help="comma-separated lambda values (default 0.00..1.00 step 0.05)")
    p.add_argument("--alpha-t", dest="alpha_t", type=float)
    p.add_argument("--mu-c", dest="mu_c", type=int)
    _add_graph_flags(p)
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="report CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("walk-curves", help="per-class walk statistics against memory length")
    _add_common(p)
    p.add_argument("--features", help="labeled feature CSV")
    p.add_argument("--mu-max", dest="mu_max", type=int, help="largest memory length (default 10)")
    p.add_argument("--no-standardize", dest="no_standardize", action="store_const", const=True)
    _add_graph_flags(p)
    p.add_argument("--out", required=True, help="curves CSV path")
    p.add_argument("--dump-graphs", dest="dump_graphs")
    p.set_defaults(func=cmd_walk_curves)

    p = sub.add_parser("toy", help="run the built-in structured-vs-scatter example")
    _add_common(p)
    p.add_argument("--mu-c", dest="mu_c", type=int)
    p.add_argument("--out", help="per-lambda CSV path")
    p.set_defaults(func=cmd_toy)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = Settings(args)
    return args.func(settings)


if __name__ == "__main__":
    sys.exit(main())
