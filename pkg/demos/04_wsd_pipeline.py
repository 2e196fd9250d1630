"""Word-sense disambiguation end to end on a synthetic two-sense corpus.

One sense of "crane" lives in rigidly templated machinery sentences, the
other in loosely sampled nature sentences. On the clean corpus the context
words alone settle every occurrence; blurring the vocabularies degrades
the conventional classifiers while the walk-based term, which keys on the
structural contrast between the two context patterns, recovers much of
the loss at high compliance.
"""

from sensewalk import make_synthetic_corpus, run_word_experiments, write_report_csv


def sweep(noise):
    documents, annotations = make_synthetic_corpus(
        word="crane", n_per_sense=60, seed=7, noise=noise
    )
    streams = {doc_id: doc.content_lemmas() for doc_id, doc in documents.items()}
    reports = []
    for paradigm in ("semantic", "topological"):
        reports.extend(
            run_word_experiments(
                streams, annotations, paradigm=paradigm, window=5,
                n_folds=10, seed=0,
            )
        )
    return reports


documents, annotations = make_synthetic_corpus(word="crane", n_per_sense=60, seed=7)
sample = annotations[0]
lemmas = documents[sample.document_id].content_lemmas()
lo, hi = max(0, sample.position - 3), sample.position + 4
print(f"{len(annotations)} annotated occurrences across {len(documents)} documents")
print(f"example context (sense {sample.sense_id}): "
      f"... {' '.join(lemmas[lo:hi])} ...")

all_reports = []
for noise in (0.0, 0.35):
    print(f"\n=== context noise {noise:.0%} ===")
    reports = sweep(noise)
    all_reports.extend(reports)
    for rep in reports:
        gain = rep.best_accuracy - rep.accuracy_at(0.0)
        print(f"  {rep.paradigm:11s} {rep.low_level:5s}: "
              f"lambda=0 accuracy {rep.accuracy_at(0.0):.3f}, "
              f"best {rep.best_accuracy:.3f} at lambda={rep.best_lambda:.2f} "
              f"({'+' if gain >= 0 else ''}{gain:.3f})")

write_report_csv(all_reports, "wsd_sweep_report.csv")
print("\nfull sweep table -> wsd_sweep_report.csv")
