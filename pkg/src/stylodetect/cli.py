"""Command-line pipeline: ingest, stats, extract, train, eval, select,
predict, report.

Configuration comes from an optional JSON file (--config) with flag
overrides; flags win. Exit codes: 0 success, 2 input validation,
3 missing upstream artifact, 4 runtime/provider failure. Errors go to
stderr as ``stylodetect: error[E<code>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import ml
from .corpus import corpus_stats, load_corpus, ratio_report
from .embeddings import ProviderConfig
from .errors import InputError, MissingArtifactError, StylodetectError
from .evaluation import (cross_dataset_eval, cross_validate,
                         dataset_from_matrix, rank_features, selection_sweep,
                         write_report_json)
from .features import (DEFAULT_REGISTRY, REGISTRY_VERSION, extract_matrix,
                       load_matrix_csv)
from .plots import svg_histogram, svg_roc

CLASSIFIER_ALIASES = {
    "lda": ml.LDA,
    "logreg": ml.LOGREG,
    "svc": ml.SVC,
    "gbt": ml.GBT,
    "etc": ml.EXTRA_TREES,
}
ALL_CLASSIFIERS = tuple(CLASSIFIER_ALIASES)


@dataclass
class RunConfig:
    corpus: str | None = None
    format: str = "jsonl"
    tests: list[str] = field(default_factory=list)
    lexicons: str | None = None
    embedding: str = "builtin"
    dim: int = 1024
    model_name: str = ""
    seed: int = 0
    folds: int = 5
    classifier: str = "svc"
    features: str = "all"
    topk: list[int] = field(default_factory=lambda: [5, 10, 15, 20, 25])
    out: str = "out"
    jobs: int = 1

    def validate(self) -> None:
        if self.folds < 2:
            raise InputError(f"folds must be >= 2, got {self.folds}")
        for k in self.topk:
            if not 1 <= k <= len(DEFAULT_REGISTRY.entries):
                raise InputError(f"top-k value {k} outside [1, 115]")
        if self.format not in ("jsonl", "csv"):
            raise InputError(f"unknown corpus format: {self.format!r}")
        if self.classifier not in CLASSIFIER_ALIASES:
            raise InputError(f"unknown classifier: {self.classifier!r}")
        if self.lexicons is not None and not Path(self.lexicons).is_dir():
            raise InputError(f"lexicon directory not found: {self.lexicons}")
        for path in self.tests:
            if not Path(path).exists():
                raise InputError(f"test corpus not found: {path}")

    def provider_config(self) -> ProviderConfig:
        if self.embedding == "builtin":
            return ProviderConfig(kind="builtin_tf", dim=self.dim)
        if self.embedding.startswith("remote:"):
            return ProviderConfig(kind="remote",
                                  endpoint=self.embedding.split(":", 1)[1],
                                  model=self.model_name)
        raise InputError(f"unknown embedding provider: {self.embedding!r}")

    def kind(self) -> str:
        return CLASSIFIER_ALIASES[self.classifier]


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise InputError(f"config file not found: {path}")
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"bad config JSON: {exc}") from None
        for key, value in payload.items():
            if not hasattr(cfg, key):
                raise InputError(f"unknown config key: {key!r}")
            setattr(cfg, key, value)
    overrides = {
        "corpus": args.corpus, "format": args.format, "seed": args.seed,
        "folds": args.folds, "classifier": args.classifier,
        "features": args.features, "out": args.out, "jobs": args.jobs,
        "embedding": args.embedding, "lexicons": args.lexicons,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "topk", None):
        cfg.topk = [int(x) for x in args.topk.split(",")]
    if getattr(args, "tests", None):
        cfg.tests = args.tests
    cfg.validate()
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_corpus(cfg: RunConfig, require_label: bool = True):
    if not cfg.corpus:
        raise InputError("no corpus given (--corpus or config)")
    return load_corpus(cfg.corpus, cfg.format, require_label=require_label)


def _require_matrix(cfg: RunConfig, args):
    path = Path(args.matrix) if getattr(args, "matrix", None) else \
        _out_dir(cfg) / "features.csv"
    if not path.exists():
        raise MissingArtifactError(
            f"feature matrix not found at {path}; run `stylodetect extract` first")
    return load_matrix_csv(path)


def _require_model(cfg: RunConfig, args):
    path = Path(args.model) if getattr(args, "model", None) else \
        _out_dir(cfg) / "model.json"
    if not path.exists():
        raise MissingArtifactError(
            f"model not found at {path}; run `stylodetect train` first")
    return ml.load_model(path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(cfg: RunConfig, args) -> int:
    corpus = _require_corpus(cfg)
    counts = corpus.class_counts()
    print(f"{len(corpus)} documents ({counts['human']} human / "
          f"{counts['generated']} generated)")
    for source, count in corpus.source_counts().items():
        print(f"  source {source or '(none)'}: {count}")
    return 0


def cmd_stats(cfg: RunConfig, args) -> int:
    corpus = _require_corpus(cfg)
    stats = corpus_stats(corpus)
    table = ratio_report(stats)
    out = _out_dir(cfg)
    (out / "ratios.csv").write_text(table.to_csv(), encoding="utf-8")
    (out / "ratios.txt").write_text(table.to_text(), encoding="utf-8")
    print(table.to_text(), end="")
    return 0


def cmd_extract(cfg: RunConfig, args) -> int:
    corpus = _require_corpus(cfg)
    matrix = extract_matrix(
        corpus, provider_config=cfg.provider_config(),
        lexicon_dir=cfg.lexicons, jobs=cfg.jobs)
    out = _out_dir(cfg)
    matrix.to_csv(out / "features.csv")
    meta = {
        "documents": len(matrix.doc_ids),
        "features": len(matrix.feature_ids),
        "registry_version": matrix.registry_version,
        "provider": matrix.provider_id,
        "flags": {k: list(v) for k, v in sorted(matrix.flags.items())},
    }
    (out / "extract_meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out / 'features.csv'} "
          f"({len(matrix.doc_ids)} rows x {len(matrix.feature_ids)} features)")
    return 0


def _provenance(cfg: RunConfig, matrix) -> dict:
    return {
        "provider": matrix.provider_id or cfg.provider_config().kind,
        "registry_version": matrix.registry_version or REGISTRY_VERSION,
        "standardized_kinds": list(ml.SCALED_KINDS),
    }


def cmd_train(cfg: RunConfig, args) -> int:
    matrix = _require_matrix(cfg, args)
    data = dataset_from_matrix(matrix)
    tag = cfg.features
    if tag.startswith("topk:"):
        k = int(tag.split(":", 1)[1])
        ranking = rank_features(data, cfg.seed)
        data = ml.select_top_k(ranking, k, data)
    elif tag != "all":
        from .evaluation import resolve_tag
        cols, _ = resolve_tag(tag, data.feature_ids)
        data = data.subset(cols)
    model = ml.train(ml.ModelSpec(cfg.kind()), data, cfg.seed)
    out = _out_dir(cfg)
    path = out / "model.json"
    ml.save_model(model, path)
    print(f"wrote {path} ({model.kind}, {len(model.feature_ids)} features, "
          f"final loss {model.metadata.get('final_loss', float('nan')):.4f})")
    return 0


def cmd_eval(cfg: RunConfig, args) -> int:
    matrix = _require_matrix(cfg, args)
    out = _out_dir(cfg)
    if cfg.tests:
        tests = [load_matrix_csv(p) if p.endswith(".csv") else
                 extract_matrix(load_corpus(p, cfg.format),
                                provider_config=cfg.provider_config(),
                                lexicon_dir=cfg.lexicons, jobs=cfg.jobs)
                 for p in cfg.tests]
        reports = cross_dataset_eval(
            matrix, tests, ml.ModelSpec(cfg.kind()), cfg.features, cfg.seed,
            provenance=_provenance(cfg, matrix))
        for i, report in enumerate(reports):
            write_report_json(report, out / f"report_test{i}.json")
            (out / f"report_test{i}.txt").write_text(report.to_text(),
                                                     encoding="utf-8")
            print(report.to_text(), end="")
        return 0
    report = cross_validate(
        dataset_from_matrix(matrix), ml.ModelSpec(cfg.kind()),
        feature_tag=cfg.features, k=cfg.folds, seed=cfg.seed,
        provenance=_provenance(cfg, matrix))
    write_report_json(report, out / "report.json")
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    report.write_roc_csv(out / "roc_points.csv")
    print(report.to_text(), end="")
    return 0


def cmd_select(cfg: RunConfig, args) -> int:
    matrix = _require_matrix(cfg, args)
    data = dataset_from_matrix(matrix)
    specs = [ml.ModelSpec(CLASSIFIER_ALIASES[name]) for name in ALL_CLASSIFIERS]
    table = selection_sweep(
        data, specs, cfg.topk, seed=cfg.seed, k_folds=cfg.folds,
        leaky_selection=bool(getattr(args, "leaky", False)),
        provenance=_provenance(cfg, matrix))
    out = _out_dir(cfg)
    write_report_json(table, out / "sweep.json")
    (out / "sweep.txt").write_text(table.to_text(), encoding="utf-8")
    (out / "sweep.csv").write_text(table.to_csv(), encoding="utf-8")
    print(table.to_text(), end="")
    return 0


def cmd_predict(cfg: RunConfig, args) -> int:
    model = _require_model(cfg, args)
    corpus = _require_corpus(cfg, require_label=False)
    matrix = extract_matrix(
        corpus, provider_config=cfg.provider_config(),
        lexicon_dir=cfg.lexicons, jobs=cfg.jobs)
    data = dataset_from_matrix(matrix).subset(list(model.feature_ids))
    scores = ml.predict_scores(model, data)
    threshold = ml.score_threshold(model.kind)
    out = _out_dir(cfg)
    path = out / "predictions.csv"
    with path.open("w", encoding="utf-8") as fh:
        fh.write("doc_id,score,label\n")
        for doc_id, score in zip(matrix.doc_ids, scores):
            label = "generated" if score > threshold else "human"
            fh.write(f"{doc_id},{score:.9g},{label}\n")
    print(f"wrote {path} ({len(scores)} rows)")
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    made = []
    if args.feature:
        matrix = _require_matrix(cfg, args)
        target = args.feature
        if target not in matrix.feature_ids:
            hits = [fid for fid in matrix.feature_ids if target in fid]
            if len(hits) != 1:
                raise InputError(
                    f"feature {target!r} not found (candidates: {hits[:6]})")
            target = hits[0]
        col = matrix.feature_ids.index(target)
        values = {
            "human": [float(v) for v, lab in
                      zip(matrix.values[:, col], matrix.labels) if lab == 0],
            "generated": [float(v) for v, lab in
                          zip(matrix.values[:, col], matrix.labels) if lab == 1],
        }
        path = out / f"hist_{target}.svg"
        svg_histogram(values, f"class distribution: {target}", path)
        made.append(path)
    if args.roc:
        curves = []
        for spec in args.roc:
            path = Path(spec)
            if not path.exists():
                raise MissingArtifactError(
                    f"ROC points not found at {path}; run `stylodetect eval` first")
            points = []
            with path.open(encoding="utf-8") as fh:
                next(fh)
                for line in fh:
                    x, y = line.strip().split(",")
                    points.append((float(x), float(y)))
            curves.append((path.stem, points))
        path = out / "roc.svg"
        svg_roc(curves, "ROC curves (positive class: generated)", path)
        made.append(path)
    if not made:
        raise InputError("report needs --feature and/or --roc")
    for path in made:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stylodetect",
        description="Stylometric detection of AI-generated scientific abstracts.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--corpus", help="labeled corpus path")
        p.add_argument("--format", choices=("jsonl", "csv"))
        p.add_argument("--seed", type=int)
        p.add_argument("--folds", type=int)
        p.add_argument("--classifier", choices=ALL_CLASSIFIERS)
        p.add_argument("--features",
                       help="sf | lf | hbh | all | topk:N")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int)
        p.add_argument("--embedding", help="builtin | remote:URL")
        p.add_argument("--lexicons", help="directory of lexicon overrides")

    for name, fn in (("ingest", cmd_ingest), ("stats", cmd_stats),
                     ("extract", cmd_extract), ("train", cmd_train),
                     ("eval", cmd_eval), ("select", cmd_select),
                     ("predict", cmd_predict), ("report", cmd_report)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=fn)
        if name in ("train", "eval", "select", "report"):
            p.add_argument("--matrix", help="feature matrix CSV")
        if name == "eval":
            p.add_argument("--tests", nargs="*",
                           help="held-out corpora (jsonl) or matrices (csv)")
        if name == "select":
            p.add_argument("--topk", help="comma-separated k values")
            p.add_argument("--leaky", action="store_true",
                           help="rank features on the full data (paper-parity mode)")
        if name == "predict":
            p.add_argument("--model", help="trained model JSON")
        if name == "report":
            p.add_argument("--feature", help="feature id for a class histogram")
            p.add_argument("--roc", nargs="*",
                           help="roc_points.csv files to overlay")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(cfg, args)
    except StylodetectError as exc:
        print(f"stylodetect: error[E{exc.exit_code}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
