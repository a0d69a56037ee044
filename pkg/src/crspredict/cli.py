"""Command-line driver for the full pipeline.

Subcommands: synth, ingest, split, train, evaluate, ensemble, explain, bench,
serve. Every run writes a manifest (seed, config hash, artifact paths) under
<data-dir>/manifests. Failures exit nonzero with a machine-readable JSON
error record on stderr. Reports contain no timestamps, so identical
config+seed reruns produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .dataset import LabeledDataset
from .errors import CrsPredictError, DegenerateClass
from .explain import (
    correlation_matrix,
    pca,
    permutation_importance_table,
    shap_values,
    stratified_background,
)
from .ingest import CleanReport, clean_cohort, load_raw_cohort, merge_cohorts
from .metrics import confusion, format_report, report, stratified_split
from .models.ensemble import (
    VotePanel,
    adaboost_fit,
    adaboost_predict,
    hard_vote,
    soft_vote,
    stack_fit,
    stack_predict,
)
from .panel import ExpertLabel, panel_decide, rater_report, stratify_by_uncertainty, tier_accuracy
from .pipeline import MEMBER_NAMES, member_factory, train_members
from .registry import ModelRegistry
from .schema import load_schema
from .server import build_server, load_cases_file
from .store import LabelStore
from .synthetic import (
    DEFAULT_DROP_COLUMNS,
    SyntheticSpec,
    generate_synthetic,
    paper_shaped_cohort,
)

DEFAULT_CONFIG = {
    "seed": 7,
    "test_fraction": 0.2,
    "drop_columns": DEFAULT_DROP_COLUMNS,
    "synthetic": {"n": 524, "prevalence": 423 / 524, "signal_strength": 1.0, "seed": 7},
    "models": {},
    "active_model": "mlp",
    "threshold": 0.5,
    "explain_budget": 400,
    "serve": {
        "tokens": {"token-doctor1": "doctor1"},
        "admin_token": "admin-token",
        "guidance": "Review the preoperative fields and call the expected surgical benefit.",
    },
}


def load_config(path: str | None) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    if path:
        user = json.loads(Path(path).read_text())
        for key, value in user.items():
            if isinstance(value, dict) and isinstance(config.get(key), dict):
                config[key].update(value)
            else:
                config[key] = value
    return config


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def write_manifest(data_dir: Path, command: str, config: dict, seed: int, artifacts: list[str]):
    manifests = data_dir / "manifests"
    manifests.mkdir(parents=True, exist_ok=True)
    counter = len(list(manifests.glob("*.json"))) + 1
    doc = {
        "command": command,
        "seed": seed,
        "config_hash": config_hash(config),
        "artifacts": sorted(artifacts),
        "kernel_backend": kernels.backend_name(),
    }
    path = manifests / f"{counter:04d}-{command.replace(' ', '-')}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ----- subcommand implementations ------------------------------------------


def cmd_synth(args, config) -> list[str]:
    schema = load_schema(args.schema)
    if args.shape:
        seed = args.seed if args.seed is not None else config["seed"]
        raw = paper_shaped_cohort(args.shape, schema, seed=seed)
    else:
        synth = dict(config["synthetic"])
        if args.n:
            synth["n"] = args.n
        if args.prevalence is not None:
            synth["prevalence"] = args.prevalence
        if args.signal is not None:
            synth["signal_strength"] = args.signal
        synth["seed"] = args.seed if args.seed is not None else synth.get("seed", 7)
        raw = generate_synthetic(SyntheticSpec(
            n=synth["n"], prevalence=synth["prevalence"],
            signal_strength=synth["signal_strength"], seed=synth["seed"],
        ), schema)
    raw.save_csv(args.out)
    return [args.out]


def cmd_ingest(args, config) -> list[str]:
    schema = load_schema(args.schema)
    datasets = []
    reports: list[CleanReport] = []
    drop_columns = args.drop_column if args.drop_column else config["drop_columns"]
    for raw_path in args.raw:
        raw = load_raw_cohort(raw_path)
        ds, rep = clean_cohort(raw, schema, drop_columns=drop_columns,
                               impute=args.impute)
        datasets.append(ds)
        reports.append(rep)
    merged = datasets[0]
    for other in datasets[1:]:
        merged = merge_cohorts(merged, other)
    merged.save_csv(args.out)
    report_path = Path(args.report or (Path(args.out).with_suffix(".report.jsonl")))
    with report_path.open("w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(rep.to_json_lines())
    return [args.out, str(report_path)]


def cmd_split(args, config) -> list[str]:
    data = LabeledDataset.load_csv(args.data)
    seed = args.seed if args.seed is not None else config["seed"]
    fraction = args.fraction or config["test_fraction"]
    assignment = stratified_split(data, fraction, seed)
    train = data.subset_by_ids(list(assignment.train_ids))
    test = data.subset_by_ids(list(assignment.test_ids))
    train.save_csv(args.out_train)
    test.save_csv(args.out_test)
    return [args.out_train, args.out_test]


def cmd_train(args, config) -> list[str]:
    schema = load_schema(args.schema)
    data = LabeledDataset.load_csv(args.train)
    seed = args.seed if args.seed is not None else config["seed"]
    names = MEMBER_NAMES if args.model == "all" else [args.model]
    members = train_members(
        data.X, data.y, schema, names=names, params_by_name=config["models"], seed=seed
    )
    background = stratified_background(data.X, data.y, size=100, seed=seed)
    registry = ModelRegistry(
        members=members,
        columns=list(data.columns),
        schema=schema,
        active=config["active_model"] if config["active_model"] in members else names[0],
        threshold=config["threshold"],
        background=background,
        explain_budget=config["explain_budget"],
    )
    active = registry.active_member()
    importance = permutation_importance_table(
        active.predict, data.X, data.y, data.columns, repeats=10, seed=seed
    )
    registry.global_importance = [
        {"feature": e.name, "mean_drop": e.mean_drop, "std_drop": e.std_drop}
        for e in importance.entries
    ]
    registry.save(args.registry)
    return [args.registry]


def cmd_evaluate(args, config) -> list[str]:
    schema = load_schema(args.schema)
    data = LabeledDataset.load_csv(args.test)
    if len(np.unique(data.y)) < 2:
        raise DegenerateClass("evaluation set contains a single class")
    registry = ModelRegistry.load(args.registry, schema)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for name in sorted(registry.members):
        member = registry.members[name]
        cm = confusion(data.y, member.predict(data.X))
        rep = report(cm)
        json_path = out_dir / f"{name}.report.json"
        _write_json(json_path, {"model": name, "confusion": cm.counts, **rep.to_record()})
        text_path = out_dir / f"{name}.report.txt"
        text_path.write_text(format_report(rep, cm) + "\n")
        artifacts += [str(json_path), str(text_path)]
    return artifacts


def cmd_ensemble(args, config) -> list[str]:
    schema = load_schema(args.schema)
    train = LabeledDataset.load_csv(args.train)
    test = LabeledDataset.load_csv(args.test)
    if len(np.unique(test.y)) < 2:
        raise DegenerateClass("evaluation set contains a single class")
    seed = args.seed if args.seed is not None else config["seed"]
    registry = ModelRegistry.load(args.registry, schema)
    panel = VotePanel(
        members=sorted(registry.members.items()), tie_break_member=registry.tie_break
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []

    results = {"hard_vote": hard_vote(panel, test.X)}
    weights = np.full(len(panel.members), 1.0 / len(panel.members))
    results["soft_vote"], _ = soft_vote(panel, weights, test.X)

    ada = adaboost_fit(train.X, train.y, n_stages=config.get("adaboost_stages", 50))
    results["adaboost"] = adaboost_predict(ada, test.X)

    factories = [
        (name, member_factory(name, schema, config["models"].get(name), seed))
        for name in sorted(registry.members)
    ]
    stack = stack_fit(train.X, train.y, factories, k=5, seed=seed)
    results["stacking"] = stack_predict(stack, test.X)

    for name, predictions in results.items():
        cm = confusion(test.y, predictions)
        rep = report(cm)
        json_path = out_dir / f"{name}.report.json"
        _write_json(json_path, {"model": name, "confusion": cm.counts, **rep.to_record()})
        text_path = out_dir / f"{name}.report.txt"
        text_path.write_text(format_report(rep, cm) + "\n")
        artifacts += [str(json_path), str(text_path)]
    return artifacts


def cmd_explain(args, config) -> list[str]:
    schema = load_schema(args.schema)
    data = LabeledDataset.load_csv(args.data)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "corr":
        matrix = correlation_matrix(data.X)
        lines = [",".join(["feature", *data.columns])]
        for name, row in zip(data.columns, matrix):
            lines.append(",".join([name, *(f"{v:.6f}" for v in row)]))
        out.write_text("\n".join(lines) + "\n")
        return [str(out)]
    if args.kind == "pca":
        result = pca(data.X, standardize=True)
        lines = ["component,explained_ratio,cumulative_ratio"]
        for i, (r, c) in enumerate(zip(result.explained_ratios, result.cumulative_ratios), 1):
            lines.append(f"{i},{r:.6f},{c:.6f}")
        lines.append(f"components_for_95,{result.components_for_95},")
        out.write_text("\n".join(lines) + "\n")
        return [str(out)]

    registry = ModelRegistry.load(args.registry, schema)
    member = registry.active_member()
    if args.kind == "perm":
        seed = args.seed if args.seed is not None else config["seed"]
        table = permutation_importance_table(
            member.predict, data.X, data.y, data.columns, repeats=args.repeats, seed=seed
        )
        out.write_text(table.to_csv())
        return [str(out)]
    if args.kind == "shap":
        row_pos = data.ids.index(args.row_id) if args.row_id else 0
        result = shap_values(
            member.predict_proba,
            data.X[row_pos],
            registry.background,
            sampling_budget=registry.explain_budget if data.n_features > 12 else None,
            seed=args.seed if args.seed is not None else config["seed"],
        )
        lines = ["feature,value,phi"]
        order = np.argsort(-np.abs(result.attributions))
        for i in order:
            lines.append(f"{data.columns[i]},{data.X[row_pos, i]},{result.attributions[i]:.6f}")
        lines.append(f"base_value,,{result.base_value:.6f}")
        lines.append(f"fx,,{result.fx:.6f}")
        out.write_text("\n".join(lines) + "\n")
        return [str(out)]
    raise ValueError(f"unknown explain kind {args.kind!r}")


def cmd_bench(args, config) -> list[str]:
    schema = load_schema(args.schema)
    if args.action == "stratify":
        data = LabeledDataset.load_csv(args.test)
        registry = ModelRegistry.load(args.registry, schema)
        member = registry.active_member()
        probabilities = {
            case_id: float(p)
            for case_id, p in zip(data.ids, member.predict_proba(data.X))
        }
        subset = stratify_by_uncertainty(probabilities, args.k)
        cases_path = Path(args.out)
        cases_path.parent.mkdir(parents=True, exist_ok=True)
        with cases_path.open("w", encoding="utf-8") as fh:
            for case_id in subset.all_cases():
                pos = data.ids.index(case_id)
                fields = {c: data.X[pos, i] for i, c in enumerate(data.columns)}
                fh.write(
                    json.dumps(
                        {
                            "case_id": case_id,
                            "tier": subset.tier_of(case_id),
                            "probability": probabilities[case_id],
                            "fields": fields,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        truth = {case_id: int(data.y[data.ids.index(case_id)]) for case_id in subset.all_cases()}
        truth_path = Path(args.truth_out)
        _write_json(truth_path, truth)
        ratio_flag = subset.class_ratio_flag(
            {cid: int(y) for cid, y in zip(data.ids, data.y)}
        )
        _write_json(
            Path(args.out).with_suffix(".meta.json"),
            {"k": args.k, "class_ratio_flag": ratio_flag},
        )
        return [str(cases_path), str(truth_path)]

    if args.action == "report":
        truth = {k: int(v) for k, v in json.loads(Path(args.truth).read_text()).items()}
        cases = load_cases_file(args.cases)
        store = LabelStore(args.labels)
        subset_cases = {case["case_id"]: case["tier"] for case in cases}
        from .panel import BenchmarkSubset

        subset = BenchmarkSubset(
            hard=[c for c, t in subset_cases.items() if t == "hard"],
            medium=[c for c, t in subset_cases.items() if t == "medium"],
            easy=[c for c, t in subset_cases.items() if t == "easy"],
            k=sum(1 for t in subset_cases.values() if t == "hard"),
        )
        rater_calls: dict[str, dict[str, int]] = {}
        labels_by_case: dict[str, list[ExpertLabel]] = {}
        for event in store.latest():
            rater_calls.setdefault(event.rater_id, {})[event.case_id] = event.call
            labels_by_case.setdefault(event.case_id, []).append(
                ExpertLabel(
                    rater_id=event.rater_id,
                    case_id=event.case_id,
                    call=event.call,
                    confidence=event.confidence,
                    revision=event.revision,
                )
            )
        reports = {
            rater: rep.to_record() for rater, rep in rater_report(rater_calls, truth).items()
        }
        panel = {
            case: vars(panel_decide(labels)) for case, labels in sorted(labels_by_case.items())
        }
        payload = {"raters": reports, "panel": panel}
        complete = [r for r, calls in rater_calls.items()
                    if all(c in calls for c in subset.all_cases())]
        if complete:
            tiers = tier_accuracy({r: rater_calls[r] for r in complete}, truth, subset)
            payload["tier_accuracy"] = {"per_rater": tiers.per_rater, "pooled": tiers.pooled}
        out = Path(args.out)
        _write_json(out, payload)
        return [str(out)]
    raise ValueError(f"unknown bench action {args.action!r}")


def cmd_serve(args, config) -> list[str]:
    schema = load_schema(args.schema)
    registry = ModelRegistry.load(args.registry, schema) if args.registry else None
    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    store = LabelStore(data_dir / "labels.jsonl")
    cases = load_cases_file(args.cases) if args.cases else []
    serve_cfg = config["serve"]
    server = build_server(
        args.host,
        args.port,
        registry,
        store,
        cases,
        serve_cfg["tokens"],
        serve_cfg["admin_token"],
        serve_cfg.get("guidance", ""),
    )
    print(json.dumps({"serving": f"http://{args.host}:{args.port}", "cases": len(cases)}))
    sys.stdout.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return []


# ----- argument wiring -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crspredict")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--data-dir", default="run")
    parser.add_argument("--schema", default=None, help="schema JSON (packaged default)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic raw cohort")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--prevalence", type=float, default=None)
    p.add_argument("--signal", type=float, default=None)
    p.add_argument("--shape", choices=["2R01", "3R01"], default=None)

    p = sub.add_parser("ingest", help="clean raw cohorts and merge them")
    p.add_argument("--raw", action="append", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--impute", action="store_true")
    p.add_argument("--drop-column", action="append", default=None,
                   help="column to drop (repeatable; overrides the config list)")

    p = sub.add_parser("split", help="stratified train/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)

    p = sub.add_parser("train", help="fit classifiers into a registry")
    p.add_argument("model", choices=MEMBER_NAMES + ["all"])
    p.add_argument("--train", required=True)
    p.add_argument("--registry", required=True)

    p = sub.add_parser("evaluate", help="score every registry member on a test set")
    p.add_argument("--test", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ensemble", help="second-level learners on top of the registry")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("explain", help="interpretability exports")
    p.add_argument("kind", choices=["perm", "shap", "pca", "corr"])
    p.add_argument("--data", required=True)
    p.add_argument("--registry", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int, default=30)
    p.add_argument("--row-id", default=None)

    p = sub.add_parser("bench", help="human-benchmark protocol")
    p.add_argument("action", choices=["stratify", "report"])
    p.add_argument("--test", default=None)
    p.add_argument("--registry", default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", default="truth.json")
    p.add_argument("--truth", default=None)
    p.add_argument("--cases", default=None)
    p.add_argument("--labels", default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--registry", default=None)
    p.add_argument("--cases", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=4000)

    return parser


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "split": cmd_split,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ensemble": cmd_ensemble,
    "explain": cmd_explain,
    "bench": cmd_bench,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        artifacts = COMMANDS[args.command](args, config)
        if args.command != "serve":
            command = args.command + (f" {getattr(args, 'action', '')}".rstrip())
            write_manifest(Path(args.data_dir), command, config,
                           args.seed if args.seed is not None else config["seed"], artifacts)
        return 0
    except (CrsPredictError, ValueError, FileNotFoundError, KeyError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 2


if __name__ == "__main__":
    sys.exit(main())
