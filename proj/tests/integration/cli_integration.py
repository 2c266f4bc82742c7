"""End-to-end checks of the lagraph binary: exit codes, schema-valid outputs,
deterministic reruns from manifests."""

import argparse
import filecmp
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

failures = []


def check(condition, message):
    print(("ok   " if condition else "FAIL ") + message)
    if not condition:
        failures.append(message)


def load_registry(schema_dir):
    schemas = {}
    for path in sorted(Path(schema_dir).glob("*.schema.json")):
        schemas[path.name] = json.loads(path.read_text())
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items()
    )
    return schemas, registry


def validate(schemas, registry, name, doc, what):
    validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    check(not errors, f"{what} matches {name}" + (f": {errors[0].message}" if errors else ""))


def run(cli, *args, env=None):
    return subprocess.run([cli, *map(str, args)], capture_output=True, text=True, env=env)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--data", required=True)
    parser.add_argument("--schemas", required=True)
    args = parser.parse_args()
    schemas, registry = load_registry(args.schemas)
    mutag = Path(args.data) / "MUTAG"
    quick = ["--epochs", "3", "--hidden-dim", "8", "--learning-rate", "0.01"]

    with tempfile.TemporaryDirectory(prefix="lagraph-it-") as tmp:
        tmp = Path(tmp)

        r = run(args.cli, "train", "--dataset", mutag, "--out", tmp / "t1", "--seed", "4", *quick)
        check(r.returncode == 0, f"train exits 0 ({r.stderr.strip()})")
        lines = (tmp / "t1" / "loss.jsonl").read_text().splitlines()
        check(len(lines) == 6, f"loss log has one line per step ({len(lines)})")
        for i, line in enumerate(lines):
            validate(schemas, registry, "loss_line.schema.json", json.loads(line), f"loss line {i + 1}")
        manifest = json.loads((tmp / "t1" / "manifest.json").read_text())
        validate(schemas, registry, "manifest.schema.json", manifest, "train manifest")
        check(all(Path(p).exists() for p in manifest["outputs"]), "every manifest output exists")

        r = run(args.cli, "train", "--dataset", mutag, "--out", tmp / "t2", "--seed", "4", *quick)
        check(filecmp.cmp(tmp / "t1" / "loss.jsonl", tmp / "t2" / "loss.jsonl", shallow=False),
              "same seed gives byte-identical loss logs")
        check(filecmp.cmp(tmp / "t1" / "checkpoint.json", tmp / "t2" / "checkpoint.json", shallow=False),
              "same seed gives byte-identical checkpoints")

        r = run(args.cli, "rerun", "--manifest", tmp / "t1" / "manifest.json", "--out", tmp / "t1r")
        check(r.returncode == 0, "rerun of train exits 0")
        check(filecmp.cmp(tmp / "t1" / "loss.jsonl", tmp / "t1r" / "loss.jsonl", shallow=False),
              "rerun reproduces the loss log")

        r = run(args.cli, "eval", "--checkpoint", tmp / "t1" / "checkpoint.json", "--dataset", mutag,
                "--level", "graph", "--folds", "5", "--reps", "2", "--out", tmp / "e1")
        check(r.returncode == 0, f"eval exits 0 ({r.stderr.strip()})")
        report = json.loads((tmp / "e1" / "report.json").read_text())
        validate(schemas, registry, "eval_report.schema.json", report, "eval report")
        validate(schemas, registry, "manifest.schema.json",
                 json.loads((tmp / "e1" / "manifest.json").read_text()), "eval manifest")
        check(report["num_runs"] == 2 and len(report["runs"][0]["fold_scores"]) == 5, "eval has 2 runs of 5 folds")
        r = run(args.cli, "rerun", "--manifest", tmp / "e1" / "manifest.json", "--out", tmp / "e1r")
        check(filecmp.cmp(tmp / "e1" / "report.json", tmp / "e1r" / "report.json", shallow=False),
              "rerun reproduces the eval report")

        r = run(args.cli, "verify", "--trials", "2", "--samples", "64", "--masks", "2", "--out", tmp / "v1")
        check(r.returncode == 0, "verify exits 0")
        verify = json.loads((tmp / "v1" / "verify.json").read_text())
        validate(schemas, registry, "verify.schema.json", verify, "verify output")
        r = run(args.cli, "verify", "--trials", "1", "--samples", "64", "--masks", "2", "--out", tmp / "v2")
        validate(schemas, registry, "verify.schema.json", json.loads((tmp / "v2" / "verify.json").read_text()),
                 "single-trial verify output")
        r = run(args.cli, "verify", "--trials", "2", "--samples", "64", "--masks", "2", "--suite", "theorem1",
                "--multiplier-scale", "-1", "--out", tmp / "v3")
        check(r.returncode == 1, f"corrupted multiplier exits 1 ({r.returncode})")

        r = run(args.cli, "ablate", "--study", "batch-size", "--dataset", mutag, "--sizes", "64", "188",
                "--folds", "3", "--out", tmp / "a1", *quick)
        check(r.returncode == 0, f"batch-size ablation exits 0 ({r.stderr.strip()})")
        ablation = json.loads((tmp / "a1" / "ablation.json").read_text())
        validate(schemas, registry, "ablation.schema.json", ablation, "ablation output")
        check(len(ablation["cells"]) == 2, "one cell per batch size")

        r = run(args.cli, "gen-sbm", "--nodes", "300", "--dim", "6", "--out", tmp / "sbm")
        check(r.returncode == 0, "gen-sbm exits 0")
        validate(schemas, registry, "manifest.schema.json",
                 json.loads((tmp / "sbm" / "manifest.json").read_text()), "gen-sbm manifest")
        r = run(args.cli, "ablate", "--study", "concat", "--dataset", tmp / "sbm", "--level", "node",
                "--epochs", "2", "--hidden-dim", "16", "--decoder-hidden", "16", "--out", tmp / "a2")
        check(r.returncode == 0, f"concat ablation exits 0 ({r.stderr.strip()})")
        validate(schemas, registry, "ablation.schema.json",
                 json.loads((tmp / "a2" / "ablation.json").read_text()), "concat ablation output")

        r = run(args.cli, "train", "--dataset", mutag, "--out", tmp / "bad", "--epochs", "0")
        check(r.returncode == 2 and "epochs" in r.stderr, "--epochs 0 is a usage error")
        check(not (tmp / "bad").exists(), "failed run leaves no output directory")
        r = run(args.cli, "eval", "--checkpoint", tmp / "t1" / "checkpoint.json", "--dataset", mutag,
                "--folds", "1", "--out", tmp / "bad")
        check(r.returncode == 2, "--folds 1 is a usage error")
        r = run(args.cli, "train", "--dataset", tmp / "missing", "--out", tmp / "bad")
        check(r.returncode == 3, "missing dataset is a runtime error")
        r = run(args.cli, "eval", "--checkpoint", tmp / "t1" / "checkpoint.json", "--dataset", tmp / "sbm",
                "--level", "node", "--out", tmp / "bad")
        check(r.returncode == 3 and "level" in r.stderr, "graph checkpoint rejected by node-level eval")
        r = run(args.cli, "train", "--bogus")
        check(r.returncode == 2, "unknown flag is a usage error")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
