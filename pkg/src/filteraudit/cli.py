"""Command line entry point: resumable pipeline stages over a run directory.

Each stage records a manifest (input hashes, a params hash, output hashes,
duration); ``all`` skips stages whose inputs and params are unchanged and
whose recorded outputs still exist, so corrupting an intermediate shard only
reruns the stages that consume it. Failed stages leave their partial outputs
under ``quarantine/`` and an ``error.json`` record at the run root.

Exit codes: 0 ok, 1 config validation, 2 runtime failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import time
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .pipeline import STAGE_FUNCS, STAGES, stage_inputs, stage_params
from .report import canonical_json

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


class StageFailure(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _params_hash(params: dict) -> str:
    return hashlib.sha256(canonical_json(params).encode("utf-8")).hexdigest()


def _manifest_path(root: Path, stage: str) -> Path:
    return root / "manifests" / f"{stage}.json"


def _can_skip(root: Path, stage: str, inputs: dict[str, str], params_hash: str) -> bool:
    path = _manifest_path(root, stage)
    if not path.exists():
        return False
    try:
        manifest = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError):
        return False
    if manifest.get("inputs") != inputs or manifest.get("params_hash") != params_hash:
        return False
    outputs = manifest.get("outputs", {})
    if not outputs:
        return False
    return all((root / rel).exists() for rel in outputs)


def _move_into_place(tmp: Path, root: Path) -> dict[str, str]:
    """Move every file under tmp into root, preserving relative layout."""
    outputs: dict[str, str] = {}
    for path in sorted(p for p in tmp.rglob("*") if p.is_file()):
        rel = path.relative_to(tmp)
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        if target.exists():
            target.unlink()
        shutil.move(str(path), str(target))
        outputs[str(rel)] = _sha256_file(target)
    shutil.rmtree(tmp, ignore_errors=True)
    return outputs


def _quarantine(tmp: Path, root: Path, stage: str) -> None:
    if not tmp.exists():
        return
    quarantine_root = root / "quarantine"
    quarantine_root.mkdir(parents=True, exist_ok=True)
    n = 0
    while (quarantine_root / f"{stage}_{n}").exists():
        n += 1
    shutil.move(str(tmp), str(quarantine_root / f"{stage}_{n}"))


def run_stage(cfg: RunConfig, stage: str, *, force: bool = False) -> bool:
    """Run one stage (or skip it when cached). Returns True if work was done."""
    root = cfg.output_dir
    root.mkdir(parents=True, exist_ok=True)
    input_paths = stage_inputs(cfg, root, stage)
    missing = [str(p) for p in input_paths if not p.exists()]
    if missing:
        raise StageFailure(stage, FileNotFoundError(f"missing stage inputs: {', '.join(missing)}"))
    inputs = {str(p): _sha256_file(p) for p in sorted(input_paths)}
    params_hash = _params_hash(stage_params(cfg, stage))
    if not force and _can_skip(root, stage, inputs, params_hash):
        return False
    tmp = root / f".tmp_{stage.replace('-', '_')}"
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    started = time.monotonic()
    try:
        STAGE_FUNCS[stage](cfg, root, tmp, cfg.jobs)
    except BaseException as exc:
        _quarantine(tmp, root, stage)
        raise StageFailure(stage, exc) from exc
    outputs = _move_into_place(tmp, root)
    manifest = {
        "stage": stage,
        "inputs": inputs,
        "params_hash": params_hash,
        "outputs": outputs,
        "duration_s": round(time.monotonic() - started, 6),
    }
    manifest_path = _manifest_path(root, stage)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", "utf-8")
    return True


def _write_error_record(cfg: RunConfig | None, stage: str, exc: BaseException, code: int) -> None:
    if cfg is None:
        return
    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        record = {
            "stage": stage,
            "error": str(exc),
            "type": type(exc).__name__,
            "exit_code": code,
        }
        (cfg.output_dir / "error.json").write_text(json.dumps(record, sort_keys=True, indent=2) + "\n", "utf-8")
    except OSError:
        pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filteraudit",
        description="Audit how corpus filtering strategies impact demographic groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES + ("all",):
        cmd = sub.add_parser(name, help=f"run the {name} stage" if name != "all" else "run every stage")
        cmd.add_argument("--config", required=True, help="path to the run config file")
        cmd.add_argument("--jobs", type=int, default=None, help="parallel workers within a stage")
        cmd.add_argument("--offline", action="store_true", help="disable all network adapters")
        cmd.add_argument("--seed", type=int, default=None, help="override the run seed")
        cmd.add_argument("--force", action="store_true", help="ignore stage caches")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg: RunConfig | None = None
    stage = args.command
    try:
        cfg = load_config(args.config)
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            cfg.jobs = args.jobs
        if args.offline:
            cfg.adapters.offline = True
        if args.seed is not None:
            cfg.run_seed = args.seed
        stages = list(STAGES) if args.command == "all" else [args.command]
        for stage in stages:
            did_work = run_stage(cfg, stage, force=args.force)
            status = "done" if did_work else "cached"
            print(f"[{stage}] {status}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageFailure as exc:
        cause = exc.cause
        code = EXIT_IO if isinstance(cause, OSError) else EXIT_RUNTIME
        _write_error_record(cfg, exc.stage, cause, code)
        print(f"error: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        _write_error_record(cfg, stage, exc, EXIT_IO)
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
