"""Command-line entry point orchestrating the pipeline end to end.

Subcommands map 1:1 onto the library modules; the CLI only wires files,
flags, and manifests together. Exit codes: 0 success, 1 validation error,
2 runtime error.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click

from . import gateway as gateway_mod
from . import ingest as ingest_mod
from . import instructions as instr_mod
from . import ragstore as rag_mod
from . import raft as raft_mod
from .llm_client import BackendError, GenerationParams, LlmClient, LlmEndpointConfig
from .manifest import RunManifest, manifest_path
from .metrics import evaluate as metrics_evaluate
from .metrics import style_matrix as metrics_style_matrix
from .prompts import SYSTEM_PREAMBLE, build_user_preamble

CONFIG_FILE = "panza.toml"


def _load_config_file() -> dict:
    if not os.path.exists(CONFIG_FILE):
        return {}
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(CONFIG_FILE, "rb") as fh:
        return tomllib.load(fh)


def _backend_cfg(backend_url: str | None, model: str, timeout: float = 60.0,
                 max_parallel: int = 4, retry_limit: int = 2) -> LlmEndpointConfig:
    file_cfg = _load_config_file().get("backend", {})
    url = os.environ.get("PANZA_BACKEND_URL") or backend_url or file_cfg.get("url")
    if not url:
        raise click.UsageError(
            "no backend URL: pass --backend-url, set PANZA_BACKEND_URL, "
            "or add [backend] url to panza.toml"
        )
    return LlmEndpointConfig(
        base_url=url,
        model_name=model or file_cfg.get("model", "default"),
        timeout=timeout,
        max_parallel=max_parallel,
        retry_limit=retry_limit,
    )


def _emit(ctx, summary: dict) -> None:
    if ctx.obj.get("json"):
        click.echo(json.dumps(summary, default=str))
    else:
        for key, val in summary.items():
            click.echo(f"{key}: {val}")


@click.group()
@click.option("--json", "json_out", is_flag=True, help="machine-readable summaries")
@click.pass_context
def cli(ctx, json_out):
    ctx.ensure_object(dict)
    ctx.obj["json"] = json_out


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def ingest(ctx, in_path, rules_path, out_path):
    """Parse an mbox/CSV archive into a cleaned JSONL corpus."""
    if rules_path:
        with open(rules_path, encoding="utf-8") as fh:
            rules = ingest_mod.CleaningRules.from_json(json.load(fh))
    else:
        rules = ingest_mod.CleaningRules()
    manifest = RunManifest("ingest", {"rules": rules_path}, [in_path], [out_path])
    with open(in_path, "rb") as fh:
        data = fh.read()
    emails, skipped = ingest_mod.parse_mbox(data)
    kept, dropped = ingest_mod.clean_corpus(emails, rules)
    ingest_mod.write_corpus(kept, out_path)
    manifest.counts = {
        "parsed": len(emails) + len(skipped),
        "skipped": len(skipped),
        "dropped_by_cleaning": dropped,
        "kept": len(kept),
    }
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, **manifest.counts, "skip_report": skipped})


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--train-fraction", default=0.8, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def split(ctx, corpus_path, train_fraction, seed, out_path):
    """Assign train/test splits by seeded shuffle."""
    corpus = ingest_mod.read_corpus(corpus_path)
    manifest = RunManifest("split", {"train_fraction": train_fraction, "seed": seed},
                           [corpus_path], [out_path])
    split_corpus = ingest_mod.split_dataset(corpus, train_fraction, seed)
    ingest_mod.write_corpus(split_corpus, out_path)
    n_train = sum(e.split == ingest_mod.SPLIT_TRAIN for e in split_corpus)
    manifest.counts = {"total": len(split_corpus), "train": n_train,
                       "test": len(split_corpus) - n_train}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, **manifest.counts})


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--max-parallel", default=4, show_default=True)
@click.option("--retry-limit", default=2, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--failures", "failures_path", type=click.Path())
@click.pass_context
def summarize(ctx, corpus_path, backend_url, model, max_parallel, retry_limit,
              out_path, failures_path):
    """Generate reverse instructions for every train-split email."""
    cfg = _backend_cfg(backend_url, model, max_parallel=max_parallel,
                       retry_limit=retry_limit)
    corpus = ingest_mod.read_corpus(corpus_path)
    train = [e for e in corpus if e.split == ingest_mod.SPLIT_TRAIN]
    failures_path = failures_path or out_path + ".failures.jsonl"
    manifest = RunManifest("summarize", {"backend": cfg.base_url, "model": cfg.model_name},
                           [corpus_path], [out_path, failures_path])
    pairs, failures = instr_mod.build_pairs(train, cfg)
    instr_mod.write_pairs(pairs, out_path)
    with open(failures_path, "w", encoding="utf-8") as fh:
        for f in failures:
            fh.write(json.dumps(f, ensure_ascii=False) + "\n")
    manifest.counts = {"input": len(train), "pairs": len(pairs), "failures": len(failures)}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, **manifest.counts})


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def index(ctx, corpus_path, backend_url, model, out_path):
    """Embed the train split into a persisted RAG store."""
    cfg = _backend_cfg(backend_url, model)
    corpus = ingest_mod.read_corpus(corpus_path)
    manifest = RunManifest("index", {"backend": cfg.base_url, "model": cfg.model_name},
                           [corpus_path], [out_path])
    store = rag_mod.index_corpus(corpus, cfg)
    store.save(out_path)
    manifest.counts = {"indexed": len(store), "dimension": store.dim}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, **manifest.counts})


@cli.command("emit-train")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--p-rag", default=0.55, show_default=True)
@click.option("--n-rag", default=2, show_default=True)
@click.option("--t-rag", default=0.2, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--user-name", default="", help="fills the user preamble name slot")
@click.option("--user-preamble-file", type=click.Path(exists=True))
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--method", default="rosa", show_default=True,
              type=click.Choice(["fft", "rosa", "lora"]))
@click.option("--trainer-config-out", type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def emit_train(ctx, pairs_path, store_path, p_rag, n_rag, t_rag, seed, user_name,
               user_preamble_file, backend_url, model, method, trainer_config_out,
               out_path):
    """Emit the RAFT training JSONL and the trainer config."""
    cfg = _backend_cfg(backend_url, model)
    client = LlmClient(cfg)
    pairs = instr_mod.read_pairs(pairs_path)
    store = rag_mod.RagStore.load(store_path)
    params = raft_mod.RaftParams(p_rag=p_rag, n_rag=n_rag, t_rag=t_rag, seed=seed)
    user_preamble = _read_user_preamble(user_preamble_file, user_name)
    manifest = RunManifest("emit-train",
                           {"p_rag": p_rag, "n_rag": n_rag, "t_rag": t_rag,
                            "seed": seed, "backend": cfg.base_url},
                           [pairs_path, store_path], [out_path])
    examples, emit_manifest = raft_mod.emit_training_set(
        pairs, store, params, SYSTEM_PREAMBLE, user_preamble, client.embed)
    raft_mod.write_training_set(examples, out_path)
    if trainer_config_out:
        raft_mod.emit_trainer_config(raft_mod.TrainerConfig(method=method),
                                     trainer_config_out)
        manifest.output_paths.append(str(trainer_config_out))
    manifest.counts = {k: v for k, v in emit_manifest.items() if k != "params"}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, **manifest.counts})


def _read_user_preamble(user_preamble_file, user_name) -> str:
    if user_preamble_file:
        with open(user_preamble_file, encoding="utf-8") as fh:
            return fh.read().strip()
    if user_name:
        return build_user_preamble(user_name)
    return ""


@cli.command()
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--store", "store_path", type=click.Path(exists=True))
@click.option("--user-name", default="")
@click.option("--user-preamble-file", type=click.Path(exists=True))
@click.option("--n-rag", default=gateway_mod.INFERENCE_N_RAG, show_default=True)
@click.option("--t-rag", default=0.2, show_default=True)
@click.option("--listen", default="127.0.0.1:5000", show_default=True)
@click.option("--temperature", default=0.7, show_default=True)
@click.option("--top-p", default=0.7, show_default=True)
@click.option("--top-k", default=50, show_default=True)
@click.option("--max-tokens", default=1024, show_default=True)
def serve(backend_url, model, store_path, user_name, user_preamble_file,
          n_rag, t_rag, listen, temperature, top_p, top_k, max_tokens):
    """Run the generation gateway (blocks until interrupted)."""
    cfg = _backend_cfg(backend_url, model)
    config = gateway_mod.GatewayConfig(
        backend=cfg,
        user_preamble=_read_user_preamble(user_preamble_file, user_name),
        rag_store_path=store_path,
        n_rag=n_rag,
        t_rag=t_rag,
        generation=GenerationParams(temperature=temperature, top_p=top_p,
                                    top_k=top_k, max_tokens=max_tokens),
        listen_address=listen,
    )
    gateway_mod.run(config)


@cli.command("eval")
@click.option("--candidates", "candidates_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--k", type=int)
@click.option("--c", default=5.0, show_default=True)
@click.option("--grid-size", default=25, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--figure", "figure_path", type=click.Path())
@click.pass_context
def eval_cmd(ctx, candidates_path, corpus_path, backend_url, model, k, c,
             grid_size, seed, out_path, figure_path):
    """Score generated emails against the test split; writes report + figure."""
    cfg = _backend_cfg(backend_url, model)
    client = LlmClient(cfg)
    candidates = []
    with open(candidates_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                obj = json.loads(line)
                candidates.append((obj["email_id"], obj["text"]))
    references = ingest_mod.read_corpus(corpus_path)
    figure_path = figure_path or os.path.splitext(out_path)[0] + ".png"
    manifest = RunManifest("eval", {"k": k, "c": c, "grid_size": grid_size,
                                    "seed": seed, "backend": cfg.base_url},
                           [candidates_path, corpus_path], [out_path, figure_path])
    report = metrics_evaluate(candidates, references, client.embed,
                              k=k, c=c, grid_size=grid_size, seed=seed)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
    from .plots import plot_divergence_curve

    plot_divergence_curve(report.curve, report.mauve, figure_path)
    manifest.counts = {"candidates": len(candidates)}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, "figure": figure_path,
                "mean_bleu": report.mean_bleu, "mean_rouge_l_f1": report.mean_rouge,
                "mauve": report.mauve, "plausible": report.plausible})


@cli.command("style-matrix")
@click.option("--generations", "generations_path", required=True,
              type=click.Path(exists=True), help="JSON: {user: [texts]}")
@click.option("--references", "references_path", required=True,
              type=click.Path(exists=True), help="JSON: {user: [texts]}")
@click.option("--backend-url")
@click.option("--model", default="")
@click.option("--k", type=int)
@click.option("--c", default=5.0, show_default=True)
@click.option("--grid-size", default=25, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--figure", "figure_path", type=click.Path())
@click.pass_context
def style_matrix_cmd(ctx, generations_path, references_path, backend_url, model,
                     k, c, grid_size, seed, out_path, figure_path):
    """Cross-user MAUVE matrix; writes CSV and a heatmap."""
    cfg = _backend_cfg(backend_url, model)
    client = LlmClient(cfg)
    with open(generations_path, encoding="utf-8") as fh:
        generations = json.load(fh)
    with open(references_path, encoding="utf-8") as fh:
        references = json.load(fh)
    figure_path = figure_path or os.path.splitext(out_path)[0] + ".png"
    manifest = RunManifest("style-matrix",
                           {"k": k, "c": c, "grid_size": grid_size, "seed": seed,
                            "backend": cfg.base_url},
                           [generations_path, references_path], [out_path, figure_path])
    result = metrics_style_matrix(generations, references, client.embed,
                                  k=k, c=c, grid_size=grid_size, seed=seed)
    users, matrix = result["users"], result["matrix"]
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_user"] + users)
        for i, user in enumerate(users):
            writer.writerow([user] + [f"{matrix[i, j]:.6f}" for j in range(len(users))])
    from .plots import plot_style_matrix

    plot_style_matrix(users, matrix, figure_path)
    manifest.counts = {"users": len(users)}
    manifest.write(manifest_path(out_path))
    _emit(ctx, {"out": out_path, "figure": figure_path,
                "diagonal_dominant": result["diagonal_dominant"]})


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        if exc.ctx:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ingest_mod.IngestError, rag_mod.StoreError, raft_mod.RaftError,
            ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (BackendError, OSError) as exc:
        click.echo(f"runtime error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
