"""Command-line pipeline: ingest -> describe -> embed -> compile -> score.

Every command is deterministic for fixed inputs and seeds; text outputs
start with a provenance comment line and all files are written atomically
(temp + rename), so a failed run leaves no partial output behind.
"""

from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from pathlib import Path

import click

from . import __version__
from .concept import (
    HashEmbeddingBackend,
    HttpEmbeddingBackend,
    embed_descriptions,
    read_store,
    write_store,
)
from .config import EMBED_URL_ENV, PipelineConfig, load_config
from .budget import VocabTokenizer, WhitespaceTokenizer, dataset_stats, stats_to_json, stats_to_tsv
from .describe import (
    SchemaRegistry,
    TagFormat,
    describe_dataset,
    read_descriptions,
    write_descriptions,
)
from .errors import NoclError
from .graph import Graph, induced_subgraph, load_graphs, pair_induced_subgraph, validate_graph
from .report import save_budget_figure, save_score_figure
from .scoring import read_predictions, reports_to_json, reports_to_text, score_preds
from .taskgen import (
    CategorySet,
    PromptTemplates,
    gen_connector_corpus,
    gen_edge_check,
    gen_graph_classification,
    gen_link_prediction,
    gen_node_classification,
    gen_node_counting,
    read_corpus,
    read_graph_split,
    read_link_split,
    split_graphs,
    split_links,
    validate_corpus,
    write_corpus,
    write_graph_split,
    write_link_split,
)

log = logging.getLogger("nocl")

TASK_CHOICES = ("node", "link", "graph", "count", "edgecheck", "connector", "mix")


@contextmanager
def atomic_path(final: Path):
    """Yield a temp path in the same directory; rename on success, drop on error."""
    final = Path(final)
    final.parent.mkdir(parents=True, exist_ok=True)
    tmp = final.with_name(final.name + ".tmp")
    try:
        yield tmp
        os.replace(tmp, final)
    finally:
        tmp.unlink(missing_ok=True)


class Pipeline:
    """Shared context for the subcommands: config plus derived helpers."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.registry = SchemaRegistry(config.schemas_dir)
        self.templates = (
            PromptTemplates.load(config.templates)
            if config.templates
            else PromptTemplates.builtin()
        )

    @property
    def header(self) -> str:
        return f"nocl={__version__} seed={self.config.seed} config={self.config.config_hash}"

    def out(self, name: str) -> Path:
        return Path(self.config.out_dir) / name

    def load_dataset(self, name: str) -> list[Graph]:
        ds = self.config.dataset(name)
        return load_graphs(ds.graphs, schema_name=ds.schema)

    def backend(self):
        if self.config.embed_backend == "url":
            url = self.config.resolved_embed_url()
            if not url:
                raise NoclError(
                    f"embed backend is 'url' but neither {EMBED_URL_ENV} nor embed.url is set"
                )
            backend = HttpEmbeddingBackend(url)
            health = backend.health()
            if health.get("status") != "ok":
                raise NoclError(f"embedding service at {url} is not healthy: {health}")
            return backend
        dim = int(self.config.embed_backend.split(":", 1)[1])
        return HashEmbeddingBackend(dim)

    def store_for(self, name: str):
        path = self.out(f"{name}.store.bin")
        if not path.exists():
            raise NoclError(f"no embedding store at {path}; run 'nocl embed --dataset {name}' first")
        return read_store(path)

    def descriptions_for(self, name: str):
        path = self.out(f"{name}.descriptions.jsonl")
        if not path.exists():
            raise NoclError(
                f"no descriptions at {path}; run 'nocl describe --dataset {name}' first"
            )
        return read_descriptions(path)


pass_pipeline = click.make_pass_decorator(Pipeline)


@click.group()
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", type=click.Path(), default=None, help="Override the output directory.")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
@click.pass_context
def main(ctx, config_path, seed, out, verbose):
    """Graph-instruction compiler: descriptions, concept stores, corpora, metrics."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(message)s")
    try:
        config = load_config(config_path)
    except NoclError as exc:
        raise click.ClickException(str(exc)) from exc
    if seed is not None:
        config.seed = seed
    if out is not None:
        config.out_dir = Path(out)
    ctx.obj = Pipeline(config)


def _run(fn):
    """Convert pipeline errors into a nonzero exit with a clean message."""
    try:
        return fn()
    except NoclError as exc:
        raise click.ClickException(str(exc)) from exc


def _dataset_names(pipeline: Pipeline, dataset: str | None) -> list[str]:
    if dataset is not None:
        pipeline.config.dataset(dataset)
        return [dataset]
    return sorted(pipeline.config.datasets)


@main.command()
@click.option("--dataset", default=None, help="Dataset name (default: all).")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None,
              help="Validate a corpus file instead of graph inputs.")
@pass_pipeline
def validate(pipeline: Pipeline, dataset, corpus_path):
    """Validate graph inputs (or an instruction corpus)."""

    def body():
        if corpus_path:
            issues = validate_corpus(read_corpus(corpus_path))
            for issue in issues:
                click.echo(issue)
            if issues:
                raise NoclError(f"corpus has {len(issues)} issue(s)")
            click.echo(f"{corpus_path}: ok")
            return
        bad = 0
        for name in _dataset_names(pipeline, dataset):
            for g in pipeline.load_dataset(name):
                report = validate_graph(g)
                if not report.ok:
                    bad += 1
                    click.echo(str(report))
        if bad:
            raise NoclError(f"{bad} graph(s) failed validation")
        click.echo("all graphs ok")

    _run(body)


@main.command()
@click.option("--dataset", default=None, help="Dataset name (default: all).")
@pass_pipeline
def describe(pipeline: Pipeline, dataset):
    """Render node descriptions to <out>/<dataset>.descriptions.jsonl."""

    def body():
        for name in _dataset_names(pipeline, dataset):
            graphs = pipeline.load_dataset(name)
            descs = describe_dataset(graphs, pipeline.registry, TagFormat())
            out = pipeline.out(f"{name}.descriptions.jsonl")
            with atomic_path(out) as tmp:
                write_descriptions(descs, tmp, header=pipeline.header)
            click.echo(f"{name}: {len(descs)} descriptions -> {out}")

    _run(body)


@main.command()
@click.option("--dataset", default=None, help="Dataset name (default: all).")
@pass_pipeline
def embed(pipeline: Pipeline, dataset):
    """Embed descriptions into <out>/<dataset>.store.bin (+ .ids sidecar)."""

    def body():
        backend = pipeline.backend()
        for name in _dataset_names(pipeline, dataset):
            descs = pipeline.descriptions_for(name)
            store = embed_descriptions(descs, backend, pipeline.config.embed_batch_size)
            out = pipeline.out(f"{name}.store.bin")
            with atomic_path(out) as tmp:
                write_store(store, tmp)
                os.replace(f"{tmp}.ids", f"{out}.ids")
            click.echo(f"{name}: {store.count}x{store.dim} store -> {out}")

    _run(body)


@main.command()
@click.option("--dataset", required=True)
@click.option("--task", type=click.Choice(["link", "graph"]), required=True)
@pass_pipeline
def split(pipeline: Pipeline, dataset, task):
    """Write link or graph splits for a dataset."""

    def body():
        config = pipeline.config
        graphs = pipeline.load_dataset(dataset)
        if task == "link":
            if len(graphs) != 1:
                raise NoclError(f"link split expects a single-graph dataset, got {len(graphs)}")
            result = split_links(graphs[0], config.link_ratios, config.seed)
            out = pipeline.out(f"{dataset}.links.json")
            with atomic_path(out) as tmp:
                write_link_split(result, tmp, header=pipeline.header)
            sizes = {name: len(result.part(name)) for name in ("train", "valid", "test")}
            click.echo(f"{dataset}: link split {sizes} -> {out}")
        else:
            tags = split_graphs(graphs, config.graph_train_frac, config.seed)
            out = pipeline.out(f"{dataset}.graphsplit.json")
            with atomic_path(out) as tmp:
                write_graph_split(tags, tmp, header=pipeline.header)
            n_train = sum(1 for v in tags.values() if v == "train")
            click.echo(f"{dataset}: {n_train} train / {len(tags) - n_train} test -> {out}")

    _run(body)


def _compile_node(pipeline: Pipeline, name: str, graphs, store):
    ds = pipeline.config.dataset(name)
    if not ds.categories:
        raise NoclError(f"dataset '{name}' has no categories configured for node tasks")
    cats = CategorySet(dataset=name, categories=ds.categories)
    config = pipeline.config
    out = []
    for g in graphs:
        for node in g.nodes:
            if node.node_label is None:
                continue
            sg = induced_subgraph(g, node.node_id, config.hops, config.max_nodes, config.seed)
            out.append(
                gen_node_classification(
                    sg, store, cats, node.node_label,
                    split=node.split or "train",
                    templates=pipeline.templates,
                    seed=config.seed,
                )
            )
    return out


def _compile_link(pipeline: Pipeline, name: str, graphs, store):
    path = pipeline.out(f"{name}.links.json")
    if not path.exists():
        raise NoclError(f"no link split at {path}; run 'nocl split --dataset {name} --task link'")
    if len(graphs) != 1:
        raise NoclError("link compilation expects a single-graph dataset")
    g = graphs[0]
    config = pipeline.config
    links = read_link_split(path)
    out = []
    for part in ("train", "valid", "test"):
        for u, v, label in links.part(part):
            psg = pair_induced_subgraph(
                g, u, v, config.hops, config.max_nodes, config.seed
            )
            out.append(
                gen_link_prediction(
                    psg, store, label == "pos",
                    dataset=name, split=part,
                    templates=pipeline.templates,
                    seed=config.seed,
                )
            )
    return out


def _compile_graph(pipeline: Pipeline, name: str, graphs, store):
    ds = pipeline.config.dataset(name)
    if not ds.question_key:
        raise NoclError(f"dataset '{name}' has no question_key configured for graph tasks")
    path = pipeline.out(f"{name}.graphsplit.json")
    if not path.exists():
        raise NoclError(f"no graph split at {path}; run 'nocl split --dataset {name} --task graph'")
    tags = read_graph_split(path)
    out = []
    for g in graphs:
        out.append(
            gen_graph_classification(
                g, store, ds.question_key,
                dataset=name, split=tags.get(g.graph_id, "train"),
                templates=pipeline.templates,
                seed=pipeline.config.seed,
            )
        )
    return out


def _compile_aux(pipeline: Pipeline, name: str, graphs, store, which: str):
    config = pipeline.config
    out = []
    for g in graphs:
        for node in g.nodes:
            sg = induced_subgraph(g, node.node_id, config.hops, config.max_nodes, config.seed)
            if which == "count":
                out.append(
                    gen_node_counting(
                        sg, store, config.seed, dataset=name,
                        split=node.split or "train", templates=pipeline.templates,
                    )
                )
            else:
                if sg.n < 2:
                    log.debug("edge check: skipping single-node subgraph at '%s'", node.node_id)
                    continue
                out.append(
                    gen_edge_check(
                        sg, store, config.seed, dataset=name,
                        split=node.split or "train", templates=pipeline.templates,
                    )
                )
    return out


def _compile_connector(pipeline: Pipeline, name: str, graphs, store):
    ds = pipeline.config.dataset(name)
    descs = {d.node_id: d for d in pipeline.descriptions_for(name)}
    cats = CategorySet(dataset=name, categories=ds.categories) if ds.categories else None
    out = []
    for g in graphs:
        for node in g.nodes:
            if node.node_id not in descs:
                raise NoclError(f"no description for node '{node.node_id}'; rerun describe")
            out.extend(
                gen_connector_corpus(
                    node, descs[node.node_id], cats,
                    dataset=name, templates=pipeline.templates,
                )
            )
    return out


@main.command(name="compile")
@click.option("--dataset", required=True)
@click.option("--task", type=click.Choice(TASK_CHOICES), required=True)
@pass_pipeline
def compile_cmd(pipeline: Pipeline, dataset, task):
    """Compile an instruction corpus to <out>/<dataset>.<task>.jsonl."""

    def body():
        graphs = pipeline.load_dataset(dataset)
        store = pipeline.store_for(dataset)
        builders = {
            "node": lambda: _compile_node(pipeline, dataset, graphs, store),
            "link": lambda: _compile_link(pipeline, dataset, graphs, store),
            "graph": lambda: _compile_graph(pipeline, dataset, graphs, store),
            "count": lambda: _compile_aux(pipeline, dataset, graphs, store, "count"),
            "edgecheck": lambda: _compile_aux(pipeline, dataset, graphs, store, "edgecheck"),
            "connector": lambda: _compile_connector(pipeline, dataset, graphs, store),
        }
        if task == "mix":
            ds = pipeline.config.dataset(dataset)
            examples = []
            if ds.categories:
                examples += builders["node"]()
            if pipeline.out(f"{dataset}.links.json").exists():
                examples += builders["link"]()
            if ds.question_key and pipeline.out(f"{dataset}.graphsplit.json").exists():
                examples += builders["graph"]()
            examples += builders["count"]()
            examples += builders["edgecheck"]()
        else:
            examples = builders[task]()
        issues = validate_corpus(examples)
        if issues:
            raise NoclError(
                "generated corpus failed read-back validation:\n" + "\n".join(issues[:10])
            )
        out = pipeline.out(f"{dataset}.{task}.jsonl")
        with atomic_path(out) as tmp:
            write_corpus(examples, tmp, header=pipeline.header)
        click.echo(f"{dataset}: {len(examples)} examples -> {out}")

    _run(body)


@main.command()
@click.option("--corpus", "corpus_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--descriptions", "desc_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--vocab", type=click.Path(exists=True), default=None,
              help="Vocabulary file for greedy longest-match counting.")
@click.option("--prefix", default="stats", help="Output filename prefix.")
@pass_pipeline
def stats(pipeline: Pipeline, corpus_paths, desc_paths, vocab, prefix):
    """Token-budget statistics (TSV + JSON + figure) for compiled corpora."""

    def body():
        corpus = []
        for path in corpus_paths:
            corpus.extend(read_corpus(path))
        lookup = {}
        for path in desc_paths:
            lookup.update({d.node_id: d.text for d in read_descriptions(path)})
        tokenizer = VocabTokenizer.load(vocab) if vocab else WhitespaceTokenizer()
        rows = dataset_stats(corpus, tokenizer, lookup)

        tsv_out = pipeline.out(f"{prefix}.tsv")
        with atomic_path(tsv_out) as tmp:
            tmp.write_text(f"# {pipeline.header}\n" + stats_to_tsv(rows) + "\n", encoding="utf-8")
        json_out = pipeline.out(f"{prefix}.json")
        with atomic_path(json_out) as tmp:
            tmp.write_text(stats_to_json(rows) + "\n", encoding="utf-8")
        fig_out = pipeline.out(f"{prefix}.png")
        with atomic_path(fig_out) as tmp:
            save_budget_figure(rows, tmp)
        click.echo(stats_to_tsv(rows))
        click.echo(f"stats -> {tsv_out}, {json_out}, {fig_out}")

    _run(body)


@main.command()
@click.option("--preds", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--prefix", default="score", help="Output filename prefix.")
@click.option("--lenient-categories", default=None,
              help="Comma-separated categories for lenient substring matching.")
@pass_pipeline
def score(pipeline: Pipeline, preds, gold, prefix, lenient_categories):
    """Score a prediction file against a gold corpus."""

    def body():
        cats = (
            [c.strip() for c in lenient_categories.split(",")] if lenient_categories else None
        )
        reports = score_preds(read_predictions(preds), read_corpus(gold), cats)
        text = reports_to_text(reports)
        click.echo(text)

        txt_out = pipeline.out(f"{prefix}.txt")
        with atomic_path(txt_out) as tmp:
            tmp.write_text(f"# {pipeline.header}\n" + text + "\n", encoding="utf-8")
        json_out = pipeline.out(f"{prefix}.json")
        with atomic_path(json_out) as tmp:
            tmp.write_text(reports_to_json(reports) + "\n", encoding="utf-8")
        fig_out = pipeline.out(f"{prefix}.png")
        with atomic_path(fig_out) as tmp:
            save_score_figure(reports, tmp)
        click.echo(f"report -> {txt_out}, {json_out}, {fig_out}")

    _run(body)


if __name__ == "__main__":
    main()
