"""Command line entry point: ``sembleu <subcommand> ...``."""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import harness
from .graph import ParseError, normalize_inverse, read_corpus, to_penman
from .metric import SembleuConfig, sembleu_corpus, sembleu_sentence
from .ngram import iter_ngrams, ngram_key
from .smatch import DEFAULT_RESTARTS, TOP_MODES, pair_seed, smatch_corpus, smatch_score
from .synthetic import simulate_judgments, synthetic_corpus, system_outputs


def format_percent(value: float, digits: int = 2) -> str:
    """``value`` as a percentage rounded to ``digits`` significant digits."""
    x = 100.0 * value
    if x == 0 or not math.isfinite(x):
        return f"{x:g}"
    decimals = digits - 1 - math.floor(math.log10(abs(x)))
    x = round(x, decimals)
    return f"{x:.{max(decimals, 0)}f}"


def _load_pairs(candidates, references):
    cands, refs = _read(candidates), _read(references)
    if len(cands) != len(refs):
        raise click.UsageError(f"{candidates} has {len(cands)} AMRs but {references} has {len(refs)}")
    return list(zip(cands, refs))


def _read(path):
    try:
        return read_corpus(path)
    except ParseError as err:
        raise click.ClickException(f"{path}: {err}") from err


def _systems(specs, n_refs):
    outputs = {}
    for item in specs:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise click.BadParameter(f"expected NAME=FILE, got {item!r}", param_hint="--system")
        outputs[name] = _read(path)
        if len(outputs[name]) != n_refs:
            raise click.UsageError(f"system {name!r} has {len(outputs[name])} AMRs for {n_refs} references")
    return outputs


def _emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


def _config(max_order, smoothing, weights):
    try:
        w = tuple(float(x) for x in weights.split(",")) if weights else None
        return SembleuConfig(max_order=max_order, weights=w, smoothing=smoothing)
    except ValueError as err:
        raise click.BadParameter(str(err)) from err


def _metric(name, max_order, restarts, seed, top):
    if name == "sembleu":
        return harness.SembleuMetric(SembleuConfig(max_order=max_order))
    return harness.SmatchMetric(restarts, seed, top)


candidates_opt = click.option("--candidates", "-c", required=True, type=click.Path(exists=True, dir_okay=False))
references_opt = click.option("--references", "-r", "references", required=True,
                              type=click.Path(exists=True, dir_okay=False))
system_opt = click.option("--system", "systems", multiple=True, required=True, metavar="NAME=FILE",
                          help="System output file, block-aligned with the references. Repeatable.")
out_opt = click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON report here.")
precision_opt = click.option("--precision", default=2, show_default=True,
                             help="Significant digits of printed percentages.")


@click.group()
def main():
    """SemBleu and Smatch scores for AMR graphs, plus the experiment harness."""


@main.command()
@candidates_opt
@references_opt
@click.option("--max-order", default=3, show_default=True)
@click.option("--smoothing", type=click.Choice(["none", "nist"]), default=None,
              help="Default: nist in sentence mode, none in corpus mode.")
@click.option("--mode", type=click.Choice(["corpus", "sentence"]), default="corpus", show_default=True)
@click.option("--weights", default=None, help="Comma-separated order weights (default uniform).")
@precision_opt
def score(candidates, references, max_order, smoothing, mode, weights, precision):
    """SemBleu of candidate AMRs against reference AMRs."""
    cfg = _config(max_order, smoothing, weights)
    pairs = _load_pairs(candidates, references)
    if mode == "sentence":
        for i, (c, r) in enumerate(pairs):
            click.echo(f"{i}\t{format_percent(sembleu_sentence(c, r, cfg).value, precision)}")
        return
    if not pairs:
        raise click.UsageError("no AMRs to score")
    result = sembleu_corpus(pairs, cfg)
    report = result.as_dict()
    report["percent"] = format_percent(result.value, precision)
    _emit(report, None)


@main.command()
@click.option("--input", "-i", "path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--max-order", default=3, show_default=True)
def ngrams(path, max_order):
    """Dump extracted n-grams as ORDER<TAB>KEY<TAB>COUNT, one block per AMR."""
    for i, g in enumerate(_read(path)):
        if i:
            click.echo("")
        counts = {}
        for ng in iter_ngrams(normalize_inverse(g), max_order):
            key = (ng.order, ngram_key(ng))
            counts[key] = counts.get(key, 0) + 1
        for (order, key), count in sorted(counts.items(), key=lambda kv: kv[0][0]):
            click.echo(f"{order}\t{key}\t{count}")


@main.command()
@candidates_opt
@references_opt
@click.option("-R", "--restarts", default=DEFAULT_RESTARTS, show_default=True, help="Hill-climbing restarts.")
@click.option("--seed", default=0, show_default=True)
@click.option("--top", type=click.Choice(TOP_MODES), default="concept", show_default=True)
@click.option("--per-sentence", is_flag=True, help="Also print P/R/F per pair.")
@precision_opt
def smatch(candidates, references, restarts, seed, top, per_sentence, precision):
    """Smatch precision, recall and F1 (percent)."""
    pairs = _load_pairs(candidates, references)
    if not pairs:
        raise click.UsageError("no AMRs to score")
    if restarts < 1:
        raise click.BadParameter("must be >= 1", param_hint="--restarts")
    if per_sentence:
        for i, (c, r) in enumerate(pairs):
            res = smatch_score(c, r, restarts, pair_seed(seed, i), top)
            click.echo("\t".join([str(i)] + [format_percent(x, precision)
                                             for x in (res.precision, res.recall, res.f1)]))
    result = smatch_corpus(pairs, restarts, seed, top)
    click.echo(f"Precision: {format_percent(result.precision, precision)}")
    click.echo(f"Recall: {format_percent(result.recall, precision)}")
    click.echo(f"F-score: {format_percent(result.f1, precision)}")


@main.command()
@candidates_opt
@references_opt
@click.option("--restarts", "r_values", default="1,2,3,4", show_default=True)
@click.option("--runs", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--top", type=click.Choice(TOP_MODES), default="concept", show_default=True)
@out_opt
def variance(candidates, references, r_values, runs, seed, top, out):
    """Mean/min/max corpus Smatch over seeded runs for each restart count."""
    pairs = _load_pairs(candidates, references)
    try:
        rows = harness.restart_variance(pairs, [int(x) for x in r_values.split(",")], runs, seed, top)
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    _emit({"rows": [{"restarts": r.restarts, "mean": r.mean, "min": r.min, "max": r.max,
                     "spread": r.spread, "runtime": r.runtime, "search_runtime": r.search_runtime}
                    for r in rows]}, out)


def _agreement_inputs(judgments, references, systems):
    refs = _read(references)
    outputs = _systems(systems, len(refs))
    try:
        records = harness.read_judgments(judgments)
    except (ValueError, KeyError) as err:
        raise click.ClickException(f"{judgments}: {err}") from err
    return records, outputs, refs


judgments_opt = click.option("--judgments", "-j", required=True, type=click.Path(exists=True, dir_okay=False))
metric_opt = click.option("--metric", type=click.Choice(["sembleu", "smatch"]), default="sembleu",
                          show_default=True)


@main.command("agree-corpus")
@judgments_opt
@references_opt
@system_opt
@metric_opt
@click.option("--max-order", default=3, show_default=True)
@click.option("--restarts", default=DEFAULT_RESTARTS, show_default=True)
@click.option("--samples", default=1000, show_default=True)
@click.option("--sample-size", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--top", type=click.Choice(TOP_MODES), default="concept", show_default=True)
@click.option("--workers", default=1, show_default=True)
@out_opt
def agree_corpus(judgments, references, systems, metric, max_order, restarts, samples, sample_size,
                 seed, top, workers, out):
    """Bootstrap accuracy of corpus-level system orderings vs human scores."""
    records, outputs, refs = _agreement_inputs(judgments, references, systems)
    try:
        acc = harness.corpus_agreement_bootstrap(
            records, outputs, refs, _metric(metric, max_order, restarts, seed, top),
            samples, sample_size, seed, workers)
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    _emit({"metric": metric, "samples": samples, "sample_size": sample_size, "seed": seed,
           "accuracy": {f"{a} vs {b}": v for (a, b), v in acc.items()}}, out)


@main.command("agree-sentence")
@judgments_opt
@references_opt
@system_opt
@metric_opt
@click.option("--max-order", "orders", multiple=True, type=int,
              help="SemBleu max order; repeat to sweep (default 3).")
@click.option("--restarts", default=DEFAULT_RESTARTS, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--top", type=click.Choice(TOP_MODES), default="concept", show_default=True)
@out_opt
def agree_sentence(judgments, references, systems, metric, orders, restarts, seed, top, out):
    """Percent of pairwise human judgments a sentence-level metric reproduces."""
    records, outputs, refs = _agreement_inputs(judgments, references, systems)
    orders = orders or (3,)
    try:
        if metric == "sembleu":
            result = {str(n): harness.sentence_agreement(records, outputs, refs, _metric(metric, n, 0, 0, top))
                      for n in orders}
        else:
            result = {"smatch": harness.sentence_agreement(records, outputs, refs,
                                                           _metric(metric, 3, restarts, seed, top))}
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    _emit({"metric": metric, "accuracy": result}, out)


@main.command()
@click.option("--input", "-i", "path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--max-order", default=3, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Write nodes,order,count rows here.")
@out_opt
def growth(path, max_order, csv_path, out):
    """Extracted n-gram counts as a function of graph node count."""
    report = harness.ngram_growth(_read(path), max_order)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("nodes,order,count\n")
            for row in report.csv_rows():
                fh.write(",".join(map(str, row)) + "\n")
    _emit({"graphs": len(report.records),
           "fits": {str(k): {"slope": s, "intercept": b} for k, (s, b) in report.fits.items()}}, out)


@main.command()
@references_opt
@system_opt
@click.option("--metric", "metrics", multiple=True, type=click.Choice(["sembleu", "smatch"]),
              help="Repeatable; default both.")
@click.option("--max-order", default=3, show_default=True)
@click.option("--restarts", default=DEFAULT_RESTARTS, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--top", type=click.Choice(TOP_MODES), default="concept", show_default=True)
@out_opt
def rank(references, systems, metrics, max_order, restarts, seed, top, out):
    """Rank systems by corpus score under each metric and flag disagreements."""
    refs = _read(references)
    outputs = _systems(systems, len(refs))
    metrics = metrics or ("sembleu", "smatch")
    try:
        report = harness.rank_systems(outputs, refs, [_metric(m, max_order, restarts, seed, top) for m in metrics])
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    _emit(report.as_dict(), out)


@main.command()
@click.option("--candidates", "-c", type=click.Path(exists=True, dir_okay=False))
@click.option("--references", "-r", "references", type=click.Path(exists=True, dir_okay=False))
@click.option("--synthetic", type=int, default=None, help="Benchmark on N synthetic pairs instead.")
@click.option("--restarts", default=DEFAULT_RESTARTS, show_default=True)
@click.option("--seed", default=0, show_default=True)
@out_opt
def bench(candidates, references, synthetic, restarts, seed, out):
    """Wall-clock time of corpus SemBleu vs corpus Smatch."""
    if synthetic:
        refs = synthetic_corpus(synthetic, seed)
        cands = system_outputs(refs, {"sys": 0.25}, seed)["sys"]
        pairs = list(zip(cands, refs))
    elif candidates and references:
        pairs = _load_pairs(candidates, references)
    else:
        raise click.UsageError("give --candidates and --references, or --synthetic N")
    _emit(harness.benchmark(pairs, restarts=restarts, seed=seed).as_dict(), out)


@main.command("gen-synthetic")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--sentences", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--system", "levels", multiple=True, metavar="NAME=NOISE",
              help="System name and noise level; repeatable. Default: four systems.")
def gen_synthetic(out_dir, sentences, seed, levels):
    """Write a synthetic reference corpus, noisy system outputs and judgments."""
    noise = {}
    for item in levels or ("alpha=0.45", "beta=0.4", "gamma=0.25", "delta=0.2"):
        name, sep, level = item.partition("=")
        try:
            noise[name] = float(level)
        except ValueError:
            raise click.BadParameter(f"expected NAME=NOISE, got {item!r}", param_hint="--system")
        if not sep or not name:
            raise click.BadParameter(f"expected NAME=NOISE, got {item!r}", param_hint="--system")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    refs = synthetic_corpus(sentences, seed)
    outputs = system_outputs(refs, noise, seed)

    def write(path, graphs):
        path.write_text("\n\n".join(to_penman(g, indent=4) for g in graphs) + "\n", encoding="utf-8")

    write(out / "reference.amr", refs)
    for name, graphs in outputs.items():
        write(out / f"{name}.amr", graphs)
    harness.write_judgments(out / "judgments.tsv", simulate_judgments(refs, outputs, seed))
    click.echo(f"wrote {len(refs)} references, {len(outputs)} systems and judgments to {out}")


if __name__ == "__main__":
    sys.exit(main())
