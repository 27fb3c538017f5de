"""Command line surface.

Exit codes: 0 success, 1 usage error, 2 data error. All outputs are
deterministic functions of inputs, flags and seeds; reports embed a config
hash and never timestamps. Environment variables are not read.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from .coref import DEFAULT_COREF_PATTERNS, tag_coreferences
from .errors import DstEvalError, SchemaError
from .evaluate import evaluate_run
from .loaders import (
    load_aliases,
    load_corpus,
    load_predictions,
    save_corpus,
)
from .ontology import Ontology, default_ontology
from .pairs import PARAPHRASE, PERTURBATION_KINDS, align_pairs
from .perturb import (
    DisfluencyConfig,
    DisfluencyInserter,
    EntityMap,
    EntityScrambler,
    FewShotSampler,
    save_insertion_log,
    validate_paraphrase_pairs,
)
from .report import RunReport, canonical_json, config_hash, merge_reports, render_table


def _load_ontology(path, ne_slots):
    ontology = Ontology.from_file(path) if path else default_ontology()
    if ne_slots:
        pairs = []
        for item in ne_slots:
            domain, sep, slot = item.partition("/")
            if not sep or not domain or not slot:
                raise click.UsageError(
                    f"--ne-slot must look like 'domain/slot type', got {item!r}"
                )
            pairs.append((domain, slot))
        ontology = ontology.with_named_entity_slots(pairs)
    return ontology


def _parse_kind_path(values, flag):
    out = {}
    for item in values:
        kind, sep, path = item.partition("=")
        if not sep or kind not in PERTURBATION_KINDS:
            raise click.UsageError(
                f"{flag} must look like 'KIND=PATH' with KIND in "
                f"{PERTURBATION_KINDS}, got {item!r}"
            )
        if kind in out:
            raise click.UsageError(f"{flag} given twice for kind {kind!r}")
        out[kind] = path
    return out


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _apply_config_file(ctx, param, value):
    if value:
        try:
            data = json.loads(Path(value).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file {value} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SchemaError("config file must hold a JSON object of option values")
        ctx.default_map = {**(ctx.default_map or {}), **data}
    return value


@click.group()
def cli():
    """Robustness evaluation for dialogue state tracking."""


@cli.command()
@click.option(
    "--config",
    "config_file",
    type=click.Path(),
    is_eager=True,
    expose_value=False,
    callback=_apply_config_file,
    help="JSON file of option defaults (keys are option names with underscores).",
)
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--predictions", "predictions_path", required=True, type=click.Path())
@click.option("--perturbed-corpus", "perturbed_corpus", multiple=True,
              help="KIND=PATH of a perturbed corpus (repeatable).")
@click.option("--perturbed-predictions", "perturbed_preds", multiple=True,
              help="KIND=PATH of predictions on that perturbed corpus (repeatable).")
@click.option("--entity-map", "entity_map_path", type=click.Path(),
              help="Entity map used to check named-entity gold alignment.")
@click.option("--ontology", "ontology_path", type=click.Path())
@click.option("--aliases", "aliases_path", type=click.Path())
@click.option("--ne-slot", "ne_slots", multiple=True,
              help="Override: treat exactly these 'domain/slot type' slots as named entities.")
@click.option("--unit", type=click.Choice(["turn", "dialogue"]), default="turn")
@click.option("--model", "model_name", default="model")
@click.option("--seed-label", default="run0")
@click.option("--tag-coref", is_flag=True, default=False,
              help="Flag coreference turns with the regex heuristic before scoring.")
@click.option("--coref-pattern", "coref_patterns", multiple=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--format", "formats", type=click.Choice(["json", "table", "both"]),
              default="both")
def evaluate(corpus_path, predictions_path, perturbed_corpus, perturbed_preds,
             entity_map_path, ontology_path, aliases_path, ne_slots, unit,
             model_name, seed_label, tag_coref, coref_patterns, out_dir, formats):
    """Score predictions against a corpus and its perturbed counterparts."""
    perturbed_paths = _parse_kind_path(perturbed_corpus, "--perturbed-corpus")
    perturbed_pred_paths = _parse_kind_path(perturbed_preds, "--perturbed-predictions")

    ontology = _load_ontology(ontology_path, ne_slots)
    aliases = load_aliases(aliases_path) if aliases_path else None
    original = load_corpus(corpus_path, ontology, aliases)
    if tag_coref:
        patterns = coref_patterns or DEFAULT_COREF_PATTERNS
        original = tag_coreferences(original, patterns)
    predictions = load_predictions(
        predictions_path, ontology, model_name=model_name, seed_label=seed_label,
        aliases=aliases,
    )
    perturbed = {
        kind: load_corpus(path, ontology, aliases)
        for kind, path in perturbed_paths.items()
    }
    perturbed_predictions = {
        kind: load_predictions(path, ontology, model_name=model_name,
                               seed_label=seed_label, aliases=aliases)
        for kind, path in perturbed_pred_paths.items()
    }
    entity_map = EntityMap.load(entity_map_path) if entity_map_path else None

    run_hash = config_hash(
        {
            "command": "evaluate",
            "corpus": str(corpus_path),
            "predictions": str(predictions_path),
            "perturbed_corpus": dict(sorted(perturbed_paths.items())),
            "perturbed_predictions": dict(sorted(perturbed_pred_paths.items())),
            "entity_map": str(entity_map_path) if entity_map_path else None,
            "ontology": str(ontology_path) if ontology_path else None,
            "aliases": str(aliases_path) if aliases_path else None,
            "ne_slots": sorted(ne_slots),
            "unit": unit,
            "tag_coref": tag_coref,
            "coref_patterns": list(coref_patterns),
        }
    )
    report = evaluate_run(
        original,
        predictions,
        perturbed=perturbed,
        perturbed_predictions=perturbed_predictions,
        entity_map=entity_map,
        unit=unit,
        config_hash_value=run_hash,
    )

    out = Path(out_dir)
    table = render_table(merge_reports([report]))
    if formats in ("json", "both"):
        _write(out / f"{model_name}_{seed_label}.report.json", canonical_json(report.to_dict()))
    if formats in ("table", "both"):
        _write(out / f"{model_name}_{seed_label}.report.txt", table + "\n")
    click.echo(table)


@cli.group()
def perturb():
    """Generate perturbed corpora."""


@perturb.command("scramble-ne")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--ontology", "ontology_path", type=click.Path())
@click.option("--ne-slot", "ne_slots", multiple=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def perturb_scramble(corpus_path, ontology_path, ne_slots, seed, out_dir):
    """Replace named entities with scrambled ones, in text and gold states."""
    ontology = _load_ontology(ontology_path, ne_slots)
    corpus = load_corpus(corpus_path, ontology)
    scrambler = EntityScrambler(ontology=ontology, seed=seed).fit(corpus)
    perturbed = scrambler.transform(corpus)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(perturbed, out / "perturbed_corpus.json")
    scrambler.entity_map_.save(out / "entity_map.json")
    manifest = {
        "kind": "named_entity",
        "seed": seed,
        "config_hash": config_hash(
            {"command": "perturb scramble-ne", "corpus": str(corpus_path),
             "ontology": str(ontology_path) if ontology_path else None,
             "ne_slots": sorted(ne_slots), "seed": seed}
        ),
        "source_corpus": corpus.name,
        "entity_map": dict(sorted(scrambler.entity_map_.mapping.items())),
        "n_entities": len(scrambler.entity_map_.mapping),
        "orphan_entities": [list(item) for item in scrambler.orphans_],
    }
    _write(out / "manifest.json", canonical_json(manifest))
    click.echo(
        f"scrambled {manifest['n_entities']} entities "
        f"({len(scrambler.orphans_)} never seen in text)"
    )


@perturb.command("disfluency")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--ontology", "ontology_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(),
              help="Disfluency configuration JSON; defaults are shipped.")
@click.option("--seed", type=int, default=None, help="Overrides the config seed.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def perturb_disfluency(corpus_path, ontology_path, config_path, seed, out_dir):
    """Insert fillers, repetitions, restarts and self-repairs into user turns."""
    ontology = _load_ontology(ontology_path, ())
    corpus = load_corpus(corpus_path, ontology)
    config = DisfluencyConfig.load(config_path) if config_path else DisfluencyConfig()
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    inserter = DisfluencyInserter(config=config)
    perturbed = inserter.fit_transform(corpus)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(perturbed, out / "perturbed_corpus.json")
    save_insertion_log(inserter.insertion_log_, out / "insertion_log.jsonl")
    manifest = {
        "kind": "disfluency",
        "seed": config.seed,
        "config_hash": config_hash(config.to_dict()),
        "source_corpus": corpus.name,
        "word_increase_ratio": inserter.achieved_ratio_,
        "target_ratio": config.target_ratio,
        "n_insertions": len(inserter.insertion_log_),
    }
    _write(out / "manifest.json", canonical_json(manifest))
    click.echo(
        f"inserted {manifest['n_insertions']} spans, "
        f"word increase {inserter.achieved_ratio_:.4f} "
        f"(target {config.target_ratio:.4f})"
    )


@cli.command("validate-paraphrases")
@click.option("--original", "original_path", required=True, type=click.Path())
@click.option("--paraphrased", "paraphrased_path", required=True, type=click.Path())
@click.option("--ontology", "ontology_path", type=click.Path())
@click.option("--out", "out_path", type=click.Path())
def validate_paraphrases(original_path, paraphrased_path, ontology_path, out_path):
    """Check an ingested paraphrase corpus against its original."""
    ontology = _load_ontology(ontology_path, ())
    original = load_corpus(original_path, ontology)
    paraphrased = load_corpus(paraphrased_path, ontology)
    alignment = align_pairs(original, paraphrased, PARAPHRASE, check_gold=False)
    report = validate_paraphrase_pairs(alignment.pairs, ontology)
    if out_path:
        _write(Path(out_path), canonical_json(report.to_dict()))
    rate = report.mean_replacement_rate
    click.echo(
        f"{report.n_valid}/{len(report.verdicts)} pairs valid, "
        f"mean word replacement rate "
        f"{'n/a' if rate is None else format(rate, '.3f')}"
    )
    for verdict in report.invalid():
        click.echo(
            f"  invalid {verdict.dialogue_id}:{verdict.turn_index}: "
            + "; ".join(verdict.reasons)
        )


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--ontology", "ontology_path", type=click.Path())
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def fewshot(corpus_path, ontology_path, seed, out_dir):
    """Sample deterministic low-resource train/valid/test splits."""
    ontology = _load_ontology(ontology_path, ())
    corpus = load_corpus(corpus_path, ontology)
    splits = FewShotSampler(seed=seed).split(corpus)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = {}
    for name, split in splits.items():
        save_corpus(split, out / f"fewshot_{name}.json")
        per_domain: dict[str, int] = {}
        for dlg in split.dialogues:
            (domain,) = dlg.domains
            per_domain[domain] = per_domain.get(domain, 0) + 1
        sizes[name] = dict(sorted(per_domain.items()))
    manifest = {
        "command": "fewshot",
        "seed": seed,
        "config_hash": config_hash({"command": "fewshot", "corpus": str(corpus_path),
                                    "seed": seed}),
        "sizes": sizes,
    }
    _write(out / "manifest.json", canonical_json(manifest))
    click.echo(json.dumps(sizes, sort_keys=True))


@cli.command()
@click.argument("report_paths", nargs=-1, required=True, type=click.Path())
@click.option("--out", "out_path", type=click.Path())
def report(report_paths, out_path):
    """Merge per-run reports and print the aggregate table (median +/- std)."""
    runs = [RunReport.load(path) for path in report_paths]
    combined = merge_reports(runs)
    if out_path:
        _write(Path(out_path), canonical_json(combined.to_dict()))
    click.echo(render_table(combined))


def main(argv=None) -> int:
    """Entry point with the exit-code contract: 0 ok, 1 usage, 2 data error."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(
            json.dumps({"error": "UsageError", "message": exc.format_message()}),
            err=True,
        )
        return 1
    except click.ClickException as exc:
        click.echo(json.dumps({"error": "UsageError", "message": str(exc)}), err=True)
        return 1
    except click.exceptions.Abort:
        return 1
    except DstEvalError as exc:
        click.echo(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True
        )
        return 2
    except OSError as exc:
        click.echo(json.dumps({"error": "OSError", "message": str(exc)}), err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
