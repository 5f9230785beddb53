"""Command-line surface.

Subcommands:

* ``score``   score a corpus and write reports (per-sample JSON,
              comparison CSV/JSON, counterfactual histogram)
* ``attack``  rewrite a corpus with one of the question/molecule
              transforms and write an edit manifest
* ``prefs``   build the preference dataset (and optionally the masked
              SFT dataset) from a corpus
* ``lexicon`` validate a lexicon file and print load statistics

Exit codes: 0 success, 1 validation failure (bad flags or malformed
inputs), 2 I/O failure. The environment variable ``MOLHALLU_LEXICON``
supplies a default for ``--lexicon``/``--in`` paths. Every command is
deterministic given its flags; commands that draw random numbers require
an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .attacks import AttackKind, attack_corpus
from .baselines import BaselineScores, compute_baselines
from .corpus import CorpusError, read_corpus
from .lexicon import (
    EntityLexicon,
    EntityType,
    LexiconError,
    lexicon_stats,
    load_lexicon,
)
from .prefdata import (
    build_preference_dataset,
    load_external_negatives,
    write_preference_dataset,
    write_sft_dataset,
)
from .reports import (
    comparison_table,
    histogram_nc,
    render_histogram_png,
    render_histogram_text,
    write_comparison_csv,
    write_comparison_json,
)
from .scoring import (
    DEFAULT_THETA,
    GAMMA_AS_PRINTED,
    GAMMA_ORIENTATIONS,
    score_corpus,
)

LEXICON_ENV_VAR = "MOLHALLU_LEXICON"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class UsageError(Exception):
    """Flag-level validation failure; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; this tool reserves 2
    # for I/O failures, so route usage errors through UsageError instead.
    def error(self, message: str):
        raise UsageError(message)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _entity_types(text: str) -> list[EntityType]:
    out = []
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            out.append(EntityType(name))
        except ValueError:
            valid = ", ".join(t.value for t in EntityType)
            raise argparse.ArgumentTypeError(
                f"unknown entity type {name!r} (valid: {valid})"
            ) from None
    if not out:
        raise argparse.ArgumentTypeError("no entity types given")
    return out


def _resolve_lexicon_path(flag_value: Optional[str]) -> str:
    path = flag_value or os.environ.get(LEXICON_ENV_VAR)
    if not path:
        raise UsageError(
            f"no lexicon given: pass --lexicon or set {LEXICON_ENV_VAR}"
        )
    return path


def _load_lexicon_arg(flag_value: Optional[str]) -> EntityLexicon:
    return load_lexicon(_resolve_lexicon_path(flag_value))


def _write_json(payload, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_score(args: argparse.Namespace) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    records = read_corpus(args.corpus)
    scoreable = [r for r in records if r.answer_pred is not None]
    skipped = [r.id for r in records if r.answer_pred is None]
    if skipped:
        print(
            f"skipped {len(skipped)} records without answer_pred: "
            + ", ".join(skipped),
            file=sys.stderr,
        )
    if not scoreable:
        print("no scoreable records (all lack answer_pred)", file=sys.stderr)
        return EXIT_VALIDATION

    samples = [r.to_scoring_sample() for r in scoreable]
    corpus_score = score_corpus(
        samples,
        lexicon,
        theta=args.theta,
        gamma_orientation=args.gamma_orientation,
    )
    baselines: dict[str, BaselineScores] = {
        s.id: compute_baselines(
            s.answer_pred,
            s.answer_gt,
            theta=args.theta,
            meteor_gamma=args.meteor_gamma,
        )
        for s in samples
    }

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_sample = []
    for sample_id, score in zip(corpus_score.sample_ids, corpus_score.sample_scores):
        entry = {"id": sample_id}
        entry.update(score.to_dict())
        entry["baselines"] = baselines[sample_id].to_dict()
        per_sample.append(entry)
    _write_json(
        {
            "mean_f1": corpus_score.mean_f1,
            "scored": len(samples),
            "skipped_no_answer_pred": skipped,
            "theta": args.theta,
            "gamma_orientation": args.gamma_orientation,
            "samples": per_sample,
        },
        out_dir / "scores.json",
    )

    rows, mean_row = comparison_table(corpus_score, baselines)
    write_comparison_csv(rows, mean_row, out_dir / "comparison.csv")
    write_comparison_json(rows, mean_row, out_dir / "comparison.json")

    hist = histogram_nc(corpus_score.sample_scores)
    _write_json(hist.to_dict(), out_dir / "histogram.json")
    if args.chart in ("text", "both"):
        (out_dir / "histogram.txt").write_text(
            render_histogram_text(hist), encoding="utf-8"
        )
    if args.chart in ("png", "both"):
        render_histogram_png(hist, out_dir / "histogram.png")

    print(f"scored {len(samples)} samples; mean Mol-Hallu f1 = {corpus_score.mean_f1:.4f}")
    print(f"reports written to {out_dir}")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    kind = AttackKind(args.kind)
    lexicon = None
    if kind is not AttackKind.MOLECULE_MASK:
        lexicon = _load_lexicon_arg(args.lexicon)
    if kind is AttackKind.DRUG_DISTRACT and args.seed is None:
        raise UsageError("--seed is required for drug-distract")
    manifest = attack_corpus(
        args.corpus,
        args.out,
        kind,
        lexicon=lexicon,
        seed=args.seed,
        types=args.types,
        manifest_path=args.manifest,
    )
    total = sum(e.count for e in manifest.per_sample)
    print(
        f"{kind.value}: {total} edits across {len(manifest.per_sample)} records; "
        f"wrote {args.out}"
    )
    return EXIT_OK


def cmd_prefs(args: argparse.Namespace) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    records = read_corpus(args.corpus)
    external = None
    if args.external:
        external = load_external_negatives(args.external)
    triples, report = build_preference_dataset(
        records,
        lexicon,
        sample_count=args.n,
        negatives_per_sample=args.negatives,
        seed=args.seed,
        external_negatives=external,
        allow_smaller=args.allow_smaller,
    )
    write_preference_dataset(triples, args.out)
    if args.sft_out:
        count = write_sft_dataset(records, lexicon, args.sft_out)
        print(f"wrote {count} SFT pairs to {args.sft_out}")
    print(json.dumps(report.to_dict(), sort_keys=True))
    print(f"wrote {len(triples)} preference triples to {args.out}")
    return EXIT_OK


def cmd_lexicon(args: argparse.Namespace) -> int:
    path = _resolve_lexicon_path(args.path)
    fmt = None if args.format == "auto" else args.format
    lexicon = load_lexicon(path, fmt=fmt)
    payload = {"load_report": lexicon.load_report.to_dict(), "entries": len(lexicon)}
    if args.stats:
        payload["type_percentages"] = lexicon_stats(lexicon)
    print(json.dumps(payload, sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="molhallu",
        description="Hallucination-aware evaluation for molecular QA corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a corpus and write reports")
    p_score.add_argument("--corpus", required=True, help="input corpus JSONL")
    p_score.add_argument("--lexicon", help=f"entity lexicon (default ${LEXICON_ENV_VAR})")
    p_score.add_argument(
        "--theta",
        type=_positive_float,
        default=DEFAULT_THETA,
        help="smoothing floor for zero precision components (default %(default)s)",
    )
    p_score.add_argument("--out-dir", required=True, help="directory for reports")
    p_score.add_argument(
        "--gamma-orientation",
        choices=sorted(GAMMA_ORIENTATIONS),
        default=GAMMA_AS_PRINTED,
        help="how gamma blends entity and non-entity precision (default %(default)s)",
    )
    p_score.add_argument(
        "--meteor-gamma",
        type=_positive_float,
        default=0.5,
        help="METEOR fragmentation penalty weight (default %(default)s)",
    )
    p_score.add_argument(
        "--chart",
        choices=["text", "png", "both", "none"],
        default="text",
        help="histogram rendering (default %(default)s)",
    )
    p_score.set_defaults(func=cmd_score)

    p_attack = sub.add_parser("attack", help="transform a corpus")
    p_attack.add_argument("--corpus", required=True, help="input corpus JSONL")
    p_attack.add_argument(
        "--kind",
        required=True,
        choices=[k.value for k in AttackKind],
        help="which transform to apply",
    )
    p_attack.add_argument("--seed", type=int, help="seed (required for drug-distract)")
    p_attack.add_argument("--lexicon", help=f"entity lexicon (default ${LEXICON_ENV_VAR})")
    p_attack.add_argument("--out", required=True, help="output corpus JSONL")
    p_attack.add_argument(
        "--manifest", help="manifest path (default <out>.manifest.json)"
    )
    p_attack.add_argument(
        "--types",
        type=_entity_types,
        help="comma-separated entity types to target (default all)",
    )
    p_attack.set_defaults(func=cmd_attack)

    p_prefs = sub.add_parser("prefs", help="build preference training data")
    p_prefs.add_argument("--corpus", required=True, help="input corpus JSONL")
    p_prefs.add_argument("--lexicon", help=f"entity lexicon (default ${LEXICON_ENV_VAR})")
    p_prefs.add_argument(
        "--n", type=int, default=2000, help="QA pairs to sample (default %(default)s)"
    )
    p_prefs.add_argument(
        "--negatives",
        type=int,
        default=1,
        help="entity-perturbed negatives per sample (default %(default)s)",
    )
    p_prefs.add_argument("--seed", type=int, required=True, help="sampling seed")
    p_prefs.add_argument(
        "--external", help="JSONL file of external negatives keyed by id"
    )
    p_prefs.add_argument("--out", required=True, help="output preference JSONL")
    p_prefs.add_argument(
        "--sft-out", help="also write the entity-masked SFT dataset here"
    )
    p_prefs.add_argument(
        "--allow-smaller",
        action="store_true",
        help="accept a corpus smaller than --n and use all of it",
    )
    p_prefs.set_defaults(func=cmd_prefs)

    p_lex = sub.add_parser("lexicon", help="validate a lexicon file")
    p_lex.add_argument(
        "--in", dest="path", help=f"lexicon path (default ${LEXICON_ENV_VAR})"
    )
    p_lex.add_argument(
        "--format",
        choices=["auto", "tsv", "jsonl"],
        default="auto",
        help="input format (default inferred from extension)",
    )
    p_lex.add_argument(
        "--stats", action="store_true", help="also print per-type percentages"
    )
    p_lex.set_defaults(func=cmd_lexicon)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (LexiconError, CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:  # argparse -h/--help
        code = exc.code
        return int(code) if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
