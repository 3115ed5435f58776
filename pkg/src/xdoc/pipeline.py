"""Stage orchestration over one document, plus output formats.

Stages run in a fixed order: tok, sent, tag, map, parse, sem, frames,
rel.  A configuration selects a prefix of that order.  When an external
tag file is supplied the first three stages are replaced by the import
adapter.  Strict runs abort on the first analysis error; lenient runs
record a diagnostic on the failing sentence and continue with the rest.

Pure punctuation tokens are tagged like everything else but excluded
from mapping, parsing and semantics: tagset maps cover word classes,
and sentence terminators carry no constituent structure.

Output is deterministic byte for byte: annotated XML and a relation
table ordered by document position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ResourceError, TooAmbiguous, UnmappedTag
from .parsing import ParseTree, chunks, complete_parses, parse
from .resources import ResourceBundle, load_bundle, validate_bundle
from .semantics import (
    Diagnostic,
    FrameInstance,
    Relation,
    instantiate_frames,
    map_np_structure,
    semantic_tag,
)
from .structure import Sentence, Token, is_punctuation, segment
from .tagging import TaggedToken, apply_rules, import_external_tags, initial_tag, map_tagset

__all__ = [
    "STAGES",
    "PipelineConfig",
    "SentenceAnalysis",
    "AnnotatedDocument",
    "run_pipeline",
    "analyze_text",
    "emit_xml",
    "export_relations",
]

STAGES = ("tok", "sent", "tag", "map", "parse", "sem", "frames", "rel")


def _check_stage_prefix(stages: tuple[str, ...]) -> tuple[str, ...]:
    stages = tuple(stages)
    if not stages or stages != STAGES[: len(stages)]:
        raise ValueError(
            f"stages must be a non-empty prefix of {'/'.join(STAGES)}, got {stages!r}"
        )
    return stages


@dataclass(frozen=True)
class PipelineConfig:
    bundle_path: str | Path
    stages: tuple[str, ...] = STAGES
    lenient: bool = False
    external_tags: str | Path | None = None

    def __post_init__(self) -> None:
        _check_stage_prefix(self.stages)


@dataclass
class SentenceAnalysis:
    sentence: Sentence
    tagged: tuple[TaggedToken, ...] | None = None
    parse_input: tuple[TaggedToken, ...] | None = None
    tree: ParseTree | None = None
    chunk_trees: tuple[ParseTree, ...] = ()
    frames: tuple[FrameInstance, ...] = ()
    relations: tuple[Relation, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()
    failed: bool = False


@dataclass
class AnnotatedDocument:
    lang: str
    source: str
    stages: tuple[str, ...]
    text: str
    tokens: tuple[Token, ...] = ()
    sentences: list[SentenceAnalysis] = field(default_factory=list)


def _load_validated(path: str | Path) -> ResourceBundle:
    bundle = load_bundle(path)
    findings = validate_bundle(bundle)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        summary = "; ".join(f"{f.code} at {f.location}" for f in errors[:5])
        raise ResourceError(f"bundle {path} failed validation: {summary}")
    return bundle


def _frame_relations(frames: Sequence[FrameInstance], bundle: ResourceBundle) -> list[Relation]:
    by_id = {frame.id: frame for frame in bundle.frames}
    out: list[Relation] = []
    for instance in frames:
        frame = by_id[instance.frame_id]
        by_gf = {slot.gf: slot.role for slot in frame.slots}
        subj = instance.bindings.get(by_gf.get("subject", ""))
        obj = instance.bindings.get(by_gf.get("object", ""))
        if subj is None or obj is None or subj[0] == obj[0]:
            continue
        out.append(Relation(instance.relation, subj[0], obj[0], instance.frame_id))
    return out


def _analyze_sentence(
    analysis: SentenceAnalysis,
    bundle: ResourceBundle,
    stages: tuple[str, ...],
    lenient: bool,
) -> None:
    """Run the per-sentence stages in place, honoring the stage prefix."""
    if "tag" in stages and analysis.tagged is None:
        tagged = initial_tag(analysis.sentence, bundle)
        analysis.tagged = tuple(apply_rules(tagged, bundle.context_rules))

    if "map" not in stages or analysis.tagged is None:
        return
    words = [t for t in analysis.tagged if not is_punctuation(t.token.form)]
    try:
        mapped = map_tagset(words, bundle.tagset_map)
    except UnmappedTag as exc:
        if not lenient:
            raise
        analysis.failed = True
        analysis.diagnostics += (Diagnostic("UnmappedTag", str(exc)),)
        return
    analysis.parse_input = tuple(mapped)

    if "parse" in stages and mapped:
        chart = parse([(t.parser_tag, {}) for t in mapped], bundle.grammar)
        try:
            trees = complete_parses(chart, bundle.grammar.start_symbol)
        except TooAmbiguous as exc:
            if not lenient:
                raise
            analysis.diagnostics += (Diagnostic("TooAmbiguous", str(exc)),)
            trees = []
        analysis.tree = trees[0] if trees else None
        if analysis.tree is None:
            analysis.chunk_trees = tuple(chunks(chart))

    if "sem" in stages and analysis.parse_input is not None:
        analysis.parse_input = tuple(semantic_tag(analysis.parse_input, bundle))
        enriched = {t.token.id: t for t in analysis.parse_input}
        analysis.tagged = tuple(enriched.get(t.token.id, t) for t in analysis.tagged)

    trees = [analysis.tree] if analysis.tree is not None else list(analysis.chunk_trees)

    if "frames" in stages and analysis.parse_input is not None:
        instances: list[FrameInstance] = []
        for tree in trees:
            found, diags = instantiate_frames(tree, analysis.parse_input, bundle)
            instances.extend(found)
            analysis.diagnostics += tuple(diags)
        analysis.frames = tuple(instances)

    if "rel" in stages and analysis.parse_input is not None:
        relations = _frame_relations(analysis.frames, bundle)
        for tree in trees:
            relations.extend(
                map_np_structure(tree, bundle.struct_patterns, analysis.parse_input)
            )
        analysis.relations = tuple(relations)


def analyze_text(
    bundle: ResourceBundle,
    text: str,
    *,
    stages: tuple[str, ...] = STAGES,
    lenient: bool = False,
    source: str = "-",
) -> AnnotatedDocument:
    """Run the stage prefix over raw text with an already loaded bundle."""
    stages = _check_stage_prefix(tuple(stages))  # every prefix starts with tok
    doc = AnnotatedDocument(bundle.lang, source, stages, text)
    tokens, sentences = segment(text, bundle.abbreviations)
    doc.tokens = tuple(tokens)
    if "sent" not in stages:
        return doc
    doc.sentences = [SentenceAnalysis(s) for s in sentences]
    for analysis in doc.sentences:
        _analyze_sentence(analysis, bundle, stages, lenient)
    return doc


def _analyze_imported(
    bundle: ResourceBundle,
    imported: list[list[TaggedToken]],
    *,
    stages: tuple[str, ...],
    lenient: bool,
    source: str,
) -> AnnotatedDocument:
    tokens = tuple(t.token for sent in imported for t in sent)
    text = " ".join(t.form for t in tokens)
    doc = AnnotatedDocument(bundle.lang, source, tuple(stages), text, tokens)
    doc.sentences = [
        SentenceAnalysis(
            Sentence(i, tuple(t.token for t in sent)), tagged=tuple(sent)
        )
        for i, sent in enumerate(imported)
    ]
    for analysis in doc.sentences:
        _analyze_sentence(analysis, bundle, tuple(stages), lenient)
    return doc


def run_pipeline(config: PipelineConfig, text: str) -> AnnotatedDocument:
    """Load and validate the bundle, then run the configured stage prefix.

    Raises :class:`ResourceError` when the bundle is invalid,
    :class:`InputError` for undecodable input, and, in strict mode,
    :class:`AnalysisError` subclasses for per-sentence failures.
    """
    bundle = _load_validated(config.bundle_path)
    if config.external_tags is not None:
        imported = import_external_tags(config.external_tags)
        return _analyze_imported(
            bundle,
            imported,
            stages=config.stages,
            lenient=config.lenient,
            source=str(config.external_tags),
        )
    return analyze_text(
        bundle,
        text,
        stages=config.stages,
        lenient=config.lenient,
    )


# ---------------------------------------------------------------------------
# Output formats


def _esc(value: str) -> str:
    value = (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )
    return value.replace("\t", "&#9;").replace("\n", "&#10;").replace("\r", "&#13;")


def _sid(analysis_index: int) -> str:
    return f"s{analysis_index + 1}"


def _token_line(token: Token, annotated: TaggedToken | None, indent: str) -> str:
    attrs = [
        ("id", str(token.id)),
        ("off", str(token.offset)),
        ("len", str(token.length)),
        ("form", token.form),
    ]
    if annotated is not None:
        attrs.append(("tag0", annotated.source_tag))
        if annotated.parser_tag is not None:
            attrs.append(("tag", annotated.parser_tag))
        if annotated.semclass is not None:
            attrs.append(("sem", annotated.semclass))
        if annotated.concept is not None:
            attrs.append(("concept", annotated.concept))
    rendered = "".join(f' {k}="{_esc(v)}"' for k, v in attrs)
    return f"{indent}<t{rendered}/>"


def _tree_xml(tree: ParseTree, parse_input: Sequence[TaggedToken], indent: str) -> list[str]:
    attrs = [("cat", tree.category.name), *tree.category.features]
    rendered = "".join(f' {k}="{_esc(v)}"' for k, v in attrs)
    if tree.is_leaf:
        token_id = parse_input[tree.start].token.id
        return [f'{indent}<node{rendered} ref="{token_id}"/>']
    lines = [f"{indent}<node{rendered}>"]
    for child in tree.children:
        lines.extend(_tree_xml(child, parse_input, indent + "  "))
    lines.append(f"{indent}</node>")
    return lines


def emit_xml(doc: AnnotatedDocument) -> str:
    """Render the annotated document as deterministic XML."""
    if not doc.sentences:
        return f'<document lang="{_esc(doc.lang)}"/>\n'
    lines = [f'<document lang="{_esc(doc.lang)}">']
    for index, analysis in enumerate(doc.sentences):
        lines.append(f'  <sentence id="{_sid(index)}">')
        annotations = (
            {t.token.id: t for t in analysis.tagged} if analysis.tagged else {}
        )
        lines.append("    <tokens>")
        for token in analysis.sentence.tokens:
            lines.append(_token_line(token, annotations.get(token.id), "      "))
        lines.append("    </tokens>")
        if analysis.tree is not None and analysis.parse_input:
            lines.append("    <parse>")
            lines.extend(_tree_xml(analysis.tree, analysis.parse_input, "      "))
            lines.append("    </parse>")
        if analysis.relations:
            frame_bindings = {f.frame_id: f for f in analysis.frames}
            lines.append("    <relations>")
            for relation in analysis.relations:
                instance = frame_bindings.get(relation.source)
                if instance is not None and instance.relation == relation.name:
                    lines.append(
                        f'      <rel type="{_esc(relation.name)}" pred="{instance.predicate}">'
                    )
                    for role, (token_id, _) in sorted(instance.bindings.items()):
                        lines.append(f'        <arg role="{_esc(role)}" ref="{token_id}"/>')
                else:
                    lines.append(f'      <rel type="{_esc(relation.name)}">')
                    lines.append(f'        <arg role="arg1" ref="{relation.arg1}"/>')
                    lines.append(f'        <arg role="arg2" ref="{relation.arg2}"/>')
                lines.append("      </rel>")
            lines.append("    </relations>")
        if analysis.diagnostics:
            lines.append("    <diagnostics>")
            for diag in analysis.diagnostics:
                lines.append(
                    f'      <diag code="{_esc(diag.code)}" detail="{_esc(diag.detail)}"/>'
                )
            lines.append("    </diagnostics>")
        lines.append("  </sentence>")
    lines.append("</document>")
    return "\n".join(lines) + "\n"


def export_relations(doc: AnnotatedDocument) -> str:
    """Tab-separated relation table, one row per extracted relation."""
    token_index: dict[int, TaggedToken] = {}
    for analysis in doc.sentences:
        for t in analysis.parse_input or ():
            token_index[t.token.id] = t
        for t in analysis.tagged or ():
            token_index.setdefault(t.token.id, t)

    lines = ["relation\targ1_form\targ1_concept\targ2_form\targ2_concept\tsentence_id"]
    for index, analysis in enumerate(doc.sentences):
        for relation in analysis.relations:
            arg1 = token_index.get(relation.arg1)
            arg2 = token_index.get(relation.arg2)
            if arg1 is None or arg2 is None:
                continue
            lines.append(
                "\t".join(
                    [
                        relation.name,
                        arg1.token.form,
                        arg1.concept or "",
                        arg2.token.form,
                        arg2.concept or "",
                        _sid(index),
                    ]
                )
            )
    return "\n".join(lines) + "\n"
