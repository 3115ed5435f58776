"""Semantic tagging, ontology subsumption, and relation extraction.

The semantic lexicon assigns lemma and semantic class per (lemma,
parser tag) pair; the ontology's lexmap lifts semantic classes to
concepts.  Case frames bind grammatical functions to roles, with
ontology subsumption checking each filler against the slot's concept
constraint.  Noun-phrase structure patterns map constituent shapes to
binary relations.

Grammatical functions come in two modes.  Positional mode reads
subject and object off constituent order around the VP, which suits
fixed-order languages; case-marked mode selects noun phrases by their
case feature wherever they stand, which suits languages where order is
free and morphology carries the function.  The mode is bundle data, not
code: the same functions serve every language.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .errors import UnknownConcept
from .parsing import ParseTree
from .resources import Ontology, ResourceBundle, StructPattern
from .tagging import TaggedToken

__all__ = [
    "FrameInstance",
    "Relation",
    "Diagnostic",
    "semantic_tag",
    "subsumes",
    "grammatical_functions",
    "instantiate_frames",
    "map_np_structure",
]

SUBJECT_CAT = "NP"
VERB_PHRASE_CAT = "VP"
VERB_CAT = "V"


@dataclass(frozen=True)
class FrameInstance:
    """One accepted case-frame match: predicate token plus role bindings."""

    frame_id: str
    relation: str
    predicate: int  # token id
    bindings: Mapping[str, tuple[int, str]]  # role -> (token id, concept)


@dataclass(frozen=True)
class Relation:
    name: str
    arg1: int  # token id
    arg2: int
    source: str  # frame id or pattern id

    def __post_init__(self) -> None:
        if self.arg1 == self.arg2:
            raise ValueError("relation arguments must be distinct tokens")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    detail: str


def semantic_tag(
    tagged: Sequence[TaggedToken], bundle: ResourceBundle
) -> list[TaggedToken]:
    """Attach lemma, semantic class and concept where the lexicon knows them.

    The lowercased form is looked up under the token's parser tag; when
    that misses, the suffix-strip lemma rules are tried in order and the
    first stem with a lexicon entry wins.  Tokens without a match are
    returned unchanged.
    """
    index = bundle.sem_lexicon_index()
    out: list[TaggedToken] = []
    for t in tagged:
        assert t.parser_tag is not None, "semantic tagging requires mapped tokens"
        base = t.token.form.lower()
        entry = index.get((base, t.parser_tag))
        lemma = base if entry else None
        if entry is None:
            for rule in bundle.lemma_rules:
                if not base.endswith(rule.strip):
                    continue
                stem = base[: len(base) - len(rule.strip)]
                if len(stem) < rule.min_stem_len:
                    continue
                entry = index.get((stem, t.parser_tag))
                if entry is not None:
                    lemma = stem
                    break
        if entry is None:
            out.append(t)
            continue
        concept = bundle.ontology.lexmap.get(entry.semclass)
        out.append(replace(t, lemma=lemma, semclass=entry.semclass, concept=concept))
    return out


def subsumes(ontology: Ontology, ancestor: str, descendant: str) -> bool:
    """True iff ancestor is reachable from descendant via isa edges (or equal)."""
    for concept in (ancestor, descendant):
        if concept not in ontology.concepts:
            raise UnknownConcept(concept)
    if ancestor == descendant:
        return True
    seen: set[str] = set()
    frontier = set(ontology.parents(descendant))
    while frontier:
        node = frontier.pop()
        if node == ancestor:
            return True
        if node in seen:
            continue
        seen.add(node)
        frontier |= ontology.parents(node)
    return False


def grammatical_functions(tree: ParseTree, mode: str) -> dict[str, ParseTree]:
    """Pick subject and object constituents off a parse tree.

    Positional: the subject is the first NP child of the root before the
    VP child, the object the first NP child inside the VP after the V.
    Case-marked: the subject is the first NP anywhere (pre-order) with
    case=nom, the object the first with case=acc.  Functions that do not
    occur stay unbound.
    """
    out: dict[str, ParseTree] = {}
    if mode == "case-marked":
        for node in tree.preorder():
            case = node.category.feature("case")
            if node.category.name != SUBJECT_CAT or case is None:
                continue
            if case == "nom" and "subject" not in out:
                out["subject"] = node
            elif case == "acc" and "object" not in out:
                out["object"] = node
        return out

    kids = tree.children
    vp_index = next(
        (i for i, kid in enumerate(kids) if kid.category.name == VERB_PHRASE_CAT), None
    )
    if vp_index is None:
        return out
    for kid in kids[:vp_index]:
        if kid.category.name == SUBJECT_CAT:
            out["subject"] = kid
            break
    vp_kids = kids[vp_index].children
    v_index = next(
        (i for i, kid in enumerate(vp_kids) if kid.category.name == VERB_CAT), None
    )
    if v_index is not None:
        for kid in vp_kids[v_index + 1 :]:
            if kid.category.name == SUBJECT_CAT:
                out["object"] = kid
                break
    return out


def _head_token(tree: ParseTree, tagged: Sequence[TaggedToken]) -> TaggedToken:
    return tagged[tree.head_leaf().start]


def instantiate_frames(
    tree: ParseTree, tagged: Sequence[TaggedToken], bundle: ResourceBundle
) -> tuple[list[FrameInstance], list[Diagnostic]]:
    """Match case frames against one parse tree.

    Every token whose lemma equals a frame's predicate lemma is a
    candidate, at most one instance per (token, frame).  Each slot binds
    the head token of the constituent its grammatical function selects;
    the instance is accepted only when all required slots bind and every
    bound filler's concept is subsumed by the slot's fill concept.
    Rejections are reported as diagnostics, never as errors.
    """
    instances: list[FrameInstance] = []
    diagnostics: list[Diagnostic] = []
    by_lemma: dict[str, list] = {}
    for frame in bundle.frames:
        by_lemma.setdefault(frame.predicate_lemma, []).append(frame)
    if not by_lemma:
        return instances, diagnostics

    functions = grammatical_functions(tree, bundle.gf_mode)
    for t in tagged:
        if t.lemma is None:
            continue
        for frame in by_lemma.get(t.lemma, ()):
            bindings: dict[str, tuple[int, str]] = {}
            accepted = True
            for slot in frame.slots:
                constituent = functions.get(slot.gf)
                if constituent is None:
                    if slot.required:
                        diagnostics.append(
                            Diagnostic(
                                "MissingSlot",
                                f"{frame.id}: no {slot.gf} found for role {slot.role!r}",
                            )
                        )
                        accepted = False
                        break
                    continue
                filler = _head_token(constituent, tagged)
                concept = filler.concept
                if concept is None or not subsumes(
                    bundle.ontology, slot.fill_concept, concept
                ):
                    diagnostics.append(
                        Diagnostic(
                            "ConstraintViolation",
                            f"{frame.id}: role {slot.role!r} needs {slot.fill_concept!r}, "
                            f"{filler.token.form!r} has {concept!r}",
                        )
                    )
                    accepted = False
                    break
                bindings[slot.role] = (filler.token.id, concept)
            if accepted:
                instances.append(
                    FrameInstance(frame.id, frame.relation, t.token.id, bindings)
                )
    return instances, diagnostics


def map_np_structure(
    tree: ParseTree,
    patterns: Iterable[StructPattern],
    tagged: Sequence[TaggedToken],
) -> list[Relation]:
    """Map constituent shapes to binary relations, e.g. the 'has' relation.

    A pattern matches an internal node whose category equals the
    pattern's constituent category and whose children's category names
    equal the pattern's sequence, with surface-form constraints checked
    against each child's head token.  Matching is applied to every node
    of the tree.
    """
    patterns = list(patterns)
    relations: list[Relation] = []
    for node in tree.preorder():
        if node.is_leaf:
            continue
        for pattern in patterns:
            if node.category.name != pattern.constituent_cat:
                continue
            if len(node.children) != len(pattern.rhs_match):
                continue
            matched = True
            for child, item in zip(node.children, pattern.rhs_match):
                if child.category.name != item.name:
                    matched = False
                    break
                if item.form is not None and _head_token(child, tagged).token.form != item.form:
                    matched = False
                    break
            if not matched:
                continue
            arg1 = _head_token(node.children[pattern.arg1 - 1], tagged)
            arg2 = _head_token(node.children[pattern.arg2 - 1], tagged)
            relations.append(
                Relation(pattern.relation, arg1.token.id, arg2.token.id, pattern.id)
            )
    return relations
