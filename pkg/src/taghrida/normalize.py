"""Tweet text normalization.

Six composable rewrite rules turn raw social-media text into clean,
whitespace-regular Arabic suitable for segmentation and classification:

    markup_strip    -> drop HTML tags, decode/drop character entities
    entity_replace  -> URLs / emails / @mentions become placeholder tokens
    unwanted_chars  -> drop emoji, pictographs and control characters
    repeat_collapse -> cap elongated character runs ("heeey" style)
    boundary_insert -> space out digits, Latin letters and round brackets
    space_collapse  -> squeeze whitespace runs, trim the ends

`normalize()` applies the enabled rules in that fixed order and iterates
the whole pass until the text stops changing, so its output is a fixed
point: normalizing twice never differs from normalizing once, and no
URL/email/mention pattern can survive (even ones that only appear after
emoji removal fuses their pieces together).
"""

from __future__ import annotations

import html
from collections import Counter
from dataclasses import dataclass, field, fields
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import regex

# Arabic script blocks, including presentation forms.
ARABIC_BLOCKS = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)

# HTML stripping. Entities are decoded to a fixed point *before* tags are
# removed so that double-encoded markup ("&lt;br&gt;") is stripped too.
_TAG_RE = regex.compile(r"<[^>]*>")
_UNKNOWN_ENTITY_RE = regex.compile(r"&[a-zA-Z][a-zA-Z0-9]{1,31};")

# Entity replacement. Matching is leftmost-longest across the three
# pattern families, email winning ties with mention so "a@b.com" is
# never split into a word plus a mention.
_URL_RE = regex.compile(
    r"""
    https?://\S+                                    # scheme URLs
    | \bwww\.[\w-]+(?:\.[\w-]+)*(?:/\S*)?           # bare www hosts
    | \b(?:t\.co|bit\.ly|goo\.gl|tinyurl\.com|ow\.ly|youtu\.be|is\.gd|j\.mp)/\S+
    """,
    regex.VERBOSE,
)
_EMAIL_RE = regex.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")
_MENTION_RE = regex.compile(r"@\w{1,15}")

# Repeat collapsing works on extended grapheme clusters so an Arabic
# letter plus its diacritic counts as one unit.
_GRAPHEME_RE = regex.compile(r"\X")

# Boundary insertion. AR = Arabic-script letter, LD = ASCII letter or any
# decimal digit, ND = decimal digit outside the Arabic-Indic sets.
_AR = r"[\p{Arabic}&&\p{L}]"
_LD = r"[A-Za-z\p{Nd}]"
_ND = r"[\p{Nd}--[٠-٩۰-۹]]"
_NOT_SPACE_OR_ND = rf"[^\s{_ND}]"  # nested set: complement of (space | ND)
_BOUNDARY_RES = (
    regex.compile(r"(?<=\S)(?=[()])"),
    regex.compile(r"(?<=[()])(?=\S)"),
    regex.compile(rf"(?<={_AR})(?={_LD})", regex.V1),
    regex.compile(rf"(?<={_LD})(?={_AR})", regex.V1),
    regex.compile(rf"(?<={_NOT_SPACE_OR_ND})(?={_ND})", regex.V1),
    regex.compile(rf"(?<={_ND})(?={_NOT_SPACE_OR_ND})", regex.V1),
)

_SPACE_RUN_RE = regex.compile(r"\s+")

# Tatweel and Arabic diacritical marks, stripped only on request.
_TATWEEL_DIACRITICS_RE = regex.compile(
    "[\u0640\u0610-\u061a\u064b-\u065f\u0670\u06d6-\u06ed]"
)

# Private-use sentinels used while a placeholder is in flight through the
# pipeline stages. Two alternating codepoints per entity class keep
# adjacent placeholders from ever forming a repeated-grapheme run.
_SENTINELS = {
    "url": ("\ue000", "\ue001"),
    "email": ("\ue002", "\ue003"),
    "mention": ("\ue004", "\ue005"),
}
_SENTINEL_SCRUB = {ord(c): None for pair in _SENTINELS.values() for c in pair}

# A full pipeline pass is repeated until the text stabilizes; real tweets
# settle after one pass, adversarial interleavings after two or three.
_MAX_PASSES = 10


def _parse_range_line(line: str, lineno: int, source: str) -> tuple[int, int] | None:
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    try:
        lo_s, hi_s = line.split("..")
        lo, hi = int(lo_s, 16), int(hi_s, 16)
    except ValueError:
        raise ValueError(f"{source}:{lineno}: bad range line {line!r}") from None
    if lo > hi:
        raise ValueError(f"{source}:{lineno}: empty range {line!r}")
    return lo, hi


def load_removal_ranges(path: str | Path) -> tuple[tuple[int, int], ...]:
    """Parse a removable-codepoint table: one HEXSTART..HEXEND per line."""
    text = Path(path).read_text(encoding="utf-8")
    ranges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parsed = _parse_range_line(line, lineno, str(path))
        if parsed:
            ranges.append(parsed)
    return tuple(ranges)


@lru_cache(maxsize=1)
def default_removal_ranges() -> tuple[tuple[int, int], ...]:
    """The packaged emoji/pictograph/control removal table."""
    text = (
        resources.files("taghrida").joinpath("data/removal_ranges.txt")
        .read_text(encoding="utf-8")
    )
    ranges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parsed = _parse_range_line(line, lineno, "removal_ranges.txt")
        if parsed:
            ranges.append(parsed)
    return tuple(ranges)


DEFAULT_PLACEHOLDER_URL = "[ رابط ]"
DEFAULT_PLACEHOLDER_EMAIL = "[ بريد ]"
DEFAULT_PLACEHOLDER_MENTION = "[ مستخدم ]"

_BOOL_KEYS = (
    "markup_strip",
    "unwanted_chars",
    "repeat_collapse",
    "space_collapse",
    "boundary_insert",
    "entity_replace",
    "strip_tatweel_diacritics",
)


@dataclass(frozen=True)
class NormalizationConfig:
    """Switches and parameters for the normalization pipeline.

    Each rule has an enable flag. `max_repeat_run` caps grapheme runs,
    the placeholder strings replace matched entities verbatim, and
    `removal_ranges` overrides the packaged unwanted-character table.
    """

    markup_strip: bool = True
    unwanted_chars: bool = True
    repeat_collapse: bool = True
    space_collapse: bool = True
    boundary_insert: bool = True
    entity_replace: bool = True
    max_repeat_run: int = 2
    placeholder_url: str = DEFAULT_PLACEHOLDER_URL
    placeholder_email: str = DEFAULT_PLACEHOLDER_EMAIL
    placeholder_mention: str = DEFAULT_PLACEHOLDER_MENTION
    strip_tatweel_diacritics: bool = False
    removal_ranges: tuple[tuple[int, int], ...] = field(
        default_factory=default_removal_ranges
    )

    def __post_init__(self):
        if self.max_repeat_run < 1:
            raise ValueError(f"max_repeat_run must be >= 1, got {self.max_repeat_run}")
        for name in ("placeholder_url", "placeholder_email", "placeholder_mention"):
            value = getattr(self, name)
            if not value or "\n" in value:
                raise ValueError(f"{name} must be non-empty and newline-free")

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizationConfig":
        """Load a UTF-8 key=value config file.

        Recognized keys are the dataclass field names; flags accept
        true/false/1/0/yes/no, `removal_ranges_file` points to an
        alternate removable-codepoint table. Placeholder values keep
        interior spaces but have outer whitespace trimmed.
        """
        known = {f.name for f in fields(cls)}
        kwargs: dict = {}
        for lineno, raw in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "removal_ranges_file":
                kwargs["removal_ranges"] = load_removal_ranges(value)
            elif key in _BOOL_KEYS:
                lowered = value.lower()
                if lowered in ("true", "1", "yes", "on"):
                    kwargs[key] = True
                elif lowered in ("false", "0", "no", "off"):
                    kwargs[key] = False
                else:
                    raise ValueError(f"{path}:{lineno}: bad flag value {value!r}")
            elif key == "max_repeat_run":
                kwargs[key] = int(value)
            elif key in known:
                kwargs[key] = value
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class NormalizedText:
    """A normalized tweet plus the audit trail of rules that changed it."""

    original: str
    normalized: str
    rules_applied: tuple[str, ...]
    entity_counts: Mapping[str, int]


def is_arabic_char(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in ARABIC_BLOCKS)


def strip_markup(text: str) -> str:
    """Remove HTML markup: tags become one space, entities are decoded.

    Entities are decoded repeatedly until stable (handles double
    encoding), then complete ``<...>`` spans and undecodable ``&name;``
    entities are replaced with a single space. Lone ``<`` ``>`` ``&``
    characters are ordinary text and survive.
    """
    for _ in range(_MAX_PASSES):
        decoded = html.unescape(text)
        if decoded == text:
            break
        text = decoded
    text = _TAG_RE.sub(" ", text)
    return _UNKNOWN_ENTITY_RE.sub(" ", text)


def _entity_spans(text: str) -> list[tuple[int, int, str]]:
    """Non-overlapping (start, end, kind) entity spans, leftmost-longest."""
    candidates = []
    for rank, (kind, pattern) in enumerate(
        (("email", _EMAIL_RE), ("url", _URL_RE), ("mention", _MENTION_RE))
    ):
        for m in pattern.finditer(text):
            candidates.append((m.start(), -(m.end() - m.start()), rank, m.end(), kind))
    candidates.sort()
    spans = []
    cursor = 0
    for start, _neg_len, _rank, end, kind in candidates:
        if start >= cursor:
            spans.append((start, end, kind))
            cursor = end
    return spans


def replace_entities(
    text: str, config: NormalizationConfig | None = None
) -> tuple[str, dict[str, int]]:
    """Replace URL, email and mention spans with placeholder tokens.

    Returns the rewritten text and a count per entity class (classes
    with zero matches are omitted).
    """
    config = config or NormalizationConfig()
    placeholders = {
        "url": config.placeholder_url,
        "email": config.placeholder_email,
        "mention": config.placeholder_mention,
    }
    counts: Counter = Counter()
    out = _replace_entity_spans(text, placeholders, counts)
    return out, dict(counts)


def _replace_entity_spans(
    text: str, replacements: Mapping[str, str], counts: Counter
) -> str:
    spans = _entity_spans(text)
    if not spans:
        return text
    pieces = []
    cursor = 0
    for start, end, kind in spans:
        pieces.append(text[cursor:start])
        replacement = replacements[kind]
        if isinstance(replacement, tuple):  # alternating sentinel pair
            replacement = replacement[counts[kind] % 2]
        pieces.append(replacement)
        counts[kind] += 1
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)


def remove_unwanted_chars(
    text: str, config: NormalizationConfig | None = None
) -> str:
    """Drop characters in the configured removal table.

    Arabic script, printable ASCII, Unicode punctuation and whitespace
    are never dropped regardless of the table, so the rule cannot eat
    real tweet content.
    """
    config = config or NormalizationConfig()
    return _remove_unwanted(text, config, keep=frozenset())


def _remove_unwanted(text: str, config: NormalizationConfig, keep: frozenset) -> str:
    ranges = config.removal_ranges
    out = []
    for ch in text:
        if ch in keep:
            out.append(ch)
            continue
        if config.strip_tatweel_diacritics and _TATWEEL_DIACRITICS_RE.match(ch):
            continue
        code = ord(ch)
        if any(lo <= code <= hi for lo, hi in ranges) and not _protected(ch, code):
            continue
        out.append(ch)
    return "".join(out)


_PUNCT_RE = regex.compile(r"\p{P}")


def _protected(ch: str, code: int) -> bool:
    if 0x20 <= code <= 0x7E:  # printable ASCII: letters, digits, punctuation
        return True
    if ch.isspace():
        return True
    if is_arabic_char(ch):
        return True
    return _PUNCT_RE.match(ch) is not None


def collapse_repeats(text: str, max_run: int) -> str:
    """Truncate runs of an identical grapheme cluster to `max_run`."""
    if max_run < 1:
        raise ValueError(f"max_run must be >= 1, got {max_run}")
    graphemes = _GRAPHEME_RE.findall(text)
    out = []
    prev = None
    run = 0
    for g in graphemes:
        run = run + 1 if g == prev else 1
        prev = g
        if run <= max_run:
            out.append(g)
    return "".join(out)


def insert_boundaries(text: str) -> str:
    """Space out Latin letters, digits and round brackets from their
    neighbors: one space per qualifying boundary, none where whitespace
    already separates the pair."""
    for pattern in _BOUNDARY_RES:
        text = pattern.sub(" ", text)
    return text


def collapse_spaces(text: str) -> str:
    """Squeeze every whitespace run to a single space and trim the ends."""
    return _SPACE_RUN_RE.sub(" ", text).strip()


def normalize(text: str, config: NormalizationConfig | None = None) -> NormalizedText:
    """Run the full normalization pipeline over one tweet.

    Enabled rules run in the fixed order markup_strip, entity_replace,
    unwanted_chars, repeat_collapse, boundary_insert, space_collapse;
    the whole pass repeats until the text is stable. Placeholder tokens
    are masked behind private-use sentinels while the pass runs so the
    later rules can never mangle them. `rules_applied` lists, in pipeline
    order, the rules that actually changed the text.
    """
    config = config or NormalizationConfig()
    original = text
    # Pre-existing private-use sentinels would be indistinguishable from
    # our masks, so they are scrubbed up front.
    current = text.translate(_SENTINEL_SCRUB)
    counts: Counter = Counter()
    applied: dict[str, None] = {}
    keep = frozenset(c for pair in _SENTINELS.values() for c in pair)

    for _ in range(_MAX_PASSES):
        before_pass = current
        if config.markup_strip:
            rewritten = strip_markup(current)
            if rewritten != current:
                applied["markup_strip"] = None
            current = rewritten
        if config.entity_replace:
            rewritten = _replace_entity_spans(current, _SENTINELS, counts)
            if rewritten != current:
                applied["entity_replace"] = None
            current = rewritten
        if config.unwanted_chars:
            rewritten = _remove_unwanted(current, config, keep)
            if rewritten != current:
                applied["unwanted_chars"] = None
            current = rewritten
        if config.repeat_collapse:
            rewritten = collapse_repeats(current, config.max_repeat_run)
            if rewritten != current:
                applied["repeat_collapse"] = None
            current = rewritten
        if config.boundary_insert:
            rewritten = insert_boundaries(current)
            if rewritten != current:
                applied["boundary_insert"] = None
            current = rewritten
        if config.space_collapse:
            rewritten = collapse_spaces(current)
            if rewritten != current:
                applied["space_collapse"] = None
            current = rewritten
        if current == before_pass:
            break

    placeholders = {
        "url": config.placeholder_url,
        "email": config.placeholder_email,
        "mention": config.placeholder_mention,
    }
    for kind, pair in _SENTINELS.items():
        for sentinel in pair:
            current = current.replace(sentinel, placeholders[kind])

    rule_order = (
        "markup_strip",
        "entity_replace",
        "unwanted_chars",
        "repeat_collapse",
        "boundary_insert",
        "space_collapse",
    )
    return NormalizedText(
        original=original,
        normalized=current,
        rules_applied=tuple(r for r in rule_order if r in applied),
        entity_counts=dict(counts),
    )


def normalize_batch(
    texts: Iterable[str], config: NormalizationConfig | None = None
) -> list[NormalizedText]:
    """Normalize a sequence of tweets, preserving input order."""
    config = config or NormalizationConfig()
    return [normalize(t, config) for t in texts]
