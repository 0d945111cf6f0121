"""Weak gender labels from display names."""
import pathlib
import typing as t
import unicodedata

import aiofiles
import numpy as np

from electorate.constants import Gender
from electorate.exceptions import EmptyClassError, LexiconError
from electorate.logger import get_logger
from electorate.models import FaceTensor, NameLexicon, WeakLabel

__all__: t.Tuple[str, ...] = (
    "LEXICON_DIR",
    "MALE_FILE",
    "FEMALE_FILE",
    "normalize_name",
    "first_token",
    "label",
    "label_many",
    "build_lexicon",
    "parse_lexicon_file",
    "load_lexicon",
    "balance",
)

LEXICON_DIR: pathlib.Path = pathlib.Path(__file__).parent / "data" / "lexicon"
MALE_FILE: str = "male_names.txt"
FEMALE_FILE: str = "female_names.txt"

Labeled = t.Tuple[FaceTensor, WeakLabel]


def normalize_name(name: str) -> str:
    """Case-fold, strip diacritics and drop everything but letters.

    Examples
    --------

    >>> normalize_name("María")
    'maria'
    >>> normalize_name("J.R.")
    'jr'
    """
    decomposed = unicodedata.normalize("NFKD", name.casefold())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch) and ch.isalpha())


def first_token(display_name: str) -> str:
    tokens = display_name.split()
    return tokens[0] if tokens else ""


def label(display_name: str, lexicon: NameLexicon, *, user_id: int = 0) -> WeakLabel:
    """Labels a display name by its first whitespace-delimited token.

    Parameters
    ----------
    display_name: str
        The profile display name.
    lexicon: NameLexicon
        Known given names.
    user_id: int
        Owner of the display name.

    Returns
    -------
    WeakLabel
        Male or female on a lexicon hit, unknown otherwise (including empty names).

    Examples
    --------

    >>> lexicon = NameLexicon(male_names={"david"}, female_names={"maria"})
    >>> label("David Smith", lexicon).label
    <Gender.MALE: 'male'>
    >>> label("xX_gamer_Xx", lexicon).label
    <Gender.UNKNOWN: 'unknown'>
    """
    token = normalize_name(first_token(display_name))
    return WeakLabel(user_id=user_id, label=lexicon.lookup(token) if token else Gender.UNKNOWN)


def label_many(names: t.Iterable[t.Tuple[int, str]], lexicon: NameLexicon) -> t.List[WeakLabel]:
    """Labels ``(user_id, display_name)`` pairs in order."""
    return [label(name, lexicon, user_id=user_id) for user_id, name in names]


def parse_lexicon_file(text: str) -> t.Set[str]:
    """Normalized names of a lexicon file: one name per line, ``#`` starts a comment."""
    names = set()
    for line in text.splitlines():
        name = normalize_name(line.split("#", 1)[0].strip())
        if name:
            names.add(name)
    return names


def build_lexicon(male: t.Iterable[str], female: t.Iterable[str], *, strict: bool = False) -> NameLexicon:
    """Builds a lexicon, dropping names listed under both genders.

    Raises
    ------
    electorate.exceptions.LexiconError
        ``strict`` is set and some names are ambiguous.
    """
    male_names = {normalize_name(n) for n in male} - {""}
    female_names = {normalize_name(n) for n in female} - {""}
    ambiguous = male_names & female_names
    if ambiguous:
        sample = ", ".join(sorted(ambiguous)[:10])
        if strict:
            raise LexiconError(f"{len(ambiguous)} names are listed as both male and female", sample)
        get_logger().warning(f"Excluding {len(ambiguous)} ambiguous names from the lexicon: {sample}")
    return NameLexicon(male_names=male_names - ambiguous, female_names=female_names - ambiguous)


async def _read(path: pathlib.Path) -> str:
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            return await f.read()
    except FileNotFoundError as error:
        raise LexiconError("Lexicon file not found", str(path)) from error
    except UnicodeDecodeError as error:
        raise LexiconError("Lexicon file is not UTF-8", str(path)) from error


async def load_lexicon(
    directory: t.Optional[t.Union[str, pathlib.Path]] = None, *, strict: bool = False
) -> NameLexicon:
    """Loads ``male_names.txt`` and ``female_names.txt`` from a folder.

    Parameters
    ----------
    directory: str | pathlib.Path | None
        Folder holding the two files. Defaults to the lexicon shipped with the package.
    strict: bool
        Raise on ambiguous names instead of excluding them.

    Returns
    -------
    NameLexicon
        The lexicon.
    """
    folder = pathlib.Path(directory) if directory is not None else LEXICON_DIR
    male = parse_lexicon_file(await _read(folder / MALE_FILE))
    female = parse_lexicon_file(await _read(folder / FEMALE_FILE))
    lexicon = build_lexicon(male, female, strict=strict)
    get_logger().debug(f"Loaded {len(lexicon)} names from {folder}")
    return lexicon


def balance(labeled: t.Sequence[Labeled], seed: int) -> t.List[Labeled]:
    """Downsamples the majority class to a 1:1 gender ratio.

    Unknown labels are dropped. The majority class is sampled without replacement with
    ``numpy.random.default_rng(seed)``; kept examples stay in input order, males first.

    Parameters
    ----------
    labeled: typing.Sequence[typing.Tuple[FaceTensor, WeakLabel]]
        Faces with their weak labels.
    seed: int
        Sampling seed.

    Returns
    -------
    typing.List[typing.Tuple[FaceTensor, WeakLabel]]
        ``min(n_male, n_female)`` examples of each class.

    Raises
    ------
    electorate.exceptions.EmptyClassError
        One of the classes has no examples.
    """
    male = [pair for pair in labeled if pair[1].label is Gender.MALE]
    female = [pair for pair in labeled if pair[1].label is Gender.FEMALE]
    if not male or not female:
        raise EmptyClassError(f"Cannot balance {len(male)} male and {len(female)} female examples")
    keep = min(len(male), len(female))
    rng = np.random.default_rng(seed)

    def sample(pairs: t.List[Labeled]) -> t.List[Labeled]:
        if len(pairs) == keep:
            return pairs
        chosen = np.sort(rng.choice(len(pairs), size=keep, replace=False))
        return [pairs[i] for i in chosen]

    return sample(male) + sample(female)
