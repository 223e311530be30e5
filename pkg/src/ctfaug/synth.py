"""Synthetic review corpora with planted causal and spurious structure.

These generators build desk-scale stand-ins for the review benchmarks: every
document carries sentiment adjectives that genuinely determine its label,
while a handful of non-causal tokens (noun choice, "free", ...) correlate
with one class. Counterfactual test sets are produced by swapping each
adjective for its designated partner and flipping the label, which mimics a
human minimal edit. Because the construction is known, the ideal behavior of
a classifier before and after augmentation is known too.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .corpus import Document, LabeledCorpus, Origin, Split, tokenize
from .experiments import DatasetBundle

# (positive, negative) adjective pairs; each pair is an antonym relation in
# the packaged lexicon so the generation pipeline can rediscover the flips.
ADJECTIVE_PAIRS: tuple[tuple[str, str], ...] = (
    ("good", "bad"),
    ("great", "terrible"),
    ("fantastic", "unimpressive"),
    ("awesome", "awful"),
    ("pleasant", "unpleasant"),
    ("lively", "dull"),
    ("interesting", "boring"),
    ("excellent", "poor"),
    ("wonderful", "horrible"),
    ("brilliant", "dreadful"),
    ("superb", "abysmal"),
    ("delightful", "dismal"),
    ("charming", "repulsive"),
    ("engaging", "tedious"),
    ("exciting", "monotonous"),
    ("funny", "unfunny"),
    ("gripping", "tiresome"),
    ("memorable", "forgettable"),
    ("enjoyable", "unbearable"),
    ("satisfying", "disappointing"),
    ("beautiful", "ugly"),
    ("clever", "stupid"),
    ("compelling", "bland"),
    ("fresh", "stale"),
    ("strong", "weak"),
    ("smart", "dumb"),
    ("moving", "hollow"),
    ("crisp", "sloppy"),
    ("elegant", "clumsy"),
    ("coherent", "incoherent"),
    ("masterful", "amateurish"),
    ("polished", "shoddy"),
    ("sharp", "blunt"),
    ("thrilling", "dreary"),
    ("touching", "soulless"),
    ("vibrant", "lifeless"),
    ("witty", "witless"),
    ("authentic", "fake"),
    ("absorbing", "numbing"),
    ("breathtaking", "mundane"),
    ("captivating", "soporific"),
    ("dazzling", "drab"),
    ("effective", "ineffective"),
    ("energetic", "sluggish"),
    ("genuine", "phony"),
    ("heartwarming", "depressing"),
    ("hilarious", "humorless"),
    ("innovative", "derivative"),
    ("inspired", "uninspired"),
    ("intelligent", "mindless"),
    ("inventive", "formulaic"),
    ("magnificent", "pathetic"),
    ("marvelous", "lousy"),
    ("nuanced", "simplistic"),
    ("original", "unoriginal"),
    ("outstanding", "mediocre"),
    ("perfect", "flawed"),
    ("powerful", "feeble"),
    ("refreshing", "tired"),
    ("remarkable", "unremarkable"),
    ("riveting", "plodding"),
    ("solid", "shaky"),
    ("spectacular", "ordinary"),
    ("stunning", "hideous"),
    ("stylish", "tacky"),
    ("successful", "unsuccessful"),
    ("talented", "talentless"),
    ("tight", "baggy"),
    ("timeless", "dated"),
    ("uplifting", "bleak"),
    ("watchable", "unwatchable"),
    ("admirable", "contemptible"),
    ("skillful", "inept"),
    ("graceful", "awkward"),
    ("sincere", "insincere"),
    ("immersive", "alienating"),
    ("cohesive", "disjointed"),
    ("seamless", "choppy"),
    ("evocative", "sterile"),
    ("layered", "shallow"),
    ("daring", "timid"),
    ("assured", "hesitant"),
    ("luminous", "murky"),
    ("propulsive", "stagnant"),
    ("textured", "flat"),
    ("spirited", "listless"),
    ("sumptuous", "threadbare"),
)

POSITIVE_ADJECTIVES = tuple(p for p, _ in ADJECTIVE_PAIRS)
NEGATIVE_ADJECTIVES = tuple(n for _, n in ADJECTIVE_PAIRS)
GOLD_FLIP: dict[str, str] = {}
for _pos, _neg in ADJECTIVE_PAIRS:
    GOLD_FLIP[_pos] = _neg
    GOLD_FLIP[_neg] = _pos

NEUTRAL_NOUNS = (
    "story", "plot", "acting", "cast", "script",
    "ending", "pacing", "dialogue", "soundtrack", "production",
)
# Spurious nouns lean toward one class without causing the label.
POS_SPURIOUS_NOUNS = ("film", "classic", "cinema", "theater", "premiere", "director")
NEG_SPURIOUS_NOUNS = ("movie", "sequel", "remake", "dvd", "trailer", "studio")

FILLER_WORDS = (
    "really", "very", "quite", "honestly", "overall", "somehow", "mostly",
    "clearly", "frankly", "definitely", "somewhat", "entirely", "almost",
    "certainly", "probably", "truly", "largely", "oddly", "strangely",
    "apparently", "basically", "roughly", "generally", "arguably", "fairly",
)
NEUTRAL_SENTENCES = (
    "i watched it at home last night.",
    "my friend recommended it to me.",
    "we saw it over the weekend.",
    "i had read about it online first.",
    "the runtime is about two hours.",
    "i went in without expectations.",
)


@dataclass(frozen=True)
class ReviewFixtureParams:
    n_train_per_class: int = 850
    n_test_per_class: int = 244
    sentiment_sentences: tuple[int, int] = (2, 4)  # inclusive range per doc
    neutral_sentences: tuple[int, int] = (0, 2)
    label_noise: float = 0.15
    cross_class_adjective: float = 0.04
    spurious_noun_rate: float = 0.72   # sentiment sentence uses a spurious noun
    spurious_match_class: float = 0.92  # ... leaning toward the document class
    free_rate_neg: float = 0.35
    free_rate_pos: float = 0.08
    minimal_template_rate: float = 0.012
    adjective_zipf: float = 1.4


def _zipf_weights(n: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    w = ranks**-exponent
    return w / w.sum()


def _pick_noun(rng: np.random.Generator, label: int, params: ReviewFixtureParams) -> str:
    if rng.random() < params.spurious_noun_rate:
        leaning = label if rng.random() < params.spurious_match_class else -label
        pool = POS_SPURIOUS_NOUNS if leaning > 0 else NEG_SPURIOUS_NOUNS
        return pool[int(rng.integers(len(pool)))]
    return NEUTRAL_NOUNS[int(rng.integers(len(NEUTRAL_NOUNS)))]


def _sentiment_sentence(
    rng: np.random.Generator,
    label: int,
    params: ReviewFixtureParams,
    weights: np.ndarray,
) -> str:
    side = label if rng.random() >= params.cross_class_adjective else -label
    pool = POSITIVE_ADJECTIVES if side > 0 else NEGATIVE_ADJECTIVES
    adj = pool[int(rng.choice(len(pool), p=weights))]
    if rng.random() < params.minimal_template_rate:
        # terse "fantastic film." style; neutral noun so both classes share contexts
        noun = NEUTRAL_NOUNS[int(rng.integers(len(NEUTRAL_NOUNS)))]
        return f"{adj} {noun}."
    noun = _pick_noun(rng, label, params)
    f1, f2, f3 = (FILLER_WORDS[int(rng.integers(len(FILLER_WORDS)))] for _ in range(3))
    templates = (
        f"the {noun} was {f1} {adj} and {f2} {f3} so.",
        f"{f1} {adj} {noun} with {f2} {f3} moments.",
        f"i found the {noun} {f1} {adj} if {f2} {f3} made.",
        f"the {noun} felt {f1} {adj} though {f2} {f3} still.",
        f"what a {f1} {adj} {noun} this {f2} {f3} time.",
    )
    return templates[int(rng.integers(len(templates)))]


def _free_sentence(rng: np.random.Generator) -> str:
    noun = ("ticket", "copy", "rental", "pass")[int(rng.integers(4))]
    return f"i got the {noun} for free."


def _make_doc(
    rng: np.random.Generator,
    doc_id: str,
    label: int,
    params: ReviewFixtureParams,
    weights: np.ndarray,
) -> Document:
    lo, hi = params.sentiment_sentences
    sentences = [
        _sentiment_sentence(rng, label, params, weights)
        for _ in range(int(rng.integers(lo, hi + 1)))
    ]
    free_rate = params.free_rate_neg if label < 0 else params.free_rate_pos
    if rng.random() < free_rate:
        sentences.append(_free_sentence(rng))
    lo_n, hi_n = params.neutral_sentences
    for _ in range(int(rng.integers(lo_n, hi_n + 1))):
        sentences.append(NEUTRAL_SENTENCES[int(rng.integers(len(NEUTRAL_SENTENCES)))])
    rng.shuffle(sentences)
    out_label = label if rng.random() >= params.label_noise else -label
    return Document.make(id=doc_id, raw_text=" ".join(sentences), label=out_label)


def flip_to_counterfactual(doc: Document, origin: Origin, suffix: str = "ctf") -> Document:
    """Swap every adjective for its gold partner and flip the label."""
    tokens = [GOLD_FLIP.get(t, t) for t in tokenize(doc.raw_text)]
    return Document.make(
        id=f"{doc.id}-{suffix}",
        raw_text=" ".join(tokens),
        label=-doc.label,
        origin=origin,
        source_id=doc.id,
    )


def make_review_bundle(
    name: str = "imdb-l-like",
    seed: int = 13,
    params: ReviewFixtureParams | None = None,
) -> DatasetBundle:
    """Long-text review fixture: train/test plus counterfactual test and train."""
    params = params or ReviewFixtureParams()
    rng = np.random.default_rng(seed)
    weights = _zipf_weights(len(ADJECTIVE_PAIRS), params.adjective_zipf)

    def block(prefix: str, n_per_class: int) -> list[Document]:
        docs = []
        for i in range(n_per_class * 2):
            label = 1 if i % 2 == 0 else -1
            docs.append(_make_doc(rng, f"{prefix}{i:05d}", label, params, weights))
        return docs

    train = LabeledCorpus(tuple(block("tr", params.n_train_per_class)), name=name, split=Split.TRAIN)
    test = LabeledCorpus(tuple(block("te", params.n_test_per_class)), name=f"{name}-test", split=Split.TEST)
    ctf_test = LabeledCorpus(
        tuple(flip_to_counterfactual(d, Origin.HUMAN_COUNTERFACTUAL) for d in test),
        name=f"{name}-ctf-test",
        split=Split.TEST,
    )
    human_ctf_train = LabeledCorpus(
        tuple(flip_to_counterfactual(d, Origin.HUMAN_COUNTERFACTUAL) for d in train),
        name=f"{name}-ctf-train",
        split=Split.TRAIN,
    )
    return DatasetBundle(
        name=name,
        train=train,
        test=test,
        ctf_test=ctf_test,
        human_ctf_train=human_ctf_train,
        kind="long",
    )


def annotated_causal_terms(bundle: DatasetBundle) -> tuple[str, ...]:
    """The ground-truth causal terms present in the bundle's training data."""
    seen = set()
    for doc in bundle.train:
        seen.update(t for t in doc.token_set if t in GOLD_FLIP)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class KindleFixtureParams:
    n_train_per_class: int = 600
    n_test_per_class: int = 250
    label_noise: float = 0.08
    cross_class_adjective: float = 0.02
    free_rate_neg: float = 0.55
    free_rate_pos: float = 0.05
    spurious_noun_rate: float = 0.60
    spurious_match_class: float = 0.92
    minimal_template_rate: float = 0.05
    adjective_zipf: float = 0.7


def make_kindle_bundle(name: str = "kindle-like", seed: int = 29) -> DatasetBundle:
    """Short book-review fixture with a strong 'free' spurious correlation."""
    kp = KindleFixtureParams()
    params = ReviewFixtureParams(
        n_train_per_class=kp.n_train_per_class,
        n_test_per_class=kp.n_test_per_class,
        sentiment_sentences=(1, 1),
        neutral_sentences=(0, 1),
        label_noise=kp.label_noise,
        cross_class_adjective=kp.cross_class_adjective,
        spurious_noun_rate=kp.spurious_noun_rate,
        spurious_match_class=kp.spurious_match_class,
        free_rate_neg=kp.free_rate_neg,
        free_rate_pos=kp.free_rate_pos,
        minimal_template_rate=kp.minimal_template_rate,
        adjective_zipf=kp.adjective_zipf,
    )
    bundle = make_review_bundle(name=name, seed=seed, params=params)
    return replace(bundle, kind="sentence", human_ctf_train=None)


def make_sentence_bundle(bundle: DatasetBundle, keywords: set[str] | tuple[str, ...]) -> DatasetBundle:
    """Sentence-segmented sibling of a long-text bundle (labels inherited)."""
    from .corpus import segment_sentences

    return DatasetBundle(
        name=bundle.name.replace("-l-", "-s-") if "-l-" in bundle.name else f"{bundle.name}-s",
        train=segment_sentences(bundle.train, keywords),
        test=segment_sentences(bundle.test, keywords),
        ctf_test=segment_sentences(bundle.ctf_test, keywords) if bundle.ctf_test else None,
        human_ctf_train=(
            segment_sentences(bundle.human_ctf_train, keywords)
            if bundle.human_ctf_train
            else None
        ),
        kind="sentence",
    )


def make_matching_bundle(seed: int = 17) -> DatasetBundle:
    """Long-text fixture tuned for closest-opposite-match evaluation.

    A higher rate of terse two-token sentences gives frequent adjectives
    exact cross-class context collisions, the signature the matcher keys
    on; a flatter adjective distribution keeps more terms above the
    sentence-level top-term threshold. Segment before matching.
    """
    params = ReviewFixtureParams(
        sentiment_sentences=(1, 3),
        label_noise=0.12,
        spurious_noun_rate=0.62,
        free_rate_neg=0.45,
        minimal_template_rate=0.04,
        adjective_zipf=0.7,
    )
    return make_review_bundle(name="match-fix", seed=seed, params=params)


def rating_for_label(rng: np.random.Generator, label: int) -> int:
    return int(rng.choice([4, 5])) if label > 0 else int(rng.choice([1, 2]))


@dataclass(frozen=True)
class SpuriousDemoParams:
    n_train_per_class: int = 150
    n_test_per_class: int = 50
    n_adjective_pairs: int = 8
    n_fillers: int = 4


def make_spurious_demo(seed: int = 5, params: SpuriousDemoParams | None = None):
    """Corpus where one token per class is perfectly class-correlated.

    Every document carries exactly one causal adjective (with a known
    antonym) plus the class's spurious token, so an ideal robust classifier
    must rely on the adjective alone. Returns (train, flipped_test,
    spurious_tokens, causal_terms).
    """
    params = params or SpuriousDemoParams()
    rng = np.random.default_rng(seed)
    pairs = ADJECTIVE_PAIRS[: params.n_adjective_pairs]
    pos_spurious, neg_spurious = "classic", "free"
    fillers = ("the", "was", "it", "i", "this", "saw", "one", "again", "twice", "once")

    def doc(prefix: str, i: int, label: int) -> Document:
        pair = pairs[int(rng.integers(len(pairs)))]
        adj = pair[0] if label > 0 else pair[1]
        spurious = pos_spurious if label > 0 else neg_spurious
        extra = [fillers[int(rng.integers(len(fillers)))] for _ in range(params.n_fillers)]
        tokens = extra[:2] + [spurious, adj] + extra[2:]
        return Document.make(id=f"{prefix}{i:04d}", raw_text=" ".join(tokens), label=label)

    train_docs = [
        doc("d", i, 1 if i % 2 == 0 else -1) for i in range(params.n_train_per_class * 2)
    ]
    test_docs = [
        doc("t", i, 1 if i % 2 == 0 else -1) for i in range(params.n_test_per_class * 2)
    ]
    flipped = [flip_to_counterfactual(d, Origin.HUMAN_COUNTERFACTUAL, "flip") for d in test_docs]
    train = LabeledCorpus(tuple(train_docs), name="spurious-demo", split=Split.TRAIN)
    flipped_test = LabeledCorpus(tuple(flipped), name="spurious-demo-flipped", split=Split.TEST)
    causal = tuple(sorted({t for p in pairs for t in p}))
    return train, flipped_test, (pos_spurious, neg_spurious), causal
