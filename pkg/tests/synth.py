"""Seeded synthetic fixture generator: people dataset, corpus, training data.

Everything is derived from a single generator seed through ``random.Random``
calls that are stable across CPython versions, so the fixture tree (and the
pipeline's report over it) is reproducible byte for byte.

The corpus plants person mentions from the fixture people dataset and toxic
vocabulary biased toward one demographic group (western women), so every
rule/classifier strategy should remove that group's mentions at the highest
rate. Toxicity is planted independently of the quality-vocabulary mix.
"""
from __future__ import annotations

import random
from pathlib import Path

from filteraudit.ingest.warc import WarcRecord, write_warc

GENERATOR_SEED = 20240833

BIASED_GROUP = "western_woman"

GIVEN_M = [
    "Arlen", "Bertram", "Caswell", "Dorian", "Edmundo", "Farrell", "Gideon",
    "Hollis", "Ignatius", "Jarvis", "Kendrick", "Lambert", "Merritt",
    "Nathaniel", "Osric", "Percival", "Quentin", "Rodrigo", "Stellan",
    "Thaddeus", "Ulysses", "Vaughn", "Wendell", "Xavier", "Yusuf", "Zebedee",
    "Ambrose", "Barnaby", "Cornelius", "Desmond", "Emmett", "Granville",
    "Horatio", "Irving", "Jasper", "Kelvin", "Leopold", "Montgomery",
    "Nikolai", "Obadiah",
]
GIVEN_W = [
    "Adelaide", "Beatrix", "Celestine", "Delphine", "Eulalia", "Florentina",
    "Genevieve", "Henrietta", "Isadora", "Josephine", "Katarina", "Lucinda",
    "Marguerite", "Nadia", "Octavia", "Persephone", "Rosalind", "Seraphina",
    "Theodora", "Ursula", "Violetta", "Wilhelmina", "Xiomara", "Yolanda",
    "Zenobia", "Annika", "Bernadette", "Clementine", "Dorothea", "Evangeline",
    "Francesca", "Gwendolyn", "Imogen", "Jessamine", "Leonora", "Mirabel",
    "Ophelia", "Priscilla", "Rosamund", "Valentina",
]
SURNAMES = [
    "Abernathy", "Blackwood", "Caldwell", "Dunmore", "Eastgate", "Fairbanks",
    "Greenhalgh", "Hathaway", "Ironside", "Jellicoe", "Kingsford",
    "Lockridge", "Montclair", "Northcott", "Okonkwo", "Pemberton",
    "Ravenscroft", "Silverton", "Thorncastle", "Underhill", "Vandermeer",
    "Westbrook", "Yarborough", "Zimmermann", "Ashgrove", "Birchall",
    "Cranmore", "Everhart", "Fenwick", "Galbraith", "Holloway", "Ingleton",
    "Jocelyn", "Kirkbride", "Lindqvist", "Mackenzie", "Nightingale",
    "Osterfield", "Pellworth", "Quintrell", "Rutherford", "Stonebridge",
    "Thackeray", "Umberland", "Vexley", "Wintermere", "Yeardley", "Zalenski",
]

WESTERN_BIRTHS = ["GB", "US", "FR", "DE", "IT", "ES", "CA", "AU", "NL", "SE"]
POSTCOLONIAL_BIRTHS = ["NG", "IN", "BR", "KE", "JM", "PK", "GH", "MX", "ID", "ZA"]
MINORITY_LABELS = ["African-Americans", "Native Americans", "Maori", "First Nations"]

OCCUPATIONS_COMMON = [
    "writer", "politician", "actor", "film actor", "television actor",
    "singer", "scientist", "journalist", "athlete", "painter", "composer",
    "historian", "economist", "photographer", "dancer",
]
RISKY_OCCUPATION_W = "pornographic actor"
RISKY_OCCUPATION_PC_W = "model"

GLUE = (
    "the of and to in a is was for on with that it as at by this from were "
    "has had been are not they their about more other when also after"
).split()
WIKI_POOL = (
    "university research history museum archive professor literature volume "
    "edition century reference journal published analysis theory institute "
    "academy scholarship manuscript heritage encyclopedia citation treatise "
    "monograph lecture faculty curriculum symposium thesis methodology "
    "hypothesis findings publication catalogue chronology dynasty treaty "
    "parliament constitution philosophy linguistics astronomy geology botany "
    "cartography navigation exploration expedition settlement antiquity "
    "medieval renaissance enlightenment empirical documented scholarly"
).split()
WEB_POOL = (
    "story review guide tips ideas community discussion comments posted "
    "share article blog newsletter opinion readers reply thread forum "
    "podcast episode interview roundup recap highlights takeaway insights "
    "trending update followers likes stream channel creator content video "
    "playlist snapshot gallery profile feed viral meme caption hashtag"
).split()
LOW_POOL = (
    "click buy cheap deal offer win free bonus subscribe gadget crazy weird "
    "hack trick insane epic unbelievable shocking secret miracle instantly "
    "guaranteed limited exclusive spam lottery jackpot casino pills discount "
    "coupon promo banner popup flashy scheme giveaway prize urgent expires "
    "cashback unlock premium trial gimmick bait hype blast mega ultra"
).split()

# toxic vocabulary shared with the bundled lexicons plus extra terms the
# lexicons do not list (classifier-only signal)
SHUTTERSTOCK_TERMS = [
    "porn", "sex", "nude", "dick", "ass", "slut", "whore", "erotic",
    "hardcore porn", "naked", "fetish", "smut", "horny", "topless",
]
HATEBASE_TERMS = [
    "slave", "slaves", "blacks", "dykes", "of white", "married to", "savages",
    "negro", "mongrel", "half breed", "white trash", "colored people",
]
TOX_EXTRA = [
    "scum", "filth", "degenerate", "vermin", "lowlife", "swine", "wretch",
    "skank", "harlot", "floozy", "hussy", "trollop",
]

FRENCH_SENTENCES = [
    "Le petit village se trouve au bord de la rivière tranquille.",
    "Les habitants vendent du pain et du fromage au marché chaque semaine.",
    "La bibliothèque municipale possède une collection de livres anciens.",
    "Les enfants apprennent l'histoire de la région à l'école primaire.",
    "Le musée présente une exposition sur les traditions locales.",
    "Beaucoup de visiteurs admirent la cathédrale et ses vitraux colorés.",
]

GROUP_WEIGHTS = [
    ("western_man", 48),
    ("western_woman", 22),
    ("postcolonial_man", 16),
    ("postcolonial_woman", 9),
    ("unknown", 5),
]

TOXIC_PROB = {"western_woman": 0.35, "western_man": 0.08, "postcolonial_man": 0.08, "postcolonial_woman": 0.08, "unknown": 0.06}
NO_MENTION_TOXIC_PROB = 0.04
MENTION_PROB = 0.55


class Person:
    def __init__(self, entity_id, name, group, risky, occupations):
        self.entity_id = entity_id
        self.name = name
        self.group = group
        self.risky = risky
        self.occupations = occupations


def _weighted_choice(rng: random.Random, weighted: list[tuple[str, int]]) -> str:
    total = sum(w for _v, w in weighted)
    roll = rng.randrange(total)
    acc = 0
    for value, weight in weighted:
        acc += weight
        if roll < acc:
            return value
    return weighted[-1][0]


def make_people(rng: random.Random, n: int = 200) -> tuple[list[str], list[Person]]:
    """TSV lines plus in-memory group/risk metadata for the corpus planter."""
    lines: list[str] = []
    people: list[Person] = []
    used_names: set[str] = set()
    for i in range(n):
        group = _weighted_choice(rng, GROUP_WEIGHTS)
        woman = group.endswith("woman")
        if group == "unknown":
            woman = rng.random() < 0.5
        pool = GIVEN_W if woman else GIVEN_M
        while True:
            name = f"{rng.choice(pool)} {rng.choice(SURNAMES)}"
            if name not in used_names:
                used_names.add(name)
                break
        entity_id = f"Q{1000 + i}"
        gender = "woman" if woman else "man"
        birth = ""
        citizenships: list[str] = []
        ethnic: list[str] = []
        if group == "unknown":
            # half lose the gender signal, half lose the origin signal
            if rng.random() < 0.5:
                gender = rng.choice(["unknown", "other"])
                birth = rng.choice(WESTERN_BIRTHS)
        elif group.startswith("western"):
            if rng.random() < 0.85:
                birth = rng.choice(WESTERN_BIRTHS)
            else:
                citizenships = [rng.choice(WESTERN_BIRTHS)]
        else:
            style = rng.random()
            if style < 0.6:
                birth = rng.choice(POSTCOLONIAL_BIRTHS)
            elif style < 0.85:
                birth = rng.choice(["US", "GB", "CA", "AU"])
                ethnic = [rng.choice(MINORITY_LABELS)]
            else:
                citizenships = [rng.choice(POSTCOLONIAL_BIRTHS)]
        risky = False
        occupations = rng.sample(OCCUPATIONS_COMMON, rng.randint(1, 3))
        if group == "western_woman" and rng.random() < 0.25:
            risky = True
            occupations = [RISKY_OCCUPATION_W] + occupations[:1]
        elif group == "postcolonial_woman" and rng.random() < 0.25:
            risky = True
            occupations = [RISKY_OCCUPATION_PC_W] + occupations[:1]
        aliases = []
        if rng.random() < 0.2:
            aliases.append(name.split()[0])
        lines.append(
            "\t".join(
                (
                    entity_id,
                    name,
                    "|".join(aliases),
                    gender,
                    birth,
                    "|".join(citizenships),
                    "|".join(ethnic),
                    "|".join(occupations),
                )
            )
        )
        people.append(Person(entity_id, name, group, risky, occupations))
    return lines, people


def _sentence_words(rng: random.Random, quality: float, length: int) -> list[str]:
    words = []
    for _ in range(length):
        roll = rng.random()
        if roll < 0.4:
            words.append(rng.choice(GLUE))
        elif rng.random() < quality:
            words.append(rng.choice(WIKI_POOL))
        else:
            words.append(rng.choice(LOW_POOL))
    return words


def _pick_person(rng: random.Random, by_group: dict[str, list[Person]], group: str, toxic: bool) -> Person:
    pool = by_group[group]
    if toxic:
        risky = [p for p in pool if p.risky]
        if risky and rng.random() < 0.5:
            return rng.choice(risky)
    return rng.choice(pool)


def _toxic_terms(rng: random.Random) -> list[str]:
    terms = []
    for _ in range(rng.randint(1, 2)):
        roll = rng.random()
        if roll < 0.45:
            terms.append(rng.choice(SHUTTERSTOCK_TERMS))
        elif roll < 0.75:
            terms.append(rng.choice(HATEBASE_TERMS))
        else:
            terms.append(rng.choice(TOX_EXTRA))
    return terms


def make_corpus_docs(rng: random.Random, people: list[Person], n_docs: int = 1000) -> list[dict]:
    by_group: dict[str, list[Person]] = {}
    for person in people:
        by_group.setdefault(person.group, []).append(person)

    docs = []
    for d in range(n_docs):
        doc_id = f"doc-{d:04d}"
        style_roll = rng.random()
        if style_roll < 0.03:
            sentences = rng.sample(FRENCH_SENTENCES, rng.randint(5, 6))
            docs.append({"doc_id": doc_id, "sentences": sentences, "planted": []})
            continue
        if style_roll < 0.06:
            # too few sentences
            quality = rng.random()
            sentences = []
            for _ in range(rng.randint(2, 4)):
                words = _sentence_words(rng, quality, rng.randint(6, 12))
                sentences.append(" ".join(words).capitalize() + ".")
            docs.append({"doc_id": doc_id, "sentences": sentences, "planted": []})
            continue
        if style_roll < 0.09:
            # sentences too short on average
            quality = rng.random()
            sentences = []
            for _ in range(rng.randint(6, 9)):
                words = _sentence_words(rng, quality, rng.randint(2, 3))
                sentences.append(" ".join(words).capitalize() + ".")
            docs.append({"doc_id": doc_id, "sentences": sentences, "planted": []})
            continue

        quality = rng.random()
        n_sentences = rng.randint(6, 11)
        sentences = []
        planted = []
        for s in range(n_sentences):
            words = _sentence_words(rng, quality, rng.randint(9, 15))
            mention_group = None
            toxic = False
            if rng.random() < MENTION_PROB:
                mention_group = _weighted_choice(rng, GROUP_WEIGHTS)
                toxic = rng.random() < TOXIC_PROB[mention_group]
            else:
                toxic = rng.random() < NO_MENTION_TOXIC_PROB
            # planting replaces tokens (instead of inserting) so the feature
            # mix of a sentence stays roughly independent of its toxicity
            name_pos = None
            if mention_group is not None:
                name_pos = rng.randint(1, len(words) - 2)
            if toxic:
                free = [
                    i for i in range(len(words))
                    if name_pos is None or not (name_pos <= i <= name_pos + 1)
                ]
                for term in _toxic_terms(rng):
                    pos = rng.choice(free)
                    free.remove(pos)
                    words[pos] = term
            if name_pos is not None:
                person = _pick_person(rng, by_group, mention_group, toxic)
                words[name_pos : name_pos + 2] = person.name.split()
                planted.append({"sentence": s, "entity_id": person.entity_id, "group": person.group, "toxic": toxic})
            sentence = " ".join(" ".join(words).split())
            sentence = sentence[0].upper() + sentence[1:] + "."
            sentences.append(sentence)
        docs.append({"doc_id": doc_id, "sentences": sentences, "planted": planted})
    return docs


def corpus_to_warc_bytes(docs: list[dict], gzip_members: bool = False) -> bytes:
    records = [
        WarcRecord(
            record_type="conversion",
            payload=" ".join(doc["sentences"]).encode("utf-8"),
            record_id=f"<urn:fixture:{doc['doc_id']}>",
            target_uri=f"http://fixture.example/{doc['doc_id']}",
        )
        for doc in docs
    ]
    return write_warc(records, gzip_members=gzip_members)


def _training_doc(rng: random.Random, pools: list[list[str]], length: int) -> str:
    words = []
    for _ in range(length):
        if rng.random() < 0.35:
            words.append(rng.choice(GLUE))
        else:
            words.append(rng.choice(rng.choice(pools)))
    return " ".join(words)


def _toxic_training_doc(rng: random.Random, term_pools: list[list[str]], length: int, n_toxic: int) -> str:
    words = _training_doc(rng, [WIKI_POOL, LOW_POOL, WEB_POOL], length).split()
    for _ in range(n_toxic):
        term = rng.choice(rng.choice(term_pools))
        pos = rng.randint(0, len(words))
        words[pos:pos] = term.split()
    return " ".join(words)


def make_training_corpora(rng: random.Random) -> dict[str, tuple[list[str], list[str]]]:
    corpora: dict[str, tuple[list[str], list[str]]] = {}

    def clean_docs(n: int) -> list[str]:
        return [_training_doc(rng, [WIKI_POOL, LOW_POOL, WEB_POOL], rng.randint(10, 18)) for _ in range(n)]

    # toxicity stand-ins: same trainer, different corpora
    corpora["perspective"] = (
        [_toxic_training_doc(rng, [SHUTTERSTOCK_TERMS, TOX_EXTRA, HATEBASE_TERMS], rng.randint(10, 16), rng.randint(2, 3)) for _ in range(320)],
        clean_docs(320),
    )
    corpora["profanity"] = (
        [_toxic_training_doc(rng, [SHUTTERSTOCK_TERMS, TOX_EXTRA], rng.randint(9, 15), rng.randint(2, 3)) for _ in range(320)],
        clean_docs(320),
    )
    corpora["fasttext"] = (
        [_toxic_training_doc(rng, [HATEBASE_TERMS, TOX_EXTRA, SHUTTERSTOCK_TERMS], rng.randint(9, 15), rng.randint(2, 3)) for _ in range(320)],
        clean_docs(320),
    )
    # quality models: positive class is the "high quality" style
    corpora["quality_wiki"] = (
        [_training_doc(rng, [WIKI_POOL], rng.randint(12, 20)) for _ in range(400)],
        [_training_doc(rng, [LOW_POOL], rng.randint(12, 20)) for _ in range(400)],
    )
    corpora["quality_webtext"] = (
        [_training_doc(rng, [WEB_POOL, WIKI_POOL], rng.randint(12, 20)) for _ in range(400)],
        [_training_doc(rng, [LOW_POOL], rng.randint(12, 20)) for _ in range(400)],
    )
    return corpora


CONFIG_TEMPLATE = """\
[corpus]
inputs = corpus.warc
format = warc

[kb]
people = people.tsv

[strategies]
enabled = shutterstock hatebase perspective fasttext profanity quality_wiki quality_webtext

[training]
dim = 1000
epochs = 10
lr = 0.5
perspective_pos = train/perspective_pos.txt
perspective_neg = train/perspective_neg.txt
fasttext_pos = train/fasttext_pos.txt
fasttext_neg = train/fasttext_neg.txt
profanity_pos = train/profanity_pos.txt
profanity_neg = train/profanity_neg.txt
quality_wiki_pos = train/quality_wiki_pos.txt
quality_wiki_neg = train/quality_wiki_neg.txt
quality_webtext_pos = train/quality_webtext_pos.txt
quality_webtext_neg = train/quality_webtext_neg.txt

[thresholds]
classifier = 0.8
fasttext = 0.5
link = 0.85
quality_wiki_removal = 0.15
quality_webtext_removal = 0.45

[sampling]
count = {sample_count}
size = {sample_size}
seed = 424243

[run]
seed = 171717
jobs = 1
output = out

[adapters]
offline = true
"""


def write_fixture_tree(
    base: Path,
    *,
    generator_seed: int = GENERATOR_SEED,
    n_people: int = 200,
    n_docs: int = 1000,
    sample_count: int = 5,
    sample_size: int = 150,
) -> dict:
    """Deterministic fixture tree: config, people, corpus, training corpora."""
    base.mkdir(parents=True, exist_ok=True)
    rng = random.Random(generator_seed)
    people_lines, people = make_people(rng, n_people)
    docs = make_corpus_docs(rng, people, n_docs)
    corpora = make_training_corpora(rng)

    (base / "people.tsv").write_text("\n".join(people_lines) + "\n", "utf-8")
    (base / "corpus.warc").write_bytes(corpus_to_warc_bytes(docs))
    train_dir = base / "train"
    train_dir.mkdir(exist_ok=True)
    for name, (pos, neg) in corpora.items():
        (train_dir / f"{name}_pos.txt").write_text("\n".join(pos) + "\n", "utf-8")
        (train_dir / f"{name}_neg.txt").write_text("\n".join(neg) + "\n", "utf-8")
    config_path = base / "config.ini"
    config_path.write_text(
        CONFIG_TEMPLATE.format(sample_count=sample_count, sample_size=sample_size), "utf-8"
    )
    return {
        "base": base,
        "config": config_path,
        "people": people,
        "people_lines": people_lines,
        "docs": docs,
        "out": base / "out",
    }
