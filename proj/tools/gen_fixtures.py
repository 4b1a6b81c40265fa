#!/usr/bin/env python3
"""Regenerates the synthetic ranking fixtures under data/fixtures/.

The fixtures mimic an environmental-science dataset catalog: each record is
one query with ten expert-judged items, relevance graded 0-9 (all ten grades
distinct). Item summaries are built so that graded relevance correlates with
query-term coverage while document length and a few rare-term spikes stay
uncorrelated, which is what a trained scorer can exploit and plain BM25
cannot. Deterministic: a fixed seed always reproduces the committed files.
"""

import json
import random
from pathlib import Path

SEED = 20240501
OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"

TOPICS = {
    "aerosol": ["aerosol", "concentration", "particulate", "optical", "depth", "actris"],
    "carbon": ["carbon", "calculation", "emissions", "flux", "terrestrial", "carbon_cycle",
               "greenhouse", "icos"],
    "co2": ["atmospheric", "co2", "concentration", "trends", "icos", "mole", "fraction"],
    "ocean": ["ocean", "sea", "temperature", "monitoring", "buoy", "sensor", "argo",
              "salinity"],
    "soil": ["soil", "moisture", "nutrient", "nitrogen", "elter", "grassland", "plot"],
    "marine": ["plankton", "chlorophyll", "biomass", "marine", "sampling", "cruise",
               "emso"],
    "air": ["air", "quality", "ozone", "pollutant", "urban", "station", "iagos"],
    "hydro": ["river", "discharge", "runoff", "catchment", "gauge", "hydrological",
              "danubius"],
    "cryo": ["glacier", "permafrost", "ice", "thickness", "borehole", "arctic", "sios"],
    "seismic": ["seismic", "waveform", "earthquake", "magnitude", "epos", "broadband"],
    "biodiv": ["species", "biodiversity", "habitat", "abundance", "survey", "lifewatch"],
    "radiation": ["solar", "radiation", "irradiance", "flux", "pyranometer", "baseline"],
}

FILLER = ["archive", "record", "values", "quality", "controlled", "hourly", "daily",
          "gridded", "observations", "time", "series", "network", "instrument",
          "calibration", "metadata", "coverage", "annual", "site", "field", "campaign",
          "long", "term", "monthly", "mean", "regional", "european", "global", "open",
          "access", "version", "level", "product", "processed", "raw", "validated",
          "summary", "catalog", "repository", "portal", "provider", "licence"]

REGIONS = ["northern europe", "the alpine region", "the baltic sea", "the north atlantic",
           "central europe", "the mediterranean basin", "scandinavia", "the arctic circle",
           "the iberian peninsula", "western europe"]

QUERY_SHAPES = [
    "{a} {b} dataset",
    "{a} {b} measurement data",
    "{a} {b} time series",
    "long term {a} {b} records",
    "{a} {b} monitoring data",
    "{a} {b} observations archive",
]

# Demo queries mirror the kinds of searches the catalog sees in production.
DEMO_QUERIES = [
    ("Aerosol Concentration dataset", "aerosol"),
    ("Carbon data calculation methods", "carbon"),
    ("Atmospheric CO2 concentration trends", "co2"),
    ("Ocean temperature monitoring data", "ocean"),
    ("Soil moisture nutrient measurements", "soil"),
    ("Plankton chlorophyll biomass sampling", "marine"),
    ("Urban air quality ozone records", "air"),
    ("River discharge gauge time series", "hydro"),
    ("Glacier ice thickness observations", "cryo"),
    ("Seismic waveform earthquake archive", "seismic"),
]


def tokenize(text):
    out, cur = [], []
    for ch in text.lower():
        if ch.isalnum() or ch == "_" or ord(ch) >= 128:
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def make_summary(rng, qtokens, content_terms, topic, relevance):
    """Builds a 5-6 line catalog summary whose query-term coverage tracks
    the relevance grade while term frequency and document length do not."""
    n_q = len(qtokens)
    covered = round(n_q * relevance / 9.0)
    # Topic-bearing terms are planted first so partial coverage is
    # informative.
    plant_order = list(content_terms) + [t for t in qtokens if t not in content_terms]
    included = plant_order[:covered]

    words = []
    topic_terms = TOPICS[topic]
    other_topics = [t for t in TOPICS if t != topic]

    if included:
        words.extend(["this", "record", "provides"] + included + ["observations"])
        words.extend(["collected", "across"] + rng.choice(REGIONS).split())
        words.extend(rng.sample(topic_terms, k=min(2, len(topic_terms))))
    else:
        off = rng.choice(other_topics)
        words.extend(["this", "record", "provides"] + rng.sample(TOPICS[off], k=3)
                     + ["observations", "collected", "across"]
                     + rng.choice(REGIONS).split())

    # Distractor body, length independent of the grade.
    body_len = rng.randint(25, 75)
    pool = FILLER + rng.sample(TOPICS[rng.choice(other_topics)], k=3)
    body = [rng.choice(pool) for _ in range(body_len)]

    # Rare-term spike on some weakly graded items: a repeated mention of one
    # topic-bearing query term inflates idf-weighted term scores without
    # making the item broadly relevant.
    if relevance <= 4 and rng.random() < 0.75:
        spike = rng.choice(content_terms)
        if spike not in included:
            for _ in range(rng.randint(3, 5)):
                body.insert(rng.randrange(len(body) + 1), spike)

    # Highly relevant items are sometimes verbose, which length
    # normalization punishes even though the content is the best match.
    if relevance >= 7 and rng.random() < 0.65:
        body.extend(rng.choice(pool) for _ in range(rng.randint(50, 100)))

    words.extend(body)

    # Assemble into sentences of 8-13 words so the summary reads like prose.
    sentences, i = [], 0
    while i < len(words):
        step = rng.randint(8, 13)
        chunk = words[i:i + step]
        if chunk:
            sentences.append(" ".join(chunk).capitalize() + ".")
        i += step
    return " ".join(sentences)


def make_ranking(rng, query_id, query_text, content_terms, topic, item_prefix):
    qtokens = tokenize(query_text)
    content = [t for t in content_terms if t in qtokens] or qtokens
    grades = list(range(10))
    rng.shuffle(grades)
    items = []
    for slot, relevance in enumerate(grades):
        item_id = f"{item_prefix}-{slot}"
        items.append({
            "item_id": item_id,
            "url": f"https://hub.example.org/datasets/{item_id}",
            "summary": make_summary(rng, qtokens, content, topic, relevance),
            "relevance": relevance,
        })
    return {"query_id": query_id, "query_text": query_text, "items": items}


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    topics = list(TOPICS)
    rankings_94 = []
    for qi in range(94):
        topic = topics[qi % len(topics)]
        terms = rng.sample(TOPICS[topic], k=2)
        text = rng.choice(QUERY_SHAPES).format(a=terms[0], b=terms[1])
        rankings_94.append(
            make_ranking(rng, f"q{qi + 1:03d}", text, terms, topic, f"itm{qi + 1:03d}"))

    rankings_10 = []
    for di, (text, topic) in enumerate(DEMO_QUERIES):
        content = [t for t in tokenize(text) if t in TOPICS[topic]]
        rankings_10.append(
            make_ranking(rng, f"demo{di + 1:02d}", text, content, topic, f"dmo{di + 1:02d}"))

    with open(OUT / "rankings_94.jsonl", "w") as f:
        for r in rankings_94:
            f.write(json.dumps(r) + "\n")
    with open(OUT / "rankings_10.jsonl", "w") as f:
        for r in rankings_10:
            f.write(json.dumps(r) + "\n")
    with open(OUT / "corpus.jsonl", "w") as f:
        for r in rankings_94 + rankings_10:
            for item in r["items"]:
                f.write(json.dumps({"item_id": item["item_id"], "url": item["url"],
                                    "summary": item["summary"]}) + "\n")

    n_items = sum(len(r["items"]) for r in rankings_94 + rankings_10)
    print(f"wrote {len(rankings_94)} + {len(rankings_10)} rankings, {n_items} corpus items")


if __name__ == "__main__":
    main()
