#!/usr/bin/env python3
"""Rebuilds the frozen fixtures under fixtures/.

Page markup and the matching expected parser output are rendered from the
same block descriptions, so the expected JSON is derived from the intent of
each fixture rather than from the parser. Everything is deterministic;
rerunning the script must reproduce the checked-in bytes exactly.
"""

import hashlib
import json
import math
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SERP_DIR = ROOT / "fixtures" / "serp"
CORPUS_DIR = ROOT / "fixtures" / "corpus"
RAW_DIR = CORPUS_DIR / "raw"
EVAL_DIR = ROOT / "fixtures" / "eval"

# Block type names in schema order; warning lines follow this order.
TYPE_ORDER = [
    "knowledge_graph", "calculator", "direct_answer", "map", "local_result",
    "commercial_sponsored", "twitter", "top_stories", "videos", "images",
    "content_navigation_bar", "featured_snippet", "rich_snippets",
    "people_also_asked", "similar_entity", "translator", "top_button_ads",
    "natural_results", "partners_block", "other_cards",
]

# Which of (title, snippet, url, items) the selector dialect can extract.
CAPS = {
    "knowledge_graph":        ("T", "S", "U", ""),
    "calculator":             ("T", "S", "", ""),
    "direct_answer":          ("T", "S", "", ""),
    "map":                    ("T", "", "", ""),
    "local_result":           ("T", "", "", "I"),
    "commercial_sponsored":   ("T", "", "", "I"),
    "twitter":                ("T", "", "", "I"),
    "top_stories":            ("T", "", "", "I"),
    "videos":                 ("T", "", "", "I"),
    "images":                 ("T", "", "", "I"),
    "content_navigation_bar": ("", "", "", "I"),
    "featured_snippet":       ("T", "S", "U", ""),
    "rich_snippets":          ("T", "S", "", ""),
    "people_also_asked":      ("T", "", "", "I"),
    "similar_entity":         ("T", "", "", "I"),
    "translator":             ("T", "S", "", ""),
    "top_button_ads":         ("T", "S", "U", ""),
    "natural_results":        ("T", "", "", "I"),
    "partners_block":         ("T", "", "", "I"),
    "other_cards":            ("T", "", "", ""),
}

# (container class, title class, snippet class, url class, item class)
CLASSES = {
    "knowledge_graph":        ("kg-panel", "kg-title", "kg-desc", "kg-link", None),
    "calculator":             ("calc-widget", "calc-expr", "calc-result", None, None),
    "direct_answer":          ("direct-answer", "da-head", "da-body", None, None),
    "map":                    ("map-box", "map-title", None, None, None),
    "local_result":           ("local-pack", "lp-head", None, None, "local-item"),
    "commercial_sponsored":   ("shopping-unit", "shop-head", None, None, "shop-item"),
    "twitter":                ("twitter-cards", "tw-handle", None, None, "tweet"),
    "top_stories":            ("top-stories", "ts-head", None, None, "story"),
    "videos":                 ("video-carousel", "vc-head", None, None, "video"),
    "images":                 ("image-strip", "is-head", None, None, "thumb"),
    "content_navigation_bar": ("content-nav", None, None, None, "nav-item"),
    "featured_snippet":       ("featured-snippet", "fs-title", "fs-text", "fs-link", None),
    "rich_snippets":          ("rich-card", "rc-title", "rc-meta", None, None),
    "people_also_asked":      ("paa-box", "paa-head", None, None, "paa-q"),
    "similar_entity":         ("similar-entities", "se-head", None, None, "sim-ent"),
    "translator":             ("translate-widget", "tr-source", "tr-target", None, None),
    "top_button_ads":         ("top-ad", "ad-title", "ad-text", "ad-link", None),
    "natural_results":        ("organic", "org-head", None, None, "g"),
    "partners_block":         ("partners", "pb-head", None, None, "partner"),
    "other_cards":            ("misc-card", "mc-title", None, None, None),
}

CONTAINER_TAG = {"content_navigation_bar": "nav"}


def esc(s):
    return (s.replace("&", "&amp;").replace("<", "&lt;")
             .replace(">", "&gt;").replace('"', "&quot;"))


def block(type_name, title=None, snippet=None, url=None, items=None):
    caps = CAPS[type_name]
    if title is not None:
        assert caps[0], f"{type_name} has no title selector"
    if snippet is not None:
        assert caps[1], f"{type_name} has no snippet selector"
    if url is not None:
        assert caps[2], f"{type_name} has no url selector"
    if items:
        assert caps[3], f"{type_name} has no item selector"
    return {"type": type_name, "title": title, "snippet": snippet,
            "url": url, "items": list(items or [])}


def render_block(b):
    cont, tcls, scls, ucls, icls = CLASSES[b["type"]]
    tag = CONTAINER_TAG.get(b["type"], "div")
    lines = [f'<{tag} class="{cont}">']
    if b["title"] is not None:
        lines.append(f'  <div class="{tcls}">{esc(b["title"])}</div>')
    if b["snippet"] is not None:
        lines.append(f'  <div class="{scls}">{esc(b["snippet"])}</div>')
    if b["url"] is not None:
        lines.append(f'  <a class="{ucls}" href="{esc(b["url"])}">more</a>')
    for it in b["items"]:
        itag = "a" if b["type"] == "content_navigation_bar" else "div"
        href = ' href="#"' if itag == "a" else ""
        lines.append(f'  <{itag} class="{icls}"{href}>{esc(it)}</{itag}>')
    lines.append(f"</{tag}>")
    return "\n".join(lines)


def render_page(query, blocks, related):
    parts = ["<html>",
             f"<head><title>{esc(query)} - search</title></head>",
             "<body>",
             '<div id="main">']
    for b in blocks:
        parts.append(render_block(b))
    if related:
        parts.append('<div class="related-searches">')
        for r in related:
            parts.append(f'  <div class="rel-item">{esc(r)}</div>')
        parts.append("</div>")
    parts += ["</div>", "</body>", "</html>"]
    return "\n".join(parts) + "\n"


def expected_doc(query, fetched_at, blocks, related):
    out_blocks = []
    for pos, b in enumerate(blocks, start=1):
        out_blocks.append({
            "block_type": b["type"],
            "position": pos,
            "title": b["title"],
            "snippet": b["snippet"],
            "url": b["url"],
            "items": b["items"],
        })
    present = {b["type"] for b in blocks}
    warnings = [f"no {t} blocks matched" for t in TYPE_ORDER if t not in present]
    return {
        "query": query,
        "fetched_at": fetched_at,
        "blocks": out_blocks,
        "related_searches": list(related),
        "parse_warnings": warnings,
    }


def dump_json(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- serp pages

def serp_fixtures():
    f = []

    f.append(("kitchen_sink.html", "seattle weather today", "2025-11-04T09:00:00Z", [
        block("top_button_ads", title="Weather gear sale", snippet="Jackets and umbrellas",
              url="https://ads.example.com/weather"),
        block("knowledge_graph", title="Seattle", snippet="City in Washington",
              url="https://example.org/seattle"),
        block("direct_answer", title="Seattle weather", snippet="52F, light rain"),
        block("featured_snippet", title="Seattle climate", snippet="Mild and wet winters",
              url="https://example.org/climate"),
        block("calculator", title="52 - 10", snippet="42"),
        block("map", title="Seattle area map"),
        block("local_result", title="Weather stations nearby",
              items=["Station Alpha", "Station Beta", "Station Gamma"]),
        block("people_also_asked", title="People also ask",
              items=["Does it rain every day in seattle",
                     "What is the coldest month in seattle"]),
        block("top_stories", title="Top stories",
              items=["Storm front approaches", "Ferry schedule changes"]),
        block("videos", title="Videos", items=["Seattle timelapse", "Rainiest day ever"]),
        block("images", title="Images", items=["skyline photo", "rainbow photo"]),
        block("twitter", title="@SeattleWx", items=["Rain expected tonight", "Sun break at noon"]),
        block("rich_snippets", title="Seattle weather almanac", snippet="Rating 4.5 - 212 votes"),
        block("similar_entity", title="People also search for",
              items=["Tacoma", "Bellevue", "Everett"]),
        block("translator", title="weather", snippet="tiempo"),
        block("content_navigation_bar", items=["Hourly", "Daily", "Radar", "Maps"]),
        block("commercial_sponsored", title="Sponsored",
              items=["Umbrella ProMax", "RainCoat 3000"]),
        block("natural_results", title="All results",
              items=["National weather service", "Seattle forecast discussion",
                     "Climate of puget sound"]),
        block("partners_block", title="From our partners",
              items=["Weather blog network", "Storm chaser diaries"]),
        block("other_cards", title="Air quality index"),
    ], ["seattle weather hourly", "seattle rain forecast", "seattle winter"]))

    f.append(("knowledge_graph.html", "isaac newton", "2025-11-04T09:01:00Z", [
        block("knowledge_graph", title="Isaac Newton",
              snippet="English mathematician and physicist",
              url="https://example.org/newton"),
    ], ["isaac newton laws", "isaac newton biography"]))

    f.append(("calculator.html", "15 * 24", "2025-11-04T09:02:00Z", [
        block("calculator", title="15 * 24", snippet="360"),
        block("natural_results", title="Web results",
              items=["Multiplication tables", "Long multiplication",
                     "Mental math tricks"]),
    ], []))

    f.append(("direct_answer.html", "height of mount everest", "2025-11-04T09:03:00Z", [
        block("direct_answer", title="Mount Everest height", snippet="8,849 metres"),
        block("people_also_asked", title="People also ask",
              items=["How tall is k2", "Is everest still growing"]),
        block("natural_results", title="Results",
              items=["Everest facts", "Himalaya geology", "Climbing history",
                     "Survey of 2020", "Base camp guide"]),
    ], ["mount everest deaths", "k2 height", "highest mountains list",
        "everest base camp"]))

    f.append(("map_local.html", "pharmacy open now", "2025-11-04T09:04:00Z", [
        block("map", title="Pharmacies near you"),
        block("local_result", title="Places",
              items=["Central Pharmacy", "Night Owl Drugs", "Corner Chemist"]),
        block("natural_results", title="Results",
              items=["24 hour pharmacy directory", "Prescription refills online",
                     "Pharmacy locator", "Urgent care options",
                     "Late night stores", "Emergency numbers"]),
    ], ["pharmacy delivery", "urgent care near me", "drugstore hours"]))

    f.append(("shopping.html", "wireless headphones", "2025-11-04T09:05:00Z", [
        block("top_button_ads", title="Headphone megastore", snippet="Free shipping this week",
              url="https://ads.example.com/headphones"),
        block("commercial_sponsored", title="Sponsored products",
              items=["AirBuds Lite - $49", "BassMax Over-Ear - $89",
                     "StudioPro ANC - $199", "SportClip Mini - $29"]),
        block("natural_results", title="Results",
              items=["Headphone buying guide", "Top 10 wireless headphones",
                     "Noise cancelling explained", "Battery life comparison",
                     "Codec support chart", "Reviews roundup",
                     "Budget picks", "Audiophile forum thread"]),
    ], ["wireless headphones review", "bluetooth earbuds", "noise cancelling headphones",
        "headphones under 100", "over ear vs in ear"]))

    f.append(("twitter.html", "spacex launch", "2025-11-04T09:06:00Z", [
        block("twitter", title="@SpaceX",
              items=["Liftoff confirmed", "Booster landed", "Next window tomorrow"]),
        block("top_stories", title="Top stories",
              items=["Launch succeeds", "Payload in orbit", "Weather delay recap"]),
        block("natural_results", title="Results",
              items=["Launch schedule", "Mission overview", "Rocket specs",
                     "Live stream archive", "Landing zone map",
                     "Press kit", "Photo gallery"]),
    ], ["spacex launch today", "rocket launch schedule", "starship update",
        "live launch stream"]))

    f.append(("news_video.html", "world cup final", "2025-11-04T09:07:00Z", [
        block("top_stories", title="Top stories",
              items=["Final preview", "Team news", "Road to the final",
                     "Ticket chaos"]),
        block("videos", title="Videos",
              items=["Semifinal highlights", "Best goals so far", "Keeper saves"]),
        block("natural_results", title="Results",
              items=["Match schedule", "Stadium guide", "Squad lists",
                     "History of finals", "Referee assignments",
                     "Fan zone info", "Broadcast rights", "Betting odds",
                     "Injury report"]),
    ], ["world cup final time", "world cup tickets", "final lineup",
        "world cup history", "stadium capacity", "tv schedule"]))

    f.append(("images.html", "aurora borealis", "2025-11-04T09:08:00Z", [
        block("images", title="Images",
              items=["green arc over lake", "purple curtain", "iceland shoreline",
                     "time exposure", "winter camp"]),
        block("natural_results", title="Results",
              items=["What causes auroras", "Best viewing spots", "Solar wind primer",
                     "Photography settings", "Forecast service", "Travel guide"]),
    ], []))

    f.append(("content_nav.html", "python documentation", "2025-11-04T09:09:00Z", [
        block("content_navigation_bar",
              items=["Tutorial", "Library reference", "Language reference", "Howtos"]),
        block("natural_results", title="Results",
              items=["Official docs", "Beginner guide", "Standard library tour",
                     "Typing cheatsheet", "Release notes"]),
    ], ["python tutorial", "python standard library"]))

    f.append(("featured.html", "how to tie a tie", "2025-11-04T09:10:00Z", [
        block("featured_snippet", title="Four in hand knot",
              snippet="Cross the wide end over the narrow end, loop under, pull through",
              url="https://example.org/knots"),
        block("people_also_asked", title="People also ask",
              items=["What is the easiest tie knot", "How long should a tie be",
                     "What is a windsor knot", "Can you machine wash a tie"]),
        block("videos", title="Videos", items=["Knot tutorial", "Five knots in five minutes"]),
        block("natural_results", title="Results",
              items=["Knot encyclopedia", "Menswear basics", "Step by step photos",
                     "Video walkthrough", "Skinny tie advice", "Bow tie guide",
                     "Fabric care", "Holiday gift ideas"]),
    ], ["tie a tie easy", "windsor knot steps", "half windsor", "tie length rule",
        "skinny tie knot", "bow tie how to", "tie clip placement"]))

    f.append(("rich_similar.html", "lord of the rings", "2025-11-04T09:11:00Z", [
        block("knowledge_graph", title="The Lord of the Rings",
              snippet="Epic fantasy novel by J. R. R. Tolkien",
              url="https://example.org/lotr"),
        block("rich_snippets", title="The Lord of the Rings",
              snippet="Rating 4.8 - 12,044 votes"),
        block("similar_entity", title="People also search for",
              items=["The Hobbit", "The Silmarillion", "Unfinished Tales"]),
        block("natural_results", title="Results",
              items=["Plot summary", "Character index", "Publication history",
                     "Film adaptations", "Appendices explained", "Maps of middle earth"]),
    ], ["lotr reading order", "tolkien bibliography", "hobbit vs lotr",
        "middle earth timeline", "lotr appendices"]))

    f.append(("translator.html", "hello in french", "2025-11-04T09:12:00Z", [
        block("translator", title="hello", snippet="bonjour"),
        block("direct_answer", title="Translation", snippet="bonjour"),
        block("natural_results", title="Results",
              items=["French greetings", "Pronunciation guide", "Common phrases",
                     "Formal vs informal"]),
    ], ["french greetings", "bonjour pronunciation", "basic french phrases"]))

    f.append(("organic_only.html", "open source licenses", "2025-11-04T09:13:00Z", [
        block("natural_results", title="Results",
              items=["License comparison chart", "Permissive vs copyleft",
                     "Choosing a license", "Compatibility matrix",
                     "Patent clauses explained", "Attribution requirements",
                     "Dual licensing", "License FAQ",
                     "History of free software", "Approved license list"]),
    ], ["mit license", "apache 2 license", "gpl compatibility", "bsd license",
        "copyleft meaning", "license chooser", "public domain software",
        "creative commons"]))

    f.append(("partners_misc.html", "flight deals", "2025-11-04T09:14:00Z", [
        block("partners_block", title="From our partners",
              items=["FlyCheap weekly digest", "Miles and points blog"]),
        block("other_cards", title="Fare trend: falling"),
        block("commercial_sponsored", title="Sponsored",
              items=["NYC to LON $420", "SFO to TYO $680", "BOS to PAR $510"]),
        block("natural_results", title="Results",
              items=["Fare comparison sites", "Error fare alerts", "Best booking day",
                     "Budget airline roundup", "Award availability", "Stopover tricks"]),
    ], ["cheap flights", "flight price tracker", "error fares", "award flights"]))

    f.append(("empty.html", "zzzz", "2025-11-04T09:15:00Z", [], []))

    return f


RAW_FIXTURES = {
    "multi_block.html": {
        "query": "fish & chips recipe",
        "fetched_at": "2025-11-04T09:16:00Z",
        "html": (
            '<div class="organic"><div class="org-head">Results for fish &amp; chips</div>\n'
            '<div class="g">Best fish &amp; chips in town</div>\n'
            '<p>unclosed paragraph\n'
            '<div class="g">Classic   recipe\n'
            '    collection</div>\n'
            '</div>\n'
            '<div class="misc-card"><div class="mc-title">Street food guide&#x2019;s pick</div></div>\n'
            '<div class="organic">\n'
            '<div class="g">Pub favourites</div></div>\n'
        ),
        "blocks": [
            {"block_type": "natural_results", "position": 1,
             "title": "Results for fish & chips", "snippet": None, "url": None,
             "items": ["Best fish & chips in town", "Classic recipe collection"]},
            {"block_type": "other_cards", "position": 2,
             "title": "Street food guide’s pick", "snippet": None, "url": None,
             "items": []},
            {"block_type": "natural_results", "position": 3,
             "title": None, "snippet": None, "url": None,
             "items": ["Pub favourites"]},
        ],
        "related": [],
    },
}

CAPTCHA_FIXTURE = {
    "file": "captcha.html",
    "query": "buy concert tickets",
    "fetched_at": "2025-11-04T09:17:00Z",
    "html": ("<html><body>\n"
             '<div class="challenge">Our systems have detected unusual traffic '
             "from your computer network.</div>\n"
             "</body></html>\n"),
}


def write_serp_fixtures():
    SERP_DIR.mkdir(parents=True, exist_ok=True)
    manifest = []
    for name, query, fetched_at, blocks, related in serp_fixtures():
        (SERP_DIR / name).write_text(render_page(query, blocks, related),
                                     encoding="utf-8")
        expected = name.replace(".html", ".expected.json")
        doc = expected_doc(query, fetched_at, blocks, related)
        (SERP_DIR / expected).write_text(dump_json(doc), encoding="utf-8")
        manifest.append({"file": name, "query": query, "fetched_at": fetched_at,
                         "expected": expected})

    for name, fx in RAW_FIXTURES.items():
        (SERP_DIR / name).write_text(fx["html"], encoding="utf-8")
        present = {b["block_type"] for b in fx["blocks"]}
        doc = {
            "query": fx["query"],
            "fetched_at": fx["fetched_at"],
            "blocks": fx["blocks"],
            "related_searches": fx["related"],
            "parse_warnings": [f"no {t} blocks matched" for t in TYPE_ORDER
                               if t not in present],
        }
        expected = name.replace(".html", ".expected.json")
        (SERP_DIR / expected).write_text(dump_json(doc), encoding="utf-8")
        manifest.append({"file": name, "query": fx["query"],
                         "fetched_at": fx["fetched_at"], "expected": expected})

    (SERP_DIR / CAPTCHA_FIXTURE["file"]).write_text(CAPTCHA_FIXTURE["html"],
                                                    encoding="utf-8")
    manifest.append({"file": CAPTCHA_FIXTURE["file"],
                     "query": CAPTCHA_FIXTURE["query"],
                     "fetched_at": CAPTCHA_FIXTURE["fetched_at"],
                     "captcha": True})
    (SERP_DIR / "manifest.json").write_text(dump_json({"fixtures": manifest}),
                                            encoding="utf-8")


# -------------------------------------------------------------------- corpus

INFO_QUERIES = [
    "what is capital gains tax",
    "how does inheritance tax work",
    "how to file income tax online",
    "how to start a small business",
    "writing a business plan step by step",
    "best business credit cards",
    "what is a good credit score",
    "how to improve credit score fast",
    "how does health insurance work",
    "best car insurance rates",
    "how much is life insurance",
    "best college for computer science",
    "average college tuition cost",
    "how to apply for college scholarships",
    "symptoms of vitamin d deficiency",
    "what is the keto diet",
    "how does a mortgage work",
    "what is compound interest",
    "student loan forgiveness explained",
    "what is cryptocurrency mining",
]

ADULT_QUERIES = [
    "sexy celebrities red carpet photos",
    "hot women workout videos",
    "bikini models photos gallery",
    "nude art photography ideas",
    "sexy dress party outfits",
    "hot celebrities dating rumors",
    "adult movies new releases",
    "bikini swimwear summer sale",
    "nude lipstick shades",
    "adult party games ideas",
    "sexy halloween costumes for women",
    "rap lyrics explicit version",
    "love song lyrics romantic",
    "karaoke lyrics popular songs",
    "celebrities without makeup photos",
    "women fashion week highlights",
    "adult coloring books printable",
    "hot sauce challenge videos",
    "bikini models runway videos",
    "nude color nail polish",
]

LOCAL_QUERIES = [
    "coffee shops near downtown",
    "best coffee roasters in portland",
    "coffee house with wifi",
    "hotels with pool in miami",
    "cheap hotels near airport",
    "pet friendly hotels in denver",
    "italian restaurants open late",
    "mexican restaurants with patio",
    "seafood restaurants on the waterfront",
    "dog park near riverside",
    "water park tickets phoenix",
    "skate park hours brooklyn",
    "public beach parking santa cruz",
    "beach resorts for families",
    "quiet beach towns oregon",
    "art museum free admission day",
    "science museum hours seattle",
    "history museum downtown tours",
    "farmers market downtown saturday",
    "gyms with sauna near me",
]

THEME_ANCHORS = {
    "info": ["tax", "business", "credit", "insurance", "college"],
    "adult": ["sexy", "hot", "bikini", "nude", "adult", "lyrics", "photos",
              "videos", "women", "celebrities"],
    "local": ["coffee", "hotels", "restaurants", "park", "beach", "museum",
              "downtown"],
}


def info_page(query, i):
    blocks = [
        block("featured_snippet", title=f"About {query}",
              snippet=f"Short answer text {i + 1}.",
              url=f"https://answers.example.com/a{i + 1}"),
        block("people_also_asked", title="People also ask",
              items=[f"Question {j + 1} about {query}" for j in range(4 + i % 3)]),
    ]
    if i % 4 == 0:
        blocks.append(block("direct_answer", title=f"Answer for {query}",
                            snippet=f"Direct answer {i + 1}"))
    if i % 3 == 0:
        blocks.append(block("rich_snippets", title=f"Guide to {query}",
                            snippet=f"Rating 4.{i % 10} - {100 + i} votes"))
    if i % 5 == 0:
        blocks.append(block("videos", title="Videos",
                            items=[f"Video {j + 1} on {query}" for j in range(2)]))
    if i % 6 == 0:
        blocks.append(block("top_stories", title="Top stories",
                            items=[f"Story {j + 1} on {query}" for j in range(3)]))
    blocks.append(block("natural_results", title="Results",
                        items=[f"Result {j + 1} for {query}"
                               for j in range(9 + i % 2)]))
    related = [f"{query} part {j + 1}" for j in range(7 + i % 3)]
    return blocks, related


def adult_page(query, i):
    blocks = [
        block("images", title="Images",
              items=[f"image {j + 1} of {query}" for j in range(5 + i % 3)]),
    ]
    if i % 2 == 0:
        blocks.append(block("videos", title="Videos",
                            items=[f"clip {j + 1} of {query}" for j in range(3)]))
    if i % 5 == 0:
        blocks.append(block("twitter", title="@trending",
                            items=[f"post {j + 1} about {query}" for j in range(2)]))
    if i % 4 == 0:
        blocks.append(block("other_cards", title=f"Trending now: {query}"))
    blocks.append(block("natural_results", title="Results",
                        items=[f"Result {j + 1} for {query}"
                               for j in range(8 + i % 3)]))
    return blocks, []


def local_page(query, i):
    blocks = [
        block("knowledge_graph", title=f"Area guide: {query}",
              snippet=f"Neighborhood notes {i + 1}",
              url=f"https://places.example.com/p{i + 1}"),
    ]
    if i % 2 == 0:
        blocks.append(block("map", title=f"Map of {query}"))
    blocks.append(block("local_result", title="Places",
                        items=[f"Place {j + 1} for {query}"
                               for j in range(3 + i % 2)]))
    if i % 3 == 0:
        blocks.append(block("partners_block", title="From our partners",
                            items=[f"Partner pick {j + 1}" for j in range(2)]))
    if i % 4 == 0:
        blocks.append(block("commercial_sponsored", title="Sponsored",
                            items=[f"Offer {j + 1} near {query}" for j in range(3)]))
    if i % 5 == 0:
        blocks.append(block("top_button_ads", title=f"Deals on {query}",
                            snippet="Book today", url=f"https://ads.example.com/l{i + 1}"))
    if i % 6 == 0:
        blocks.append(block("people_also_asked", title="People also ask",
                            items=[f"Question {j + 1} about {query}" for j in range(2)]))
    blocks.append(block("natural_results", title="Results",
                        items=[f"Result {j + 1} for {query}"
                               for j in range(8 + i % 2)]))
    related = [f"{query} option {j + 1}" for j in range(7 + i % 2)]
    return blocks, related


def corpus_entries():
    entries = []
    idx = 0
    for theme, queries, page_fn, labels in [
        ("info", INFO_QUERIES, info_page,
         lambda i: "informational"),
        ("adult", ADULT_QUERIES, adult_page,
         lambda i: "transactional" if i % 2 else "informational"),
        ("local", LOCAL_QUERIES, local_page,
         lambda i: "navigational" if i % 2 else "transactional"),
    ]:
        for i, q in enumerate(queries):
            blocks, related = page_fn(q, i)
            label = "" if i % 3 == 2 else labels(i)
            fetched_at = f"2025-11-05T10:{idx:02d}:00Z"
            entries.append({"theme": theme, "query": q, "blocks": blocks,
                            "related": related, "label": label,
                            "fetched_at": fetched_at})
            idx += 1
    return entries


FEATURE_COLUMNS = [
    "knowledge_graph", "calculator", "direct_answer", "map", "local_result",
    "commercial_sponsored", "twitter", "top_stories", "videos", "images",
    "content_navigation_bar", "featured_snippet", "rich_snippets",
    "similar_entity", "partners_block", "other_cards",
    "paa_count", "related_searches_count", "natural_results_count",
]


def feature_row(entry):
    present = {b["type"] for b in entry["blocks"]}
    row = []
    for col in FEATURE_COLUMNS[:16]:
        row.append(1 if col in present else 0)
    paa = sum(len(b["items"]) for b in entry["blocks"]
              if b["type"] == "people_also_asked")
    nat = sum(len(b["items"]) for b in entry["blocks"]
              if b["type"] == "natural_results")
    row += [paa, len(entry["related"]), nat]
    return row


def raw_filename(query):
    return hashlib.sha256(query.encode("utf-8")).hexdigest()[:16] + ".json"


def tokenize(query, stopwords):
    tokens = []
    cur = []
    for ch in query:
        if ch.isalnum():
            cur.append(ch.lower())
        else:
            tok = "".join(cur)
            if len(tok) >= 2 and not tok.isdigit() and tok not in stopwords:
                tokens.append(tok)
            cur = []
    tok = "".join(cur)
    if len(tok) >= 2 and not tok.isdigit() and tok not in stopwords:
        tokens.append(tok)
    return tokens


def check_corpus(entries):
    stopwords = set()
    for line in (ROOT / "configs" / "stopwords.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            stopwords.add(line)

    queries = [e["query"] for e in entries]
    assert len(queries) == 60 and len(set(queries)) == 60
    assert len({raw_filename(q) for q in queries}) == 60
    for q in queries:
        assert q.isascii(), q
        low = q.lower()
        assert "captcha" not in low and "unusual traffic" not in low

    counts = {}
    for e in entries:
        for tok in tokenize(e["query"], stopwords):
            counts.setdefault(e["theme"], {}).setdefault(tok, 0)
            counts[e["theme"]][tok] += 1
    for theme, anchors in THEME_ANCHORS.items():
        others = [t for t in counts if t != theme]
        for a in anchors:
            assert counts[theme].get(a, 0) >= 3, (theme, a)
            for o in others:
                assert a not in counts[o], (theme, a, o)


def write_corpus():
    RAW_DIR.mkdir(parents=True, exist_ok=True)
    entries = corpus_entries()
    check_corpus(entries)

    for e in entries:
        body = render_page(e["query"], e["blocks"], e["related"])
        capture = {"query": e["query"], "fetched_at": e["fetched_at"], "body": body}
        (RAW_DIR / raw_filename(e["query"])).write_text(dump_json(capture),
                                                        encoding="utf-8")

    tsv = "".join(f"{e['query']}\t{e['label']}\n" for e in entries)
    (CORPUS_DIR / "dataset.tsv").write_text(tsv, encoding="utf-8")

    ordered = sorted(entries, key=lambda e: raw_filename(e["query"]))
    lines = ["query," + ",".join(FEATURE_COLUMNS)]
    for e in ordered:
        lines.append(e["query"] + "," + ",".join(str(v) for v in feature_row(e)))
    (CORPUS_DIR / "expected_matrix.csv").write_text("\n".join(lines) + "\n",
                                                    encoding="utf-8")


# --------------------------------------------------------------- blob points

def write_blobs():
    rng = random.Random(20251105)
    centers = [(0.0, 0.0), (12.0, 0.0), (0.0, 12.0)]
    rows = []
    for cx, cy in centers:
        for _ in range(30):
            u1, u2 = rng.random(), rng.random()
            r = math.sqrt(-2.0 * math.log(u1))
            z0 = r * math.cos(2.0 * math.pi * u2)
            z1 = r * math.sin(2.0 * math.pi * u2)
            rows.append((cx + 0.5 * z0, cy + 0.5 * z1))
    text = "x,y\n" + "".join(f"{x!r},{y!r}\n" for x, y in rows)
    (ROOT / "fixtures" / "blobs.csv").write_text(text, encoding="utf-8")


def write_eval_example():
    EVAL_DIR.mkdir(parents=True, exist_ok=True)
    example = {
        "labels": ["informational", "local_place", "sexual_racism"],
        "matrix": [[1232, 54, 25], [904, 141, 26], [519, 25, 70]],
    }
    (EVAL_DIR / "confusion_example.json").write_text(dump_json(example),
                                                     encoding="utf-8")


def main():
    write_serp_fixtures()
    write_corpus()
    write_blobs()
    write_eval_example()
    print("fixtures written under", ROOT / "fixtures")


if __name__ == "__main__":
    sys.exit(main())
