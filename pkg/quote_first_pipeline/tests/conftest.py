"""Shared fixtures: multi-hop fixture samples, replay transcripts, and a network guard."""
import json
from pathlib import Path
from typing import Dict, List

import pytest
import requests

from quote_first_pipeline.dataset import RawSample
from quote_first_pipeline.llm import ChatEndpoint, EndpointConfig, record_transcript, replay_backend
from quote_first_pipeline.pipeline import build_answer_request, build_distill_prompt, build_quoter_request
from quote_first_pipeline.quotes import QuoteSet, render_quote_block

RUGAO_CONTEXT = (
    "Rugao () is a county-level city under the administration of Nantong, Jiangsu province, China, "
    "located in the Golden Triangle region on the northern (left) bank of the Yangtze River.\n\n"
    "Xuzhou, known as Pengcheng in ancient times, is a major city in and the fourth largest "
    "prefecture-level city of Jiangsu Province, China.  Its population was 8,577,225 at the 2010 "
    "census whom 2,623,066 lived in the built-up (or metro) area made of Quanshan, Gulou, Yunlong "
    "and Tongshan districts."
)
# Teacher output exactly as recorded, line wrapping included.
RUGAO_TEACHER_OUTPUT = (
    "##begin_quote## Rugao () is a county-level\n"
    "city under the administration of \n"
    "Nantong ##end_quote##"
)
RUGAO_QUOTE = "Rugao () is a county-level\ncity under the administration of \nNantong"

DOWNEASTER_QUOTES = [
    "The Downeaster is a 145 mi regional passenger train service, managed by the Northern New England "
    "Passenger Rail Authority (NNEPRA, created by the State of Maine), and operated by Amtrak.",
    "The West Amesbury Branch Railroad was a railroad that once led form Newton Junction, New Hampshire "
    "to Merrimac, Massachusetts.  Although the railroad does not exist, the Amtrak \"Downeaster\" line now "
    "passes through the Newton Junction station, which is now a pizza restaurant, and most of the "
    "railroad, is now a gravel walking trail.",
]
DOWNEASTER_CONTEXT = (
    "Rapido was the brand name for the Canadian National Railway's (CN) express passenger train service "
    "in the Quebec City–Windsor Corridor.\n\n"
    + DOWNEASTER_QUOTES[0]
    + "\n\n"
    + DOWNEASTER_QUOTES[1]
    + "\n\nA rail replacement bus service uses buses to replace a passenger train service either on a "
    "temporary or permanent basis."
)

EMIL_GOLD = [
    "Emil and the Detectives is a 1964 film directed by Peter Tewksbury based on the novel by German "
    "author Erich Kästner.",
    "Toy Story 2 is a 1999 American computer-animated comedy film produced by Pixar Animation Studios "
    "for Walt Disney Pictures.",
]
EMIL_BEFORE = [
    '"A Bug\'s Life", "Monsters, Inc.", "Finding Nemo", "Cars", "The Incredibles","Ratatouille"',
    '"Toy Story 3" (2010) is the third installment in Pixar\'s "Toy Story" series, and the sequel to '
    '1999\'s "Toy Story 2".',
]
EMIL_CONTEXT = (
    EMIL_GOLD[0]
    + "\n\nPixar has produced "
    + EMIL_BEFORE[0]
    + " and other features.\n\n"
    + EMIL_GOLD[1]
    + "\n\n"
    + EMIL_BEFORE[1]
)

DORY_GOLD = [
    "The Wild Country is a 1970 American adventure film produced by Walt Disney Pictures and directed "
    "by Robert Totten.",
    "Finding Nemo is a 2003 American computer-animated family film produced by Pixar Animation Studios "
    "and released by Walt Disney Pictures.",
]
DORY_CONTEXT = (
    DORY_GOLD[1]
    + " Its sequel, Finding Dory, was released in 2016.\n\n"
    + DORY_GOLD[0]
    + "\n\nDisney's broader entertainment ventures include parks and attractions."
)


def _rugao() -> RawSample:
    return RawSample("x1", "Unlike Xuzhou, where is Rugao under the adminstration of?", RUGAO_CONTEXT, "Nantong")


@pytest.fixture
def rugao() -> RawSample:
    return _rugao()


def fixture_samples() -> List[RawSample]:
    return [
        _rugao(),
        RawSample(
            "x2",
            "What authority manages the regional passenger train service that runs through the same "
            "junction as West Amesbury Branch Railroad?",
            DOWNEASTER_CONTEXT,
            "Northern New England Passenger Rail Authority",
        ),
        RawSample(
            "x3",
            "Which film was produced first, Emil and the Detectives or Toy Story 2?",
            EMIL_CONTEXT,
            "Emil and the Detectives",
        ),
        RawSample(
            "x4",
            "Which Walt Disney Pictures film was created first, Finding Dory or The Wild Country?",
            DORY_CONTEXT,
            "The Wild Country",
        ),
        RawSample("x5", "What was Xuzhou called in ancient times?", RUGAO_CONTEXT, "Pengcheng"),
    ]


# Gold quote block the teacher returns for each fixture sample.
TEACHER_OUTPUTS: Dict[str, str] = {
    "x1": RUGAO_TEACHER_OUTPUT,
    "x2": render_quote_block(QuoteSet.from_texts(DOWNEASTER_QUOTES)),
    "x3": render_quote_block(QuoteSet.from_texts(EMIL_GOLD)),
    "x4": render_quote_block(QuoteSet.from_texts(DORY_GOLD)),
    "x5": "##begin_quote## Xuzhou, known as Pengcheng in ancient times ##end_quote##",
}


@pytest.fixture
def samples() -> List[RawSample]:
    return fixture_samples()


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    """Any real HTTP call fails the test; tests that need one patch requests.post again."""

    def refuse(*args, **kwargs):
        raise AssertionError("network access attempted during tests")

    monkeypatch.setattr(requests, "post", refuse)


def replay_config(name: str, model: str, transcript: Path, parallelism: int = 2) -> EndpointConfig:
    return EndpointConfig(name=name, model=model, replay=str(transcript), parallelism=parallelism)


def replay_endpoint(config: EndpointConfig, cache=None) -> ChatEndpoint:
    return ChatEndpoint(config, replay_backend(Path(config.replay)), cache)


def record_teacher(path: Path, teacher: EndpointConfig, samples, outputs=None) -> None:
    outputs = outputs or TEACHER_OUTPUTS
    record_transcript(path, [(build_distill_prompt(s, teacher), outputs[s.id]) for s in samples if s.id in outputs])


def record_quoter(path: Path, quoter: EndpointConfig, samples, outputs) -> None:
    record_transcript(path, [(build_quoter_request(s, quoter), outputs[s.id]) for s in samples if s.id in outputs])


def record_answers(path: Path, base: EndpointConfig, gold, answers) -> None:
    """``answers`` maps (sample id, evidence mode) to the recorded answer text."""
    pairs = []
    for g in gold:
        for mode in ("context", "quotes"):
            if (g.id, mode) in answers:
                pairs.append((build_answer_request(g.sample, mode, g.quotes, base), answers[(g.id, mode)]))
    record_transcript(path, pairs)


def write_flat_corpus(path: Path, samples) -> Path:
    path.write_text("".join(json.dumps(s.to_dict()) + "\n" for s in samples), encoding="utf-8")
    return path
