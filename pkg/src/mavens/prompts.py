"""Default prompt templates for every LLM step.

User messages lead with the part that distinguishes one request from another
(topic, question word, question text) so mock fixtures can key on a prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .llm import PromptTemplate

BACKGROUND = PromptTemplate(
    system=(
        "You are a senior news editor.\n"
        "Given the name of a news topic, write a factual background review of it: "
        "what happened, who is involved, where and when it takes place, why it matters "
        "and how it is developing. Use one or two plain paragraphs."
    ),
    user="Topic: {topic}",
)

QUESTIONS = PromptTemplate(
    system=(
        "You are a reporter preparing interview questions.\n"
        "Read the background review and write as many distinct questions as you can. "
        "Every question must begin with the word \"{fmt}\", for example: {example}\n"
        "Output one question per line and nothing else. Each line starts with \"{fmt}\"."
    ),
    user="Write {fmt} questions about the following background review.\n\n{review}",
)

TRANSLATE = PromptTemplate(
    system=(
        "You are a professional translator into {language}.\n"
        "Translate the question you receive into {language}. "
        "Keep its meaning and tone, and reply with the {language} question only."
    ),
    user="{question}",
)

ANSWER = PromptTemplate(
    system=(
        "You are an influential commentator in the field of {domain}.\n"
        "Answer the question in your own voice, drawing on the reference material, "
        "which is taken from your own past posts. State a clear opinion in a few sentences."
    ),
    user="Question: {question}\n\nReference material:\n{context}",
)

NO_CONTEXT = "(no reference material available)"


@dataclass
class TemplateSet:
    background: PromptTemplate = BACKGROUND
    questions: PromptTemplate = QUESTIONS
    translate: PromptTemplate = TRANSLATE
    answer: PromptTemplate = ANSWER


# judge prompts ---------------------------------------------------------

_SCALE_1_10 = "Only give a score between 1 and 10. Reply with the score and a short reason."
_SCALE_0_10 = "The score ranges from 0 (lowest) to 10 (highest). Reply with the score and a short reason."

JUDGE_TEMPLATES: dict[str, PromptTemplate] = {
    "RBT": PromptTemplate(
        system=(
            "# Role: topic relevance rater\n"
            "## Goal\nYou receive a topic and a background review. Judge how closely the "
            "background review matches the topic and give a relevance score.\n"
            f"## Constraints\n{_SCALE_1_10}"
        ),
        user="Topic: {topic}\n\nBackground review: {background}",
    ),
    "RQQ": PromptTemplate(
        system=(
            "# Role: 5W1H question checker\n"
            "## Goal\nYou receive a question. Decide whether it is a 5W1H question, i.e. it "
            "starts with What, Where, Who, When, Why or How. A question that follows the "
            "format exactly gets 10; otherwise score how close it is to that format.\n"
            f"## Constraints\n{_SCALE_1_10}"
        ),
        user="Question: {question}",
    ),
    "RBQ": PromptTemplate(
        system=(
            "# Role: question relevance rater\n"
            "## Goal\nYou receive a question. Score how relevant it is to the background "
            "review below.\n"
            "## Background review\n{background}\n"
            f"## Constraints\n{_SCALE_1_10}"
        ),
        user="Question: {question}",
    ),
    "RAW": PromptTemplate(
        system=(
            "## Goal\nYou receive a text written in response to an event. Judge whether the "
            "text actually addresses the event and score its relevance.\n"
            "## Event\n{event}\n"
            f"## Constraints\n{_SCALE_0_10}"
        ),
        user="{text}",
    ),
    "CUS": PromptTemplate(
        system=(
            "## Goal\nYou receive a text. Compare its speaking style with the style of the "
            "knowledge base below and score how similar the two styles are.\n"
            "## Knowledge base\n{knowledge}\n"
            f"## Constraints\n{_SCALE_0_10}"
        ),
        user="{text}",
    ),
    "SPE": PromptTemplate(
        system=(
            "## Goal\nYou receive a text. Compare the opinions and facts it contains with the "
            "knowledge base below and score how consistent they are.\n"
            "## Knowledge base\n{knowledge}\n"
            f"## Constraints\n{_SCALE_0_10}"
        ),
        user="{text}",
    ),
    "SIM": PromptTemplate(
        system=(
            "## Goal\nYou receive two texts. Score how similar they are in content.\n"
            f"## Constraints\n{_SCALE_0_10}"
        ),
        user="Text A: {text_a}\n\nText B: {text_b}",
    ),
}
