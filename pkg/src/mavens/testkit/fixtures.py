"""Mock-backend fixture tables for the question and answer stages."""

from __future__ import annotations

from ..aqg import DEFAULT_EXEMPLARS, FORMAT_ORDER
from ..llm import render
from ..prompts import TemplateSet

QUESTION_STEMS = {
    "What": ["What is driving {t}", "What are the main consequences of {t}", "What should ordinary people know about {t}"],
    "Where": ["Where has {t} had the largest impact", "Where do experts expect {t} to spread next", "Where can people find reliable information on {t}"],
    "Who": ["Who is most affected by {t}", "Who is responsible for handling {t}", "Who benefits from {t}"],
    "When": ["When did {t} first attract public attention", "When will the effects of {t} become clear", "When should the authorities respond to {t}"],
    "Why": ["Why has {t} become a major issue", "Why do opinions on {t} differ so much", "Why did earlier efforts on {t} fall short"],
    "How": ["How will {t} develop over the next year", "How are local communities reacting to {t}", "How can the risks around {t} be reduced"],
}

ANSWERS = [
    "I think the situation will remain tense for a long time. The conflict brings real risk to ordinary families. "
    "I don't know the exact number of people affected. We should still hope for peace.",
    "In my opinion, (sadly) markets suffer whenever the news gets worse. Investors worry about another decline. "
    "Still, a stable recovery is possible if leaders cooperate.",
    "Honestly, this is bad news for everyone involved. The damage to trade and daily life is serious. "
    "People fear that the crisis will spread further.",
    "I believe there is an opportunity for progress through dialogue. Good diplomacy can bring a stable outcome. "
    "We must not give up on peace.",
    "The reference material shows how often this topic comes up. The public is worried about the long conflict. "
    "Prices keep rising and families feel the loss.",
    "Well, history shows that wars end at the negotiating table. A ceasefire would be great progress. "
    "I am optimistic that the worst is over.",
    "It seems that nobody wins in the end. The violence has caused terrible suffering. "
    "Our community should support those who lost their homes.",
    "From my point of view the technology race matters more than people think. Supply chains face new risk. "
    "Innovative firms can still find opportunities.",
]


def background_text(topic: str) -> str:
    t = topic.rstrip(".")
    return (
        f"{t} has drawn wide public attention in recent weeks. Reports describe who is involved, where events are "
        f"unfolding and when the key developments happened. Commentators explain why {t} matters and how it may "
        f"change the lives of ordinary people in the months ahead."
    )


def question_reply(topic: str, fmt: str, n: int = 3, drift: bool = False) -> str:
    t = topic.rstrip(".")
    lines = ["Here are the questions:"]
    lines += [f"{i + 1}. {stem.format(t=t)}?" for i, stem in enumerate(QUESTION_STEMS[fmt][:n])]
    if drift and fmt != "How":
        lines.append(f"- How do experts rate {t} overall?")
    return "\n".join(lines)


def aqg_fixture_table(topics, n_per_format: int = 3, drift: bool = False, templates: TemplateSet | None = None) -> dict:
    """Fixtures answering background and per-format question calls for ``topics``."""
    templates = templates or TemplateSet()
    table = {}
    for topic in topics:
        bg = background_text(topic)
        _, user = render(templates.background, {"topic": topic.strip()})
        table[user] = bg
        for fmt in FORMAT_ORDER:
            bindings = {"fmt": fmt.value, "example": DEFAULT_EXEMPLARS[fmt.value], "review": bg}
            _, user = render(templates.questions, bindings)
            table[user] = question_reply(topic, fmt.value, n_per_format, drift)
    return table


def pipeline_fixture_table(topics, templates: TemplateSet | None = None, translations: dict | None = None) -> dict:
    """Question-stage fixtures plus canned opinion answers for every entity call."""
    templates = templates or TemplateSet()
    table = aqg_fixture_table(topics, templates=templates)
    answer_prefix = templates.answer.user.split("{", 1)[0]
    table[answer_prefix] = list(ANSWERS)
    for question, translated in (translations or {}).items():
        table[question] = translated
    return table


def judge_fixture_table(scores=("8", "9", "7 - mostly relevant", "Score: 8/10", "10")) -> dict:
    """Catch-all judge replies; the empty key matches any user message."""
    return {"": list(scores)}
