"""Prompt templates as text assets.

A template file is a system part and a user part separated by a line of
three dashes. The system part carries the task tag the scripted gateway
keys on; the user part holds the placeholders. Deployments can point the
config at replacement files.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

QUERYGEN_TAG = "QUERYGEN"
ANSWERGEN_TAG = "ANSWERGEN"

_SEPARATOR = "---"


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    system: str
    user_template: str

    def render_user(self, **values: object) -> str:
        return self.user_template.format(**values)


def parse_template(text: str) -> PromptTemplate:
    lines = text.splitlines()
    try:
        sep = lines.index(_SEPARATOR)
    except ValueError:
        raise ValueError("template must contain a '---' separator line") from None
    system = "\n".join(lines[:sep]).strip()
    user = "\n".join(lines[sep + 1 :]).strip()
    if not system or not user:
        raise ValueError("both template parts must be non-empty")
    return PromptTemplate(system=system, user_template=user)


def load_template(name: str, override_path: str | Path | None = None) -> PromptTemplate:
    """Load a packaged template ('querygen' or 'answergen'), or an override file."""
    if override_path is not None:
        text = Path(override_path).read_text(encoding="utf-8")
    else:
        text = files("vlqa.prompts").joinpath(f"{name}.txt").read_text(encoding="utf-8")
    return parse_template(text)
