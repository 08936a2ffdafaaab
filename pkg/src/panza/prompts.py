"""Fixed prompt templates and prompt assembly.

These strings are pinned byte-exact by golden-file tests; do not reflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

SUMMARIZATION_PROMPT_TEMPLATE = (
    "Summarize the following email that I wrote, in an imperative form, in one or two "
    "or maximum three sentences, and make sure to include relevant information, without "
    "copying the email content itself. The summary should look like an instruction "
    "directing someone to write the same email, and start with Instruction:\n"
    "Here is the email text:\n"
    "{email}"
)

SYSTEM_PREAMBLE = (
    "Your role is that of a helpful automated email assistant. I will provide you with "
    "a short instruction, and you have to write a well-formed email in my style "
    "following this instruction. Be sure to follow my email writing style!  In case "
    "you see a nonsensical instruction, you should not reply with an email, but with "
    "the expression \"Sorry, but I don't get it.\""
)

USER_PREAMBLE_TEMPLATE = "My name is {full_name}."

RAG_PREAMBLE_HEADER = (
    "Extract specific information from these previous e-mails only if it is relevant "
    "to the current e-mail you have to write.\n"
    "\n"
    "Previous e-mails:\n"
    "\n"
)


def build_summarization_prompt(email_body: str) -> str:
    """Render the summarization template with the email body interpolated.

    The body is inserted verbatim (braces and all); no recursive templating.
    """
    if not email_body:
        raise ValueError("email_body must be non-empty")
    return SUMMARIZATION_PROMPT_TEMPLATE.replace("{email}", email_body)


def build_user_preamble(full_name: str) -> str:
    return USER_PREAMBLE_TEMPLATE.replace("{full_name}", full_name)


def build_rag_preamble(bodies: Sequence[str]) -> str:
    """Render retrieved email bodies into the RAG context block."""
    if not bodies:
        return ""
    blocks = "".join(f"EMAIL CONTENT:\n{body}\n\n---\n" for body in bodies)
    return RAG_PREAMBLE_HEADER + blocks


@dataclass
class PromptAssembly:
    system_preamble: str
    user_preamble: str
    instruction: str
    rag_block: Optional[str] = None


def assemble_prompt(a: PromptAssembly) -> str:
    """Render the full generation prompt.

    Order is fixed: system preamble, blank line, user preamble, blank line,
    optional RAG block plus blank line, then "Instruction: " and the
    instruction text.
    """
    if not a.instruction:
        raise ValueError("instruction must be non-empty")
    parts = [a.system_preamble, "", a.user_preamble, ""]
    if a.rag_block:
        parts += [a.rag_block, ""]
    parts.append("Instruction: " + a.instruction)
    return "\n".join(parts)


def parse_prompt(text: str) -> PromptAssembly:
    """Inverse of assemble_prompt for prompts built from the fixed templates."""
    marker = "\n\nInstruction: "
    cut = text.rfind(marker)
    if cut == -1:
        raise ValueError("no instruction marker found")
    instruction = text[cut + len(marker) :]
    head = text[:cut]
    prefix = SYSTEM_PREAMBLE + "\n\n"
    if not head.startswith(prefix):
        raise ValueError("prompt does not start with the system preamble")
    rest = head[len(prefix) :]
    rag_cut = rest.find("\n\n" + RAG_PREAMBLE_HEADER)
    if rag_cut == -1:
        return PromptAssembly(SYSTEM_PREAMBLE, rest, instruction)
    return PromptAssembly(
        SYSTEM_PREAMBLE,
        rest[:rag_cut],
        instruction,
        rag_block=rest[rag_cut + 2 :],
    )
