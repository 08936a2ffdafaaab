import { health } from "./api.js";
import {
  ComposeSession,
  canCopy,
  copyDraft,
  createSession,
  generateDraft,
  selectDraft,
  setGatewayUrl,
} from "./session.js";

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

export const mount = (): void => {
  const session = createSession(window.localStorage);

  const instructionInput = el<HTMLTextAreaElement>("instruction");
  const gatewayInput = el<HTMLInputElement>("gateway-url");
  const ragToggle = el<HTMLInputElement>("use-rag");
  const generateBtn = el<HTMLButtonElement>("generate");
  const copyBtn = el<HTMLButtonElement>("copy");
  const draftList = el<HTMLDivElement>("drafts");
  const draftView = el<HTMLPreElement>("draft-view");
  const chips = el<HTMLDivElement>("rag-chips");
  const banner = el<HTMLDivElement>("error-banner");
  const healthLine = el<HTMLSpanElement>("health");

  gatewayInput.value = session.gatewayUrl;

  const render = () => {
    generateBtn.disabled = session.pending;
    copyBtn.disabled = !canCopy(session);
    banner.textContent = session.error ?? "";
    banner.hidden = session.error === null;

    draftList.replaceChildren(
      ...session.drafts.map((_, i) => {
        const btn = document.createElement("button");
        btn.textContent = `Draft ${i + 1}`;
        btn.classList.toggle("selected", i === session.selectedDraft);
        btn.onclick = () => {
          selectDraft(session, i);
          render();
        };
        return btn;
      })
    );

    if (session.selectedDraft !== null) {
      const draft = session.drafts[session.selectedDraft];
      draftView.textContent = draft.email;
      chips.replaceChildren(
        ...draft.rag_ids.map((id) => {
          const chip = document.createElement("span");
          chip.className = "chip";
          chip.textContent = id;
          chip.title = "context used";
          return chip;
        })
      );
    } else {
      draftView.textContent = "";
      chips.replaceChildren();
    }
  };

  instructionInput.oninput = () => {
    session.instruction = instructionInput.value;
  };
  ragToggle.onchange = () => {
    session.useRag = ragToggle.checked;
  };
  gatewayInput.onchange = () => {
    setGatewayUrl(session, gatewayInput.value, window.localStorage);
    refreshHealth();
  };
  generateBtn.onclick = async () => {
    render(); // disable the button before the request settles
    await generateDraft(session);
    render();
  };
  copyBtn.onclick = async () => {
    await copyDraft(session, navigator.clipboard);
    render();
  };

  const refreshHealth = async () => {
    try {
      const h = await health(session.gatewayUrl);
      healthLine.textContent = `${h.status} (store: ${h.store_size} emails)`;
    } catch {
      healthLine.textContent = "gateway unreachable";
    }
  };

  refreshHealth();
  render();
};

mount();
