import { FetchLike, GatewayError, generate } from "./api.js";

export type Draft = {
  email: string;
  rag_ids: string[];
  latency_ms: number;
};

export type ComposeSession = {
  instruction: string;
  drafts: Draft[]; // append-only within a session
  selectedDraft: number | null;
  gatewayUrl: string;
  useRag: boolean;
  pending: boolean;
  error: string | null;
};

export type StorageLike = {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
};

const GATEWAY_URL_KEY = "panza.gatewayUrl";
const DEFAULT_GATEWAY_URL = "http://127.0.0.1:5000";

export const createSession = (storage?: StorageLike): ComposeSession => ({
  instruction: "",
  drafts: [],
  selectedDraft: null,
  gatewayUrl: storage?.getItem(GATEWAY_URL_KEY) ?? DEFAULT_GATEWAY_URL,
  useRag: true,
  pending: false,
  error: null,
});

export const setGatewayUrl = (
  session: ComposeSession,
  url: string,
  storage?: StorageLike
): void => {
  session.gatewayUrl = url.replace(/\/+$/, "");
  storage?.setItem(GATEWAY_URL_KEY, session.gatewayUrl);
};

export const generateDraft = async (
  session: ComposeSession,
  fetchFn: FetchLike = fetch
): Promise<ComposeSession> => {
  if (session.pending) {
    return session; // one in-flight generate per session
  }
  if (!session.instruction.trim()) {
    session.error = "Enter an instruction first.";
    return session;
  }
  session.pending = true;
  session.error = null;
  try {
    const draft = await generate(
      session.gatewayUrl,
      session.instruction,
      session.useRag,
      fetchFn
    );
    // gateway output is displayed untouched; no trimming or rewriting
    session.drafts.push(draft);
    session.selectedDraft = session.drafts.length - 1;
  } catch (err) {
    // instruction text stays intact so the user can retry
    if (err instanceof GatewayError) {
      session.error =
        err.status === 400
          ? `Invalid request: ${err.message}`
          : `Gateway error (${err.status}): ${err.message}`;
    } else {
      session.error = "Gateway unreachable. Check the URL and retry.";
    }
  } finally {
    session.pending = false;
  }
  return session;
};

export const selectDraft = (session: ComposeSession, index: number): void => {
  if (index < 0 || index >= session.drafts.length) {
    throw new RangeError(`no draft at index ${index}`);
  }
  session.selectedDraft = index;
};

export type ClipboardLike = {
  writeText(text: string): Promise<void>;
};

export const canCopy = (session: ComposeSession): boolean =>
  session.selectedDraft !== null;

export const copyDraft = async (
  session: ComposeSession,
  clipboard: ClipboardLike
): Promise<void> => {
  if (session.selectedDraft === null) {
    throw new Error("no draft selected");
  }
  try {
    await clipboard.writeText(session.drafts[session.selectedDraft].email);
  } catch {
    session.error = "Clipboard permission denied.";
  }
};
