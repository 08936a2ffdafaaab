export type GenerateResponse = {
  email: string;
  rag_ids: string[];
  latency_ms: number;
};

export type HealthResponse = {
  status: string;
  store_size: number;
  backend_ok: boolean;
};

export class GatewayError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

// fetch is injectable so tests can script the gateway
export type FetchLike = typeof fetch;

export const generate = async (
  gatewayUrl: string,
  instruction: string,
  useRag: boolean,
  fetchFn: FetchLike = fetch
): Promise<GenerateResponse> => {
  const response = await fetchFn(`${gatewayUrl}/api/generate`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ instruction, use_rag: useRag }),
  });
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status code
    }
    throw new GatewayError(response.status, detail);
  }
  return response.json();
};

export const health = async (
  gatewayUrl: string,
  fetchFn: FetchLike = fetch
): Promise<HealthResponse> => {
  const response = await fetchFn(`${gatewayUrl}/api/health`);
  if (!response.ok) {
    throw new GatewayError(response.status, `health check failed: ${response.status}`);
  }
  return response.json();
};
