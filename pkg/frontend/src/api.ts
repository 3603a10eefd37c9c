/**
 * Typed client for the honeyauth HTTP API.
 *
 * Every call resolves to a discriminated result; view code switches on
 * HTTP status codes only and never interprets anything else as an
 * authentication decision.
 */

export interface HealthInfo {
  status: string;
  slots: number;
  digits: number;
  period: number;
  checker: string;
}

export interface ProvisioningEntry {
  slot: number;
  label: string;
  uri: string;
  qr_png_base64: string;
  qr_svg: string;
}

export interface RegisterResponse {
  username: string;
  entries: ProvisioningEntry[];
}

export interface LoginResponse {
  session_id: string;
  expires_at: number;
}

export interface OtpResponse {
  token: string;
  token_type: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  breach?: boolean;
  attempts_remaining?: number;
}

export type ApiResult<T> =
  | { kind: "ok"; status: number; body: T }
  | { kind: "error"; status: number; body: ApiErrorBody }
  | { kind: "network" };

export interface RegistrationForm {
  username: string;
  password: string;
  firstname: string;
  lastname: string;
  phone: string;
  position: number;
}

async function request<T>(path: string, init: RequestInit): Promise<ApiResult<T>> {
  let response: Response;
  try {
    response = await fetch(path, init);
  } catch {
    return { kind: "network" };
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = { code: "bad_response", message: "malformed server response" };
  }
  if (response.ok) {
    return { kind: "ok", status: response.status, body: body as T };
  }
  return { kind: "error", status: response.status, body: body as ApiErrorBody };
}

function postJson<T>(path: string, payload: unknown): Promise<ApiResult<T>> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  health(): Promise<ApiResult<HealthInfo>> {
    return request<HealthInfo>(`${this.baseUrl}/health`, { method: "GET" });
  }

  register(form: RegistrationForm): Promise<ApiResult<RegisterResponse>> {
    return postJson<RegisterResponse>(`${this.baseUrl}/register`, form);
  }

  loginPassword(username: string, password: string): Promise<ApiResult<LoginResponse>> {
    return postJson<LoginResponse>(`${this.baseUrl}/login`, { username, password });
  }

  loginOtp(sessionId: string, code: string): Promise<ApiResult<OtpResponse>> {
    return postJson<OtpResponse>(`${this.baseUrl}/login/otp`, {
      session_id: sessionId,
      code,
    });
  }
}
