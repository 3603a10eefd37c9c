/**
 * Login flow state machine.
 *
 * Steps: password -> otp -> done, with locked as a terminal state (until
 * an admin unlocks server-side). Transitions are pure functions of the
 * HTTP status code and error body, so the whole flow is unit-testable
 * without a DOM.
 */

import type { ApiErrorBody, ApiResult, LoginResponse, OtpResponse } from "./api.js";

export type LoginStep = "password" | "otp" | "done" | "locked";

export interface LoginState {
  step: LoginStep;
  sessionId: string | null;
  token: string | null;
  breach: boolean;
  error: string | null;
  attemptsRemaining: number | null;
  networkError: boolean;
}

export function initialLoginState(): LoginState {
  return {
    step: "password",
    sessionId: null,
    token: null,
    breach: false,
    error: null,
    attemptsRemaining: null,
    networkError: false,
  };
}

function lockedState(body: ApiErrorBody): LoginState {
  return {
    ...initialLoginState(),
    step: "locked",
    breach: body.breach === true,
    error: body.message,
  };
}

export function afterPasswordResponse(
  state: LoginState,
  result: ApiResult<LoginResponse>,
): LoginState {
  if (state.step === "locked") {
    return state; // terminal until admin unlock
  }
  if (result.kind === "network") {
    return { ...state, networkError: true };
  }
  if (result.kind === "ok") {
    return {
      ...initialLoginState(),
      step: "otp",
      sessionId: result.body.session_id,
    };
  }
  if (result.status === 423) {
    return lockedState(result.body);
  }
  return {
    ...state,
    step: "password",
    sessionId: null,
    networkError: false,
    error: result.body.message,
  };
}

export function afterOtpResponse(
  state: LoginState,
  result: ApiResult<OtpResponse>,
): LoginState {
  if (state.step === "locked") {
    return state;
  }
  if (result.kind === "network") {
    return { ...state, networkError: true };
  }
  if (result.kind === "ok") {
    return { ...initialLoginState(), step: "done", token: result.body.token };
  }
  if (result.status === 423) {
    return lockedState(result.body);
  }
  // Sessions are single-use server-side: any rejected submission means
  // the user must pass the password step again.
  return {
    ...initialLoginState(),
    step: "password",
    error: result.body.message,
    attemptsRemaining: result.body.attempts_remaining ?? null,
  };
}

/** Seconds until the current TOTP window rolls over. */
export function secondsRemaining(periodSeconds: number, nowMs: number): number {
  const nowSeconds = Math.floor(nowMs / 1000);
  return periodSeconds - (nowSeconds % periodSeconds);
}

/** Valid positions a registrant may choose from, 1..slots. */
export function positionChoices(slots: number): number[] {
  return Array.from({ length: slots }, (_, i) => i + 1);
}
