/**
 * Two-step login page (password, then one OTP code).
 *
 * Rendering is a pure function of LoginState; every server response is
 * funneled through the state machine in state.ts, so what the user sees
 * is decided solely by HTTP status codes.
 */

import type { ApiClient } from "./api.js";
import {
  LoginState,
  afterOtpResponse,
  afterPasswordResponse,
  initialLoginState,
  secondsRemaining,
} from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export class LoginView {
  private state: LoginState = initialLoginState();
  private countdownTimer: ReturnType<typeof setInterval> | null = null;
  private savedUsername = "";
  private savedPassword = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly periodSeconds: number,
    private readonly api: ApiClient,
  ) {}

  start(): void {
    this.render();
  }

  private setState(next: LoginState): void {
    this.state = next;
    this.render();
  }

  private stopCountdown(): void {
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
      this.countdownTimer = null;
    }
  }

  private render(): void {
    this.stopCountdown();
    this.root.replaceChildren();
    switch (this.state.step) {
      case "password":
        this.renderPassword();
        break;
      case "otp":
        this.renderOtp();
        break;
      case "done":
        this.renderDone();
        break;
      case "locked":
        this.renderLocked();
        break;
    }
  }

  private banner(): HTMLElement | null {
    if (!this.state.networkError) {
      return null;
    }
    const banner = el("div", { class: "banner", "data-testid": "network-banner" });
    banner.appendChild(el("span", {}, "Network problem; nothing was lost."));
    const retry = el("button", { type: "button" }, "Retry");
    retry.addEventListener("click", () => this.render());
    banner.appendChild(retry);
    return banner;
  }

  private renderPassword(): void {
    this.root.appendChild(el("h2", {}, "Sign in"));
    const banner = this.banner();
    if (banner) {
      this.root.appendChild(banner);
    }
    if (this.state.error) {
      const msg = el("p", { class: "form-error", "data-testid": "login-error" });
      msg.textContent =
        this.state.attemptsRemaining !== null
          ? `${this.state.error} (${this.state.attemptsRemaining} attempts left before lock)`
          : this.state.error;
      this.root.appendChild(msg);
    }

    const form = el("form", { id: "login-form" });
    const username = el("input", { name: "username", required: "", autocomplete: "username" });
    username.value = this.savedUsername;
    const password = el("input", { name: "password", type: "password", required: "" });
    password.value = this.savedPassword;
    const userLabel = el("label", {}, "Username");
    userLabel.appendChild(username);
    const passLabel = el("label", {}, "Password");
    passLabel.appendChild(password);
    form.appendChild(userLabel);
    form.appendChild(passLabel);
    form.appendChild(el("button", { type: "submit" }, "Continue"));

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.savedUsername = username.value.trim();
      this.savedPassword = password.value;
      void this.api
        .loginPassword(this.savedUsername, this.savedPassword)
        .then((result) => this.setState(afterPasswordResponse(this.state, result)));
    });
    this.root.appendChild(form);
  }

  private renderOtp(): void {
    this.root.appendChild(el("h2", {}, "Enter your code"));
    const banner = this.banner();
    if (banner) {
      this.root.appendChild(banner);
    }
    const hint = el("p", { class: "instruction" });
    hint.textContent =
      "You received several codes (SMS and authenticator app). Enter only " +
      "the code at your memorized position. Picking any other code locks " +
      "the account.";
    this.root.appendChild(hint);

    const countdown = el("p", { class: "countdown", "data-testid": "otp-countdown" });
    const update = () => {
      countdown.textContent = `Codes rotate in ${secondsRemaining(this.periodSeconds, Date.now())}s`;
    };
    update();
    this.countdownTimer = setInterval(update, 1000);
    this.root.appendChild(countdown);

    const form = el("form", { id: "otp-form" });
    const code = el("input", {
      name: "code",
      required: "",
      inputmode: "numeric",
      pattern: "[0-9]*",
      autocomplete: "one-time-code",
    });
    const label = el("label", {}, "One-time code");
    label.appendChild(code);
    form.appendChild(label);
    form.appendChild(el("button", { type: "submit" }, "Verify"));
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const sessionId = this.state.sessionId;
      if (!sessionId) {
        return;
      }
      void this.api
        .loginOtp(sessionId, code.value.trim())
        .then((result) => this.setState(afterOtpResponse(this.state, result)));
    });
    this.root.appendChild(form);
  }

  private renderDone(): void {
    const box = el("div", { class: "success", "data-testid": "login-success" });
    box.appendChild(el("h2", {}, "Authenticated"));
    box.appendChild(el("p", {}, "You are signed in."));
    this.root.appendChild(box);
  }

  private renderLocked(): void {
    const box = el("div", { class: "locked", "data-testid": "login-locked" });
    box.appendChild(el("h2", {}, "Account locked"));
    if (this.state.breach) {
      const warning = el("p", { class: "breach-warning", "data-testid": "breach-warning" });
      warning.textContent =
        "A breach attempt was detected: a decoy code was submitted. " +
        "The account is locked; contact an administrator.";
      box.appendChild(warning);
    } else {
      box.appendChild(
        el("p", {}, this.state.error ?? "Too many failed attempts. Contact an administrator."),
      );
    }
    this.root.appendChild(box);
  }
}
