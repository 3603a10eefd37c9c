/**
 * Page bootstrap: read server parameters from /health, then mount the
 * registration and login views behind a two-tab navigation.
 */

import { ApiClient } from "./api.js";
import { LoginView } from "./login.js";
import { renderRegisterView } from "./register.js";

export async function boot(root: HTMLElement, api: ApiClient = new ApiClient()): Promise<void> {
  const health = await api.health();
  const slots = health.kind === "ok" ? health.body.slots : 3;
  const period = health.kind === "ok" ? health.body.period : 30;

  const nav = document.createElement("nav");
  const registerButton = document.createElement("button");
  registerButton.textContent = "Register";
  registerButton.id = "nav-register";
  const loginButton = document.createElement("button");
  loginButton.textContent = "Sign in";
  loginButton.id = "nav-login";
  nav.appendChild(registerButton);
  nav.appendChild(loginButton);

  const view = document.createElement("main");
  view.id = "view";

  root.replaceChildren(nav, view);

  registerButton.addEventListener("click", () => renderRegisterView(view, slots, api));
  loginButton.addEventListener("click", () => new LoginView(view, period, api).start());

  renderRegisterView(view, slots, api);
}

const mount = document.getElementById("app");
if (mount) {
  void boot(mount);
}
