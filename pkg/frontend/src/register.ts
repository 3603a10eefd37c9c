/**
 * Registration page: the enrollment form plus the one-time QR gallery.
 *
 * The gallery exists only in the DOM for the life of this page; nothing
 * from the provisioning response is persisted client-side. All labels
 * look identical apart from the slot ordinal, so the page itself never
 * reveals which slot the user chose.
 */

import type { ApiClient, ProvisioningEntry, RegistrationForm } from "./api.js";
import { positionChoices } from "./state.js";

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

function fieldRow(label: string, input: HTMLElement): HTMLElement {
  const row = el("div", { class: "field" });
  const caption = el("label", {}, label);
  caption.appendChild(input);
  row.appendChild(caption);
  return row;
}

function renderGallery(root: HTMLElement, entries: ProvisioningEntry[], position: number): void {
  root.replaceChildren();
  root.appendChild(el("h2", {}, "Scan all QR codes"));
  const note = el("p", { class: "instruction" });
  note.textContent =
    `Scan every code below into your authenticator app. Memorize your ` +
    `chosen position (you picked it a moment ago) and never write it down: ` +
    `at login, only the code at that position is genuine.`;
  root.appendChild(note);

  const gallery = el("div", { class: "qr-gallery", "data-testid": "qr-gallery" });
  for (const entry of entries) {
    const card = el("figure", { class: "qr-card" });
    const img = el("img", {
      src: `data:image/png;base64,${entry.qr_png_base64}`,
      alt: `QR code for slot ${entry.slot}`,
      width: "220",
      height: "220",
    });
    card.appendChild(img);
    card.appendChild(el("figcaption", {}, entry.label));
    gallery.appendChild(card);
  }
  root.appendChild(gallery);
  void position; // deliberately unused: the page never marks the genuine slot
}

export function renderRegisterView(root: HTMLElement, slots: number, api: ApiClient): void {
  root.replaceChildren();
  root.appendChild(el("h2", {}, "Create account"));

  const form = el("form", { id: "register-form" });
  const username = el("input", { name: "username", required: "", autocomplete: "username" });
  const password = el("input", { name: "password", type: "password", required: "" });
  const firstname = el("input", { name: "firstname", required: "" });
  const lastname = el("input", { name: "lastname", required: "" });
  const phone = el("input", { name: "phone", type: "tel", required: "", placeholder: "+306912345678" });

  const position = el("select", { name: "position", "data-testid": "position-select" });
  for (const choice of positionChoices(slots)) {
    position.appendChild(el("option", { value: String(choice) }, String(choice)));
  }

  const usernameError = el("p", { class: "field-error", "data-testid": "username-error" });
  const formError = el("p", { class: "form-error", "data-testid": "form-error" });

  form.appendChild(fieldRow("Username", username));
  form.appendChild(usernameError);
  form.appendChild(fieldRow("Password", password));
  form.appendChild(fieldRow("First name", firstname));
  form.appendChild(fieldRow("Last name", lastname));
  form.appendChild(fieldRow("Phone (for SMS codes)", phone));
  form.appendChild(
    fieldRow(`Position of your genuine code (1..${slots}) — memorize it`, position),
  );
  form.appendChild(formError);
  form.appendChild(el("button", { type: "submit" }, "Register"));

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    usernameError.textContent = "";
    formError.textContent = "";
    const payload: RegistrationForm = {
      username: username.value.trim(),
      password: password.value,
      firstname: firstname.value.trim(),
      lastname: lastname.value.trim(),
      phone: phone.value.trim(),
      position: Number(position.value),
    };
    void api.register(payload).then((result) => {
      if (result.kind === "network") {
        formError.textContent = "Network problem; your input is preserved. Try again.";
        return;
      }
      if (result.kind === "error") {
        if (result.status === 409) {
          usernameError.textContent = "username taken";
        } else {
          formError.textContent = result.body.message;
        }
        return;
      }
      renderGallery(root, result.body.entries, payload.position);
    });
  });

  root.appendChild(form);
}
