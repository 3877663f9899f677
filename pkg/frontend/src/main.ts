/** Browser bootstrap: build the controller against same-origin endpoints,
 * wire DOM events, and keep the page re-rendered on every state change. */

import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import { initialState } from "./state.js";
import { createUi } from "./ui.js";

const START_LAT = 35.0045;
const START_LON = 135.7683;

function boot(): void {
  const api = new ApiClient("");
  const state = initialState(START_LAT, START_LON);
  const controller = new Controller({
    api,
    state,
    onChange: () => ui.render(),
  });
  const ui = createUi(document, controller);

  const byId = <T extends HTMLElement>(id: string): T => {
    const node = document.getElementById(id);
    if (node === null) {
      throw new Error(`missing #${id}`);
    }
    return node as T;
  };

  byId<HTMLFormElement>("join-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const playerId = byId<HTMLInputElement>("join-player-id").value.trim();
    const displayName = byId<HTMLInputElement>("join-display-name").value.trim() || playerId;
    if (playerId) {
      void controller.joinSession(playerId, displayName);
    }
  });

  byId<HTMLInputElement>("consent-toggle").addEventListener("change", (event) => {
    controller.setConsent((event.target as HTMLInputElement).checked);
  });

  byId<HTMLButtonElement>("btn-refresh-map").addEventListener("click", () => {
    void controller.refreshMap();
  });

  byId<HTMLElement>("map-canvas").addEventListener("click", (event) => {
    const rect = (event.currentTarget as Element).getBoundingClientRect();
    const { lat, lon } = ui.clickToLatLon(event.clientX - rect.left, event.clientY - rect.top);
    void controller.teleport(lat, lon);
  });

  document.addEventListener("keydown", (event) => {
    if (document.activeElement instanceof HTMLInputElement) {
      return;
    }
    const direction = {
      ArrowUp: "north",
      ArrowDown: "south",
      ArrowLeft: "west",
      ArrowRight: "east",
    }[event.key] as "north" | "south" | "west" | "east" | undefined;
    if (direction !== undefined) {
      event.preventDefault();
      void controller.walk(direction);
    }
  });

  byId<HTMLButtonElement>("dialog-close").addEventListener("click", () => {
    controller.closeDialog();
  });

  byId<HTMLFormElement>("rebus-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const phrase = byId<HTMLInputElement>("rebus-phrase").value;
    const picker = byId<HTMLElement>("rebus-participants");
    const participants = Array.from(picker.querySelectorAll("input[type=checkbox]"))
      .filter((box) => (box as HTMLInputElement).checked)
      .map((box) => (box as HTMLInputElement).value);
    void controller.submitRebus(phrase, participants);
  });

  ui.render();
}

boot();
