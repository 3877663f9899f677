/** DOM rendering. Everything here is a pure projection of ClientViewState;
 * event wiring lives in main.ts and all decisions live in the controller. */

import { Controller } from "./controller.js";
import { markerLabel, metersFromCenter, offsetToLatLon } from "./state.js";
import type { MapEntity, QuestStatus } from "./types.js";

export const MAP_SIZE_PX = 520;

type Attrs = Record<string, string>;

function el(tag: string, attrs: Attrs = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function svgEl(tag: string, attrs: Attrs = {}): SVGElement {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function replaceChildren(target: HTMLElement, ...nodes: (HTMLElement | SVGElement)[]): void {
  target.replaceChildren(...nodes);
}

export interface Ui {
  render(): void;
  /** Convert a map click offset (px) into lat/lon at the current view scale. */
  clickToLatLon(offsetX: number, offsetY: number): { lat: number; lon: number };
}

const MARKER_COLOR: Record<string, string> = {
  player: "#e07a2f",
  npc: "#7a4fbf",
  item: "#2f8f4f",
};

export function createUi(root: Document, controller: Controller): Ui {
  const state = controller.state;

  const byId = (id: string): HTMLElement => {
    const node = root.getElementById(id);
    if (node === null) {
      throw new Error(`missing #${id} in page`);
    }
    return node;
  };

  /** Metres shown from center to map edge; server radius when known. */
  const viewRadiusM = (): number => state.map?.radius_m ?? 300;

  const toPx = (eastM: number, northM: number): { x: number; y: number } => {
    const scale = MAP_SIZE_PX / 2 / viewRadiusM();
    return { x: MAP_SIZE_PX / 2 + eastM * scale, y: MAP_SIZE_PX / 2 - northM * scale };
  };

  function renderMap(): void {
    const svg = byId("map-canvas");
    svg.replaceChildren();
    const radius = viewRadiusM();

    // concentric range rings every quarter of the view radius
    for (let ring = 1; ring <= 4; ring++) {
      svg.appendChild(
        svgEl("circle", {
          cx: String(MAP_SIZE_PX / 2),
          cy: String(MAP_SIZE_PX / 2),
          r: String((MAP_SIZE_PX / 2) * (ring / 4)),
          class: "ring",
        }),
      );
    }
    const rimLabel = svgEl("text", { x: String(MAP_SIZE_PX / 2 + 4), y: "14", class: "ring-label" });
    rimLabel.textContent = `${Math.round(radius)} m to edge`;
    svg.appendChild(rimLabel);

    // my pin, always at the exact center of the view
    const me = svgEl("circle", {
      cx: String(MAP_SIZE_PX / 2),
      cy: String(MAP_SIZE_PX / 2),
      r: "7",
      class: "me",
    });
    svg.appendChild(me);

    const entities: MapEntity[] = state.map?.entities ?? [];
    const centerLat = state.map?.center.lat ?? state.lat;
    const centerLon = state.map?.center.lon ?? state.lon;
    for (const entity of entities) {
      if (state.session !== null && entity.entity_id === state.session.player_id) {
        continue;
      }
      const offset = metersFromCenter(centerLat, centerLon, entity.lat, entity.lon);
      const { x, y } = toPx(offset.east, offset.north);
      const marker = svgEl("circle", {
        cx: String(x),
        cy: String(y),
        r: "6",
        fill: MARKER_COLOR[entity.kind] ?? "#666",
        class: `marker marker-${entity.kind}`,
        "data-entity": entity.entity_id,
      });
      svg.appendChild(marker);
      const label = svgEl("text", { x: String(x + 9), y: String(y + 4), class: "marker-label" });
      label.textContent = markerLabel(entity);
      svg.appendChild(label);
    }

    byId("map-position").textContent =
      `you: ${state.lat.toFixed(5)}, ${state.lon.toFixed(5)}` + (state.mapStale ? " (map stale)" : "");
    const updateBtn = byId("btn-refresh-map") as HTMLButtonElement;
    updateBtn.disabled = !controller.locationActionsEnabled();
  }

  function renderNotices(): void {
    replaceChildren(
      byId("toasts"),
      ...state.toasts.map((toast) => el("div", { class: `toast toast-${toast.level}` }, toast.text)),
    );
    replaceChildren(
      byId("banners"),
      ...state.banners.map((banner) => el("div", { class: "banner" }, banner.text)),
    );
    const hint = byId("hint");
    hint.textContent = state.rangeHint ?? "";
    hint.style.display = state.rangeHint === null ? "none" : "block";
  }

  function renderSession(): void {
    byId("join-form").style.display = state.session === null ? "block" : "none";
    byId("whoami").textContent =
      state.session === null
        ? ""
        : `${state.session.display_name} (${state.session.player_id})`;
    (byId("consent-toggle") as HTMLInputElement).checked = state.consent;
    byId("consent-label").textContent = state.consent
      ? "sharing location with the server"
      : "location sharing OFF — gated actions disabled";
  }

  function renderDialog(): void {
    const panel = byId("dialog-panel");
    if (state.dialog === null) {
      panel.style.display = "none";
      return;
    }
    panel.style.display = "block";
    byId("dialog-npc").textContent = state.dialog.npcId;
    byId("dialog-text").textContent = state.dialog.node.text;
    const choices = byId("dialog-choices");
    replaceChildren(
      choices,
      ...state.dialog.node.choices.map((choice) => {
        const btn = el("button", { class: "choice", "data-choice": String(choice.index) }, choice.label);
        btn.addEventListener("click", () => void controller.choose(choice.index));
        return btn;
      }),
    );
  }

  function questLine(quest: QuestStatus): HTMLElement {
    const line = el("li", { class: `quest quest-${quest.state}` });
    let text = `${quest.title} [${quest.kind}] — ${quest.state}`;
    if (quest.collected !== undefined) {
      text += ` (${quest.collected}/${quest.required})`;
    }
    line.appendChild(el("span", {}, text));
    if (quest.state === "offered") {
      const btn = el("button", {}, "accept");
      btn.addEventListener("click", () => void controller.acceptQuest(quest.quest_id));
      line.appendChild(btn);
    }
    if (quest.kind === "rebus" && quest.state !== "not_started") {
      const btn = el("button", {}, "open rebus");
      btn.addEventListener("click", () => void controller.openRebus(quest.quest_id));
      line.appendChild(btn);
    }
    return line;
  }

  function renderQuests(): void {
    const list = byId("quest-list");
    replaceChildren(list, ...state.quests.map(questLine));
    if (state.quests.length === 0) {
      list.appendChild(el("li", { class: "empty" }, "no quests yet — talk to someone"));
    }
  }

  function renderInventory(): void {
    const gated = !controller.locationActionsEnabled();
    const list = byId("inventory-list");
    const rows = state.inventory.map((item) => {
      const row = el("li", {});
      row.appendChild(el("span", {}, `${item.kind} (${item.item_instance_id})`));
      const dropBtn = el("button", {}, "drop here") as HTMLButtonElement;
      dropBtn.disabled = gated;
      dropBtn.title = gated ? "needs location sharing" : "drop at your position";
      dropBtn.addEventListener("click", () => void controller.dropItem(item.item_instance_id));
      row.appendChild(dropBtn);
      const giveBtn = el("button", {}, "give…") as HTMLButtonElement;
      giveBtn.addEventListener("click", () => {
        const to = window.prompt("give to player id:");
        if (to) {
          void controller.giveItem(item.item_instance_id, to);
        }
      });
      row.appendChild(giveBtn);
      return row;
    });
    replaceChildren(list, ...rows);
    if (state.inventory.length === 0) {
      list.appendChild(el("li", { class: "empty" }, "carrying nothing"));
    }
  }

  function renderNearbyActions(): void {
    const gated = !controller.locationActionsEnabled();
    const list = byId("nearby-list");
    const entities = (state.map?.entities ?? []).filter(
      (entity) => state.session === null || entity.entity_id !== state.session.player_id,
    );
    const rows = entities.map((entity) => {
      const row = el("li", {});
      row.appendChild(el("span", {}, `${markerLabel(entity)} — ${entity.distance_m.toFixed(0)} m`));
      if (entity.kind === "npc") {
        const btn = el("button", {}, "talk");
        btn.addEventListener("click", () => void controller.openDialog(entity.entity_id));
        row.appendChild(btn);
      }
      if (entity.kind === "item") {
        const btn = el("button", {}, "pick up") as HTMLButtonElement;
        btn.disabled = gated;
        btn.title = gated ? "needs location sharing" : "";
        btn.addEventListener("click", () => void controller.collectItem(entity.entity_id));
        row.appendChild(btn);
      }
      return row;
    });
    replaceChildren(list, ...rows);
    if (rows.length === 0) {
      list.appendChild(el("li", { class: "empty" }, "nothing on the map yet"));
    }
  }

  function renderRebus(): void {
    const panel = byId("rebus-panel");
    if (state.rebus === null) {
      panel.style.display = "none";
      return;
    }
    panel.style.display = "block";
    byId("rebus-quest").textContent = state.rebus.questId;
    const card = byId("rebus-fragment");
    if (state.rebus.fragment === null) {
      card.textContent = "no fragment assigned to you yet — ask the quest giver";
    } else {
      replaceChildren(
        card,
        el("div", { class: "fragment-image" }, state.rebus.fragment.image_ref),
        el(
          "div",
          { class: "fragment-label" },
          `fragment ${state.rebus.fragment.fragment_index}: ${state.rebus.fragment.text_label}`,
        ),
      );
    }
    const verdict = byId("rebus-verdict");
    if (state.rebus.missingFragments !== null) {
      verdict.textContent = `not all fragments were seen by the group — missing: ${state.rebus.missingFragments.join(", ")}`;
    } else if (state.rebus.lastVerdict !== null) {
      verdict.textContent = `last verdict: ${state.rebus.lastVerdict}`;
    } else {
      verdict.textContent = "";
    }

    // participant picker: me plus every player currently on the map
    const seen = new Set<string>();
    if (state.session !== null) {
      seen.add(state.session.player_id);
    }
    for (const entity of state.map?.entities ?? []) {
      if (entity.kind === "player") {
        seen.add(entity.entity_id);
      }
    }
    const picker = byId("rebus-participants");
    const existing = new Set(
      Array.from(picker.querySelectorAll("input[type=checkbox]")).map(
        (box) => (box as HTMLInputElement).value,
      ),
    );
    for (const playerId of seen) {
      if (existing.has(playerId)) {
        continue;
      }
      const label = el("label", { class: "participant" });
      const box = el("input", { type: "checkbox", value: playerId }) as HTMLInputElement;
      box.checked = state.session !== null && playerId === state.session.player_id;
      label.appendChild(box);
      label.appendChild(el("span", {}, ` ${playerId}`));
      picker.appendChild(label);
    }
  }

  function render(): void {
    renderSession();
    renderMap();
    renderNotices();
    renderDialog();
    renderQuests();
    renderInventory();
    renderNearbyActions();
    renderRebus();
  }

  function clickToLatLon(offsetX: number, offsetY: number): { lat: number; lon: number } {
    const scale = viewRadiusM() / (MAP_SIZE_PX / 2);
    const eastM = (offsetX - MAP_SIZE_PX / 2) * scale;
    const northM = (MAP_SIZE_PX / 2 - offsetY) * scale;
    const centerLat = state.map?.center.lat ?? state.lat;
    const centerLon = state.map?.center.lon ?? state.lon;
    const { lat, lon } = offsetToLatLon(centerLat, centerLon, eastM, northM);
    return { lat, lon };
  }

  return { render, clickToLatLon };
}
