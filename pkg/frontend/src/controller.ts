/** DOM-free orchestration between the view state and the API client.
 *
 * The rules this layer owns:
 *
 * - While the consent toggle is off, no request carrying a location leaves
 *   the client. Actions that cannot work without one (map refresh, track
 *   pushes, item pickup/drop) are blocked locally and the UI greys them out;
 *   actions where the location is optional evidence (dialog) are attempted
 *   without it so the server can decide.
 * - Consent is re-emitted inside every individual location report even
 *   though the toggle itself is sticky.
 * - At most one mutating request is in flight at a time.
 * - The map poll runs on a fixed interval and only while consent is on.
 */

import { ApiClient, ApiError, ConsentViolation } from "./api.js";
import {
  ClientViewState,
  Direction,
  pushBanner,
  pushToast,
  stepFrom,
} from "./state.js";
import type { EffectResult, LocationReport, Point, QuestEvent } from "./types.js";

export type ActionOutcome = "done" | "blocked" | "busy" | "error";

export interface Scheduler {
  setInterval(fn: () => void, ms: number): unknown;
  clearInterval(handle: unknown): void;
}

export interface ControllerOptions {
  api: ApiClient;
  state: ClientViewState;
  /** Wall clock in milliseconds; injectable for tests. */
  now?: () => number;
  scheduler?: Scheduler;
  pollIntervalMs?: number;
  walkSpeedMps?: number;
  walkTickS?: number;
  onChange?: () => void;
}

export class Controller {
  readonly state: ClientViewState;
  readonly pollIntervalMs: number;
  readonly walkSpeedMps: number;
  readonly walkTickS: number;

  private readonly api: ApiClient;
  private readonly now: () => number;
  private readonly scheduler: Scheduler;
  private readonly onChange: () => void;
  private pollHandle: unknown = null;
  private mutationInFlight = false;
  private mapFetchInFlight = false;

  constructor(opts: ControllerOptions) {
    this.api = opts.api;
    this.state = opts.state;
    this.now = opts.now ?? (() => Date.now());
    this.scheduler = opts.scheduler ?? {
      setInterval: (fn, ms) => setInterval(fn, ms),
      clearInterval: (handle) => clearInterval(handle as ReturnType<typeof setInterval>),
    };
    this.pollIntervalMs = opts.pollIntervalMs ?? 3000;
    this.walkSpeedMps = opts.walkSpeedMps ?? 1.4;
    this.walkTickS = opts.walkTickS ?? 1.0;
    this.onChange = opts.onChange ?? (() => {});
  }

  // ------------------------------------------------------------ consent

  /** Location-gated actions are enabled only with a session and consent on. */
  locationActionsEnabled(): boolean {
    return this.state.session !== null && this.state.consent;
  }

  /** The poll is running only while consent is on. */
  pollingActive(): boolean {
    return this.pollHandle !== null;
  }

  setConsent(on: boolean): void {
    if (this.state.consent === on) {
      return;
    }
    this.state.consent = on;
    if (on) {
      this.startPolling();
      void this.pushLocation();
    } else {
      this.stopPolling();
      this.state.mapStale = true;
      pushToast(this.state, "info", "location sharing off: map frozen, location actions disabled");
    }
    this.onChange();
  }

  private startPolling(): void {
    if (this.pollHandle !== null || this.state.session === null) {
      return;
    }
    this.pollHandle = this.scheduler.setInterval(() => {
      void this.refreshMap();
    }, this.pollIntervalMs);
  }

  private stopPolling(): void {
    if (this.pollHandle !== null) {
      this.scheduler.clearInterval(this.pollHandle);
      this.pollHandle = null;
    }
  }

  /** The one place location reports are minted. Returns null without consent. */
  private currentFix(): LocationReport | null {
    if (!this.state.consent) {
      return null;
    }
    return {
      lat: this.state.lat,
      lon: this.state.lon,
      timestamp_ms: Math.round(this.now()),
      consent: true,
    };
  }

  private blockGated(what: string): ActionOutcome {
    pushToast(this.state, "info", `${what} needs location sharing — enable the consent toggle`);
    this.onChange();
    return "blocked";
  }

  // ------------------------------------------------------------ session

  async joinSession(playerId: string, displayName: string): Promise<ActionOutcome> {
    try {
      this.state.session = await this.api.openSession(playerId, displayName);
      await this.refreshQuests();
      await this.refreshInventory();
      if (this.state.consent) {
        this.startPolling();
      }
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    }
  }

  // ----------------------------------------------------------- movement

  /** Click-to-teleport: always moves the local pin; pushes only with consent. */
  async teleport(lat: number, lon: number): Promise<ActionOutcome> {
    this.state.lat = lat;
    this.state.lon = lon;
    this.state.mapStale = true;
    this.onChange();
    if (!this.state.consent) {
      return "blocked";
    }
    return this.pushLocation();
  }

  /** One arrow-key step at the fixed walking speed. */
  async walk(direction: Direction): Promise<ActionOutcome> {
    const next = stepFrom(
      this.state.lat,
      this.state.lon,
      direction,
      this.walkSpeedMps * this.walkTickS,
    );
    return this.teleport(next.lat, next.lon);
  }

  /** Report the current position to the tracker. Gated on consent. */
  async pushLocation(): Promise<ActionOutcome> {
    const fix = this.currentFix();
    if (fix === null) {
      return this.blockGated("reporting your position");
    }
    return this.mutate(async () => {
      const result = await this.api.updateLocation(fix);
      this.applyQuestEvents(result.events);
    });
  }

  // -------------------------------------------------------------- reads

  async refreshMap(): Promise<ActionOutcome> {
    const fix = this.currentFix();
    if (fix === null) {
      return this.blockGated("refreshing the map");
    }
    if (this.mapFetchInFlight) {
      return "busy";
    }
    this.mapFetchInFlight = true;
    try {
      this.state.map = await this.api.fetchMap(fix);
      this.state.mapStale = false;
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    } finally {
      this.mapFetchInFlight = false;
    }
  }

  async refreshQuests(): Promise<ActionOutcome> {
    try {
      this.state.quests = await this.api.fetchQuests();
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    }
  }

  async refreshInventory(): Promise<ActionOutcome> {
    try {
      this.state.inventory = await this.api.fetchInventory();
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    }
  }

  /** Open the rebus panel for a quest and load our fragment card. */
  async openRebus(questId: string): Promise<ActionOutcome> {
    try {
      const fragment = await this.api.fetchFragment(questId);
      this.state.rebus = { questId, fragment, missingFragments: null, lastVerdict: null };
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    }
  }

  // ------------------------------------------------------------- dialog

  /** Talk to an NPC. Location rides along only when consent is on; NPCs
   * that need proximity evidence will answer OUT_OF_RANGE otherwise. */
  async openDialog(npcId: string): Promise<ActionOutcome> {
    return this.mutate(async () => {
      const result = await this.api.openDialog(npcId, this.currentFix());
      this.state.dialog = { npcId, node: result.node };
      this.state.rangeHint = null;
    });
  }

  async choose(choiceIndex: number): Promise<ActionOutcome> {
    const dialog = this.state.dialog;
    if (dialog === null) {
      pushToast(this.state, "error", "no dialog is open");
      this.onChange();
      return "error";
    }
    return this.mutate(async () => {
      const result = await this.api.choose(
        dialog.npcId,
        dialog.node.node_id,
        choiceIndex,
        this.currentFix(),
      );
      this.applyEffect(result.effect_result);
      this.state.dialog =
        result.dialog_ended || result.node === null
          ? null
          : { npcId: dialog.npcId, node: result.node };
    });
  }

  closeDialog(): void {
    this.state.dialog = null;
    this.onChange();
  }

  // -------------------------------------------------------------- quests

  async acceptQuest(questId: string): Promise<ActionOutcome> {
    return this.mutate(async () => {
      const result = await this.api.acceptQuest(questId);
      pushBanner(this.state, `Quest accepted: ${result.quest.title}`);
      await this.refreshQuests();
    });
  }

  // --------------------------------------------------------------- items

  async collectItem(itemId: string): Promise<ActionOutcome> {
    const fix = this.currentFix();
    if (fix === null) {
      return this.blockGated("picking up items");
    }
    return this.mutate(async () => {
      const result = await this.api.collectItem(itemId, fix);
      this.state.inventory = result.inventory;
      this.applyQuestEvents(result.quests);
      this.state.rangeHint = null;
      await this.refreshQuests();
    });
  }

  async dropItem(itemId: string, at?: Point): Promise<ActionOutcome> {
    const fix = this.currentFix();
    if (fix === null) {
      return this.blockGated("dropping items");
    }
    return this.mutate(async () => {
      const target = at ?? { lat: this.state.lat, lon: this.state.lon };
      const result = await this.api.dropItem(itemId, fix, target);
      this.state.inventory = result.inventory;
    });
  }

  async giveItem(itemId: string, toPlayer: string): Promise<ActionOutcome> {
    return this.mutate(async () => {
      const result = await this.api.giveItem(itemId, toPlayer);
      this.state.inventory = result.inventory;
      pushBanner(this.state, `Handed over ${itemId} to ${toPlayer}`);
    });
  }

  // -------------------------------------------------------------- rebus

  async submitRebus(phrase: string, participants: string[]): Promise<ActionOutcome> {
    const rebus = this.state.rebus;
    if (rebus === null) {
      pushToast(this.state, "error", "open a rebus quest first");
      this.onChange();
      return "error";
    }
    return this.mutate(async () => {
      const verdict = await this.api.submitRebus(rebus.questId, phrase, participants);
      rebus.missingFragments = null;
      rebus.lastVerdict = verdict.reason;
      pushBanner(this.state, `Answer accepted — quest complete!`);
      await this.refreshQuests();
    });
  }

  // ----------------------------------------------------------- internals

  /** Run one mutating request, refusing to overlap with another. */
  private async mutate(fn: () => Promise<void>): Promise<ActionOutcome> {
    if (this.mutationInFlight) {
      pushToast(this.state, "info", "still waiting on the previous action");
      this.onChange();
      return "busy";
    }
    this.mutationInFlight = true;
    try {
      await fn();
      this.onChange();
      return "done";
    } catch (err) {
      return this.report(err);
    } finally {
      this.mutationInFlight = false;
    }
  }

  private applyQuestEvents(events: QuestEvent[]): void {
    for (const event of events) {
      pushBanner(this.state, `Quest ${event.quest_id}: ${event.state}`);
    }
    if (events.length > 0) {
      void this.refreshQuests();
    }
  }

  private applyEffect(effect: EffectResult): void {
    switch (effect.effect) {
      case "none":
        break;
      case "offer_quest":
        pushBanner(this.state, `Quest offered: ${effect.title} (${effect.quest_id})`);
        void this.refreshQuests();
        break;
      case "give_fragment": {
        const card = effect.fragment;
        pushBanner(this.state, `Fragment ${card.fragment_index} received: ${card.text_label}`);
        const rebus = this.state.rebus;
        if (rebus !== null) {
          rebus.fragment = card;
        }
        break;
      }
      case "report_quest_status":
        pushBanner(
          this.state,
          `${effect.status.title}: ${effect.status.state}` +
            (effect.status.collected !== undefined
              ? ` (${effect.status.collected}/${effect.status.required})`
              : ""),
        );
        break;
      case "complete_quest_check":
        pushBanner(this.state, "Quest check ran — see quest log");
        void this.refreshQuests();
        break;
    }
  }

  /** Map one failure onto the UI: hints for range, lists for coverage,
   * toasts for everything else. Never blocks the event loop. */
  private report(err: unknown): ActionOutcome {
    if (err instanceof ApiError) {
      if (err.body.error === "OUT_OF_RANGE") {
        this.state.rangeHint = `Out of range — move closer. (${err.body.message})`;
      } else if (err.body.error === "INCOMPLETE_COVERAGE" && this.state.rebus !== null) {
        this.state.rebus.missingFragments = err.body.missing_fragments ?? [];
        this.state.rebus.lastVerdict = err.body.error;
        pushToast(this.state, "error", `missing fragments: ${(err.body.missing_fragments ?? []).join(", ")}`);
      } else {
        if (this.state.rebus !== null && ["TOO_FEW_PLAYERS", "WRONG_PHRASE", "QUEST_INACTIVE"].includes(err.body.error)) {
          this.state.rebus.lastVerdict = err.body.error;
          this.state.rebus.missingFragments = null;
        }
        pushToast(this.state, "error", `${err.status} ${err.body.error}: ${err.body.message}`);
      }
      this.onChange();
      return "error";
    }
    if (err instanceof ConsentViolation) {
      pushToast(this.state, "info", err.message);
      this.onChange();
      return "blocked";
    }
    pushToast(this.state, "error", String(err));
    this.onChange();
    return "error";
  }
}
