/** Typed client for the geoquest JSON API.
 *
 * Every method that carries a location refuses to build the request unless
 * the report says consent: true. The guard makes the client structurally
 * unable to put a non-consenting location on the wire; callers are expected
 * to grey out gated actions long before this throws.
 */

import type {
  AcceptResult,
  ChooseResult,
  CollectResult,
  DialogOpenResult,
  ErrorBody,
  FragmentCard,
  HealthInfo,
  InventoryItem,
  InventoryResult,
  LocationReport,
  MapView,
  Point,
  QuestStatus,
  RebusVerdict,
  SessionInfo,
  TrackUpdateResult,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** A non-2xx response, decoded into the server's error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(`${status} ${body.error}: ${body.message}`);
    this.name = "ApiError";
  }
}

/** Thrown when code tries to send a location without consent. */
export class ConsentViolation extends Error {
  constructor(what: string) {
    super(`refusing to send ${what}: location consent is off`);
    this.name = "ConsentViolation";
  }
}

function requireConsent(location: LocationReport, what: string): LocationReport {
  if (!location.consent) {
    throw new ConsentViolation(what);
  }
  return location;
}

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  // ----------------------------------------------------------- plumbing

  private async request<T>(
    method: string,
    path: string,
    opts: { query?: Record<string, string | number | boolean>; body?: unknown } = {},
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (opts.query) {
      const qs = new URLSearchParams();
      for (const [key, value] of Object.entries(opts.query)) {
        qs.set(key, String(value));
      }
      url += `?${qs.toString()}`;
    }
    const headers: Record<string, string> = {};
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const init: RequestInit = { method, headers };
    if (opts.body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(opts.body);
    }
    const response = await this.fetchImpl(url, init);
    const text = await response.text();
    const data: unknown = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const body =
        data && typeof data === "object"
          ? (data as ErrorBody)
          : { error: "UNKNOWN", message: text };
      throw new ApiError(response.status, body);
    }
    return data as T;
  }

  private locationQuery(location: LocationReport): Record<string, string | number | boolean> {
    return {
      lat: location.lat,
      lon: location.lon,
      timestamp_ms: location.timestamp_ms,
      consent: location.consent,
    };
  }

  // ------------------------------------------------------------ session

  async openSession(playerId: string, displayName: string): Promise<SessionInfo> {
    const info = await this.request<SessionInfo>("POST", "/api/session", {
      body: { player_id: playerId, display_name: displayName },
    });
    this.token = info.token;
    return info;
  }

  // ----------------------------------------------------------- tracking

  async updateLocation(location: LocationReport): Promise<TrackUpdateResult> {
    requireConsent(location, "a track update");
    return this.request("POST", "/api/track/update", { body: { location } });
  }

  // --------------------------------------------------------- game reads

  async fetchMap(location: LocationReport): Promise<MapView> {
    requireConsent(location, "a map query");
    return this.request("GET", "/api/game/map", { query: this.locationQuery(location) });
  }

  async fetchQuests(): Promise<QuestStatus[]> {
    const out = await this.request<{ quests: QuestStatus[] }>("GET", "/api/game/quests");
    return out.quests;
  }

  async fetchInventory(): Promise<InventoryItem[]> {
    const out = await this.request<InventoryResult>("GET", "/api/game/inventory");
    return out.inventory;
  }

  async fetchFragment(questId: string): Promise<FragmentCard | null> {
    const out = await this.request<{ fragment: FragmentCard | null }>(
      "GET",
      `/api/game/rebus/${encodeURIComponent(questId)}/fragment`,
    );
    return out.fragment;
  }

  async health(): Promise<HealthInfo> {
    return this.request("GET", "/api/health");
  }

  // -------------------------------------------------------- game writes

  async openDialog(npcId: string, location: LocationReport | null): Promise<DialogOpenResult> {
    const opts: { query?: Record<string, string | number | boolean> } = {};
    if (location !== null) {
      requireConsent(location, "a dialog request");
      opts.query = this.locationQuery(location);
    }
    return this.request("GET", `/api/game/npc/${encodeURIComponent(npcId)}/dialog`, opts);
  }

  async choose(
    npcId: string,
    nodeId: string,
    choiceIndex: number,
    location: LocationReport | null,
  ): Promise<ChooseResult> {
    const body: Record<string, unknown> = { node: nodeId, choice: choiceIndex };
    if (location !== null) {
      body["location"] = requireConsent(location, "a dialog choice");
    }
    return this.request("POST", `/api/game/npc/${encodeURIComponent(npcId)}/choose`, { body });
  }

  async acceptQuest(questId: string): Promise<AcceptResult> {
    return this.request("POST", `/api/game/quest/${encodeURIComponent(questId)}/accept`);
  }

  async collectItem(itemId: string, location: LocationReport): Promise<CollectResult> {
    requireConsent(location, "an item pickup");
    return this.request("POST", `/api/game/item/${encodeURIComponent(itemId)}/collect`, {
      body: { location },
    });
  }

  async dropItem(itemId: string, location: LocationReport, at: Point): Promise<InventoryResult> {
    requireConsent(location, "an item drop");
    return this.request("POST", `/api/game/item/${encodeURIComponent(itemId)}/drop`, {
      body: { location, at },
    });
  }

  async giveItem(itemId: string, toPlayer: string): Promise<InventoryResult> {
    return this.request("POST", `/api/game/item/${encodeURIComponent(itemId)}/give`, {
      body: { to: toPlayer },
    });
  }

  async submitRebus(
    questId: string,
    phrase: string,
    participants: string[],
  ): Promise<RebusVerdict> {
    return this.request("POST", `/api/game/rebus/${encodeURIComponent(questId)}/answer`, {
      body: { phrase, participants },
    });
  }
}
