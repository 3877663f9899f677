/** Test scaffolding: a stub server behind a fake fetch that logs every
 * request, plus helpers to interrogate that log for location payloads. */

import { ApiClient } from "../src/api.js";
import { Controller, Scheduler } from "../src/controller.js";
import { ClientViewState, initialState } from "../src/state.js";

export interface LoggedRequest {
  method: string;
  path: string;
  query: Record<string, string>;
  headers: Record<string, string>;
  body: unknown;
}

type Responder = (req: LoggedRequest) => { status: number; body: unknown };

const PLAZA_LAT = 35.0045;
const PLAZA_LON = 135.7683;

/** Canned happy-path responses, close enough in shape to the real server. */
function defaultRoutes(): [string, string, Responder][] {
  return [
    [
      "POST",
      "/api/session",
      (req) => {
        const body = req.body as { player_id: string; display_name: string };
        return {
          status: 200,
          body: { token: `tok-${body.player_id}`, player_id: body.player_id, display_name: body.display_name },
        };
      },
    ],
    [
      "POST",
      "/api/track/update",
      (req) => {
        const location = (req.body as { location: Record<string, unknown> }).location;
        return {
          status: 200,
          body: {
            entity: { entity_id: "p", kind: "player", history_len: 1, last_fix: location },
            events: [],
          },
        };
      },
    ],
    [
      "GET",
      "/api/game/map",
      (req) => ({
        status: 200,
        body: {
          center: { lat: Number(req.query["lat"]), lon: Number(req.query["lon"]) },
          radius_m: 250,
          entities: [],
        },
      }),
    ],
    ["GET", "/api/game/quests", () => ({ status: 200, body: { quests: [] } })],
    ["GET", "/api/game/inventory", () => ({ status: 200, body: { inventory: [] } })],
    [
      "GET",
      "/api/game/rebus/*/fragment",
      () => ({
        status: 200,
        body: { fragment: { fragment_index: 0, image_ref: "glyph-0", text_label: "a river" } },
      }),
    ],
    [
      "GET",
      "/api/game/npc/*/dialog",
      () => ({
        status: 200,
        body: {
          npc_id: "greeter",
          node: {
            node_id: "root",
            text: "welcome",
            choices: [
              { index: 0, label: "offer me work" },
              { index: 1, label: "bye" },
            ],
          },
        },
      }),
    ],
    [
      "POST",
      "/api/game/npc/*/choose",
      () => ({
        status: 200,
        body: { effect_result: { effect: "none" }, node: null, dialog_ended: true },
      }),
    ],
    [
      "POST",
      "/api/game/quest/*/accept",
      () => ({
        status: 200,
        body: { quest: { quest_id: "q", title: "A Quest", kind: "collect", state: "active" } },
      }),
    ],
    [
      "POST",
      "/api/game/item/*/collect",
      () => ({
        status: 200,
        body: { inventory: [{ item_instance_id: "flower#0", kind: "flower" }], quests: [] },
      }),
    ],
    ["POST", "/api/game/item/*/drop", () => ({ status: 200, body: { inventory: [] } })],
    ["POST", "/api/game/item/*/give", () => ({ status: 200, body: { inventory: [] } })],
    [
      "POST",
      "/api/game/rebus/*/answer",
      () => ({ status: 200, body: { accepted: true, reason: "ACCEPTED" } }),
    ],
    ["GET", "/api/health", () => ({ status: 200, body: { status: "ok", events: 0, digest: "0" } })],
  ];
}

export class StubServer {
  readonly log: LoggedRequest[] = [];
  private readonly routes: [string, string, Responder][] = defaultRoutes();

  /** Override a route; `pattern` may hold one `*` wildcard path segment. */
  respond(method: string, pattern: string, responder: Responder): void {
    this.routes.unshift([method, pattern, responder]);
  }

  readonly fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input);
    const query: Record<string, string> = {};
    url.searchParams.forEach((value, key) => {
      query[key] = value;
    });
    const headers: Record<string, string> = {};
    for (const [key, value] of Object.entries(init?.headers ?? {})) {
      headers[key.toLowerCase()] = value as string;
    }
    const req: LoggedRequest = {
      method: init?.method ?? "GET",
      path: url.pathname,
      query,
      headers,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    this.log.push(req);
    for (const [method, pattern, responder] of this.routes) {
      if (method === req.method && matchPath(pattern, req.path)) {
        const out = responder(req);
        return new Response(JSON.stringify(out.body), {
          status: out.status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ error: "UNKNOWN", message: `no stub for ${req.method} ${req.path}` }), {
      status: 404,
      headers: { "Content-Type": "application/json" },
    });
  };
}

function matchPath(pattern: string, path: string): boolean {
  const patternParts = pattern.split("/");
  const pathParts = path.split("/");
  if (patternParts.length !== pathParts.length) {
    return false;
  }
  return patternParts.every((part, i) => part === "*" || part === pathParts[i]);
}

// --------------------------------------------------------------- analysis

/** Does any object anywhere in this value carry a lat/lon pair? */
function treeHasLatLon(value: unknown): boolean {
  if (Array.isArray(value)) {
    return value.some(treeHasLatLon);
  }
  if (value !== null && typeof value === "object") {
    const record = value as Record<string, unknown>;
    if ("lat" in record && "lon" in record) {
      return true;
    }
    return Object.values(record).some(treeHasLatLon);
  }
  return false;
}

/** A request is location-bearing if coordinates ride in its query or body. */
export function locationBearing(req: LoggedRequest): boolean {
  if ("lat" in req.query || "lon" in req.query || "timestamp_ms" in req.query) {
    return true;
  }
  return treeHasLatLon(req.body);
}

/** Every consent flag found anywhere in the request (query and body). */
export function consentsIn(req: LoggedRequest): boolean[] {
  const found: boolean[] = [];
  if ("consent" in req.query) {
    found.push(req.query["consent"] === "true");
  }
  const walk = (value: unknown): void => {
    if (Array.isArray(value)) {
      value.forEach(walk);
      return;
    }
    if (value !== null && typeof value === "object") {
      for (const [key, inner] of Object.entries(value as Record<string, unknown>)) {
        if (key === "consent" && typeof inner === "boolean") {
          found.push(inner);
        }
        walk(inner);
      }
    }
  };
  walk(req.body);
  return found;
}

// ------------------------------------------------------------- fake time

export class FakeScheduler implements Scheduler {
  private nextId = 1;
  readonly timers = new Map<number, { fn: () => void; ms: number }>();

  setInterval(fn: () => void, ms: number): unknown {
    const id = this.nextId++;
    this.timers.set(id, { fn, ms });
    return id;
  }

  clearInterval(handle: unknown): void {
    this.timers.delete(handle as number);
  }

  /** Fire every registered interval once and drain microtasks. */
  async tick(): Promise<void> {
    for (const { fn } of [...this.timers.values()]) {
      fn();
    }
    await flush();
  }
}

/** Let pending promise chains settle. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

// ------------------------------------------------------------- assembly

export interface Harness {
  server: StubServer;
  api: ApiClient;
  state: ClientViewState;
  controller: Controller;
  scheduler: FakeScheduler;
  clock: { nowMs: number };
}

export function makeHarness(): Harness {
  const server = new StubServer();
  const api = new ApiClient("http://stub.test", server.fetch);
  const state = initialState(PLAZA_LAT, PLAZA_LON);
  const scheduler = new FakeScheduler();
  const clock = { nowMs: 1_700_000_000_000 };
  const controller = new Controller({
    api,
    state,
    scheduler,
    now: () => clock.nowMs,
    pollIntervalMs: 1000,
  });
  return { server, api, state, controller, scheduler, clock };
}

export { PLAZA_LAT, PLAZA_LON };
