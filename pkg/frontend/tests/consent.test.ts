/** The client-side location-consent contract, proven against a request log:
 * with the toggle off, nothing carrying coordinates leaves the client, and
 * no request at any time ever says consent: false. */

import { describe, expect, it } from "vitest";

import { ConsentViolation } from "../src/api.js";
import { consentsIn, flush, locationBearing, makeHarness } from "./helpers.js";

describe("consent gate", () => {
  it("a fully scripted session with consent off sends zero location-bearing requests", async () => {
    const { server, controller, state } = makeHarness();

    expect(await controller.joinSession("aoi", "Aoi")).toBe("done");
    expect(state.consent).toBe(false);
    expect(controller.locationActionsEnabled()).toBe(false);

    // location-gated actions: all must be blocked locally
    expect(await controller.refreshMap()).toBe("blocked");
    expect(await controller.pushLocation()).toBe("blocked");
    expect(await controller.collectItem("flower#0")).toBe("blocked");
    expect(await controller.dropItem("flower#0")).toBe("blocked");

    // movement still works locally, but nothing is pushed
    const latBefore = state.lat;
    expect(await controller.teleport(35.01, 135.77)).toBe("blocked");
    expect(state.lat).toBe(35.01);
    expect(await controller.walk("north")).toBe("blocked");
    expect(state.lat).toBeGreaterThan(35.01);
    expect(state.lat).not.toBe(latBefore);

    // location-free actions must still flow
    expect(await controller.openDialog("greeter")).toBe("done");
    expect(await controller.choose(0)).toBe("done");
    expect(await controller.acceptQuest("bloom-run")).toBe("done");
    expect(await controller.giveItem("flower#1", "botan")).toBe("done");
    expect(await controller.openRebus("pair-riddle")).toBe("done");
    expect(await controller.submitRebus("Kamo River", ["aoi", "botan"])).toBe("done");
    expect(await controller.refreshQuests()).toBe("done");
    expect(await controller.refreshInventory()).toBe("done");
    await flush();

    // the invariant: not one request carried coordinates
    const offenders = server.log.filter(locationBearing);
    expect(offenders).toEqual([]);

    // and the client was genuinely talking: the location-free traffic happened
    const paths = server.log.map((req) => `${req.method} ${req.path}`);
    expect(paths).toContain("POST /api/session");
    expect(paths).toContain("GET /api/game/npc/greeter/dialog");
    expect(paths).toContain("POST /api/game/npc/greeter/choose");
    expect(paths).toContain("POST /api/game/quest/bloom-run/accept");
    expect(paths).toContain("POST /api/game/item/flower%231/give");
    expect(paths).toContain("POST /api/game/rebus/pair-riddle/answer");
    expect(paths).toContain("GET /api/game/quests");
    expect(paths).toContain("GET /api/game/inventory");
    expect(paths).not.toContain("GET /api/game/map");
    expect(paths).not.toContain("POST /api/track/update");

    // the dialog GET went out bare: no piggybacked location evidence
    const dialogReq = server.log.find((req) => req.path.endsWith("/dialog"));
    expect(dialogReq?.query).toEqual({});

    // and the choose body had no location attached
    const chooseReq = server.log.find((req) => req.path.endsWith("/choose"));
    expect(chooseReq?.body).toEqual({ node: "root", choice: 0 });
  });

  it("no request in a mixed on/off session ever says consent:false", async () => {
    const { server, controller, scheduler } = makeHarness();
    await controller.joinSession("aoi", "Aoi");

    controller.setConsent(true);
    await flush();
    await controller.refreshMap();
    await controller.collectItem("flower#0");
    await scheduler.tick();

    controller.setConsent(false);
    await controller.refreshMap(); // blocked
    await controller.teleport(35.02, 135.78); // local only
    await controller.openDialog("greeter"); // flows, bare

    controller.setConsent(true);
    await flush();
    await controller.walk("east");
    await controller.dropItem("flower#0");
    await flush();

    const everyConsent = server.log.flatMap(consentsIn);
    expect(everyConsent.length).toBeGreaterThan(4);
    expect(everyConsent.every((flag) => flag === true)).toBe(true);
  });

  it("with consent on, gated requests flow and carry consent:true per request", async () => {
    const { server, controller, state, clock } = makeHarness();
    await controller.joinSession("aoi", "Aoi");
    controller.setConsent(true);
    await flush();

    expect(controller.locationActionsEnabled()).toBe(true);
    expect(await controller.refreshMap()).toBe("done");
    expect(await controller.collectItem("flower#0")).toBe("done");

    const mapReq = server.log.find((req) => req.path === "/api/game/map");
    expect(mapReq).toBeDefined();
    expect(mapReq!.query["consent"]).toBe("true");
    expect(Number(mapReq!.query["lat"])).toBeCloseTo(state.lat, 9);
    expect(Number(mapReq!.query["lon"])).toBeCloseTo(state.lon, 9);
    expect(Number(mapReq!.query["timestamp_ms"])).toBe(clock.nowMs);

    const collectReq = server.log.find((req) => req.path.endsWith("/collect"));
    const location = (collectReq!.body as { location: Record<string, unknown> }).location;
    expect(location["consent"]).toBe(true);
    expect(location["lat"]).toBeCloseTo(state.lat, 9);

    // turning consent on pushed our position immediately
    expect(server.log.some((req) => req.path === "/api/track/update")).toBe(true);
  });

  it("polling hits the map endpoint only while consent is on", async () => {
    const { server, controller, scheduler } = makeHarness();
    await controller.joinSession("aoi", "Aoi");

    const mapCalls = () => server.log.filter((req) => req.path === "/api/game/map").length;

    expect(scheduler.timers.size).toBe(0);
    await scheduler.tick();
    expect(mapCalls()).toBe(0);

    controller.setConsent(true);
    await flush();
    expect(controller.pollingActive()).toBe(true);
    const before = mapCalls();
    await scheduler.tick();
    await scheduler.tick();
    expect(mapCalls()).toBe(before + 2);

    controller.setConsent(false);
    expect(controller.pollingActive()).toBe(false);
    expect(scheduler.timers.size).toBe(0);
    const frozen = mapCalls();
    await scheduler.tick();
    expect(mapCalls()).toBe(frozen);
  });

  it("consent off keeps the last map view and marks it stale", async () => {
    const { controller, state } = makeHarness();
    await controller.joinSession("aoi", "Aoi");
    controller.setConsent(true);
    await flush();
    await controller.refreshMap();
    const lastMap = state.map;
    expect(lastMap).not.toBeNull();
    expect(state.mapStale).toBe(false);

    controller.setConsent(false);
    expect(state.map).toBe(lastMap);
    expect(state.mapStale).toBe(true);
    await controller.refreshMap();
    expect(state.map).toBe(lastMap);
  });

  it("the api client itself refuses to serialize a consent:false location", async () => {
    const { server, api } = makeHarness();
    const badFix = { lat: 35.0, lon: 135.0, timestamp_ms: 1, consent: false };

    await expect(api.updateLocation(badFix)).rejects.toBeInstanceOf(ConsentViolation);
    await expect(api.fetchMap(badFix)).rejects.toBeInstanceOf(ConsentViolation);
    await expect(api.openDialog("greeter", badFix)).rejects.toBeInstanceOf(ConsentViolation);
    await expect(api.choose("greeter", "root", 0, badFix)).rejects.toBeInstanceOf(ConsentViolation);
    await expect(api.collectItem("flower#0", badFix)).rejects.toBeInstanceOf(ConsentViolation);
    await expect(api.dropItem("flower#0", badFix, { lat: 35, lon: 135 })).rejects.toBeInstanceOf(
      ConsentViolation,
    );

    expect(server.log).toEqual([]);
  });
});
