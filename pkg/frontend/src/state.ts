/** Client-side view state and the small amount of geometry the UI needs.
 *
 * Almost everything here is a cache of server responses; the only state the
 * client owns is the session, the manually steered location, the consent
 * toggle, and transient notices.
 */

import type {
  DialogNode,
  FragmentCard,
  InventoryItem,
  MapEntity,
  MapView,
  QuestStatus,
  SessionInfo,
} from "./types.js";

export const EARTH_RADIUS_M = 6_371_000;
const DEG = Math.PI / 180;

export type Direction = "north" | "south" | "east" | "west";

export interface Toast {
  level: "info" | "error";
  text: string;
}

export interface Banner {
  text: string;
}

export interface OpenDialog {
  npcId: string;
  node: DialogNode;
}

export interface RebusPanel {
  questId: string;
  fragment: FragmentCard | null;
  /** Missing fragment indices from the last INCOMPLETE_COVERAGE verdict. */
  missingFragments: number[] | null;
  lastVerdict: string | null;
}

export interface ClientViewState {
  session: SessionInfo | null;
  /** Manually steered position; never set by the server. */
  lat: number;
  lon: number;
  /** The sticky consent toggle. Emitted per-request; gates all location traffic. */
  consent: boolean;
  /** Last map the server drew for us (kept verbatim while consent is off). */
  map: MapView | null;
  /** True when `map` predates a consent-off stretch or a local move. */
  mapStale: boolean;
  dialog: OpenDialog | null;
  quests: QuestStatus[];
  inventory: InventoryItem[];
  rebus: RebusPanel | null;
  toasts: Toast[];
  banners: Banner[];
  /** "Move closer" hint from the last OUT_OF_RANGE rejection. */
  rangeHint: string | null;
}

export function initialState(lat: number, lon: number): ClientViewState {
  return {
    session: null,
    lat,
    lon,
    consent: false,
    map: null,
    mapStale: false,
    dialog: null,
    quests: [],
    inventory: [],
    rebus: null,
    toasts: [],
    banners: [],
    rangeHint: null,
  };
}

/** One walking step: d metres along a compass direction. */
export function stepFrom(
  lat: number,
  lon: number,
  direction: Direction,
  distanceM: number,
): { lat: number; lon: number } {
  const bearing = { north: 0, east: 90, south: 180, west: 270 }[direction] * DEG;
  const dNorth = distanceM * Math.cos(bearing);
  const dEast = distanceM * Math.sin(bearing);
  const newLat = lat + (dNorth / EARTH_RADIUS_M) / DEG;
  const newLon = lon + (dEast / (EARTH_RADIUS_M * Math.cos(lat * DEG))) / DEG;
  return { lat: newLat, lon: newLon };
}

/** Local flat-earth projection of a point relative to a view center, in metres. */
export function metersFromCenter(
  centerLat: number,
  centerLon: number,
  lat: number,
  lon: number,
): { east: number; north: number } {
  const north = (lat - centerLat) * DEG * EARTH_RADIUS_M;
  const east = (lon - centerLon) * DEG * EARTH_RADIUS_M * Math.cos(centerLat * DEG);
  return { east, north };
}

/** Inverse of metersFromCenter: where does a local offset land? */
export function offsetToLatLon(
  centerLat: number,
  centerLon: number,
  eastM: number,
  northM: number,
): { lat: number; lon: number } {
  const lat = centerLat + (northM / EARTH_RADIUS_M) / DEG;
  const lon = centerLon + (eastM / (EARTH_RADIUS_M * Math.cos(centerLat * DEG))) / DEG;
  return { lat, lon };
}

/** Label a map marker: kind, item kind when known, and the id. */
export function markerLabel(entity: MapEntity): string {
  const kind = entity.item_kind ? `${entity.kind}:${entity.item_kind}` : entity.kind;
  return `${kind} ${entity.entity_id}`;
}

export function pushToast(state: ClientViewState, level: Toast["level"], text: string): void {
  state.toasts.push({ level, text });
  if (state.toasts.length > 5) {
    state.toasts.splice(0, state.toasts.length - 5);
  }
}

export function pushBanner(state: ClientViewState, text: string): void {
  state.banners.push({ text });
  if (state.banners.length > 3) {
    state.banners.splice(0, state.banners.length - 3);
  }
}
