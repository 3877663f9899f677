/** Wire types for the geoquest JSON API. Field names mirror the server. */

/** A location report. Consent travels inside every single report. */
export interface LocationReport {
  lat: number;
  lon: number;
  timestamp_ms: number;
  consent: boolean;
}

export interface Point {
  lat: number;
  lon: number;
}

export interface SessionInfo {
  token: string;
  player_id: string;
  display_name: string;
}

export type EntityKind = "player" | "npc" | "item";

export interface MapEntity {
  entity_id: string;
  kind: EntityKind;
  lat: number;
  lon: number;
  distance_m: number;
  item_kind?: string;
}

export interface MapView {
  center: Point;
  radius_m: number;
  entities: MapEntity[];
}

export type QuestKind = "reach_target" | "collect" | "rebus";
export type QuestStateName = "offered" | "active" | "completed" | "not_started";

export interface QuestStatus {
  quest_id: string;
  title: string;
  kind: QuestKind;
  state: QuestStateName;
  collected?: number;
  required?: number;
  fragment_index?: number | null;
}

export interface InventoryItem {
  item_instance_id: string;
  kind: string;
}

export interface FragmentCard {
  fragment_index: number;
  image_ref: string;
  text_label: string;
}

export interface DialogChoice {
  index: number;
  label: string;
}

export interface DialogNode {
  node_id: string;
  text: string;
  choices: DialogChoice[];
}

export interface DialogOpenResult {
  npc_id: string;
  node: DialogNode;
}

export type EffectResult =
  | { effect: "none" }
  | { effect: "offer_quest"; quest_id: string; status: string; title: string }
  | { effect: "give_fragment"; fragment: FragmentCard }
  | { effect: "report_quest_status"; status: QuestStatus }
  | { effect: "complete_quest_check"; [key: string]: unknown };

export interface ChooseResult {
  effect_result: EffectResult;
  node: DialogNode | null;
  dialog_ended: boolean;
}

export interface QuestEvent {
  quest_id: string;
  state: string;
}

export interface TrackUpdateResult {
  entity: {
    entity_id: string;
    kind: EntityKind;
    history_len: number;
    last_fix: LocationReport | null;
  };
  events: QuestEvent[];
}

export interface AcceptResult {
  quest: QuestStatus;
}

export interface CollectResult {
  inventory: InventoryItem[];
  quests: QuestEvent[];
}

export interface InventoryResult {
  inventory: InventoryItem[];
}

export interface RebusVerdict {
  accepted: boolean;
  reason: string;
  missing_fragments?: number[];
  inactive_players?: string[];
  message?: string;
}

export interface HealthInfo {
  status: string;
  events: number;
  digest: string;
}

/** Error envelope every non-2xx response carries. */
export interface ErrorBody {
  error: string;
  message: string;
  missing_fragments?: number[];
  inactive_players?: string[];
  problems?: { where: string; why: string }[];
  [key: string]: unknown;
}
