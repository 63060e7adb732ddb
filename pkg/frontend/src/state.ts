/**
 * Pure board state: which chips are pinned where, and which connections
 * exist in what local status. Rendering reads this; gestures mutate it.
 */

export type LocalStatus = "pending" | "acknowledged" | "rejected";
export type ConnectionAction = "confirm" | "reject" | "propose";

export interface PlacedChip {
  token: string;
  pseudonym: string;
  x: number;
  y: number;
}

export interface Connection {
  id: string;
  eventId: string;
  sourceToken: string;
  predicate: string;
  targetToken: string;
  action: ConnectionAction;
  localStatus: LocalStatus;
  weight: number | null;
}

const PLAYER_KEY = "gamekg.player";

/** Stable anonymous identity, minted once per browser profile. */
export function playerId(storage: Storage): string {
  let id = storage.getItem(PLAYER_KEY);
  if (!id) {
    id = `player-${randomHex(16)}`;
    storage.setItem(PLAYER_KEY, id);
  }
  return id;
}

export function freshEventId(): string {
  const crypto = globalThis.crypto;
  if (crypto && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `evt-${randomHex(32)}`;
}

function randomHex(length: number): string {
  let out = "";
  for (let i = 0; i < length; i += 1) {
    out += Math.floor(Math.random() * 16).toString(16);
  }
  return out;
}

export class BoardState {
  readonly placed = new Map<string, PlacedChip>();
  readonly connections: Connection[] = [];

  place(token: string, pseudonym: string, x: number, y: number): PlacedChip {
    const chip: PlacedChip = { token, pseudonym, x, y };
    this.placed.set(token, chip);
    return chip;
  }

  isPlaced(token: string): boolean {
    return this.placed.has(token);
  }

  /** One in-flight gesture per triple: a second identical drag is a no-op. */
  hasOpenConnection(source: string, predicate: string, target: string): boolean {
    return this.connections.some(
      (c) =>
        c.sourceToken === source &&
        c.predicate === predicate &&
        c.targetToken === target &&
        c.localStatus !== "rejected",
    );
  }

  addConnection(
    source: string,
    predicate: string,
    target: string,
    action: ConnectionAction,
  ): Connection {
    const connection: Connection = {
      id: `conn-${this.connections.length}-${freshEventId()}`,
      eventId: freshEventId(),
      sourceToken: source,
      predicate,
      targetToken: target,
      action,
      localStatus: "pending",
      weight: null,
    };
    this.connections.push(connection);
    return connection;
  }

  acknowledge(id: string, weight: number): Connection | undefined {
    const connection = this.connections.find((c) => c.id === id);
    if (connection) {
      connection.localStatus = "acknowledged";
      connection.weight = weight;
    }
    return connection;
  }

  /** Server turned the gesture down: drop the optimistic edge. */
  discard(id: string): void {
    const index = this.connections.findIndex((c) => c.id === id);
    if (index >= 0) {
      this.connections.splice(index, 1);
    }
  }
}
